#include "tcgp/random.hpp"

#include <cmath>

namespace tcgp {

RandomStream::RandomStream(SeededRng id) {
    std::seed_seq seq{static_cast<std::uint32_t>(id.master_seed),
                      static_cast<std::uint32_t>(id.master_seed >> 32),
                      static_cast<std::uint32_t>(id.stream_index),
                      static_cast<std::uint32_t>(id.stream_index >> 32)};
    engine_.seed(seq);
}

// Marsaglia polar method; keeps the second variate for the next call.
double RandomStream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, q;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        q = u * u + v * v;
    } while (q >= 1.0 || q == 0.0);
    const double f = std::sqrt(-2.0 * std::log(q) / q);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
}

}  // namespace tcgp
