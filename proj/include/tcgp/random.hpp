#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace tcgp {

/// Identifies an independent random stream: identical (seed, stream) pairs
/// reproduce identical draws on any thread.
struct SeededRng {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_index = 0;
};

/// Random source for one stream. Not thread-safe; use one per thread/path.
class RandomStream {
public:
    explicit RandomStream(SeededRng id);

    /// Uniform on the open interval (0,1).
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }
    double normal();
    double exponential() { return -std::log(uniform()); }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace tcgp
