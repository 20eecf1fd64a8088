#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "tcgp/errors.hpp"
#include "tcgp/fraccalc.hpp"
#include "tcgp/gaussian.hpp"
#include "volterra.hpp"

namespace tcgp {

namespace {

double fbm_cov(double h, double s, double t) {
    return 0.5 * (std::pow(s, 2 * h) + std::pow(t, 2 * h) - std::pow(std::abs(s - t), 2 * h));
}

// Index k with breakpoints[k] <= t < breakpoints[k+1] (last segment is open-ended).
std::size_t segment_of(const std::vector<double>& T, double t) {
    const auto it = std::upper_bound(T.begin(), T.end(), t);
    return static_cast<std::size_t>(it - T.begin()) - 1;
}

// Right derivative of the variance; equals R'(t) away from breakpoints.
double variance_right_derivative(const CovarianceModel& model, double t);

}  // namespace

HurstFunction HurstFunction::constant(double h) {
    detail::require(std::isfinite(h), "HurstFunction: non-finite value");
    return HurstFunction(Kind::constant, {h});
}

HurstFunction HurstFunction::polynomial(std::vector<double> coefficients) {
    detail::require(!coefficients.empty(), "HurstFunction: polynomial needs coefficients");
    for (double c : coefficients) detail::require(std::isfinite(c), "HurstFunction: non-finite coefficient");
    return HurstFunction(Kind::polynomial, std::move(coefficients));
}

HurstFunction HurstFunction::saturating(double h0, double amplitude, double scale) {
    detail::require(std::isfinite(h0) && std::isfinite(amplitude), "HurstFunction: non-finite parameter");
    detail::require(scale > 0.0, "HurstFunction: saturating scale must be positive");
    return HurstFunction(Kind::saturating, {h0, amplitude, scale});
}

double HurstFunction::value(double t) const {
    switch (kind_) {
        case Kind::constant:
            return params_[0];
        case Kind::polynomial: {
            double acc = 0.0;
            for (auto it = params_.rbegin(); it != params_.rend(); ++it) acc = acc * t + *it;
            return acc;
        }
        case Kind::saturating:
            return params_[0] + params_[1] * t / (params_[2] + t);
    }
    return 0.0;
}

double HurstFunction::derivative(double t) const {
    switch (kind_) {
        case Kind::constant:
            return 0.0;
        case Kind::polynomial: {
            double acc = 0.0;
            for (std::size_t k = params_.size() - 1; k >= 1; --k) acc = acc * t + k * params_[k];
            return acc;
        }
        case Kind::saturating: {
            const double d = params_[2] + t;
            return params_[1] * params_[2] / (d * d);
        }
    }
    return 0.0;
}

CovarianceModel CovarianceModel::brownian() { return CovarianceModel(Kind::brownian); }

CovarianceModel CovarianceModel::fbm(double hurst) {
    detail::require(hurst > 0.0 && hurst < 1.0, "fbm: H must lie in (0,1)");
    CovarianceModel m(Kind::fbm);
    m.hurst_ = hurst;
    return m;
}

CovarianceModel CovarianceModel::mixed(std::vector<MixedTerm> terms) {
    detail::require(!terms.empty(), "mixed: at least one term required");
    for (const auto& term : terms) {
        detail::require(term.model != nullptr, "mixed: null component model");
        detail::require(std::isfinite(term.coefficient), "mixed: non-finite coefficient");
    }
    CovarianceModel m(Kind::mixed);
    m.terms_ = std::move(terms);
    return m;
}

CovarianceModel CovarianceModel::ou(double alpha, double sigma) {
    detail::require(alpha >= 0.0 && std::isfinite(alpha), "ou: alpha must be >= 0");
    detail::require(sigma > 0.0 && std::isfinite(sigma), "ou: sigma must be > 0");
    CovarianceModel m(Kind::ou);
    m.alpha_ = alpha;
    m.sigma_ = sigma;
    return m;
}

CovarianceModel CovarianceModel::variable_hurst(HurstFunction hurst, double horizon) {
    detail::require(horizon > 0.0 && std::isfinite(horizon), "variable_hurst: horizon must be > 0");
    const int samples = 256;
    for (int i = 0; i <= samples; ++i) {
        const double t = horizon * i / samples;
        const double h = hurst.value(t);
        if (!(h > 0.5 && h < 1.0) || !std::isfinite(hurst.derivative(t))) {
            std::ostringstream msg;
            msg << "variable_hurst: H(" << t << ") = " << h << " outside (1/2,1)";
            throw DomainError(msg.str());
        }
    }
    CovarianceModel m(Kind::variable_hurst);
    m.hurst_fn_ = std::make_shared<const HurstFunction>(std::move(hurst));
    m.horizon_ = horizon;
    return m;
}

CovarianceModel CovarianceModel::piecewise_hurst(std::vector<double> breakpoints, std::vector<double> hursts) {
    detail::require(!breakpoints.empty() && breakpoints.size() == hursts.size(),
                    "piecewise_hurst: one Hurst value per breakpoint required");
    detail::require(breakpoints[0] == 0.0, "piecewise_hurst: first breakpoint must be 0");
    for (std::size_t k = 1; k < breakpoints.size(); ++k)
        detail::require(breakpoints[k] > breakpoints[k - 1] && std::isfinite(breakpoints[k]),
                        "piecewise_hurst: breakpoints must be strictly increasing");
    for (double h : hursts) detail::require(h > 0.0 && h < 1.0, "piecewise_hurst: H_k must lie in (0,1)");
    CovarianceModel m(Kind::piecewise_hurst);
    m.breakpoints_ = std::move(breakpoints);
    m.hursts_ = std::move(hursts);
    return m;
}

bool CovarianceModel::closed_form_laplace() const {
    switch (kind_) {
        case Kind::brownian:
        case Kind::fbm:
        case Kind::ou:
            return true;
        case Kind::mixed:
            return std::all_of(terms_.begin(), terms_.end(),
                               [](const MixedTerm& t) { return t.model->closed_form_laplace(); });
        default:
            return false;
    }
}

double covariance(const CovarianceModel& model, double s, double t, const Tolerances& tol) {
    detail::require(s >= 0.0 && t >= 0.0, "covariance: times must be >= 0");
    switch (model.kind()) {
        case CovarianceModel::Kind::brownian:
            return std::min(s, t);
        case CovarianceModel::Kind::fbm:
            return fbm_cov(model.hurst(), s, t);
        case CovarianceModel::Kind::mixed: {
            double acc = 0.0;
            for (const auto& term : model.terms())
                acc += term.coefficient * term.coefficient * covariance(*term.model, s, t, tol);
            return acc;
        }
        case CovarianceModel::Kind::ou: {
            const double a = model.alpha(), sig2 = model.sigma() * model.sigma();
            const double m = std::min(s, t);
            if (a == 0.0) return sig2 * m;
            return sig2 / (2 * a) * std::exp(-a * std::abs(s - t)) * -std::expm1(-2 * a * m);
        }
        case CovarianceModel::Kind::variable_hurst: {
            if (s > model.horizon() || t > model.horizon()) {
                std::ostringstream msg;
                msg << "covariance: time beyond the variable-Hurst horizon " << model.horizon();
                throw DomainError(msg.str());
            }
            return detail::variable_hurst_covariance(model.hurst_function(), s, t, tol);
        }
        case CovarianceModel::Kind::piecewise_hurst: {
            const auto& T = model.breakpoints();
            const auto& H = model.hursts();
            double acc = 0.0;
            for (std::size_t k = 0; k < T.size(); ++k) {
                const double end = k + 1 < T.size() ? T[k + 1] : INFINITY;
                const double a = std::min(s, end) - T[k];
                const double b = std::min(t, end) - T[k];
                if (a <= 0.0 || b <= 0.0) break;
                acc += fbm_cov(H[k], a, b);
            }
            return acc;
        }
    }
    return 0.0;
}

double variance(const CovarianceModel& model, double t) {
    detail::require(t >= 0.0, "variance: time must be >= 0");
    if (t == 0.0) return 0.0;
    switch (model.kind()) {
        case CovarianceModel::Kind::mixed: {
            double acc = 0.0;
            for (const auto& term : model.terms())
                acc += term.coefficient * term.coefficient * variance(*term.model, t);
            return acc;
        }
        case CovarianceModel::Kind::variable_hurst:
            return std::pow(t, 2 * model.hurst_function().value(t));
        default:
            return covariance(model, t, t);
    }
}

namespace {

double variance_right_derivative(const CovarianceModel& model, double t) {
    switch (model.kind()) {
        case CovarianceModel::Kind::brownian:
            return 1.0;
        case CovarianceModel::Kind::fbm:
            return 2 * model.hurst() * std::pow(t, 2 * model.hurst() - 1);
        case CovarianceModel::Kind::mixed: {
            double acc = 0.0;
            for (const auto& term : model.terms())
                acc += term.coefficient * term.coefficient * variance_right_derivative(*term.model, t);
            return acc;
        }
        case CovarianceModel::Kind::ou:
            return model.sigma() * model.sigma() * std::exp(-2 * model.alpha() * t);
        case CovarianceModel::Kind::variable_hurst: {
            const auto& h = model.hurst_function();
            const double r = std::pow(t, 2 * h.value(t));
            return r * (2 * h.derivative(t) * std::log(t) + 2 * h.value(t) / t);
        }
        case CovarianceModel::Kind::piecewise_hurst: {
            const auto& T = model.breakpoints();
            const std::size_t k = segment_of(T, t);
            const double h = model.hursts()[k];
            return 2 * h * std::pow(t - T[k], 2 * h - 1);
        }
    }
    return 0.0;
}

bool at_breakpoint(const CovarianceModel& model, double t) {
    if (model.kind() == CovarianceModel::Kind::piecewise_hurst) {
        const auto& T = model.breakpoints();
        return std::find(T.begin() + 1, T.end(), t) != T.end();
    }
    if (model.kind() == CovarianceModel::Kind::mixed)
        return std::any_of(model.terms().begin(), model.terms().end(),
                           [t](const MixedTerm& m) { return at_breakpoint(*m.model, t); });
    return false;
}

}  // namespace

std::pair<double, double> variance_and_derivative(const CovarianceModel& model, double t) {
    detail::require(t > 0.0, "variance_and_derivative: t must be > 0");
    if (at_breakpoint(model, t)) {
        std::ostringstream msg;
        msg << "variance_and_derivative: R'(t) undefined at breakpoint t=" << t;
        throw DomainError(msg.str());
    }
    return {variance(model, t), variance_right_derivative(model, t)};
}

VarianceLaplace variance_laplace(const CovarianceModel& model, Complex s, const Tolerances& tol) {
    if (model.closed_form_laplace()) {
        if (s.imag() == 0.0 && !(s.real() > 0.0))
            throw DomainError("variance_laplace: s on the branch cut (-inf, 0]");
    } else if (!(s.real() > 0.0)) {
        throw DomainError("variance_laplace: requires Re s > 0");
    }
    switch (model.kind()) {
        case CovarianceModel::Kind::brownian:
            return {1.0 / (s * s), 1.0 / s};
        case CovarianceModel::Kind::fbm: {
            const double h = model.hurst();
            const Complex d = std::tgamma(2 * h + 1) * std::pow(s, -2 * h);
            return {d / s, d};
        }
        case CovarianceModel::Kind::ou: {
            const Complex d = model.sigma() * model.sigma() / (s + 2 * model.alpha());
            return {d / s, d};
        }
        case CovarianceModel::Kind::mixed: {
            VarianceLaplace acc{0.0, 0.0};
            for (const auto& term : model.terms()) {
                const auto part = variance_laplace(*term.model, s, tol);
                const double a2 = term.coefficient * term.coefficient;
                acc.variance += a2 * part.variance;
                acc.derivative += a2 * part.derivative;
            }
            return acc;
        }
        case CovarianceModel::Kind::piecewise_hurst: {
            // Segment k contributes int_{T_k}^{T_{k+1}}, written as the
            // difference of two transforms of the segment formula continued
            // past T_{k+1}; only the second one needs quadrature.
            const auto& T = model.breakpoints();
            const auto& H = model.hursts();
            VarianceLaplace acc{0.0, 0.0};
            double level = 0.0;
            for (std::size_t k = 0; k < T.size(); ++k) {
                const double h2 = 2 * H[k];
                const Complex head = std::tgamma(h2 + 1) * std::pow(s, -h2);
                const Complex ek = std::exp(-s * T[k]);
                acc.variance += ek * (level / s + head / s);
                acc.derivative += ek * head;
                if (k + 1 == T.size()) break;
                const double len = T[k + 1] - T[k];
                const Complex ek1 = std::exp(-s * T[k + 1]);
                const auto rv = laplace_forward(
                    [&](double u) { return level + std::pow(u + len, h2); }, s, 0.0, tol);
                const auto rd = laplace_forward(
                    [&](double u) { return h2 * std::pow(u + len, h2 - 1); }, s, 0.0, tol);
                acc.variance -= ek1 * rv.value;
                acc.derivative -= ek1 * rd.value;
                level += std::pow(len, h2);
            }
            return acc;
        }
        default: {
            const auto r = laplace_forward([&](double t) { return variance(model, t); }, s, 0.0, tol);
            const auto d = laplace_forward(
                [&](double t) { return variance_right_derivative(model, t); }, s, 0.0, tol);
            return {r.value, d.value};
        }
    }
}

std::vector<double> covariance_matrix(const CovarianceModel& model, std::span<const double> grid,
                                      const Tolerances& tol) {
    const std::size_t n = grid.size();
    std::vector<double> out(n * n);
    const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(n);
    std::string failure;
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        for (std::ptrdiff_t j = 0; j <= i; ++j) {
            try {
                const double c = covariance(model, grid[i], grid[j], tol);
                out[i * n + j] = c;
                out[j * n + i] = c;
            } catch (const std::exception& e) {
#pragma omp critical
                failure = e.what();
            }
        }
    }
    if (!failure.empty()) throw NumericalError(failure);
    return out;
}

double MeanFunction::value(double t) const {
    double acc = 0.0;
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * t + *it;
    return acc;
}

double MeanFunction::derivative(double t) const {
    double acc = 0.0;
    for (std::size_t k = coefficients.size(); k-- > 1;) acc = acc * t + k * coefficients[k];
    return acc;
}

bool MeanFunction::zero() const {
    return std::all_of(coefficients.begin(), coefficients.end(), [](double c) { return c == 0.0; });
}

GaussianSpec GaussianSpec::isotropic(const CovarianceModel& model, std::size_t dimension) {
    detail::require(dimension >= 1, "GaussianSpec: dimension must be >= 1");
    GaussianSpec spec;
    spec.components.assign(dimension, model);
    return spec;
}

void GaussianSpec::validate() const {
    detail::require(!components.empty(), "GaussianSpec: dimension must be >= 1");
    detail::require(means.empty() || means.size() == components.size(),
                    "GaussianSpec: one mean function per component required");
    for (const auto& m : means)
        for (double c : m.coefficients) detail::require(std::isfinite(c), "GaussianSpec: non-finite mean coefficient");
}

std::vector<double> cholesky_factor(std::vector<double> matrix, std::size_t n) {
    using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<Mat> a(matrix.data(), n, n);
    const double trace = a.trace();
    const double budget = 1e-10 * trace;
    double jitter = 0.0;
    for (;;) {
        Mat m = a;
        m.diagonal().array() += jitter;
        Eigen::LLT<Mat> llt(m);
        if (llt.info() == Eigen::Success) {
            Mat l = llt.matrixL();
            return std::vector<double>(l.data(), l.data() + n * n);
        }
        if (jitter >= budget) break;
        jitter = jitter == 0.0 ? 1e-16 * trace : std::min(10.0 * jitter, budget);
    }
    std::ostringstream msg;
    msg << "cholesky_factor: covariance matrix indefinite beyond jitter budget " << budget;
    throw NumericalError(msg.str());
}

namespace {

// A Gaussian vector x = L z on a subset of the grid: x[k] lands at
// grid index target[k], offset by the value at grid index base (or 0).
struct FactorBlock {
    std::vector<double> factor;
    std::vector<std::size_t> target;
    std::ptrdiff_t base = -1;
    std::size_t size() const { return target.size(); }
};

// Blocks realizing one component on `grid`. For piecewise-Hurst models
// each segment contributes an independent fBm block started from the
// value at its left breakpoint; grid points are augmented with breakpoints.
std::vector<FactorBlock> component_blocks(const CovarianceModel& model, const std::vector<double>& grid) {
    std::vector<FactorBlock> blocks;
    if (model.kind() != CovarianceModel::Kind::piecewise_hurst) {
        FactorBlock b;
        std::vector<double> times;
        for (std::size_t i = 1; i < grid.size(); ++i) {
            b.target.push_back(i);
            times.push_back(grid[i]);
        }
        if (times.empty()) return blocks;
        b.factor = cholesky_factor(covariance_matrix(model, times), times.size());
        blocks.push_back(std::move(b));
        return blocks;
    }
    const auto& T = model.breakpoints();
    for (std::size_t k = 0; k < T.size(); ++k) {
        const double end = k + 1 < T.size() ? T[k + 1] : INFINITY;
        FactorBlock b;
        std::vector<double> local;
        for (std::size_t i = 1; i < grid.size(); ++i) {
            if (grid[i] > T[k] && grid[i] <= end) {
                b.target.push_back(i);
                local.push_back(grid[i] - T[k]);
            }
        }
        if (local.empty()) break;
        b.base = static_cast<std::ptrdiff_t>(
            std::find(grid.begin(), grid.end(), T[k]) - grid.begin());
        b.factor = cholesky_factor(covariance_matrix(CovarianceModel::fbm(model.hursts()[k]), local), local.size());
        blocks.push_back(std::move(b));
    }
    return blocks;
}

}  // namespace

PathEnsemble sample_gaussian_paths(const GaussianSpec& spec, std::span<const double> grid_in,
                                   std::size_t n_paths, SeededRng seed) {
    spec.validate();
    detail::require(n_paths >= 1, "sample_gaussian_paths: n_paths must be >= 1");
    detail::require(!grid_in.empty() && grid_in[0] == 0.0, "sample_gaussian_paths: grid must start at 0");
    for (std::size_t i = 1; i < grid_in.size(); ++i)
        detail::require(grid_in[i] > grid_in[i - 1], "sample_gaussian_paths: grid must be strictly increasing");

    // Piecewise models need their breakpoints on the sampling grid; they are
    // added internally and dropped from the output.
    std::vector<double> grid(grid_in.begin(), grid_in.end());
    const double t_end = grid.back();
    for (const auto& m : spec.components)
        if (m.kind() == CovarianceModel::Kind::piecewise_hurst)
            for (double tk : m.breakpoints())
                if (tk < t_end) grid.push_back(tk);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    std::vector<std::size_t> keep;
    for (double t : grid_in) keep.push_back(std::lower_bound(grid.begin(), grid.end(), t) - grid.begin());

    const std::size_t d = spec.dimension();
    std::vector<std::vector<FactorBlock>> blocks(d);
    for (std::size_t j = 0; j < d; ++j) blocks[j] = component_blocks(spec.components[j], grid);

    PathEnsemble out;
    out.grid.assign(grid_in.begin(), grid_in.end());
    out.n_paths = n_paths;
    out.dimension = d;
    out.seed = seed;
    out.values.assign(n_paths * out.grid.size() * d, 0.0);

    const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(n_paths);
#pragma omp parallel
    {
        std::vector<double> z, x(grid.size());
#pragma omp for schedule(static)
        for (std::ptrdiff_t p = 0; p < count; ++p) {
            RandomStream rng({seed.master_seed, seed.stream_index + static_cast<std::uint64_t>(p)});
            for (std::size_t j = 0; j < d; ++j) {
                std::fill(x.begin(), x.end(), 0.0);
                for (const auto& b : blocks[j]) {
                    const std::size_t m = b.size();
                    z.resize(m);
                    for (auto& v : z) v = rng.normal();
                    const double offset = b.base >= 0 ? x[b.base] : 0.0;
                    for (std::size_t r = 0; r < m; ++r) {
                        double acc = 0.0;
                        const double* row = b.factor.data() + r * m;
                        for (std::size_t c = 0; c <= r; ++c) acc += row[c] * z[c];
                        x[b.target[r]] = offset + acc;
                    }
                }
                const MeanFunction* mean = spec.mean(j);
                for (std::size_t i = 0; i < keep.size(); ++i)
                    out.at(p, i, j) = x[keep[i]] + (mean ? mean->value(out.grid[i]) : 0.0);
            }
        }
    }
    return out;
}

double gaussian_log_density(const GaussianSpec& spec, double t, std::span<const double> x) {
    detail::require(x.size() == spec.dimension(), "gaussian density: point dimension mismatch");
    if (!(t > 0.0)) throw DomainError("gaussian density: t <= 0, the law is a point mass at the mean");
    double acc = 0.0;
    for (std::size_t j = 0; j < spec.dimension(); ++j) {
        const double v = variance(spec.components[j], t);
        if (!(v > 0.0)) {
            std::ostringstream msg;
            msg << "gaussian density: zero variance in component " << j << " at t=" << t;
            throw DomainError(msg.str());
        }
        const MeanFunction* mean = spec.mean(j);
        const double y = x[j] - (mean ? mean->value(t) : 0.0);
        acc += -0.5 * std::log(2 * std::numbers::pi * v) - y * y / (2 * v);
    }
    return acc;
}

double gaussian_transition_density(const GaussianSpec& spec, double t, std::span<const double> x) {
    return std::exp(gaussian_log_density(spec, t, x));
}

}  // namespace tcgp
