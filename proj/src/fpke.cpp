#include "tcgp/fpke.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tcgp/errors.hpp"
#include "tcgp/fraccalc.hpp"

namespace tcgp {

Coefficient Coefficient::constant(double c) {
    return {[c](double) { return c; }, [c](double t) { return c * t; }, {}};
}

SpatialOperator SpatialOperator::scaled_laplacian(double theta) {
    detail::require(std::isfinite(theta) && theta > 0.0, "scaled_laplacian: theta must be > 0");
    SpatialOperator op;
    op.theta_ = Coefficient::constant(theta);
    op.drift_ = Coefficient::constant(0.0);
    return op;
}

SpatialOperator SpatialOperator::scaled_laplacian(Coefficient theta) {
    detail::require(theta.value && theta.integral, "scaled_laplacian: coefficient callbacks missing");
    SpatialOperator op;
    op.autonomous_ = false;
    op.theta_ = std::move(theta);
    op.drift_ = Coefficient::constant(0.0);
    return op;
}

SpatialOperator SpatialOperator::ou_generator(double alpha, double sigma) {
    detail::require(std::isfinite(alpha) && alpha >= 0.0, "ou_generator: alpha must be >= 0");
    detail::require(std::isfinite(sigma) && sigma > 0.0, "ou_generator: sigma must be > 0");
    SpatialOperator op;
    op.kind_ = Kind::ou_generator;
    op.alpha_ = alpha;
    op.sigma_ = sigma;
    op.theta_ = Coefficient::constant(0.5 * sigma * sigma);
    op.drift_ = Coefficient::constant(0.0);
    return op;
}

SpatialOperator SpatialOperator::diffusion_with_drift(Coefficient theta, Coefficient drift) {
    detail::require(theta.value && theta.integral && drift.value && drift.integral,
                    "diffusion_with_drift: coefficient callbacks missing");
    SpatialOperator op;
    op.kind_ = Kind::diffusion_with_drift;
    op.autonomous_ = false;
    op.theta_ = std::move(theta);
    op.drift_ = std::move(drift);
    return op;
}

SpatialOperator SpatialOperator::from_model(const CovarianceModel& model, const MeanFunction& mean) {
    const bool centered = mean.zero();
    if (model.kind() == CovarianceModel::Kind::brownian && centered) return scaled_laplacian(0.5);
    Coefficient theta{[model](double t) { return 0.5 * variance_and_derivative(model, t).second; },
                      [model](double t) { return 0.5 * variance(model, t); }, {}};
    if (model.kind() == CovarianceModel::Kind::piecewise_hurst) {
        const auto& b = model.breakpoints();
        theta.breakpoints.assign(b.begin() + 1, b.end());
    }
    if (centered) {
        auto op = scaled_laplacian(std::move(theta));
        return op;
    }
    const double m0 = mean.value(0.0);
    Coefficient drift{[mean](double t) { return mean.derivative(t); },
                      [mean, m0](double t) { return mean.value(t) - m0; }, {}};
    auto op = diffusion_with_drift(std::move(theta), std::move(drift));
    op.origin_ = m0;
    return op;
}

void SolverConfig::validate() const {
    detail::require(std::isfinite(t_max) && t_max > 0.0, "solver: t_max must be > 0");
    detail::require(n_t >= 16, "solver: n_t must be >= 16");
    detail::require(n_x >= 16, "solver: n_x must be >= 16");
    detail::require(std::isfinite(x_min) && std::isfinite(x_max) && x_min < x_max, "solver: need x_min < x_max");
    detail::require(init_width == 0.0 || init_width >= 2.0 * dx(),
                    "solver: init_width must be 0 (lattice point mass) or >= 2 dx");
    for (double b : breakpoints)
        detail::require(std::isfinite(b) && b > 0.0, "solver: breakpoints must be positive");
}

namespace {

struct Tridiagonal {
    std::vector<double> lower, diag, upper;  // lower[k] couples k to k-1, upper[k] couples k to k+1

    explicit Tridiagonal(std::size_t n) : lower(n, 0.0), diag(n, 0.0), upper(n, 0.0) {}

    void apply(const std::vector<double>& p, double scale, std::vector<double>& out) const {
        const std::size_t n = diag.size();
        for (std::size_t k = 0; k < n; ++k) {
            double v = diag[k] * p[k];
            if (k > 0) v += lower[k] * p[k - 1];
            if (k + 1 < n) v += upper[k] * p[k + 1];
            out[k] += scale * v;
        }
    }
};

// Solves (shift I - scale L) p = rhs in place with the Thomas algorithm.
void solve_shifted(const Tridiagonal& L, double shift, double scale, std::vector<double>& rhs,
                   std::vector<double>& work) {
    const std::size_t n = rhs.size();
    work.resize(n);
    double denom = shift - scale * L.diag[0];
    work[0] = -scale * L.upper[0] / denom;
    rhs[0] /= denom;
    for (std::size_t k = 1; k < n; ++k) {
        const double a = -scale * L.lower[k];
        denom = shift - scale * L.diag[k] - a * work[k - 1];
        work[k] = (k + 1 < n) ? -scale * L.upper[k] / denom : 0.0;
        rhs[k] = (rhs[k] - a * rhs[k - 1]) / denom;
    }
    for (std::size_t k = n - 1; k-- > 0;) rhs[k] -= work[k] * rhs[k + 1];
}

// Flux-form advection-diffusion on the interior nodes 1..N-2 of a uniform grid
// with zero Dirichlet values at both ends:
//   dp_k/dt = -(F_{k+1/2} - F_{k-1/2}) / h,  F = -D dp/dx + v(x) p.
// Faces use central averaging unless the cell Peclet number |v| h / D exceeds 2.
template <class Velocity>
Tridiagonal flux_operator(const std::vector<double>& x, double diffusion, Velocity&& velocity) {
    const std::size_t n = x.size() - 2;
    const double h = x[1] - x[0];
    Tridiagonal L(n);
    // Face between full-grid nodes j and j+1; returns dF/dp_j and dF/dp_{j+1}.
    auto face = [&](std::size_t j) {
        const double v = velocity(0.5 * (x[j] + x[j + 1]));
        double wl = 0.5, wr = 0.5;
        if (std::abs(v) * h > 2.0 * diffusion) {
            wl = v > 0.0 ? 1.0 : 0.0;
            wr = 1.0 - wl;
        }
        return std::pair{diffusion / h + v * wl, -diffusion / h + v * wr};
    };
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t j = k + 1;  // full-grid index
        const auto [left_l, left_r] = face(j - 1);
        const auto [right_l, right_r] = face(j);
        L.lower[k] = left_l / h;
        L.diag[k] = -(right_l - left_r) / h;
        L.upper[k] = -right_r / h;
    }
    return L;
}

std::vector<double> make_x_grid(const SolverConfig& cfg) {
    std::vector<double> x(cfg.n_x);
    const double h = cfg.dx();
    for (std::size_t k = 0; k < cfg.n_x; ++k) x[k] = cfg.x_min + h * static_cast<double>(k);
    x.back() = cfg.x_max;
    return x;
}

// Interior values of the initial condition with discrete mass 1.
std::vector<double> initial_condition(const std::vector<double>& x, double origin, double width) {
    const std::size_t n = x.size();
    const double h = x[1] - x[0];
    if (!(origin > x[1] && origin < x[n - 2])) {
        std::ostringstream msg;
        msg << "solver: initial point " << origin << " is not inside the spatial grid";
        throw DomainError(msg.str());
    }
    std::vector<double> p(n - 2, 0.0);
    if (width == 0.0) {
        const double s = (origin - x[0]) / h;
        const auto j = static_cast<std::size_t>(std::floor(s));
        const double frac = s - static_cast<double>(j);
        p[j - 1] += (1.0 - frac) / h;
        p[j] += frac / h;
        return p;
    }
    double mass = 0.0;
    for (std::size_t k = 0; k < n - 2; ++k) {
        const double z = (x[k + 1] - origin) / width;
        p[k] = std::exp(-0.5 * z * z);
        mass += p[k] * h;
    }
    for (double& v : p) v /= mass;
    return p;
}

class Recorder {
public:
    Recorder(const std::vector<double>& x, std::vector<double> t) : h_(x[1] - x[0]) {
        out_.x_grid = x;
        out_.t_grid = std::move(t);
        out_.values.assign(out_.t_grid.size() * x.size(), 0.0);
    }

    void store(std::size_t i, const std::vector<double>& interior, double floor) {
        double mass = 0.0;
        for (std::size_t k = 0; k < interior.size(); ++k) {
            double v = interior[k];
            if (!std::isfinite(v)) throw NumericalError(where(i) + ": non-finite value");
            mass += v * h_;
            if (v < -floor) {
                v = 0.0;
                ++out_.clamped;
            }
            out_.at(i, k + 1) = v;
        }
        if (std::abs(mass - 1.0) > 1e-2)
            throw NumericalError(where(i) + ": mass drifted to " + std::to_string(mass) + " (unstable or domain too small)");
    }

    GridDensity finish() {
        update_mass_error(out_);
        return std::move(out_);
    }

private:
    std::string where(std::size_t i) const {
        std::ostringstream msg;
        msg << "fpke solver at t=" << out_.t_grid[i];
        return msg.str();
    }

    double h_;
    GridDensity out_;
};

std::vector<double> classical_time_grid(const SpatialOperator& op, const SolverConfig& cfg) {
    std::vector<double> t(cfg.n_t + 1);
    for (std::size_t n = 0; n <= cfg.n_t; ++n) t[n] = cfg.t_max * static_cast<double>(n) / static_cast<double>(cfg.n_t);
    t.back() = cfg.t_max;
    std::vector<double> extra = cfg.breakpoints;
    extra.insert(extra.end(), op.theta().breakpoints.begin(), op.theta().breakpoints.end());
    extra.insert(extra.end(), op.drift().breakpoints.begin(), op.drift().breakpoints.end());
    const double eps = 1e-12 * cfg.t_max;
    for (double b : extra) {
        if (!(b > 0.0 && b < cfg.t_max)) continue;
        const auto it = std::lower_bound(t.begin(), t.end(), b);
        if (std::abs(*it - b) <= eps || std::abs(*(it - 1) - b) <= eps) continue;
        t.insert(it, b);
    }
    return t;
}

// Generator integrated over [t0, t1]: exact coefficient increments for the
// Gaussian families, dt * A for the autonomous OU generator.
Tridiagonal step_operator(const SpatialOperator& op, const std::vector<double>& x, double t0, double t1) {
    if (op.kind() == SpatialOperator::Kind::ou_generator) {
        const double dt = t1 - t0, alpha = op.alpha();
        return flux_operator(x, dt * op.theta().value(0.0), [&](double xf) { return -alpha * xf * dt; });
    }
    const double d_theta = op.theta().integral(t1) - op.theta().integral(t0);
    const double d_drift = op.drift().integral(t1) - op.drift().integral(t0);
    if (!std::isfinite(d_theta) || d_theta < 0.0) {
        std::ostringstream msg;
        msg << "fpke solver: diffusion increment on [" << t0 << "," << t1 << "] is " << d_theta;
        throw NumericalError(msg.str());
    }
    return flux_operator(x, d_theta, [&](double) { return d_drift; });
}

// Time-independent generator A.
Tridiagonal generator(const SpatialOperator& op, const std::vector<double>& x) {
    const double alpha = op.alpha();
    return flux_operator(x, op.theta().value(0.0), [&](double xf) { return -alpha * xf; });
}

void require_autonomous(const SpatialOperator& op) {
    if (!op.autonomous() || op.kind() == SpatialOperator::Kind::diffusion_with_drift)
        throw DomainError("fractional fpke requires a time-autonomous operator; use solve_classical or the lambdaop route");
}

}  // namespace

GridDensity solve_classical(const SpatialOperator& op, const SolverConfig& cfg) {
    cfg.validate();
    const auto x = make_x_grid(cfg);
    const auto t = classical_time_grid(op, cfg);
    Recorder rec(x, t);
    auto p = initial_condition(x, op.origin(), cfg.init_width);
    rec.store(0, p, cfg.tol.density_floor);

    std::vector<double> rhs(p.size()), work;
    // theta-scheme step: (I - w L) p1 = (I + (1-w) L) p0
    auto advance = [&](double t0, double t1, double w) {
        const auto L = step_operator(op, x, t0, t1);
        rhs = p;
        if (w < 1.0) L.apply(p, 1.0 - w, rhs);
        solve_shifted(L, 1.0, w, rhs, work);
        p.swap(rhs);
    };
    for (std::size_t n = 1; n < t.size(); ++n) {
        if (n <= 2) {
            // Rannacher start: damp the lattice point mass with implicit Euler.
            const double mid = 0.5 * (t[n - 1] + t[n]);
            advance(t[n - 1], mid, 1.0);
            advance(mid, t[n], 1.0);
        } else {
            advance(t[n - 1], t[n], 0.5);
        }
        rec.store(n, p, cfg.tol.density_floor);
    }
    return rec.finish();
}

GridDensity solve_fractional(const SpatialOperator& op, double beta, const SolverConfig& cfg) {
    detail::require(beta > 0.0 && beta <= 1.0, "solve_fractional: beta must be in (0,1]");
    if (beta == 1.0) return solve_classical(op, cfg);
    return solve_distributed_order(op, SubordinatorSpec::stable(beta), cfg);
}

GridDensity solve_distributed_order(const SpatialOperator& op, const SubordinatorSpec& spec,
                                    const SolverConfig& cfg) {
    cfg.validate();
    if (spec.deterministic() && spec.components()[0].weight == 1.0) return solve_classical(op, cfg);
    require_autonomous(op);

    const std::size_t n_t = cfg.n_t;
    std::vector<double> t(n_t + 1);
    for (std::size_t n = 0; n <= n_t; ++n) t[n] = cfg.t_max * static_cast<double>(n) / static_cast<double>(n_t);
    t.back() = cfg.t_max;
    const double dt = cfg.t_max / static_cast<double>(n_t);

    // b[j] multiplies (q_{n-j} - q_{n-j-1}) in the discrete D^mu q(t_n).
    std::vector<double> b(n_t, 0.0);
    for (const auto& c : spec.components()) {
        if (c.beta == 1.0) {
            b[0] += c.weight / dt;
            continue;
        }
        const auto w = l1_weights(t, n_t, c.beta);
        for (std::size_t j = 0; j < n_t; ++j) b[j] += c.weight * w[n_t - 1 - j];
    }

    const auto x = make_x_grid(cfg);
    Recorder rec(x, t);
    auto p = initial_condition(x, op.origin(), cfg.init_width);
    rec.store(0, p, cfg.tol.density_floor);
    const auto A = generator(op, x);
    const std::size_t m = p.size();
    std::vector<double> diffs;  // row n-1 holds q_n - q_{n-1}
    diffs.reserve(n_t * m);
    std::vector<double> rhs(m), work;
    for (std::size_t n = 1; n <= n_t; ++n) {
        for (std::size_t k = 0; k < m; ++k) rhs[k] = b[0] * p[k];
        for (std::size_t j = 1; j < n; ++j) {
            const double bj = b[j];
            const double* d = diffs.data() + (n - j - 1) * m;
            for (std::size_t k = 0; k < m; ++k) rhs[k] -= bj * d[k];
        }
        solve_shifted(A, b[0], 1.0, rhs, work);
        for (std::size_t k = 0; k < m; ++k) diffs.push_back(rhs[k] - p[k]);
        p.swap(rhs);
        rec.store(n, p, cfg.tol.density_floor);
    }
    return rec.finish();
}

std::vector<SliceResidual> residual_norm(const GridDensity& density, const FpkeEquation& equation) {
    const auto& x = density.x_grid;
    const auto& t = density.t_grid;
    const std::size_t nx = x.size(), nt = t.size();
    detail::require(density.values.size() == nx * nt, "residual_norm: malformed density");
    detail::require(nt >= 3, "residual_norm: need at least 3 time slices");
    const std::size_t band = std::max<std::size_t>(2, nx / 20);
    detail::require(nx >= 2 * band + 16, "residual_norm: grid too coarse (fewer than 16 interior points)");
    const double h = x[1] - x[0];
    for (std::size_t k = 1; k < nx; ++k)
        detail::require(std::abs(x[k] - x[k - 1] - h) <= 1e-9 * h, "residual_norm: x grid must be uniform");

    // Time-derivative part, slice by slice.
    std::vector<double> dt_q(nx * nt, 0.0);
    for (const auto& c : equation.clock.components()) {
        if (c.beta == 1.0) {
            for (std::size_t k = band; k < nx - band; ++k) {
                SampledFunction col{t, std::vector<double>(nt)};
                for (std::size_t i = 0; i < nt; ++i) col.values[i] = density.at(i, k);
                const auto d = caputo_l1(col, 1.0);
                for (std::size_t i = 0; i < nt; ++i) dt_q[i * nx + k] += c.weight * d.values[i];
            }
            continue;
        }
        for (std::size_t n = 1; n < nt; ++n) {
            const auto w = l1_weights(t, n, c.beta);
            for (std::size_t j = 1; j <= n; ++j) {
                const double wj = c.weight * w[j - 1];
                for (std::size_t k = band; k < nx - band; ++k)
                    dt_q[n * nx + k] += wj * (density.at(j, k) - density.at(j - 1, k));
            }
        }
    }

    const auto& op = equation.op;
    std::vector<SliceResidual> out;
    for (std::size_t n = 1; n < nt; ++n) {
        double theta = 0.0, drift = 0.0;
        try {
            theta = op.theta().value(t[n]);
            drift = op.drift().value(t[n]);
        } catch (const DomainError&) {
            continue;  // coefficient undefined at this slice (e.g. a Hurst breakpoint)
        }
        if (!std::isfinite(theta) || !std::isfinite(drift)) continue;
        SliceResidual r{t[n], 0.0, 0.0};
        double sum = 0.0;
        for (std::size_t k = band; k < nx - band; ++k) {
            const double qm = density.at(n, k - 1), q0 = density.at(n, k), qp = density.at(n, k + 1);
            double a = theta * (qp - 2.0 * q0 + qm) / (h * h) - drift * (qp - qm) / (2.0 * h);
            if (op.kind() == SpatialOperator::Kind::ou_generator)
                a += op.alpha() * (x[k + 1] * qp - x[k - 1] * qm) / (2.0 * h);
            const double res = dt_q[n * nx + k] - a;
            sum += res * res * h;
            r.linf = std::max(r.linf, std::abs(res));
        }
        r.l2 = std::sqrt(sum);
        out.push_back(r);
    }
    return out;
}

}  // namespace tcgp
