#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "tcgp/cli.hpp"
#include "tcgp/errors.hpp"
#include "tcgp/lambdaop.hpp"
#include "tcgp/timechange.hpp"

namespace tcgp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

bool deterministic_clock(const ExperimentConfig& c) { return c.subordinator.deterministic(); }

double clock_weight(const ExperimentConfig& c) { return c.subordinator.components().front().weight; }

std::vector<double> x_grid(const SolverConfig& s) {
    std::vector<double> x(s.n_x);
    for (std::size_t k = 0; k < s.n_x; ++k) x[k] = s.x_min + s.dx() * static_cast<double>(k);
    return x;
}

std::vector<double> default_times(const ExperimentConfig& c) {
    if (!c.options.times.empty()) return c.options.times;
    const double T = c.solver.t_max;
    return {0.25 * T, 0.5 * T, T};
}

// Density of the time-changed process at time t: the Gaussian closed form
// for the deterministic clock, the subordination integral otherwise.
std::vector<double> reference_density(const ExperimentConfig& c, double t, std::span<const double> x) {
    const auto spec = c.time_changed();
    if (deterministic_clock(c)) {
        std::vector<double> q(x.size());
        for (std::size_t k = 0; k < x.size(); ++k)
            q[k] = gaussian_transition_density(spec.gauss, t / clock_weight(c), x.subspan(k, 1));
        return q;
    }
    const std::vector<double> ts = {t};
    return subordinated_density_grid(spec, ts, x, c.solver.tol).values;
}

struct SolverRoute {
    std::string reference;   // name of the oracle it is compared with
    double tolerance = 0.0;  // L-infinity agreement expected at n_x = n_t = 400
    std::function<GridDensity(const SolverConfig&)> solve;
};

std::optional<SolverRoute> solver_route(const ExperimentConfig& c) {
    if (deterministic_clock(c)) {
        if (clock_weight(c) != 1.0) return std::nullopt;
        SpatialOperator op;
        try {
            op = SpatialOperator::from_model(c.model, c.mean);
        } catch (const DomainError&) {
            return std::nullopt;
        }
        return SolverRoute{"closed_form", 1e-3, [op](const SolverConfig& s) { return solve_classical(op, s); }};
    }
    if (!c.mean.zero()) return std::nullopt;
    SpatialOperator op;
    if (c.model.kind() == CovarianceModel::Kind::brownian)
        op = SpatialOperator::scaled_laplacian(0.5);
    else if (c.model.kind() == CovarianceModel::Kind::ou)
        op = SpatialOperator::ou_generator(c.model.alpha(), c.model.sigma());
    else
        return std::nullopt;
    const double tol = c.subordinator.kind() == SubordinatorSpec::Kind::mixture ? 1e-2 : 5e-3;
    const auto sub = c.subordinator;
    return SolverRoute{"subordination", tol,
                       [op, sub](const SolverConfig& s) { return solve_distributed_order(op, sub, s); }};
}

std::size_t nearest_node(const std::vector<double>& grid, double t) {
    const auto it = std::min_element(grid.begin(), grid.end(),
                                     [t](double a, double b) { return std::abs(a - t) < std::abs(b - t); });
    return static_cast<std::size_t>(it - grid.begin());
}

double linf_at(const GridDensity& g, std::size_t i, const std::vector<double>& reference) {
    double e = 0.0;
    for (std::size_t k = 0; k < g.x_grid.size(); ++k) e = std::max(e, std::abs(g.at(i, k) - reference[k]));
    return e;
}

PathEnsemble simulate_paths(const ExperimentConfig& c, const std::vector<double>& grid, std::size_t paths) {
    const auto spec = c.time_changed();
    if (!deterministic_clock(c)) return sample_timechanged_paths(spec, grid, paths, {c.seed, 0}, c.options.op_step);
    std::vector<double> clock(grid);
    for (double& t : clock) t /= clock_weight(c);
    auto e = sample_gaussian_paths(spec.gauss, clock, paths, {c.seed, 0});
    e.grid = grid;
    return e;
}

// Reference probability of every histogram bin (7-point Gauss rule per bin).
std::vector<double> bin_probabilities(const ExperimentConfig& c, double t, const std::vector<double>& edges) {
    using Rule = boost::math::quadrature::gauss<double, 7>;
    std::vector<double> nodes, weights;
    for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
        const double mid = 0.5 * (edges[b] + edges[b + 1]), half = 0.5 * (edges[b + 1] - edges[b]);
        const auto& a = Rule::abscissa();
        const auto& w = Rule::weights();
        for (std::size_t i = 0; i < a.size(); ++i) {
            for (double sign : {-1.0, 1.0}) {
                if (a[i] == 0.0 && sign > 0) continue;
                nodes.push_back(mid + sign * half * a[i]);
                weights.push_back(half * w[i]);
            }
        }
    }
    const auto q = reference_density(c, t, nodes);
    const std::size_t per_bin = nodes.size() / (edges.size() - 1);
    std::vector<double> p(edges.size() - 1, 0.0);
    for (std::size_t i = 0; i < nodes.size(); ++i) p[i / per_bin] += weights[i] * q[i];
    return p;
}

Provenance provenance_for(const std::string& command, const ExperimentConfig& c) {
    return {command, c.canonical, c.hash(), c.seed};
}

void report_written(const std::vector<std::filesystem::path>& files) {
    for (const auto& f : files) std::cout << "wrote " << f.string() << "\n";
}

std::vector<std::filesystem::path> emit(const std::string& command, const ExperimentConfig& c,
                                        const std::vector<Artifact>& artifacts) {
    auto files = write_outputs(artifacts, provenance_for(command, c), output_directory(c.outputs));
    report_written(files);
    return files;
}

// ---------------------------------------------------------------- commands

int cmd_simulate(const ExperimentConfig& c) {
    std::vector<double> grid(c.options.steps + 1);
    for (std::size_t i = 0; i <= c.options.steps; ++i)
        grid[i] = c.solver.t_max * static_cast<double>(i) / static_cast<double>(c.options.steps);
    const auto e = simulate_paths(c, grid, c.options.paths);
    std::string csv = "path,t,x\n";
    for (std::size_t p = 0; p < e.n_paths; ++p)
        for (std::size_t i = 0; i < grid.size(); ++i)
            csv += std::to_string(p) + "," + format_number(grid[i]) + "," + format_number(e.at(p, i)) + "\n";
    emit("simulate", c, {{"paths.csv", csv}});
    return 0;
}

int cmd_density(const ExperimentConfig& c) {
    GridDensity g;
    g.t_grid = c.options.times.empty() ? std::vector<double>{c.solver.t_max} : c.options.times;
    g.x_grid = x_grid(c.solver);
    for (double t : g.t_grid) {
        const auto q = reference_density(c, t, g.x_grid);
        g.values.insert(g.values.end(), q.begin(), q.end());
    }
    update_mass_error(g);
    for (std::size_t i = 0; i < g.t_grid.size(); ++i)
        std::cout << "t=" << format_number(g.t_grid[i]) << " trapezoid mass error " << format_number(g.mass_error[i]) << "\n";
    emit("density", c, {{"density.csv", grid_density_csv(g)}});
    return 0;
}

SolverRoute require_route(const ExperimentConfig& c, const std::string& command) {
    auto route = solver_route(c);
    if (!route)
        throw DomainError(command +
                          ": no finite-difference solver for this model and clock (supported: any model with the "
                          "deterministic clock of weight 1; zero-mean brownian or ou with a stable or mixture clock)");
    return *route;
}

int cmd_solve(const ExperimentConfig& c) {
    const auto route = require_route(c, "solve");
    const auto g = route.solve(c.solver);
    const std::size_t stride = c.options.output_stride ? c.options.output_stride : std::max<std::size_t>(1, c.solver.n_t / 10);
    std::cout << "max mass error " << format_number(*std::max_element(g.mass_error.begin(), g.mass_error.end()))
              << ", clamped values " << g.clamped << "\n";
    emit("solve", c, {{"solution.csv", grid_density_csv(g, stride)}});
    return 0;
}

int cmd_operators(const ExperimentConfig& c) {
    const bool single = c.subordinator.components().size() == 1 && !deterministic_clock(c) &&
                        c.subordinator.components().front().weight == 1.0;
    const bool lambda = !deterministic_clock(c) && c.model.closed_form_laplace();
    if (!single && !lambda)
        throw DomainError("operators: G needs a single stable clock of weight 1 and Lambda a model with a "
                          "closed-form variance transform");
    const double hurst = c.model.kind() == CovarianceModel::Kind::fbm ? c.model.hurst() : 0.5;
    const double gamma = c.options.gamma.value_or(2.0 * hurst - 1.0);

    const std::vector<std::pair<std::string, TransformableInput>> inputs = {
        {"one", TransformableInput::analytic([](Complex z) { return 1.0 / z; })},
        {"exp_decay", TransformableInput::analytic([](Complex z) { return 1.0 / (z + 1.0); }, -1.0)}};

    std::string csv = "input,t,operator,value,error\n";
    auto row = [&](const std::string& input, double t, const std::string& op, const Estimate& e) {
        csv += input + "," + format_number(t) + "," + op + "," + format_number(e.value) + "," + format_number(e.error) + "\n";
    };
    for (const auto& [name, g] : inputs) {
        for (double t : default_times(c)) {
            if (single) {
                auto spec = OperatorSpec::G(c.subordinator.single_beta(), gamma);
                spec.tol = c.solver.tol;
                row(name, t, "G", eval_G(spec, g, t));
            }
            if (lambda) {
                auto spec = OperatorSpec::Lambda(c.subordinator, c.model);
                spec.tol = c.solver.tol;
                row(name, t, "Lambda", eval_Lambda(spec, g, t));
                if (single) {
                    spec.outer_integral = 1.0 - c.subordinator.single_beta();
                    row(name, t, "J_Lambda", eval_Lambda(spec, g, t));
                }
            }
        }
    }
    std::cout << csv;
    emit("operators", c, {{"operators.csv", csv}});
    return 0;
}

int cmd_moments(const ExperimentConfig& c, const std::vector<double>& gammas, bool monte_carlo) {
    const auto times = c.options.times.empty() ? std::vector<double>{c.solver.t_max} : c.options.times;
    InverseTimeEnsemble e;
    if (monte_carlo) e = sample_inverse_times(c.subordinator, times, c.options.paths, c.seed, c.options.op_step);
    std::string csv = monte_carlo ? "t,gamma,moment,mc_mean,mc_standard_error\n" : "t,gamma,moment\n";
    for (std::size_t i = 0; i < times.size(); ++i) {
        for (double gamma : gammas) {
            csv += format_number(times[i]) + "," + format_number(gamma) + "," +
                   format_number(inverse_time_moment(c.subordinator, times[i], gamma, c.solver.tol));
            if (monte_carlo) {
                double sum = 0.0, sum2 = 0.0;
                for (std::size_t p = 0; p < e.n_paths; ++p) {
                    const double v = std::pow(e.at(p, i), gamma);
                    sum += v;
                    sum2 += v * v;
                }
                const double n = static_cast<double>(e.n_paths), mean = sum / n;
                const double se = n > 1 ? std::sqrt(std::max(0.0, sum2 / n - mean * mean) / (n - 1)) : 0.0;
                csv += "," + format_number(mean) + "," + format_number(se);
            }
            csv += "\n";
        }
    }
    std::cout << csv;
    emit("moments", c, {{"moments.csv", csv}});
    return 0;
}

// Runs one check, timing it. `measure` returns the compared value.
void run_check(RunReport& report, const std::string& name, double tolerance, bool at_least,
               const std::function<double()>& measure) {
    const auto start = Clock::now();
    CheckRecord r{name, measure(), tolerance, at_least, false, 0.0};
    r.runtime = seconds_since(start);
    r.passed = std::isfinite(r.value) && (at_least ? r.value >= tolerance : r.value <= tolerance);
    std::printf("%s %-40s %-12.4g %s %-8.3g (%.2f s)\n", r.passed ? "PASS" : "FAIL", name.c_str(), r.value,
                at_least ? ">=" : "<=", tolerance, r.runtime);
    std::fflush(stdout);
    report.checks.push_back(r);
}

std::string at_time(const std::string& name, double t) { return name + "(t=" + format_number(t) + ")"; }

RunReport validate_checks(const ExperimentConfig& c) {
    RunReport report;
    const auto times = default_times(c);
    const auto x = x_grid(c.solver);
    const bool mixture = c.subordinator.kind() == SubordinatorSpec::Kind::mixture;

    std::vector<std::vector<double>> reference(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) reference[i] = reference_density(c, times[i], x);

    run_check(report, at_time("reference_mass", times.back()), 1e-6, false, [&] {
        // Gauss panels with a node at the starting point, where q has a cusp.
        const double origin = c.mean.value(0.0);
        std::vector<double> edges;
        const std::size_t panels = 96;
        for (std::size_t i = 0; i <= panels; ++i)
            edges.push_back(c.solver.x_min + (c.solver.x_max - c.solver.x_min) * double(i) / double(panels));
        const double lo = c.solver.x_min, hi = c.solver.x_max;
        if (origin > lo && origin < hi) {
            // Geometric refinement toward the cusp.
            const double width = hi - lo;
            for (int k = 7; k <= 50; ++k)
                for (double sign : {-1.0, 1.0}) {
                    const double e = origin + sign * width * std::ldexp(1.0, -k);
                    if (e > lo && e < hi) edges.push_back(e);
                }
            edges.push_back(origin);
        }
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
        const auto p = bin_probabilities(c, times.back(), edges);
        double mass = 0.0;
        for (double v : p) mass += v;
        return std::abs(1.0 - mass);
    });

    if (const auto route = solver_route(c)) {
        GridDensity g;
        run_check(report, "solver_mass", 1e-6, false, [&] {
            g = route->solve(c.solver);
            return *std::max_element(g.mass_error.begin(), g.mass_error.end());
        });
        for (std::size_t i = 0; i < times.size(); ++i) {
            run_check(report, at_time("solver_vs_" + route->reference, times[i]), route->tolerance, false, [&] {
                const std::size_t n = nearest_node(g.t_grid, times[i]);
                const auto& q = std::abs(g.t_grid[n] - times[i]) < 1e-12 ? reference[i]
                                                                          : reference_density(c, g.t_grid[n], x);
                return linf_at(g, n, q);
            });
        }
    }

    {
        std::vector<double> grid = {0.0};
        grid.insert(grid.end(), times.begin(), times.end());
        PathEnsemble e;
        run_check(report, "mc_paths_finite", 0.0, false, [&] {
            e = simulate_paths(c, grid, c.options.paths);
            return static_cast<double>(std::count_if(e.values.begin(), e.values.end(),
                                                     [](double v) { return !std::isfinite(v); }));
        });
        for (double t : times) {
            // 1% family-wise level over the slices (Bonferroni).
            run_check(report, at_time("mc_chi_square_p", t), 0.01 / double(times.size()), true, [&] {
                const auto h = empirical_density(e, t, c.options.bins);
                return chi_square_test(h, bin_probabilities(c, t, h.edges)).p_value;
            });
        }
    }

    const auto kind = c.model.kind();
    if ((kind == CovarianceModel::Kind::brownian || kind == CovarianceModel::Kind::fbm) && c.mean.zero()) {
        const double two_h = 2.0 * c.model.hurst();
        run_check(report, at_time("variance_vs_clock_moment", times.back()), 1e-3, false, [&] {
            std::vector<double> y(x.size());
            for (std::size_t k = 0; k < x.size(); ++k) y[k] = x[k] * x[k] * reference.back()[k];
            const double expected = inverse_time_moment(c.subordinator, times.back(), two_h, c.solver.tol);
            return std::abs(trapezoid(x, y) / expected - 1.0);
        });
    }

    const bool unit_stable = c.subordinator.kind() == SubordinatorSpec::Kind::stable && !deterministic_clock(c) &&
                             clock_weight(c) == 1.0;
    if (kind == CovarianceModel::Kind::fbm && unit_stable) {
        // D^beta Var = 2H G^beta_{2H-1}[1], with Var = C t^{2H beta} by self-similarity of the clock.
        const double h = c.model.hurst(), beta = c.subordinator.single_beta(), t = times.back();
        run_check(report, at_time("moment_fpke_identity", t), 1e-3, false, [&] {
            const double a = 2.0 * h * beta;
            const double var1 = inverse_time_moment(c.subordinator, 1.0, 2.0 * h, c.solver.tol);
            const double lhs = var1 * std::tgamma(a + 1.0) / std::tgamma(a + 1.0 - beta) * std::pow(t, a - beta);
            auto spec = OperatorSpec::G(beta, 2.0 * h - 1.0);
            spec.tol = c.solver.tol;
            const double rhs = 2.0 * h * eval_G(spec, TransformableInput::analytic([](Complex z) { return 1.0 / z; }), t).value;
            return std::abs(lhs / rhs - 1.0);
        });
    }

    if (!deterministic_clock(c) && kind != CovarianceModel::Kind::variable_hurst) {
        for (double xv : {0.0, 0.5}) {
            run_check(report, "laplace_subordination_residual(s=1,x=" + format_number(xv) + ")",
                      mixture ? 1e-3 : 1e-4, false, [&] {
                          return laplace_subordination_residual(c.time_changed(), 1.0, {&xv, 1}, c.solver.tol);
                      });
        }
    }
    return report;
}

int cmd_validate(const ExperimentConfig& c) {
    for (double t : c.options.times)
        if (t > c.solver.t_max) throw ConfigError("options.times: validate times must not exceed solver.t_max");
    const auto report = validate_checks(c);
    const auto provenance = provenance_for("validate", c);
    report_written(write_outputs({{"report.json", report.to_json(provenance)}}, provenance, output_directory(c.outputs)));
    const std::size_t failed = std::count_if(report.checks.begin(), report.checks.end(),
                                             [](const CheckRecord& r) { return !r.passed; });
    std::cout << (failed ? std::to_string(failed) + " of " + std::to_string(report.checks.size()) + " checks failed"
                         : "all " + std::to_string(report.checks.size()) + " checks passed")
              << "\n";
    return failed ? 1 : 0;
}

int cmd_convergence(const ExperimentConfig& c) {
    const auto route = require_route(c, "convergence");
    std::string csv = "n_x,n_t,h,error,order\n";
    double previous = 0.0;
    for (std::size_t level = 0; level < c.options.levels; ++level) {
        SolverConfig s = c.solver;
        const std::size_t div = std::size_t{1} << (c.options.levels - 1 - level);
        s.n_x = std::max<std::size_t>(16, c.solver.n_x / div);
        s.n_t = std::max<std::size_t>(16, c.solver.n_t / div);
        if (s.init_width > 0.0) s.init_width = std::max(s.init_width, 2.0 * s.dx());
        const auto g = route.solve(s);
        const std::size_t last = g.t_grid.size() - 1;
        const double err = linf_at(g, last, reference_density(c, g.t_grid[last], g.x_grid));
        csv += std::to_string(s.n_x) + "," + std::to_string(s.n_t) + "," + format_number(s.dx()) + "," +
               format_number(err) + "," + (level ? format_number(std::log2(previous / err)) : "") + "\n";
        previous = err;
    }
    std::cout << csv;
    emit("convergence", c, {{"convergence.csv", csv}});
    return 0;
}

ExperimentConfig config_from_flags(double beta) {
    nlohmann::json j = {{"model", {{"kind", "brownian"}}}, {"subordinator", {{"kind", "stable"}, {"beta", beta}}}};
    return parse_config(j.dump(), "--beta");
}

}  // namespace

int run_command(int argc, char** argv) {
    CLI::App app{"Time-changed Gaussian processes: simulation, densities, FPKE solvers and operator checks", "tcgp"};
    app.require_subcommand(1);

    std::string config_path, out;
    std::uint64_t seed = 0;
    std::size_t paths = 0, steps = 0, stride = 0, levels = 0, bins = 0;
    double op_step = 0.0, beta = 0.5;
    std::vector<double> times, gammas;

    auto common = [&](CLI::App* sub, bool config_required) {
        auto* opt = sub->add_option("--config", config_path, "experiment config (JSON)")->check(CLI::ExistingFile);
        if (config_required) opt->required();
        sub->add_option("--out", out, "output directory (default $TCGP_OUTPUT_DIR or ./tcgp_out)");
        sub->add_option("--seed", seed, "master seed");
    };
    auto* simulate = app.add_subcommand("simulate", "sample time-changed paths");
    common(simulate, true);
    simulate->add_option("--paths", paths, "number of paths (>= 1)");
    simulate->add_option("--steps", steps, "grid intervals on [0, t_max]");
    simulate->add_option("--op-step", op_step, "operational step of the clock sampler");

    auto* density = app.add_subcommand("density", "density by subordination");
    common(density, true);
    density->add_option("--times", times, "evaluation times (comma-separated or repeated)")->delimiter(',');

    auto* solve = app.add_subcommand("solve", "density by the finite-difference FPKE solver");
    common(solve, true);
    solve->add_option("--stride", stride, "write every k-th time slice");

    auto* operators = app.add_subcommand("operators", "values of the G and Lambda operators");
    common(operators, true);
    operators->add_option("--times", times, "evaluation times (comma-separated or repeated)")->delimiter(',');
    operators->add_option("--gamma", gammas, "order gamma of G (default 2H-1)")->expected(1);

    auto* moments = app.add_subcommand("moments", "moments E[E_t^gamma] of the inverse clock");
    common(moments, false);
    moments->add_option("--beta", beta, "stability index when no config is given");
    moments->add_option("--gamma", gammas, "moment orders (repeatable)")->delimiter(',');
    moments->add_option("--t", times, "times (repeatable)")->delimiter(',');
    moments->add_option("--paths", paths, "add a Monte Carlo column with this many paths");
    moments->add_option("--op-step", op_step, "operational step of the clock sampler");

    auto* validate = app.add_subcommand("validate", "cross-check simulation, subordination and solvers");
    common(validate, true);
    validate->add_option("--paths", paths, "Monte Carlo paths");
    validate->add_option("--times", times, "check times (comma-separated or repeated)")->delimiter(',');

    auto* convergence = app.add_subcommand("convergence", "solver error under grid refinement");
    common(convergence, true);
    convergence->add_option("--levels", levels, "number of grids");
    for (auto* sub : {simulate, validate}) sub->add_option("--bins", bins, "histogram bins");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    auto given = [](CLI::App* sub, const std::string& name) {
        const auto* opt = sub->get_option_no_throw(name);
        return opt && opt->count() > 0;
    };

    try {
        CLI::App* sub = app.get_subcommands().front();
        ExperimentConfig c;
        if (!config_path.empty()) {
            c = load_config(config_path);
        } else {
            if (beta <= 0.0 || beta > 1.0) throw ConfigError("--beta: must lie in (0, 1]");
            c = config_from_flags(beta);
        }
        if (given(sub, "--out")) c.outputs = out;
        if (given(sub, "--seed")) c.seed = seed;
        if (given(sub, "--paths")) c.options.paths = paths;
        if (given(sub, "--steps")) c.options.steps = steps;
        if (given(sub, "--op-step")) c.options.op_step = op_step;
        if (given(sub, "--times")) c.options.times = times;
        if (given(sub, "--t")) c.options.times = times;
        if (given(sub, "--stride")) c.options.output_stride = stride;
        if (given(sub, "--levels")) c.options.levels = levels;
        if (given(sub, "--bins")) c.options.bins = bins;
        if (sub == operators && given(sub, "--gamma")) c.options.gamma = gammas.front();
        if (sub == moments && !gammas.empty()) {
            for (double g : gammas)
                if (g <= -1.0) throw ConfigError("--gamma: must exceed -1");
        }
        finalize_config(c);

        const std::string name = sub->get_name();
        if (name == "simulate") return cmd_simulate(c);
        if (name == "density") return cmd_density(c);
        if (name == "solve") return cmd_solve(c);
        if (name == "operators") return cmd_operators(c);
        if (name == "moments") {
            if (gammas.empty()) gammas = {c.options.gamma.value_or(1.0)};
            return cmd_moments(c, gammas, given(sub, "--paths"));
        }
        if (name == "validate") return cmd_validate(c);
        return cmd_convergence(c);
    } catch (const ConfigError& e) {
        std::cerr << "tcgp: config error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "tcgp: invalid input: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "tcgp: numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "tcgp: error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace tcgp
