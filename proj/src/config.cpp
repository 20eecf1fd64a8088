#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"
#include "tcgp/cli.hpp"
#include "tcgp/errors.hpp"

namespace tcgp {

namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

std::string type_name(const json& j) { return j.type_name(); }

// Walks one JSON object, records every key it reads into a normalized copy,
// and rejects keys it did not read.
class ObjectReader {
public:
    ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object())
            throw ConfigError(where() + "expected an object, got " + type_name(j_));
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json& raw(const std::string& key) {
        if (!has(key)) throw ConfigError(field(key) + "is required");
        seen_.insert(key);
        return j_.at(key);
    }

    double number(const std::string& key, std::optional<double> fallback = {}) {
        if (!has(key)) return store(key, require_default(key, fallback));
        const json& v = raw(key);
        if (!v.is_number()) throw ConfigError(field(key) + "expected a number, got " + type_name(v));
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw ConfigError(field(key) + "must be finite");
        return store(key, x);
    }

    std::uint64_t integer(const std::string& key, std::optional<std::uint64_t> fallback = {}) {
        if (!has(key)) {
            if (!fallback) throw ConfigError(field(key) + "is required");
            out_[key] = *fallback;
            return *fallback;
        }
        const json& v = raw(key);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
            throw ConfigError(field(key) + "expected a non-negative integer, got " + v.dump());
        const auto x = v.get<std::uint64_t>();
        out_[key] = x;
        return x;
    }

    std::string string(const std::string& key, std::optional<std::string> fallback = {}) {
        if (!has(key)) {
            if (!fallback) throw ConfigError(field(key) + "is required");
            out_[key] = *fallback;
            return *fallback;
        }
        const json& v = raw(key);
        if (!v.is_string()) throw ConfigError(field(key) + "expected a string, got " + type_name(v));
        out_[key] = v;
        return v.get<std::string>();
    }

    std::vector<double> numbers(const std::string& key, std::optional<std::vector<double>> fallback = {}) {
        if (!has(key)) {
            if (!fallback) throw ConfigError(field(key) + "is required");
            out_[key] = *fallback;
            return *fallback;
        }
        const json& v = raw(key);
        if (!v.is_array()) throw ConfigError(field(key) + "expected an array, got " + type_name(v));
        std::vector<double> xs;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number() || !std::isfinite(v[i].get<double>()))
                throw ConfigError(field(key + "[" + std::to_string(i) + "]") + "expected a finite number");
            xs.push_back(v[i].get<double>());
        }
        out_[key] = xs;
        return xs;
    }

    /// Stores a normalized sub-object.
    void set(const std::string& key, json value) { out_[key] = std::move(value); }

    std::string child(const std::string& key) const { return join(path_, key); }
    std::string field(const std::string& key) const { return join(path_, key) + ": "; }

    /// Rejects unread keys and returns the normalized object.
    json finish() const {
        for (const auto& item : j_.items())
            if (!seen_.count(item.key())) throw ConfigError(field(item.key()) + "unknown key");
        return out_;
    }

private:
    std::string where() const { return path_.empty() ? "" : path_ + ": "; }

    double require_default(const std::string& key, std::optional<double> fallback) const {
        if (!fallback) throw ConfigError(field(key) + "is required");
        return *fallback;
    }

    double store(const std::string& key, double x) {
        out_[key] = x;
        return x;
    }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
    json out_ = json::object();
};

void check(bool ok, const std::string& field, const std::string& message) {
    if (!ok) throw ConfigError(field + ": " + message);
}

// Runs a library factory and reattaches its DomainError to a field path.
template <class F>
auto at_field(const std::string& field, F&& f) {
    try {
        return f();
    } catch (const DomainError& e) {
        throw ConfigError(field + ": " + e.what());
    }
}

HurstFunction read_hurst_function(const json& j, const std::string& path, json& out) {
    ObjectReader r(j, path);
    const std::string kind = r.string("kind");
    HurstFunction h = HurstFunction::constant(0.5);
    if (kind == "constant") {
        const double v = r.number("value");
        check(v > 0.5 && v < 1.0, r.child("value"), "must lie in (0.5, 1)");
        h = HurstFunction::constant(v);
    } else if (kind == "polynomial") {
        const auto c = r.numbers("coefficients");
        check(!c.empty(), r.child("coefficients"), "must not be empty");
        h = HurstFunction::polynomial(c);
    } else if (kind == "saturating") {
        const double h0 = r.number("h0"), amplitude = r.number("amplitude"), scale = r.number("scale", 1.0);
        check(scale > 0.0, r.child("scale"), "must be positive");
        h = HurstFunction::saturating(h0, amplitude, scale);
    } else {
        throw ConfigError(r.child("kind") + ": unknown Hurst function '" + kind +
                          "' (expected constant, polynomial or saturating)");
    }
    out = r.finish();
    return h;
}

CovarianceModel read_model(const json& j, const std::string& path, json& out) {
    ObjectReader r(j, path);
    const std::string kind = r.string("kind");
    auto model = CovarianceModel::brownian();
    if (kind == "brownian") {
    } else if (kind == "fbm") {
        const double h = r.number("hurst");
        check(h > 0.0 && h < 1.0, r.child("hurst"), "must lie in (0, 1), got " + format_number(h));
        model = CovarianceModel::fbm(h);
    } else if (kind == "ou") {
        const double alpha = r.number("alpha"), sigma = r.number("sigma", 1.0);
        check(alpha >= 0.0, r.child("alpha"), "must be non-negative");
        check(sigma > 0.0, r.child("sigma"), "must be positive");
        model = CovarianceModel::ou(alpha, sigma);
    } else if (kind == "mixed") {
        const json& terms = r.raw("terms");
        check(terms.is_array() && !terms.empty(), r.child("terms"), "expected a non-empty array");
        std::vector<MixedTerm> parts;
        json normalized = json::array();
        for (std::size_t i = 0; i < terms.size(); ++i) {
            const std::string tp = r.child("terms") + "[" + std::to_string(i) + "]";
            ObjectReader t(terms[i], tp);
            const double c = t.number("coefficient", 1.0);
            json sub;
            const auto m = read_model(t.raw("model"), t.child("model"), sub);
            t.set("model", sub);
            parts.push_back({c, std::make_shared<const CovarianceModel>(m)});
            normalized.push_back(t.finish());
        }
        r.set("terms", normalized);
        model = at_field(r.child("terms"), [&] { return CovarianceModel::mixed(parts); });
    } else if (kind == "variable_hurst") {
        json hn;
        const auto h = read_hurst_function(r.raw("hurst"), r.child("hurst"), hn);
        r.set("hurst", hn);
        const double horizon = r.number("horizon");
        check(horizon > 0.0, r.child("horizon"), "must be positive");
        model = at_field(r.child("hurst"), [&] { return CovarianceModel::variable_hurst(h, horizon); });
    } else if (kind == "piecewise_hurst") {
        const auto breaks = r.numbers("breakpoints");
        const auto hursts = r.numbers("hursts");
        check(!breaks.empty() && breaks.front() == 0.0, r.child("breakpoints"), "must start at 0");
        check(hursts.size() == breaks.size(), r.child("hursts"), "needs one entry per breakpoint");
        for (std::size_t i = 0; i < hursts.size(); ++i)
            check(hursts[i] > 0.0 && hursts[i] < 1.0, r.child("hursts") + "[" + std::to_string(i) + "]",
                  "must lie in (0, 1)");
        model = at_field(r.child("breakpoints"), [&] { return CovarianceModel::piecewise_hurst(breaks, hursts); });
    } else {
        throw ConfigError(r.child("kind") + ": unknown model '" + kind +
                          "' (expected brownian, fbm, ou, mixed, variable_hurst or piecewise_hurst)");
    }
    out = r.finish();
    return model;
}

SubordinatorSpec read_subordinator(const json& j, const std::string& path, json& out) {
    ObjectReader r(j, path);
    const std::string kind = r.string("kind", "stable");
    auto component = [](ObjectReader& c) {
        const double beta = c.number("beta");
        check(beta > 0.0 && beta <= 1.0, c.child("beta"), "must lie in (0, 1], got " + format_number(beta));
        const double weight = c.number("weight", 1.0);
        check(weight > 0.0, c.child("weight"), "must be positive");
        return StableComponent{beta, weight};
    };
    SubordinatorSpec spec = SubordinatorSpec::stable(0.5);
    if (kind == "stable") {
        const auto c = component(r);
        spec = at_field(path, [&] { return SubordinatorSpec::stable(c.beta, c.weight); });
    } else if (kind == "mixture") {
        const json& list = r.raw("components");
        check(list.is_array() && !list.empty(), r.child("components"), "expected a non-empty array");
        std::vector<StableComponent> parts;
        json normalized = json::array();
        for (std::size_t i = 0; i < list.size(); ++i) {
            ObjectReader c(list[i], r.child("components") + "[" + std::to_string(i) + "]");
            parts.push_back(component(c));
            normalized.push_back(c.finish());
        }
        r.set("components", normalized);
        spec = at_field(r.child("components"), [&] { return SubordinatorSpec::mixture(parts); });
    } else {
        throw ConfigError(r.child("kind") + ": unknown subordinator '" + kind + "' (expected stable or mixture)");
    }
    out = r.finish();
    return spec;
}

SolverConfig read_solver(const json& j, const std::string& path, json& out) {
    ObjectReader r(j, path);
    SolverConfig cfg;
    cfg.t_max = r.number("t_max", cfg.t_max);
    check(cfg.t_max > 0.0, r.child("t_max"), "must be positive");
    cfg.n_t = r.integer("n_t", cfg.n_t);
    check(cfg.n_t >= 16, r.child("n_t"), "must be at least 16");
    cfg.x_min = r.number("x_min", cfg.x_min);
    cfg.x_max = r.number("x_max", cfg.x_max);
    check(cfg.x_min < cfg.x_max, r.child("x_max"), "must exceed x_min");
    cfg.n_x = r.integer("n_x", cfg.n_x);
    check(cfg.n_x >= 16, r.child("n_x"), "must be at least 16");
    cfg.init_width = r.number("init_width", cfg.init_width);
    check(cfg.init_width == 0.0 || cfg.init_width >= 2.0 * cfg.dx(), r.child("init_width"),
          "must be 0 (lattice point mass) or at least 2 dx");

    json tol_out = json::object();
    const json empty = json::object();
    ObjectReader t(r.has("tolerances") ? r.raw("tolerances") : empty, r.child("tolerances"));
    cfg.tol.quadrature = t.number("quadrature", cfg.tol.quadrature);
    cfg.tol.inversion_agreement = t.number("inversion_agreement", cfg.tol.inversion_agreement);
    cfg.tol.density_floor = t.number("density_floor", cfg.tol.density_floor);
    check(cfg.tol.quadrature > 0.0 && cfg.tol.quadrature < 1.0, t.child("quadrature"), "must lie in (0, 1)");
    check(cfg.tol.inversion_agreement > 0.0 && cfg.tol.inversion_agreement < 1.0, t.child("inversion_agreement"),
          "must lie in (0, 1)");
    check(cfg.tol.density_floor >= 0.0, t.child("density_floor"), "must be non-negative");
    r.set("tolerances", t.finish());
    at_field(path, [&] {
        cfg.validate();
        return 0;
    });
    out = r.finish();
    return cfg;
}

void read_options(const json& j, const std::string& path, CommandOptions& o, json& out) {
    ObjectReader r(j, path);
    o.paths = r.integer("paths", o.paths);
    o.steps = r.integer("steps", o.steps);
    o.op_step = r.number("op_step", o.op_step);
    o.times = r.numbers("times", o.times);
    o.bins = r.integer("bins", o.bins);
    o.output_stride = r.integer("output_stride", o.output_stride);
    o.levels = r.integer("levels", o.levels);
    if (r.has("gamma")) o.gamma = r.number("gamma");
    out = r.finish();
}

json options_json(const CommandOptions& o) {
    json j = {{"paths", o.paths}, {"steps", o.steps},  {"op_step", o.op_step},
              {"times", o.times}, {"bins", o.bins},    {"output_stride", o.output_stride},
              {"levels", o.levels}};
    if (o.gamma) j["gamma"] = *o.gamma;
    return j;
}

void validate_options(const CommandOptions& o) {
    check(o.paths >= 1, "options.paths", "must be at least 1");
    check(o.steps >= 1, "options.steps", "must be at least 1");
    check(o.op_step > 0.0 && o.op_step <= 0.1, "options.op_step", "must lie in (0, 0.1]");
    for (std::size_t i = 0; i < o.times.size(); ++i) {
        const std::string f = "options.times[" + std::to_string(i) + "]";
        check(o.times[i] > 0.0, f, "must be positive");
        check(i == 0 || o.times[i] > o.times[i - 1], f, "times must be increasing");
    }
    check(o.bins >= 10, "options.bins", "must be at least 10");
    check(o.levels >= 2 && o.levels <= 6, "options.levels", "must lie in [2, 6]");
    if (o.gamma) check(*o.gamma > -1.0, "options.gamma", "must exceed -1");
}

}  // namespace

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a(canonical); }

TimeChangedSpec ExperimentConfig::time_changed() const {
    GaussianSpec gauss = GaussianSpec::isotropic(model);
    if (!mean.zero()) gauss.means = {mean};
    return {gauss, subordinator};
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(source + ": invalid JSON: " + e.what());
    }
    try {
        ExperimentConfig cfg;
        ObjectReader r(j, "");
        json part;
        cfg.model = read_model(r.raw("model"), "model", part);
        r.set("model", part);
        cfg.mean.coefficients = r.numbers("mean", std::vector<double>{});
        if (r.has("subordinator")) {
            cfg.subordinator = read_subordinator(r.raw("subordinator"), "subordinator", part);
        } else {
            cfg.subordinator = read_subordinator(json{{"beta", 0.5}}, "subordinator", part);
        }
        r.set("subordinator", part);
        cfg.solver = read_solver(r.has("solver") ? r.raw("solver") : json::object(), "solver", part);
        r.set("solver", part);
        cfg.seed = r.integer("seed", 0);
        cfg.outputs = r.string("outputs", "");
        read_options(r.has("options") ? r.raw("options") : json::object(), "options", cfg.options, part);
        json normalized = r.finish();
        // The output location is not part of the experiment.
        normalized.erase("outputs");
        cfg.canonical = normalized.dump();
        finalize_config(cfg);
        return cfg;
    } catch (const ConfigError& e) {
        throw ConfigError(source + ": " + e.what());
    } catch (const json::exception& e) {
        throw ConfigError(source + ": " + e.what());
    }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string() + ": cannot open config file");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), path.string());
}

void finalize_config(ExperimentConfig& cfg) {
    validate_options(cfg.options);
    json j = cfg.canonical.empty() ? json::object() : json::parse(cfg.canonical);
    // Rebuild from the typed values so flag overrides are reflected.
    j["seed"] = cfg.seed;
    j["options"] = options_json(cfg.options);
    cfg.canonical = j.dump();
}

}  // namespace tcgp
