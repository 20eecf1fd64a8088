#include <boost/version.hpp>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include <Eigen/Core>

#include "json.hpp"
#include "tcgp/cli.hpp"
#include "tcgp/errors.hpp"

namespace tcgp {

namespace {

constexpr const char* kVersion = "0.1.0";

std::string hex64(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

nlohmann::json versions() {
    return {{"tcgp", kVersion},
            {"boost", BOOST_LIB_VERSION},
            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                          std::to_string(EIGEN_MINOR_VERSION)},
            {"compiler", __VERSION__}};
}

nlohmann::json provenance_json(const Provenance& p) {
    return {{"command", p.command},
            {"config", nlohmann::json::parse(p.config)},
            {"config_hash", hex64(p.config_hash)},
            {"seed", p.seed},
            {"versions", versions()}};
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.close();
    if (!out) throw Error("failed writing " + path.string());
}

}  // namespace

std::string format_number(double value) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, r.ptr);
}

std::string grid_density_csv(const GridDensity& density, std::size_t stride) {
    if (stride == 0) stride = 1;
    std::string out = "t,x,q\n";
    const std::size_t nt = density.t_grid.size();
    for (std::size_t i = 0; i < nt; ++i) {
        if (i % stride != 0 && i + 1 != nt) continue;
        const std::string t = format_number(density.t_grid[i]);
        for (std::size_t k = 0; k < density.x_grid.size(); ++k) {
            out += t;
            out += ',';
            out += format_number(density.x_grid[k]);
            out += ',';
            out += format_number(density.at(i, k));
            out += '\n';
        }
    }
    return out;
}

std::filesystem::path output_directory(const std::string& requested) {
    if (!requested.empty()) return requested;
    if (const char* env = std::getenv("TCGP_OUTPUT_DIR"); env && *env) return env;
    return "tcgp_out";
}

std::vector<std::filesystem::path> write_outputs(const std::vector<Artifact>& artifacts,
                                                 const Provenance& provenance,
                                                 const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());

    std::vector<std::pair<fs::path, std::string>> files;
    for (const auto& a : artifacts) {
        files.emplace_back(dir / a.name, a.contents);
        auto meta = provenance_json(provenance);
        meta["artifact"] = a.name;
        meta["bytes"] = a.contents.size();
        meta["fnv1a"] = hex64(fnv1a(a.contents));
        files.emplace_back(dir / (fs::path(a.name).stem().string() + ".meta.json"), meta.dump(2) + "\n");
    }

    std::vector<fs::path> temporaries;
    try {
        for (const auto& [path, contents] : files) {
            temporaries.push_back(path.string() + ".tmp");
            write_file(temporaries.back(), contents);
        }
        std::vector<fs::path> written;
        for (std::size_t i = 0; i < files.size(); ++i) {
            fs::rename(temporaries[i], files[i].first, ec);
            if (ec) throw Error("cannot move " + temporaries[i].string() + " to " + files[i].first.string() + ": " +
                                ec.message());
            written.push_back(files[i].first);
        }
        return written;
    } catch (...) {
        for (const auto& t : temporaries) fs::remove(t, ec);
        throw;
    }
}

bool RunReport::passed() const {
    for (const auto& c : checks)
        if (!c.passed) return false;
    return true;
}

std::string RunReport::to_json(const Provenance& provenance) const {
    auto j = provenance_json(provenance);
    j["checks"] = nlohmann::json::array();
    for (const auto& c : checks)
        j["checks"].push_back({{"name", c.name},
                               {"value", c.value},
                               {"tolerance", c.tolerance},
                               {"comparison", c.at_least ? ">=" : "<="},
                               {"passed", c.passed},
                               {"runtime_seconds", c.runtime}});
    j["passed"] = passed();
    return j.dump(2) + "\n";
}

}  // namespace tcgp
