// io.cpp — artifact writers and lattice JSON round-trip

#include "bilayer/io.hpp"

#include "bilayer/errors.hpp"
#include "bilayer/kernels.hpp"
#include "bilayer/parallel.hpp"

#include <fmt/format.h>

#include <chrono>
#include <ctime>
#include <sstream>

namespace bilayer::io {

std::string format_real(double x) {
    if (x == 0.0) return "0";  // folds −0 so sign-of-zero noise cannot change bytes
    return fmt::format("{:.17g}", x);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw ConfigError("output_not_writable", fmt::format("cannot open '{}' for writing", path.string()));
    std::string line;
    for (std::size_t i = 0; i < header.size(); ++i) line += (i ? "," : "") + header[i];
    out_ << line << '\n';
}

void CsvWriter::close() {
    out_.close();
    if (out_.fail()) throw ConfigError("output_not_writable", fmt::format("write to '{}' failed", path_.string()));
}

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t h) { return fmt::format("{:016x}", h); }

std::uint64_t file_hash(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return fnv1a64(ss.str());
}

std::optional<DisorderRealization> LatticeSpec::realize() const {
    if (!disorder) return std::nullopt;
    return DisorderRealization::generate(lattice, disorder->seed, disorder->W_intra, disorder->W_inter,
                                         disorder->kind);
}

LatticeSpec lattice_from_json(const json& j) {
    LatticeSpec s;
    try {
        s.lattice.Lx = j.at("Lx").get<int>();
        s.lattice.Ly = j.at("Ly").get<int>();
        s.lattice.J = j.value("J", 1.0);
        s.lattice.eta = j.at("eta").get<double>();
        s.lattice.G = j.at("G").get<double>();
        s.lattice.boundary = boundary_from_string(j.value("boundary", std::string("open")));
        if (j.contains("disorder") && !j["disorder"].is_null()) {
            const json& d = j["disorder"];
            DisorderSpec ds;
            ds.seed = d.at("seed").get<std::uint64_t>();
            ds.W_intra = d.at("W_intra").get<double>();
            ds.W_inter = d.at("W_inter").get<double>();
            ds.kind = disorder_kind_from_string(d.value("kind", std::string("offdiagonal")));
            if (ds.W_intra < 0.0 || ds.W_inter < 0.0) {
                throw ConfigError("bad_disorder", "disorder widths must be >= 0");
            }
            s.disorder = ds;
        }
    } catch (const json::exception& e) {
        throw ConfigError("bad_lattice_json", e.what());
    }
    s.lattice.validate();
    return s;
}

json lattice_to_json(const LatticeSpec& spec) {
    const auto& l = spec.lattice;
    json j = {{"Lx", l.Lx}, {"Ly", l.Ly}, {"J", l.J}, {"eta", l.eta}, {"G", l.G}, {"boundary", to_string(l.boundary)}};
    if (spec.disorder) {
        j["disorder"] = {{"seed", spec.disorder->seed},
                         {"W_intra", spec.disorder->W_intra},
                         {"W_inter", spec.disorder->W_inter},
                         {"kind", to_string(spec.disorder->kind)}};
    } else {
        j["disorder"] = nullptr;
    }
    return j;
}

void write_field_csv(const std::filesystem::path& path, const BoundStateSolution& sol, int half_width,
                     int only_layer) {
    CsvWriter w(path, {"layer", "n_x", "n_y", "re", "im"});
    for (int layer = 1; layer <= 2; ++layer) {
        if (only_layer != 0 && layer != only_layer) continue;
        if (half_width >= 0) {
            for (int dy = -half_width; dy <= half_width; ++dy) {
                for (int dx = -half_width; dx <= half_width; ++dx) {
                    if (sol.cell(dx, dy) == static_cast<std::size_t>(-1)) continue;
                    const cd z = sol.field(layer, dx, dy);
                    w.row(layer, dx, dy, z.real(), z.imag());
                }
            }
        } else {
            for (int y = 0; y < sol.ny; ++y) {
                for (int x = 0; x < sol.nx; ++x) {
                    const auto [dx, dy] = sol.displacement(x, y);
                    const std::size_t i = static_cast<std::size_t>(y) * sol.nx + x;
                    const cd z = layer == 1 ? sol.field_a1[i] : sol.field_a2[i];
                    w.row(layer, dx, dy, z.real(), z.imag());
                }
            }
        }
    }
    w.close();
}

json solution_summary(const BoundStateSolution& sol, const json& params) {
    json pts = json::array();
    for (const auto& p : sol.points) pts.push_back({{"layer", p.layer}, {"nx", p.nx}, {"ny", p.ny}, {"g", p.g}});
    return {{"E_BS", sol.energy},
            {"c_e", sol.c_e},
            {"method", to_string(sol.method)},
            {"photonic_norm", sol.photonic_norm()},
            {"points", pts},
            {"warnings", sol.warnings},
            {"params", params}};
}

void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("output_not_writable", fmt::format("cannot open '{}' for writing", path.string()));
    out << j.dump(2) << '\n';
}

Manifest::Manifest(std::string subcommand, const json& config)
    : subcommand_(std::move(subcommand)), config_(config) {}

void Manifest::add_output(const std::filesystem::path& path) { outputs_.push_back(path); }

void Manifest::write(const std::filesystem::path& dir, double wall_seconds) const {
    json outs = json::array();
    for (const auto& p : outputs_) {
        outs.push_back({{"file", p.filename().string()},
                        {"bytes", std::filesystem::file_size(p)},
                        {"fnv1a64", hex64(file_hash(p))}});
    }
    const std::time_t now = std::time(nullptr);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    json m = {{"tool", "bilattice"},
              {"version", version},
              {"subcommand", subcommand_},
              {"inputs_hash", hex64(fnv1a64(config_.dump()))},
              {"config", config_},
              {"outputs", outs},
              {"wall_time_s", wall_seconds},
              {"timestamp", stamp},
              {"simd", kernels::isa_name(kernels::active_isa())},
              {"threads", max_threads()}};
    write_json(dir / "manifest.json", m);
}

} // namespace bilayer::io
