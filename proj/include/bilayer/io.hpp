// io.hpp — CSV and JSON artifacts, lattice specification round-trip, run manifests

#pragma once

#include "bilayer/bound_state.hpp"
#include "bilayer/lattice.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bilayer::io {

using json = nlohmann::json;

/// Reals use 17 significant digits and '.' decimals.
std::string format_real(double x);

/// Streams rows to a CSV file with a header; '\n' line endings.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

    template <class... Ts>
    void row(const Ts&... cells) {
        std::string line;
        bool first = true;
        ((append(line, cells, first)), ...);
        line += '\n';
        out_ << line;
    }

    void close();

private:
    static void append_cell(std::string& line, const std::string& s, bool& first) {
        if (!first) line += ',';
        line += s;
        first = false;
    }
    static void append(std::string& line, double x, bool& first) { append_cell(line, format_real(x), first); }
    static void append(std::string& line, int x, bool& first) { append_cell(line, std::to_string(x), first); }
    static void append(std::string& line, long x, bool& first) { append_cell(line, std::to_string(x), first); }
    static void append(std::string& line, std::size_t x, bool& first) { append_cell(line, std::to_string(x), first); }
    static void append(std::string& line, const std::string& s, bool& first) { append_cell(line, s, first); }
    static void append(std::string& line, const char* s, bool& first) { append_cell(line, s, first); }

    std::filesystem::path path_;
    std::ofstream out_;
};

std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t h);
std::uint64_t file_hash(const std::filesystem::path& path);

/// Lattice + optional disorder specification as stored in configs.
struct DisorderSpec {
    std::uint64_t seed = 0;
    double W_intra = 0.0;
    double W_inter = 0.0;
    DisorderKind kind = DisorderKind::offdiagonal;
};

struct LatticeSpec {
    BilayerLattice lattice;
    std::optional<DisorderSpec> disorder;

    std::optional<DisorderRealization> realize() const;
};

LatticeSpec lattice_from_json(const json& j);
json lattice_to_json(const LatticeSpec& spec);

/// Field dump (layer, n_x, n_y, re, im) over the window |n|_∞ ≤ half_width in
/// frame coordinates; half_width < 0 dumps the whole grid. layer = 0 writes both.
void write_field_csv(const std::filesystem::path& path, const BoundStateSolution& sol, int half_width,
                     int layer = 0);

/// Sidecar {"E_BS", "c_e", "method", "warnings", "params"}.
json solution_summary(const BoundStateSolution& sol, const json& params);

void write_json(const std::filesystem::path& path, const json& j);

/// Manifest bookkeeping for one CLI run.
class Manifest {
public:
    Manifest(std::string subcommand, const json& config);

    void add_output(const std::filesystem::path& path);
    void write(const std::filesystem::path& dir, double wall_seconds) const;

private:
    std::string subcommand_;
    json config_;
    std::vector<std::filesystem::path> outputs_;
};

inline constexpr const char* version = "1.0.0";

} // namespace bilayer::io
