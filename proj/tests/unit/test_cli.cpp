// test_cli.cpp — command-line contract: exit codes, config handling, artifacts

#include "bilayer/cli.hpp"
#include "bilayer/config.hpp"
#include "bilayer/io.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace bilayer;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = 0;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream o, e;
    Run r;
    r.code = cli::run(args, o, e);
    r.out = o.str();
    r.err = e.str();
    return r;
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("bilattice_test_" + name);
    fs::remove_all(p);
    return p;
}

fs::path write_config(const std::string& name, const json& j) {
    const fs::path p = scratch(name + ".json");
    std::ofstream(p) << j.dump();
    return p;
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("unknown subcommands and flags are configuration errors") {
    const Run a = run({"nonsense"});
    CHECK(a.code == 2);
    CHECK(first_line(a.err) == "error: config: bad_arguments");
    const Run b = run({"bands", "--no-such-flag", "1"});
    CHECK(b.code == 2);
}

TEST_CASE("schema violations exit with code 2 and name the code on the first line") {
    const Run eta = run({"bands", "--eta", "0", "--out", scratch("eta").string()});
    CHECK(eta.code == 2);
    CHECK(first_line(eta.err) == "error: config: schema_violation");
    CHECK(eta.err.find("/lattice/eta") != std::string::npos);
    const Run nk = run({"bands", "--nk", "-4", "--out", scratch("nk").string()});
    CHECK(nk.code == 2);
    const fs::path cfg = write_config("unknown", {{"lattice", {{"Lx", 41}, {"colour", "red"}}}});
    const Run unk = run({"bands", "--config", cfg.string(), "--out", scratch("unk").string()});
    CHECK(unk.code == 2);
    CHECK(unk.err.find("unknown key") != std::string::npos);
}

TEST_CASE("numerical failures exit with code 3") {
    const Run r = run({"boundstate", "--method", "exact_diag", "--Lx", "21", "--Ly", "21", "--g", "1",
                       "--out", scratch("hybrid").string()});
    CHECK(r.code == 3);
    CHECK(first_line(r.err).rfind("error: numerical: ", 0) == 0);
}

TEST_CASE("detuning outside the gap is a configuration error") {
    const Run r = run({"boundstate", "--delta", "0.5", "--out", scratch("outside").string()});
    CHECK(r.code == 2);
    CHECK(first_line(r.err) == "error: config: delta_outside_gap");
}

TEST_CASE("validate-config prints the canonical normalized document") {
    const fs::path cfg = write_config("valid", {{"subcommand", "bands"}, {"lattice", {{"G", 0.5}}}});
    const Run r = run({"validate-config", cfg.string()});
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["lattice"]["G"] == 0.5);
    CHECK(j["lattice"]["Lx"] == 41);
    CHECK(j["numeric"]["n_k"] == 256);
    CHECK(r.out == config::canonical(j));
    // canonical output is a fixed point
    const fs::path again = write_config("valid2", j);
    CHECK(run({"validate-config", again.string()}).out == r.out);
}

TEST_CASE("schema subcommand prints a parseable schema") {
    const Run r = run({"schema"});
    REQUIRE(r.code == 0);
    const json s = json::parse(r.out);
    CHECK(s["properties"].contains("lattice"));
}

TEST_CASE("bands output: row count, number format, determinism, manifest") {
    const fs::path d1 = scratch("bands1"), d2 = scratch("bands2");
    REQUIRE(run({"bands", "--out", d1.string()}).code == 0);
    REQUIRE(run({"bands", "--out", d2.string()}).code == 0);
    const std::string csv = slurp(d1 / "bands.csv");
    CHECK(csv == slurp(d2 / "bands.csv"));
    CHECK(csv.find('\r') == std::string::npos);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "k_x,k_y,omega_u,omega_l");
    std::size_t rows = 0;
    std::string sample;
    while (std::getline(in, line)) {
        if (rows == 7) sample = line;
        ++rows;
    }
    CHECK(rows == 65536u);
    // a generic double carries 17 significant digits
    const std::string last = sample.substr(sample.rfind(',') + 1);
    CHECK(std::stod(last) == std::stod(io::format_real(std::stod(last))));
    CHECK(io::format_real(0.1) == "0.10000000000000001");
    CHECK(io::format_real(-0.0) == "0");

    const json m = json::parse(slurp(d1 / "manifest.json"));
    CHECK(m["subcommand"] == "bands");
    CHECK(m["version"] == io::version);
    CHECK(m["config"]["lattice"]["G"] == 0.25);
    CHECK(m["inputs_hash"].is_string());
    bool listed = false;
    for (const auto& o : m["outputs"]) {
        if (o["file"] == "bands.csv") {
            listed = true;
            CHECK(o["bytes"] == csv.size());
            CHECK(o["fnv1a64"] == io::hex64(io::fnv1a64(csv)));
        }
    }
    CHECK(listed);
    for (const char* key : {"wall_time_s", "timestamp", "simd", "threads", "tool"}) CHECK(m.contains(key));
}

TEST_CASE("lattice JSON round trip") {
    const json in = {{"Lx", 21}, {"Ly", 15}, {"J", 1.0}, {"eta", -4.0}, {"G", 1.0}, {"boundary", "periodic"},
                     {"disorder", {{"seed", 11}, {"W_intra", 0.1}, {"W_inter", 0.2}, {"kind", "onsite"}}}};
    const io::LatticeSpec spec = io::lattice_from_json(in);
    CHECK(spec.lattice.Lx == 21);
    CHECK(spec.lattice.eta == -4.0);
    REQUIRE(spec.disorder.has_value());
    const io::LatticeSpec back = io::lattice_from_json(io::lattice_to_json(spec));
    CHECK(io::lattice_to_json(back) == io::lattice_to_json(spec));
}

}
