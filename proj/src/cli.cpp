// cli.cpp — bilattice subcommands and figure targets

#include "bilayer/cli.hpp"

#include "bilayer/bound_state.hpp"
#include "bilayer/config.hpp"
#include "bilayer/dynamics.hpp"
#include "bilayer/errors.hpp"
#include "bilayer/giant_atom.hpp"
#include "bilayer/io.hpp"
#include "bilayer/lattice.hpp"
#include "bilayer/spin_model.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <numbers>

namespace bilayer::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct FlagDef {
    const char* flag;
    const char* pointer;
    char kind;  // i integer, n number, s string, b boolean switch
    const char* help;
};

// Every flag mirrors a JSON config key.
constexpr FlagDef kFlags[] = {
    {"--out", "/output", 's', "output directory"},
    {"--Lx", "/lattice/Lx", 'i', "lattice sites along x"},
    {"--Ly", "/lattice/Ly", 'i', "lattice sites along y"},
    {"--J", "/lattice/J", 'n', "layer-1 hopping"},
    {"--eta", "/lattice/eta", 'n', "layer-2 hopping ratio (< 0)"},
    {"--G", "/lattice/G", 'n', "interlayer coupling"},
    {"--boundary", "/lattice/boundary", 's', "open | periodic"},
    {"--disorder-seed", "/lattice/disorder/seed", 'i', "disorder seed"},
    {"--W-intra", "/lattice/disorder/W_intra", 'n', "intralayer disorder half-width"},
    {"--W-inter", "/lattice/disorder/W_inter", 'n', "interlayer disorder half-width"},
    {"--disorder-kind", "/lattice/disorder/kind", 's', "offdiagonal | onsite"},
    {"--delta", "/emitter/delta", 'n', "emitter detuning"},
    {"--g", "/emitter/g", 'n', "emitter coupling"},
    {"--layer", "/emitter/layer", 'i', "emitter layer (1|2)"},
    {"--nx", "/emitter/nx", 'i', "emitter x position"},
    {"--ny", "/emitter/ny", 'i', "emitter y position"},
    {"--preset", "/emitter/preset", 's', "coupling-point preset"},
    {"--allow-parity-violation", "/emitter/allow_parity_violation", 'b', "compute odd-separated giant atoms"},
    {"--geometry", "/spins/geometry", 's', "topological | trivial | uniform | custom"},
    {"--spins-n", "/spins/n", 'i', "spins per axis"},
    {"--lattice-size", "/spins/lattice_size", 'i', "bath sites per axis hosting the array"},
    {"--spin-g", "/spins/g", 'n', "spin-bath coupling"},
    {"--nk", "/numeric/n_k", 'i', "k-grid size per axis"},
    {"--n-bins", "/numeric/n_bins", 'i', "histogram bins"},
    {"--seed", "/numeric/seed", 'i', "figure disorder seed"},
    {"--method", "/numeric/method", 's', "quadrature | exact_diag"},
    {"--truncation", "/numeric/truncation", 'i', "coupling range cut-off"},
    {"--window", "/numeric/window", 'i', "field-dump half width"},
    {"--n-occ", "/numeric/n_occ", 'i', "occupied bands in the Wilson loop"},
    {"--rtol", "/numeric/rtol", 'n', "integrator relative tolerance"},
    {"--atol", "/numeric/atol", 'n', "integrator absolute tolerance"},
    {"--n-spokes", "/dynamics/n_spokes", 'i', "number of spoke emitters"},
    {"--J-eff", "/dynamics/J_eff", 'n', "effective exchange (default: from the bath)"},
    {"--Gamma", "/dynamics/Gamma", 'n', "emitter decay rate"},
    {"--t-max", "/dynamics/t_max", 'n', "final time"},
    {"--n-t", "/dynamics/n_t", 'i', "time samples"},
    {"--spoke-n", "/dynamics/spoke_n", 'i', "spoke coordinate n"},
};

const char* const kSubcommands[] = {"bands",        "dos",      "boundstate",       "giant",   "spinmodel",
                                    "ssh-spectrum", "polarization", "entangle", "reproduce-figure", "geometry"};

json parse_flag_value(const FlagDef& f, const std::string& text) {
    try {
        std::size_t used = 0;
        switch (f.kind) {
        case 'i': {
            const long long v = std::stoll(text, &used);
            if (used != text.size()) break;
            return v;
        }
        case 'n': {
            const double v = std::stod(text, &used);
            if (used != text.size()) break;
            return v;
        }
        case 'b':
            return true;
        default:
            return text;
        }
    } catch (const std::exception&) {
    }
    throw ConfigError("bad_flag_value", fmt::format("{}: cannot parse '{}'", f.flag, text));
}

// ---------------------------------------------------------------- helpers --

BilayerLattice lattice_of(const json& cfg) { return io::lattice_from_json(cfg["lattice"]).lattice; }

io::LatticeSpec spec_of(const json& cfg) { return io::lattice_from_json(cfg["lattice"]); }

EmitterConfig emitter_of(const json& cfg) {
    const json& e = cfg["emitter"];
    const double g = e["g"].get<double>();
    EmitterConfig em;
    em.delta = e["delta"].get<double>();
    const std::string preset = e["preset"].get<std::string>();
    if (preset == "small") {
        em.points = {{e["layer"].get<int>(), e["nx"].get<int>(), e["ny"].get<int>(), g}};
    } else if (preset == "two_point_diagonal") {
        em.points = two_point_diagonal(g);
    } else if (preset == "four_point_diagonal") {
        em.points = four_point_diagonal(g);
    } else if (preset == "cross") {
        em.points = cross_points(g);
    } else if (preset == "two_layer_pair") {
        em.points = two_layer_pair(g);
    } else {
        for (const auto& p : e["points"]) {
            em.points.push_back({p["layer"].get<int>(), p["nx"].get<int>(), p["ny"].get<int>(), p["g"].get<double>()});
        }
    }
    em.validate();
    return em;
}

SpinArray spins_of(const json& cfg) {
    const json& s = cfg["spins"];
    const std::string geo = s["geometry"].get<std::string>();
    if (geo == "custom") {
        SpinArray a;
        a.geometry = "custom";
        for (const auto& p : s["sites"]) a.sites.push_back({p["layer"].get<int>(), p["nx"].get<int>(), p["ny"].get<int>()});
        a.validate();
        return a;
    }
    SSHGeometry g = geo == "topological" ? ssh_topological_geometry()
                  : geo == "trivial"     ? ssh_trivial_geometry()
                                         : ssh_uniform_geometry();
    g.n = s["n"].get<int>();
    g.lattice_size = s["lattice_size"].get<int>();
    return build_ssh_array(g);
}

json spins_json(const SpinArray& a) {
    json out = json::array();
    for (const auto& s : a.sites) out.push_back({{"layer", s.layer}, {"nx", s.nx}, {"ny", s.ny}});
    return out;
}

json fit_json(const SSHFit& f) {
    return {{"t1", f.params.t1}, {"t2", f.params.t2}, {"t3", f.params.t3}, {"t4", f.params.t4},
            {"bond_counts", f.bond_counts}, {"spread", f.spread}, {"warnings", f.warnings}};
}

bool is_ssh_geometry(const json& cfg) { return cfg["spins"]["geometry"].get<std::string>() != "custom"; }

struct Context {
    json cfg;
    fs::path dir;
    io::Manifest* manifest = nullptr;
    std::ostream* out = nullptr;

    fs::path file(const std::string& name) const { return dir / name; }
    void done(const std::string& name) const { manifest->add_output(dir / name); }
    void json_out(const std::string& name, const json& j) const {
        io::write_json(file(name), j);
        done(name);
    }
};

void write_bands(const Context& c, const BilayerLattice& lat, int n_k, const std::string& name) {
    const BandStructure b = band_structure(lat, n_k);
    io::CsvWriter w(c.file(name), {"k_x", "k_y", "omega_u", "omega_l"});
    for (std::size_t i = 0; i < b.kx.size(); ++i) w.row(b.kx[i], b.ky[i], b.omega_u[i], b.omega_l[i]);
    w.close();
    c.done(name);
}

void write_dos(const Context& c, const BilayerLattice& lat, int n_k, int n_bins, const std::string& name) {
    const Histogram h = density_of_states(lat, n_k, n_bins);
    io::CsvWriter w(c.file(name), {"energy_bin_center", "dos"});
    for (std::size_t i = 0; i < h.centers.size(); ++i) w.row(h.centers[i], h.density[i]);
    w.close();
    c.done(name);
}

void write_field(const Context& c, const BoundStateSolution& sol, int half_width, const std::string& name,
                 int layer = 0) {
    io::write_field_csv(c.file(name), sol, half_width, layer);
    c.done(name);
}

json gap_summary(const BilayerLattice& lat, int n_k) {
    const BandStructure b = band_structure(lat, n_k);
    const double lo = *std::max_element(b.omega_l.begin(), b.omega_l.end());
    const double hi = *std::min_element(b.omega_u.begin(), b.omega_u.end());
    return {{"gap_half_width", middle_gap_half_width(lat)}, {"grid_gap", hi - lo}, {"n_k", n_k}};
}

json parity_json(const BoundStateSolution& sol) {
    const ParityNorms p = parity_norms(sol);
    return {{"odd_norm", p.odd_norm}, {"even_norm", p.even_norm}};
}

void write_spectrum(const Context& c, const SpectrumResult& r, const std::string& name) {
    io::CsvWriter w(c.file(name), {"index", "energy", "label", "ipr", "boundary_fraction", "corner_fraction"});
    for (Eigen::Index i = 0; i < r.energies.size(); ++i) {
        const auto q = static_cast<std::size_t>(i);
        w.row(static_cast<int>(i), r.energies[i], to_string(r.labels[q]), r.ipr[q], r.boundary_fraction[q],
              r.corner_fraction[q]);
    }
    w.close();
    c.done(name);
}

void write_mode(const Context& c, const SpinArray& a, const SpectrumResult& r, Eigen::Index col,
                const std::string& name) {
    io::CsvWriter w(c.file(name), {"index", "layer", "n_x", "n_y", "amplitude"});
    for (std::size_t i = 0; i < a.sites.size(); ++i) {
        w.row(static_cast<int>(i), a.sites[i].layer, a.sites[i].nx, a.sites[i].ny,
              r.vectors(static_cast<Eigen::Index>(i), col));
    }
    w.close();
    c.done(name);
}

double default_J_eff(const BilayerLattice& lat, double g, int n, int n_k) {
    const EmitterConfig aux = EmitterConfig::small(0.0, g, 1);
    const double E = solve_pole(aux, lat, n_k);
    const GreenGrid gg = lattice_green_function(lat, E, n_k);
    // J_eff = g·C_{n1,a1}/C_e with C_{n,a1} = C_e·g·G_11(n; E) and n1 = (n, n+1).
    return g * g * gg.at(1, 1, n, n + 1).real();
}

// ------------------------------------------------------------ subcommands --

void cmd_bands(const Context& c) {
    const BilayerLattice lat = lattice_of(c.cfg);
    const int n_k = c.cfg["numeric"]["n_k"].get<int>();
    write_bands(c, lat, n_k, "bands.csv");
    c.json_out("summary.json", gap_summary(lat, n_k));
}

void cmd_dos(const Context& c) {
    const BilayerLattice lat = lattice_of(c.cfg);
    write_dos(c, lat, c.cfg["numeric"]["n_k"].get<int>(), c.cfg["numeric"]["n_bins"].get<int>(), "dos.csv");
}

void cmd_boundstate(const Context& c) {
    const io::LatticeSpec spec = spec_of(c.cfg);
    const EmitterConfig em = emitter_of(c.cfg);
    const int n_k = c.cfg["numeric"]["n_k"].get<int>();
    const std::string method = c.cfg["numeric"]["method"].get<std::string>();
    BoundStateSolution sol;
    if (method == "exact_diag") {
        const auto dis = spec.realize();
        sol = bs_exact_diagonalization(em, spec.lattice, dis ? &*dis : nullptr);
    } else {
        if (spec.disorder) {
            throw ConfigError("disorder_requires_exact_diag", "disordered lattices need --method exact_diag");
        }
        sol = em.is_small() ? bs_realspace_profile(em, spec.lattice, n_k)
                            : quadrature_profile_at(em, spec.lattice, n_k, solve_pole(em, spec.lattice, n_k), false);
    }
    write_field(c, sol, c.cfg["numeric"]["window"].get<int>(), "field.csv");
    json s = io::solution_summary(sol, {{"lattice", c.cfg["lattice"]}, {"emitter", c.cfg["emitter"]}});
    if (em.is_small()) s["parity"] = parity_json(sol);
    c.json_out("boundstate.json", s);
}

void cmd_giant(const Context& c) {
    const BilayerLattice lat = lattice_of(c.cfg);
    const EmitterConfig em = emitter_of(c.cfg);
    if (em.is_small()) throw ConfigError("not_a_giant_atom", "giant needs a multi-point preset or custom points");
    GiantOptions go;
    go.allow_parity_violation = c.cfg["emitter"]["allow_parity_violation"].get<bool>();
    const BoundStateSolution sol = giant_bs_profile(em, lat, c.cfg["numeric"]["n_k"].get<int>(), go);
    write_field(c, sol, c.cfg["numeric"]["window"].get<int>(), "field.csv");
    json s = io::solution_summary(sol, {{"lattice", c.cfg["lattice"]}, {"emitter", c.cfg["emitter"]}});
    s["even_neighbor"] = even_neighbor(em.points);
    s["branch_norm_diag"] = branch_norm(sol, 1, 1);
    s["branch_norm_antidiag"] = branch_norm(sol, 1, -1);
    s["branch_ratio"] = branch_ratio(sol);
    s["outside_fraction_7x7"] = outside_window_fraction(sol, 3);
    s["outside_fraction_9x9"] = outside_window_fraction(sol, 4);
    if (em.points.size() == 2 && em.points[0].layer != em.points[1].layer) {
        const auto samples = phase_profile(sol, LineSpec{});
        io::CsvWriter w(c.file("phase.csv"),
                        {"n_x", "n_y", "amplitude", "A", "B", "theta1", "theta2", "delta_theta"});
        for (const auto& p : samples) w.row(p.nx, p.ny, p.amplitude, p.A, p.B, p.theta1, p.theta2, p.delta_theta);
        w.close();
        c.done("phase.csv");
        const auto jumps = phase_jumps(samples);
        s["phase_jumps"] = jumps.size();
        if (jumps.size() == 1) {
            const ChiralityReport r = chirality(samples);
            s["chirality"] = {{"left_norm", r.left_norm}, {"right_norm", r.right_norm}, {"ratio", r.ratio},
                              {"jump_at", {samples[r.jump_index].nx, samples[r.jump_index].ny}}};
        }
    }
    c.json_out("giant.json", s);
}

SpinCouplingMatrix couplings_for(const json& cfg, const SpinArray& a) {
    CouplingOptions o;
    o.truncation = cfg["numeric"]["truncation"].get<int>();
    return effective_couplings(a, lattice_of(cfg), cfg["spins"]["g"].get<double>(), cfg["numeric"]["n_k"].get<int>(), o);
}

void cmd_spinmodel(const Context& c) {
    const SpinArray a = spins_of(c.cfg);
    const SpinCouplingMatrix m = couplings_for(c.cfg, a);
    {
        io::CsvWriter w(c.file("spins.csv"), {"index", "layer", "n_x", "n_y"});
        for (std::size_t i = 0; i < a.sites.size(); ++i) w.row(static_cast<int>(i), a.sites[i].layer, a.sites[i].nx, a.sites[i].ny);
        w.close();
        c.done("spins.csv");
    }
    {
        io::CsvWriter w(c.file("couplings.csv"), {"i", "j", "g_ij"});
        for (Eigen::Index i = 0; i < m.g.rows(); ++i) {
            for (Eigen::Index j = i + 1; j < m.g.cols(); ++j) {
                if (m.g(i, j) != 0.0) w.row(static_cast<int>(i), static_cast<int>(j), m.g(i, j));
            }
        }
        w.close();
        c.done("couplings.csv");
    }
    json s = {{"reference_energy", m.reference_energy}, {"warnings", m.warnings}, {"geometry", a.geometry},
              {"max_abs_coupling", m.g.cwiseAbs().maxCoeff()}};
    if (is_ssh_geometry(c.cfg)) s["ssh_fit"] = fit_json(fit_ssh_params(m, a));
    c.json_out("spinmodel.json", s);
}

void cmd_ssh_spectrum(const Context& c) {
    const SpinArray a = spins_of(c.cfg);
    const SpinCouplingMatrix m = couplings_for(c.cfg, a);
    const SpectrumResult r = finite_spectrum(a, m);
    write_spectrum(c, r, "spectrum.csv");
    json s = {{"corner_count", r.corner_count}, {"edge_count", r.edge_count}, {"n_states", r.energies.size()},
              {"geometry", a.geometry}, {"warnings", m.warnings}};
    if (is_ssh_geometry(c.cfg)) s["ssh_fit"] = fit_json(fit_ssh_params(m, a));
    c.json_out("ssh_spectrum.json", s);
}

void cmd_polarization(const Context& c) {
    SSHParams p;
    json source;
    if (!c.cfg["spins"]["ssh"].is_null()) {
        const json& t = c.cfg["spins"]["ssh"];
        p = {t["t1"].get<double>(), t["t2"].get<double>(), t["t3"].get<double>(), t["t4"].get<double>()};
        source = "given";
    } else {
        if (!is_ssh_geometry(c.cfg)) throw ConfigError("geometry_mismatch", "custom arrays need explicit spins.ssh");
        const SpinArray a = spins_of(c.cfg);
        p = fit_ssh_params(couplings_for(c.cfg, a), a).params;
        source = "fitted";
    }
    const Polarization pol = wilson_polarization(p, c.cfg["numeric"]["n_k"].get<int>(), c.cfg["numeric"]["n_occ"].get<int>());
    c.json_out("polarization.json", {{"Px", pol.Px}, {"Py", pol.Py}, {"raw_x", pol.raw_x}, {"raw_y", pol.raw_y},
                                     {"quantized", pol.quantized}, {"warnings", pol.warnings}, {"source", source},
                                     {"params", {{"t1", p.t1}, {"t2", p.t2}, {"t3", p.t3}, {"t4", p.t4}}}});
}

struct EntangleRun {
    EntangleSetup setup;
    LindbladResult result;
    OptimalTime opt;
};

EntangleRun run_entangle(const json& cfg, double J_eff, double Gamma) {
    const json& d = cfg["dynamics"];
    EntangleRun r;
    r.setup.n_spokes = d["n_spokes"].get<int>();
    r.setup.J_eff = J_eff;
    r.setup.Gamma = Gamma;
    IntegratorOptions o;
    o.rtol = cfg["numeric"]["rtol"].get<double>();
    o.atol = cfg["numeric"]["atol"].get<double>();
    r.opt = fidelity_at_optimal_time(r.setup, o);
    const double t_max = d["t_max"].is_null() ? 3.0 * r.opt.t_analytic : d["t_max"].get<double>();
    const int n_t = d["n_t"].get<int>();
    for (int i = 0; i < n_t; ++i) r.setup.t_grid.push_back(t_max * i / (n_t - 1));
    r.result = lindblad_evolve(r.setup, protocol_initial_state(r.setup.n_spokes, StateSpace::reduced), o);
    return r;
}

double resolve_J_eff(const json& cfg) {
    const json& d = cfg["dynamics"];
    if (!d["J_eff"].is_null()) return d["J_eff"].get<double>();
    return default_J_eff(lattice_of(cfg), cfg["emitter"]["g"].get<double>(), d["spoke_n"].get<int>(),
                         cfg["numeric"]["n_k"].get<int>());
}

json optimal_json(const OptimalTime& o) {
    return {{"t_star", o.t_star}, {"F_max", o.F_max}, {"t_analytic", o.t_analytic},
            {"t_quarter", o.t_quarter}, {"F_at_quarter_time", o.F_at_quarter}};
}

void cmd_entangle(const Context& c) {
    const double J_eff = resolve_J_eff(c.cfg);
    const EntangleRun r = run_entangle(c.cfg, J_eff, c.cfg["dynamics"]["Gamma"].get<double>());
    io::CsvWriter w(c.file("entangle.csv"), {"t", "fidelity", "excitation", "trace_dev"});
    for (std::size_t i = 0; i < r.result.times.size(); ++i) {
        w.row(r.result.times[i], r.result.fidelity[i], r.result.excitation[i], r.result.trace_dev[i]);
    }
    w.close();
    c.done("entangle.csv");
    json s = optimal_json(r.opt);
    s["params"] = {{"n_spokes", r.setup.n_spokes}, {"J_eff", J_eff}, {"Gamma", r.setup.Gamma}};
    c.json_out("entangle.json", s);
}

void cmd_geometry(const Context& c) { c.json_out("spins.json", spins_json(spins_of(c.cfg))); }

// -------------------------------------------------------- figure targets --

BilayerLattice figure_lattice(int L, double eta, double G) {
    BilayerLattice lat;
    lat.Lx = lat.Ly = L;
    lat.eta = eta;
    lat.G = G;
    lat.boundary = Boundary::open;
    return lat;
}

void fig1b(const Context& c) {
    const BilayerLattice lat = figure_lattice(41, -1.0, 0.25);
    write_bands(c, lat, 128, "fig1b_bands.csv");
    c.json_out("fig1b.json", gap_summary(lat, 512));
}

void fig2(const Context& c) {
    const BilayerLattice lat = figure_lattice(61, -1.0, 0.25);
    const EmitterConfig em = EmitterConfig::small(0.0, 0.1);
    const auto seed = c.cfg["numeric"]["seed"].get<std::uint64_t>();
    const BoundStateSolution clean = bs_exact_diagonalization(em, lat);
    const DisorderRealization dis = DisorderRealization::generate(lat, seed, 0.25 * lat.J, 0.25 * lat.G);
    const BoundStateSolution noisy = bs_exact_diagonalization(em, lat, &dis);
    write_field(c, clean, 30, "fig2a.csv", 1);
    write_field(c, clean, 30, "fig2b.csv", 2);
    write_field(c, noisy, 30, "fig2c.csv", 1);
    write_field(c, noisy, 30, "fig2d.csv", 2);
    c.json_out("fig2.json", {{"clean", io::solution_summary(clean, {})},
                             {"clean_parity", parity_json(clean)},
                             {"disordered", io::solution_summary(noisy, {})},
                             {"disordered_parity", parity_json(noisy)},
                             {"disorder", {{"seed", seed}, {"W_intra", 0.25 * lat.J}, {"W_inter", 0.25 * lat.G}}}});
}

void fig3(const Context& c) {
    const BilayerLattice lat = figure_lattice(41, -1.0, 0.25);
    EmitterConfig two{0.0, two_point_diagonal(0.1)};
    EmitterConfig four{0.0, four_point_diagonal(0.1)};
    const BoundStateSolution a = giant_bs_profile(two, lat, 128);
    const BoundStateSolution b = giant_bs_profile(four, lat, 128);
    write_field(c, a, 20, "fig3a.csv", 1);
    write_field(c, a, 20, "fig3b.csv", 2);
    write_field(c, b, 20, "fig3c.csv", 1);
    write_field(c, b, 20, "fig3d.csv", 2);
    c.json_out("fig3.json", {{"two_point", {{"E_BS", a.energy}, {"branch_ratio", branch_ratio(a)}}},
                             {"four_point", {{"E_BS", b.energy}, {"outside_fraction_9x9", outside_window_fraction(b, 4)}}}});
}

struct SSHRun {
    SpinArray array;
    SpinCouplingMatrix couplings;
    SpectrumResult spectrum;
};

SSHRun ssh_run(const SSHGeometry& g) {
    SSHRun r;
    r.array = build_ssh_array(g);
    r.couplings = effective_couplings(r.array, figure_lattice(35, -1.0, 4.0), 0.1, 256);
    r.spectrum = finite_spectrum(r.array, r.couplings);
    return r;
}

Eigen::Index pick_mode(const SpectrumResult& r, ModeLabel want) {
    Eigen::Index best = -1;
    for (Eigen::Index i = 0; i < r.energies.size(); ++i) {
        if (r.labels[static_cast<std::size_t>(i)] != want) continue;
        if (best < 0 || std::abs(r.energies[i]) < std::abs(r.energies[best])) best = i;
    }
    if (best < 0) throw NumericalError("mode_not_found", fmt::format("no {} mode in the spectrum", to_string(want)));
    return best;
}

void fig4(const Context& c, const std::string& which) {
    const SSHRun topo = ssh_run(ssh_topological_geometry());
    if (which == "fig4d") {
        const SSHRun triv = ssh_run(ssh_trivial_geometry());
        write_spectrum(c, topo.spectrum, "fig4d_spectrum.csv");
        write_spectrum(c, triv.spectrum, "fig4d_trivial_spectrum.csv");
        c.json_out("fig4d.json", {{"topological", {{"corner_count", topo.spectrum.corner_count},
                                                   {"edge_count", topo.spectrum.edge_count},
                                                   {"fit", fit_json(fit_ssh_params(topo.couplings, topo.array))}}},
                                  {"trivial", {{"corner_count", triv.spectrum.corner_count},
                                               {"edge_count", triv.spectrum.edge_count},
                                               {"fit", fit_json(fit_ssh_params(triv.couplings, triv.array))}}}});
        return;
    }
    const ModeLabel want = which == "fig4e" ? ModeLabel::edge : ModeLabel::corner;
    const Eigen::Index col = pick_mode(topo.spectrum, want);
    write_mode(c, topo.array, topo.spectrum, col, which + "_mode.csv");
    c.json_out(which + ".json", {{"state_index", col}, {"energy", topo.spectrum.energies[col]},
                                 {"label", to_string(want)}});
}

void fig5(const Context& c) {
    const BilayerLattice lat = figure_lattice(41, -4.0, 1.0);
    write_bands(c, lat, 128, "fig5a_bands.csv");
    write_dos(c, lat, 512, 200, "fig5b_dos.csv");
    const auto seed = c.cfg["numeric"]["seed"].get<std::uint64_t>();
    const DisorderRealization dis = DisorderRealization::generate(lat, seed, 0.1 * lat.J, 0.1 * lat.G);
    const BoundStateSolution z = bs_exact_diagonalization(EmitterConfig::small(0.0, 0.1), lat, &dis);
    const BoundStateSolution h = bs_exact_diagonalization(EmitterConfig::small(0.5, 0.1), lat, &dis);
    write_field(c, z, 20, "fig5c.csv", 1);
    write_field(c, z, 20, "fig5d.csv", 2);
    write_field(c, h, 20, "fig5e.csv", 1);
    write_field(c, h, 20, "fig5f.csv", 2);
    c.json_out("fig5.json", {{"gap", gap_summary(lat, 512)},
                             {"delta_0", io::solution_summary(z, {})},
                             {"delta_0_5", io::solution_summary(h, {})},
                             {"disorder", {{"seed", seed}, {"W_intra", 0.1 * lat.J}, {"W_inter", 0.1 * lat.G}}}});
}

void fig6(const Context& c) {
    const BilayerLattice lat = figure_lattice(41, -1.0, 0.25);
    const BoundStateSolution cross = giant_bs_profile({0.0, cross_points(0.1)}, lat, 128);
    const BoundStateSolution pair = giant_bs_profile({0.0, two_layer_pair(0.1)}, lat, 128);
    write_field(c, cross, 20, "fig6a.csv", 1);
    write_field(c, cross, 20, "fig6b.csv", 2);
    write_field(c, pair, 20, "fig6c.csv", 1);
    write_field(c, pair, 20, "fig6d.csv", 2);
    const auto samples = phase_profile(pair, LineSpec{});
    io::CsvWriter w(c.file("fig6ef_line.csv"), {"n_x", "n_y", "amplitude", "A", "B", "theta1", "theta2", "delta_theta"});
    for (const auto& p : samples) w.row(p.nx, p.ny, p.amplitude, p.A, p.B, p.theta1, p.theta2, p.delta_theta);
    w.close();
    c.done("fig6ef_line.csv");
    const ChiralityReport r = chirality(samples);
    c.json_out("fig6.json", {{"cross_outside_fraction_7x7", outside_window_fraction(cross, 3)},
                             {"phase_jumps", phase_jumps(samples).size()},
                             {"chirality_ratio", r.ratio},
                             {"jump_at", {samples[r.jump_index].nx, samples[r.jump_index].ny}}});
}

void fig7b(const Context& c) {
    json cfg = c.cfg;
    const double J_eff = default_J_eff(figure_lattice(41, -1.0, 0.25), 0.1, cfg["dynamics"]["spoke_n"].get<int>(), 256);
    const double gamma = 0.01 * std::abs(J_eff);
    const EntangleRun ideal = run_entangle(cfg, J_eff, 0.0);
    const EntangleRun lossy = run_entangle(cfg, J_eff, gamma);
    io::CsvWriter w(c.file("fig7b.csv"), {"t", "fidelity_ideal", "fidelity_dissipative"});
    for (std::size_t i = 0; i < ideal.result.times.size(); ++i) {
        w.row(ideal.result.times[i], ideal.result.fidelity[i], lossy.result.fidelity[i]);
    }
    w.close();
    c.done("fig7b.csv");
    c.json_out("fig7b.json", {{"J_eff", J_eff},
                              {"spoke_n", cfg["dynamics"]["spoke_n"]},
                              {"ideal", optimal_json(ideal.opt)},
                              {"dissipative", optimal_json(lossy.opt)},
                              {"Gamma_dissipative", gamma}});
}

void cmd_reproduce(const Context& c) {
    if (c.cfg["figure"].is_null()) throw ConfigError("missing_figure", "reproduce-figure needs a figure name");
    const std::string f = c.cfg["figure"].get<std::string>();
    if (f == "fig1b") fig1b(c);
    else if (f == "fig2") fig2(c);
    else if (f == "fig3") fig3(c);
    else if (f == "fig4d" || f == "fig4e" || f == "fig4f") fig4(c, f);
    else if (f == "fig5") fig5(c);
    else if (f == "fig6") fig6(c);
    else if (f == "fig7b") fig7b(c);
}

void dispatch(const std::string& sub, const Context& c) {
    if (sub == "bands") cmd_bands(c);
    else if (sub == "dos") cmd_dos(c);
    else if (sub == "boundstate") cmd_boundstate(c);
    else if (sub == "giant") cmd_giant(c);
    else if (sub == "spinmodel") cmd_spinmodel(c);
    else if (sub == "ssh-spectrum") cmd_ssh_spectrum(c);
    else if (sub == "polarization") cmd_polarization(c);
    else if (sub == "entangle") cmd_entangle(c);
    else if (sub == "reproduce-figure") cmd_reproduce(c);
    else if (sub == "geometry") cmd_geometry(c);
}

int report(std::ostream& err, const char* category, const Error& e, int code) {
    err << "error: " << category << ": " << e.code() << "\n" << e.what() << "\n";
    return code;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"bilattice: bound states, spin models and entanglement dynamics in bilayer square lattices",
                 "bilattice"};
    app.require_subcommand(1);
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::App*> subs;
    std::map<std::string, std::vector<std::pair<const FlagDef*, CLI::Option*>>> opts;
    std::map<std::string, std::string> config_path;
    std::string figure;
    std::string validate_path;

    for (const char* name : kSubcommands) {
        CLI::App* sc = app.add_subcommand(name);
        subs[name] = sc;
        sc->add_option("--config", config_path[name], "JSON run configuration");
        for (const FlagDef& f : kFlags) {
            CLI::Option* o = f.kind == 'b' ? sc->add_flag(f.flag, f.help)
                                           : sc->add_option(f.flag, values[f.flag], f.help);
            opts[name].push_back({&f, o});
        }
    }
    subs["reproduce-figure"]->add_option("figure", figure, "fig1b | fig2 | fig3 | fig4d | fig4e | fig4f | fig5 | fig6 | fig7b")->required();
    CLI::App* val = app.add_subcommand("validate-config", "print the normalized configuration");
    val->add_option("path", validate_path, "config file")->required();
    CLI::App* sch = app.add_subcommand("schema", "print the run-configuration JSON schema");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "error: config: bad_arguments\n" << e.what() << "\n";
        return 2;
    }

    try {
        if (sch->parsed()) {
            out << config::schema_text();
            return 0;
        }
        if (val->parsed()) {
            out << config::canonical(config::normalize(config::load_file(validate_path)));
            return 0;
        }
        std::string sub;
        for (const auto& [name, sc] : subs) {
            if (sc->parsed()) sub = name;
        }
        json cfg = config_path[sub].empty() ? json::object() : config::load_file(config_path[sub]);
        if (!cfg.is_object()) throw ConfigError("schema_violation", "/: config must be a JSON object");
        cfg["subcommand"] = sub;
        if (sub == "reproduce-figure") cfg["figure"] = figure;
        if (sub != "reproduce-figure" && !cfg.contains("output")) cfg["output"] = "runs/" + sub;
        if (sub == "reproduce-figure" && !cfg.contains("output")) cfg["output"] = "runs/" + figure;
        for (const auto& [f, o] : opts[sub]) {
            if (o->count() == 0) continue;
            const json::json_pointer ptr(f->pointer);
            json v = parse_flag_value(*f, values[f->flag]);
            // Flags that touch a null disorder block turn it into an object.
            if (std::string(f->pointer).rfind("/lattice/disorder/", 0) == 0 &&
                (!cfg.contains("lattice") || !cfg["lattice"].contains("disorder") || cfg["lattice"]["disorder"].is_null())) {
                cfg["lattice"]["disorder"] = json::object();
            }
            cfg[ptr] = v;
        }
        if (cfg.contains("lattice") && cfg["lattice"].is_object() && cfg["lattice"].contains("disorder") &&
            cfg["lattice"]["disorder"].is_object() && !cfg["lattice"]["disorder"].contains("seed")) {
            // Flag-built disorder blocks inherit the run seed.
            const json filled = config::fill_defaults(cfg, config::schema());
            if (filled["numeric"].is_object() && filled["numeric"].contains("seed")) {
                cfg["lattice"]["disorder"]["seed"] = filled["numeric"]["seed"];
            }
        }
        cfg = config::normalize(cfg);

        const auto t0 = std::chrono::steady_clock::now();
        const fs::path dir = cfg["output"].get<std::string>();
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) throw ConfigError("output_not_writable", fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
        io::Manifest manifest(sub, cfg);
        Context c{cfg, dir, &manifest, &out};
        dispatch(sub, c);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        manifest.write(dir, wall);
        out << fmt::format("wrote {} ({:.2f} s)\n", dir.string(), wall);
        return 0;
    } catch (const ConfigError& e) {
        return report(err, "config", e, 2);
    } catch (const NumericalError& e) {
        return report(err, "numerical", e, 3);
    } catch (const std::exception& e) {
        err << "error: internal: exception\n" << e.what() << "\n";
        return 1;
    }
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, std::cout, std::cerr);
}

} // namespace bilayer::cli
