#include "symclone/cli.hpp"

#include "symclone/dynamics.hpp"
#include "symclone/maps.hpp"
#include "symclone/random.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>

namespace symclone::cli {

namespace {

using json = nlohmann::json;
using maps::GaugeSpec;
using maps::MachineRule;
using maps::MapDefinition;
using maps::PushforwardMethod;
using phase::ComplexMatrix;
using phase::PhasePoint;
using phase::RealVector;

constexpr int kOk = 0;
constexpr int kScientificFailure = 1;
constexpr int kConfigError = 2;

std::uint64_t default_seed() {
    if (const char* env = std::getenv("SYMCLONE_SEED")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0') return static_cast<std::uint64_t>(v);
        std::cerr << "warning: ignoring non-numeric SYMCLONE_SEED\n";
    }
    return 12345;
}

std::string timestamp_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%FT%TZ", std::gmtime(&t));
    return buf;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot open output file: " + path);
    out << text;
}

void emit_report(const json& report, const std::string& path) {
    if (path.empty()) return;
    write_text(path, report.dump(2) + "\n");
}

// ------------------------------ verify ---------------------------------------

GaugeSpec parse_gauge(const std::string& text) {
    if (text == "zero") return GaugeSpec::zero();
    if (text.rfind("const:", 0) == 0) {
        std::size_t used = 0;
        const double theta = std::stod(text.substr(6), &used);
        if (used != text.size() - 6) throw std::invalid_argument("bad gauge constant: " + text);
        return GaugeSpec::constant(theta);
    }
    if (text == "smooth") {
        // bundled smooth gauge field theta = 0.7 a_re
        return GaugeSpec::smooth([](const maps::ObjectParams& r) { return 0.7 * r[0]; },
                                 [](const maps::ObjectParams&) {
                                     maps::ObjectParams g = maps::ObjectParams::Zero();
                                     g[0] = 0.7;
                                     return g;
                                 });
    }
    throw std::invalid_argument("unknown gauge '" + text + "' (zero | const:<radians> | smooth)");
}

const std::vector<std::string>& verify_map_names() {
    static const std::vector<std::string> names = {
        "self-replication", "quantum-cloning", "quantum-cloning-fixed-machine", "hybrid-cloning"};
    return names;
}

MapDefinition build_verify_map(const std::string& name, const GaugeSpec& gauge) {
    if (name == "self-replication") return MapDefinition::self_replication(gauge);
    if (name == "quantum-cloning") {
        return MapDefinition::quantum_cloning(MachineRule::conjugate(), gauge);
    }
    if (name == "quantum-cloning-fixed-machine") {
        return MapDefinition::quantum_cloning(MachineRule::constant(maps::ObjectState(1.0, 0.0)),
                                              gauge);
    }
    if (name == "hybrid-cloning") return MapDefinition::hybrid_cloning(gauge);
    throw std::invalid_argument("unknown map: " + name);
}

struct VerifyConfig {
    std::string map;
    int samples = 1000;
    std::uint64_t seed = 12345;
    std::string method = "analytic";
    double tolerance = 1e-6;
    std::string gauge = "zero";
    double min_area_factor = 0.05;
    int jobs = 1;
    std::string output;
};

json verify_report(const VerifyConfig& cfg, const maps::RatioSweep& sweep, bool control,
                   double expected, bool pass, double max_dev) {
    json instances = json::array();
    for (std::size_t i = 0; i < sweep.verdicts.size(); ++i) {
        const auto& v = sweep.verdicts[i];
        instances.push_back({{"index", i},
                             {"alpha", {v.object[0].real(), v.object[0].imag()}},
                             {"beta", {v.object[1].real(), v.object[1].imag()}},
                             {"g", {v.pg.g1, v.pg.g2, v.pg.g3}},
                             {"h", {v.ph.g1, v.ph.g2, v.ph.g3}},
                             {"area_before", v.area_before},
                             {"area_after", v.area_after},
                             {"ratio", v.ratio}});
    }
    json summary = {{"observed_min", sweep.min_ratio},
                    {"observed_max", sweep.max_ratio},
                    {"observed_mean", sweep.mean_ratio},
                    {"pass", pass}};
    if (control) {
        summary["expected_ratio"] = "none";
        summary["max_abs_deviation_from_unity"] = max_dev;
    } else {
        summary["expected_ratio"] = expected;
        summary["max_abs_deviation"] = max_dev;
    }
    return json{{"command", "verify"},
                {"config",
                 {{"map", cfg.map},
                  {"samples", cfg.samples},
                  {"seed", cfg.seed},
                  {"method", cfg.method},
                  {"tolerance", cfg.tolerance},
                  {"gauge", cfg.gauge},
                  {"min_area_factor", cfg.min_area_factor},
                  {"jobs", cfg.jobs}}},
                {"summary", summary},
                {"instances", instances},
                {"timestamp", timestamp_now()}};
}

int run_verify(const VerifyConfig& cfg) {
    const auto method =
        cfg.method == "fd" ? PushforwardMethod::FiniteDifference : PushforwardMethod::Analytic;
    const auto map = build_verify_map(cfg.map, parse_gauge(cfg.gauge));
    const auto sweep =
        maps::sweep_ratios(map, cfg.samples, cfg.seed, method, cfg.min_area_factor, cfg.jobs);

    const bool control = cfg.map == "quantum-cloning-fixed-machine";
    const double expected = cfg.map == "self-replication" ? 2.0 : 1.0;
    double max_dev = 0.0;
    bool pass;
    if (control) {
        // the control passes when the fixed machine state breaks the unit ratio
        for (const auto& v : sweep.verdicts) {
            max_dev = std::max(max_dev, std::abs(v.ratio - 1.0));
        }
        pass = max_dev > 0.1;
    } else {
        for (const auto& v : sweep.verdicts) {
            max_dev = std::max(max_dev, std::abs(v.ratio - expected));
        }
        pass = max_dev <= cfg.tolerance;
    }

    emit_report(verify_report(cfg, sweep, control, expected, pass, max_dev), cfg.output);
    std::cout << "[verify] map=" << cfg.map << " n=" << cfg.samples << " method=" << cfg.method
              << " expected=" << (control ? std::string("deviation>0.1") : fmt17(expected))
              << " observed=[" << fmt17(sweep.min_ratio) << ", " << fmt17(sweep.max_ratio) << "] "
              << (pass ? "pass" : "FAIL") << "\n";
    return pass ? kOk : kScientificFailure;
}

// ------------------------------ evolve ---------------------------------------

struct EvolveConfig {
    std::string preset;
    double t_final = 10.0;
    double dt = 1e-3;
    std::string format = "json";
    std::string output;
};

double quantum_norm(const PhasePoint& p) {
    return 0.5 * p.space.hbar() * phase::quantum_norm_squared(p);
}

int run_evolve(const EvolveConfig& cfg) {
    const auto preset = dyn::preset_by_name(cfg.preset);
    const auto traj = dyn::integrate(preset.hamiltonian, preset.initial_point, cfg.t_final, cfg.dt);

    double energy_drift = 0.0;
    double norm_drift = 0.0;
    const double n0 = quantum_norm(traj.points.front());
    for (std::size_t k = 0; k < traj.points.size(); ++k) {
        energy_drift = std::max(energy_drift, std::abs(traj.energies[k] - traj.energies.front()));
        norm_drift = std::max(norm_drift, std::abs(quantum_norm(traj.points[k]) - n0));
    }

    if (!cfg.output.empty()) {
        if (cfg.format == "csv") {
            std::string text = "time,energy,norm";
            const int dim = static_cast<int>(traj.points.front().coords.size());
            for (int i = 0; i < dim; ++i) text += ",coord_" + std::to_string(i);
            text += "\n";
            for (std::size_t k = 0; k < traj.points.size(); ++k) {
                text += fmt17(traj.times[k]) + "," + fmt17(traj.energies[k]) + "," +
                        fmt17(quantum_norm(traj.points[k]));
                for (int i = 0; i < dim; ++i) text += "," + fmt17(traj.points[k].coords[i]);
                text += "\n";
            }
            write_text(cfg.output, text);
        } else {
            json coords = json::array();
            json times = json::array();
            json energies = json::array();
            json norms = json::array();
            for (std::size_t k = 0; k < traj.points.size(); ++k) {
                times.push_back(traj.times[k]);
                energies.push_back(traj.energies[k]);
                norms.push_back(quantum_norm(traj.points[k]));
                json row = json::array();
                for (int i = 0; i < traj.points[k].coords.size(); ++i) {
                    row.push_back(traj.points[k].coords[i]);
                }
                coords.push_back(row);
            }
            emit_report(
                json{{"command", "evolve"},
                     {"config",
                      {{"preset", cfg.preset},
                       {"t_final", cfg.t_final},
                       {"dt", cfg.dt},
                       {"format", cfg.format}}},
                     {"series",
                      {{"times", times}, {"energies", energies}, {"norms", norms}, {"coords", coords}}},
                     {"summary",
                      {{"final_time", traj.times.back()},
                       {"energy_drift", energy_drift},
                       {"norm_drift", norm_drift}}},
                     {"timestamp", timestamp_now()}},
                cfg.output);
        }
    }
    std::cout << "[evolve] preset=" << cfg.preset << " final_time=" << fmt17(traj.times.back())
              << " energy_drift=" << fmt17(energy_drift) << " norm_drift=" << fmt17(norm_drift)
              << "\n";
    return kOk;
}

// ------------------------------ ensemble -------------------------------------

struct EnsembleConfig {
    std::string preset = "meanfield-oscillator";
    std::string initial;
    double t_final = 2.0;
    double dt = 1e-3;
    std::vector<double> weights;
    std::string format = "json";
    std::string output;
};

int run_ensemble(const EnsembleConfig& cfg) {
    const auto preset = dyn::preset_by_name(cfg.preset);
    const auto* mf = std::get_if<dyn::MeanFieldHamiltonian>(&preset.hamiltonian);
    if (mf == nullptr) {
        throw std::invalid_argument("ensemble: preset '" + cfg.preset + "' is not a hybrid model");
    }

    dyn::HybridEnsemble e0 = cfg.initial == "delta" ? dyn::meanfield_delta_ensemble()
                                                    : dyn::meanfield_two_point_ensemble();
    if (!cfg.weights.empty()) {
        if (cfg.weights.size() != e0.members.size()) {
            throw std::invalid_argument("ensemble: expected " + std::to_string(e0.members.size()) +
                                        " weights");
        }
        for (std::size_t i = 0; i < e0.members.size(); ++i) {
            e0.members[i].weight = cfg.weights[i];
        }
    }
    dyn::validate_ensemble(e0);

    // per-member trajectories, then the purity of the reassembled mixture
    std::vector<dyn::Trajectory> trajs;
    trajs.reserve(e0.members.size());
    const dyn::HamiltonianSpec h = *mf;
    for (const auto& m : e0.members) {
        trajs.push_back(dyn::integrate(h, m.point, cfg.t_final, cfg.dt));
    }
    const std::size_t steps = trajs.front().times.size();
    std::vector<double> purity(steps);
    for (std::size_t k = 0; k < steps; ++k) {
        dyn::HybridEnsemble snapshot;
        for (std::size_t i = 0; i < e0.members.size(); ++i) {
            snapshot.members.push_back({e0.members[i].weight, trajs[i].points[k]});
        }
        purity[k] = dyn::purity(dyn::density_matrix(snapshot));
    }

    double min_purity = purity.front();
    for (double v : purity) min_purity = std::min(min_purity, v);
    const bool delta_ok = cfg.initial != "delta" || std::abs(min_purity - 1.0) <= 1e-8;

    dyn::HybridEnsemble final_snapshot;
    for (std::size_t i = 0; i < e0.members.size(); ++i) {
        final_snapshot.members.push_back({e0.members[i].weight, trajs[i].points.back()});
    }
    const ComplexMatrix rho = dyn::density_matrix(final_snapshot).entries();

    if (!cfg.output.empty()) {
        if (cfg.format == "csv") {
            std::string text = "time,purity\n";
            for (std::size_t k = 0; k < steps; ++k) {
                text += fmt17(trajs.front().times[k]) + "," + fmt17(purity[k]) + "\n";
            }
            write_text(cfg.output, text);
        } else {
            json times = json::array();
            json series = json::array();
            for (std::size_t k = 0; k < steps; ++k) {
                times.push_back(trajs.front().times[k]);
                series.push_back(purity[k]);
            }
            json re = json::array();
            json im = json::array();
            for (int r = 0; r < rho.rows(); ++r) {
                json rrow = json::array();
                json irow = json::array();
                for (int c = 0; c < rho.cols(); ++c) {
                    rrow.push_back(rho(r, c).real());
                    irow.push_back(rho(r, c).imag());
                }
                re.push_back(rrow);
                im.push_back(irow);
            }
            emit_report(json{{"command", "ensemble"},
                             {"config",
                              {{"preset", cfg.preset},
                               {"initial", cfg.initial},
                               {"t_final", cfg.t_final},
                               {"dt", cfg.dt},
                               {"format", cfg.format}}},
                             {"series", {{"times", times}, {"purity", series}}},
                             {"final_density_matrix", {{"re", re}, {"im", im}}},
                             {"summary",
                              {{"min_purity", min_purity},
                               {"final_purity", purity.back()},
                               {"pass", delta_ok}}},
                             {"timestamp", timestamp_now()}},
                        cfg.output);
        }
    }
    std::cout << "[ensemble] initial=" << cfg.initial << " final_purity=" << fmt17(purity.back())
              << " min_purity=" << fmt17(min_purity) << (delta_ok ? " pass" : " FAIL") << "\n";
    return delta_ok ? kOk : kScientificFailure;
}

// ------------------------------ oracle-check ---------------------------------

struct OracleConfig {
    double perturb = 0.0;
    std::string method = "both";
    std::uint64_t seed = 12345;
    int points = 100;
    std::string output;
};

struct GateResult {
    std::string name;
    bool pass = false;
    double worst = 0.0;
};

int run_oracle_check(const OracleConfig& cfg) {
    std::vector<GateResult> gates;

    if (cfg.method != "fd") {
        // analytic Jacobians against coordinate-wise central differences
        std::vector<MapDefinition> defs;
        defs.push_back(MapDefinition::self_replication());
        defs.push_back(MapDefinition::self_replication(parse_gauge("smooth")));
        defs.push_back(MapDefinition::quantum_cloning());
        defs.push_back(
            MapDefinition::quantum_cloning(MachineRule::constant(maps::ObjectState(1.0, 0.0))));
        defs.push_back(MapDefinition::hybrid_cloning());
        double worst = 0.0;
        for (auto& map : defs) {
            if (cfg.perturb != 0.0) map.perturb_jacobian(cfg.perturb);
            rng::Stream s(rng::mix(cfg.seed, std::hash<std::string>{}(map.name())));
            for (int k = 0; k < cfg.points; ++k) {
                RealVector coords(map.domain().total_real_dim());
                for (int i = 0; i < coords.size(); ++i) coords[i] = s.gaussian();
                const PhasePoint x(map.domain(), coords);
                const double dev =
                    (map.analytic_jacobian(x) - maps::finite_difference_jacobian(map, x))
                        .cwiseAbs()
                        .maxCoeff();
                worst = std::max(worst, dev);
            }
        }
        gates.push_back({"jacobian-fd-agreement", worst < 1e-6, worst});
    }

    {
        // closed-form skew product of parameter tangents vs the generic one
        double worst = 0.0;
        const auto sr = MapDefinition::self_replication();
        const auto hc = MapDefinition::hybrid_cloning();
        for (int k = 0; k < 1000; ++k) {
            rng::Stream s(rng::mix(cfg.seed ^ 0x5be5u, k));
            const auto object = maps::sample_object_state(rng::mix(cfg.seed, k), 0.0);
            const maps::TangentParams pg{s.gaussian(), s.gaussian(), 1.0 + s.uniform()};
            const maps::TangentParams ph{1.0 + s.uniform(), s.gaussian(), s.gaussian()};
            const auto& map = (k % 2 == 0) ? sr : hc;
            const auto g = maps::unnormalized_tangent(map, object, pg);
            const auto h = maps::unnormalized_tangent(map, object, ph);
            worst = std::max(worst, std::abs(maps::skew_product(g, h) -
                                             maps::initial_area_closed_form(object, pg, ph)));
        }
        gates.push_back({"closed-form-area", worst < 1e-12, worst});
    }

    {
        // flows preserve the symplectic form, nonlinear Hamiltonians included
        double worst = 0.0;
        for (const auto& name : dyn::preset_names()) {
            const auto preset = dyn::preset_by_name(name);
            rng::Stream s(rng::mix(cfg.seed ^ 0xf10au, std::hash<std::string>{}(name)));
            RealVector u(preset.initial_point.coords.size());
            RealVector v(preset.initial_point.coords.size());
            for (int i = 0; i < u.size(); ++i) u[i] = s.gaussian();
            for (int i = 0; i < v.size(); ++i) v[i] = s.gaussian();
            const double ratio = dyn::flow_symplectic_check(
                preset.hamiltonian, preset.initial_point,
                phase::TangentVector(preset.initial_point, u),
                phase::TangentVector(preset.initial_point, v), 1.0, 1e-3);
            worst = std::max(worst, std::abs(ratio - 1.0));
        }
        gates.push_back({"flow-symplectic", worst < 1e-6, worst});
    }

    bool all = true;
    json gates_json = json::array();
    for (const auto& g : gates) {
        all = all && g.pass;
        std::cout << "[oracle] " << g.name << ": " << (g.pass ? "pass" : "FAIL")
                  << " (worst=" << fmt17(g.worst) << ")\n";
        gates_json.push_back({{"gate", g.name}, {"pass", g.pass}, {"worst", g.worst}});
    }
    emit_report(json{{"command", "oracle-check"},
                     {"config",
                      {{"perturb", cfg.perturb},
                       {"method", cfg.method},
                       {"seed", cfg.seed},
                       {"points", cfg.points}}},
                     {"summary", {{"pass", all}}},
                     {"gates", gates_json},
                     {"timestamp", timestamp_now()}},
                cfg.output);
    return all ? kOk : kScientificFailure;
}

// ------------------------------ reproduce ------------------------------------

struct ReproduceConfig {
    int samples = 1000;
    std::uint64_t seed = 12345;
    int jobs = 1;
};

int run_reproduce(const ReproduceConfig& cfg) {
    struct Row {
        std::string label;
        std::string expected;
        std::string observed;
        bool pass;
    };
    std::vector<Row> rows;

    auto sweep_row = [&](const std::string& map_name, const std::string& label, double expected) {
        const auto map = build_verify_map(map_name, GaugeSpec::zero());
        const auto sweep = maps::sweep_ratios(map, cfg.samples, cfg.seed,
                                              PushforwardMethod::Analytic, 0.05, cfg.jobs);
        double max_dev = 0.0;
        for (const auto& v : sweep.verdicts) {
            max_dev = std::max(max_dev, std::abs(v.ratio - expected));
        }
        rows.push_back({label, "ratio = " + fmt17(expected),
                        "[" + fmt17(sweep.min_ratio) + ", " + fmt17(sweep.max_ratio) + "]",
                        max_dev <= 1e-6});
    };
    sweep_row("self-replication", "self-replication area ratio", 2.0);
    sweep_row("quantum-cloning", "quantum-machine cloning area ratio", 1.0);
    sweep_row("hybrid-cloning", "classical-machine cloning area ratio", 1.0);

    {
        const auto map = build_verify_map("quantum-cloning-fixed-machine", GaugeSpec::zero());
        const auto sweep = maps::sweep_ratios(map, std::min(cfg.samples, 100), cfg.seed,
                                              PushforwardMethod::Analytic, 0.05, cfg.jobs);
        double max_dev = 0.0;
        for (const auto& v : sweep.verdicts) {
            max_dev = std::max(max_dev, std::abs(v.ratio - 1.0));
        }
        rows.push_back({"object-independent machine control", "deviation > 0.1",
                        "max |ratio-1| = " + fmt17(max_dev), max_dev > 0.1});
    }

    const auto mf =
        std::get<dyn::MeanFieldHamiltonian>(dyn::preset_meanfield_oscillator().hamiltonian);
    {
        const auto evolved = dyn::evolve_ensemble(mf, dyn::meanfield_delta_ensemble(), 2.0, 1e-3);
        const double p = dyn::purity(dyn::density_matrix(evolved));
        rows.push_back({"single-point classical start purity", "1 within 1e-8", fmt17(p),
                        std::abs(p - 1.0) <= 1e-8});
    }
    {
        const auto evolved =
            dyn::evolve_ensemble(mf, dyn::meanfield_two_point_ensemble(), 2.0, 1e-3);
        const double p = dyn::purity(dyn::density_matrix(evolved));
        rows.push_back(
            {"two-point classical mixture purity", "< 0.999 at t=2", fmt17(p), p < 0.999});
    }

    bool all = true;
    std::printf("%-38s %-20s %-44s %s\n", "result", "expected", "observed", "status");
    for (const auto& r : rows) {
        all = all && r.pass;
        std::printf("%-38s %-20s %-44s %s\n", r.label.c_str(), r.expected.c_str(),
                    r.observed.c_str(), r.pass ? "pass" : "FAIL");
    }
    return all ? kOk : kScientificFailure;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{
        "symclone: symplectic verification of state-duplication maps and Hamiltonian flows"};
    app.require_subcommand(1);

    const std::uint64_t seed0 = default_seed();

    VerifyConfig vcfg;
    vcfg.seed = seed0;
    auto* verify =
        app.add_subcommand("verify", "sweep symplectic-area ratios of a state-duplication map");
    verify->add_option("--map", vcfg.map, "map to verify")
        ->required()
        ->check(CLI::IsMember(verify_map_names()));
    verify->add_option("-n,--samples", vcfg.samples, "sampled instances")
        ->check(CLI::PositiveNumber);
    verify->add_option("--seed", vcfg.seed, "sampling seed (default from SYMCLONE_SEED when set)");
    verify->add_option("--method", vcfg.method, "pushforward method")
        ->check(CLI::IsMember({"analytic", "fd"}));
    verify->add_option("--tol", vcfg.tolerance, "pass tolerance on the ratio")
        ->check(CLI::PositiveNumber);
    verify->add_option("--gauge", vcfg.gauge, "zero | const:<radians> | smooth");
    verify
        ->add_option("--min-area-factor", vcfg.min_area_factor,
                     "state rejection threshold on |a_re b_re + a_im b_im|")
        ->check(CLI::NonNegativeNumber);
    verify->add_option("--jobs", vcfg.jobs, "parallel workers")->check(CLI::PositiveNumber);
    verify->add_option("-o,--output", vcfg.output, "JSON report path");

    EvolveConfig ecfg;
    auto* evolve = app.add_subcommand("evolve", "integrate a bundled Hamiltonian flow");
    evolve->add_option("--preset", ecfg.preset, "Hamiltonian preset")
        ->required()
        ->check(CLI::IsMember(dyn::preset_names()));
    evolve->add_option("--t", ecfg.t_final, "final time")->check(CLI::NonNegativeNumber);
    evolve->add_option("--dt", ecfg.dt, "time step")->check(CLI::PositiveNumber);
    evolve->add_option("--format", ecfg.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));
    evolve->add_option("-o,--output", ecfg.output, "trajectory file path");

    EnsembleConfig ncfg;
    auto* ensemble =
        app.add_subcommand("ensemble", "evolve a classical mixture and track quantum purity");
    ensemble->add_option("--preset", ncfg.preset, "hybrid preset")
        ->check(CLI::IsMember({"meanfield-oscillator"}));
    ensemble->add_option("--initial", ncfg.initial, "initial classical distribution")
        ->required()
        ->check(CLI::IsMember({"delta", "two-point"}));
    ensemble->add_option("--t", ncfg.t_final, "final time")->check(CLI::NonNegativeNumber);
    ensemble->add_option("--dt", ncfg.dt, "time step")->check(CLI::PositiveNumber);
    ensemble->add_option("--weights", ncfg.weights, "custom member weights")->delimiter(',');
    ensemble->add_option("--format", ncfg.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));
    ensemble->add_option("-o,--output", ncfg.output, "report file path");

    OracleConfig ocfg;
    ocfg.seed = seed0;
    auto* oracle = app.add_subcommand("oracle-check", "run the cross-validation gates");
    oracle->add_option("--perturb", ocfg.perturb,
                       "test hook: offset added to one analytic Jacobian entry");
    oracle->add_option("--method", ocfg.method, "which gates to run")
        ->check(CLI::IsMember({"analytic", "fd", "both"}));
    oracle->add_option("--seed", ocfg.seed, "sampling seed");
    oracle->add_option("-n,--points", ocfg.points, "points per Jacobian gate")
        ->check(CLI::PositiveNumber);
    oracle->add_option("-o,--output", ocfg.output, "JSON report path");

    ReproduceConfig rcfg;
    rcfg.seed = seed0;
    auto* reproduce =
        app.add_subcommand("reproduce", "run all verification sweeps and purity experiments");
    reproduce->add_option("-n,--samples", rcfg.samples, "instances per sweep")
        ->check(CLI::PositiveNumber);
    reproduce->add_option("--seed", rcfg.seed, "sampling seed");
    reproduce->add_option("--jobs", rcfg.jobs, "parallel workers")->check(CLI::PositiveNumber);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }

    try {
        if (verify->parsed()) return run_verify(vcfg);
        if (evolve->parsed()) return run_evolve(ecfg);
        if (ensemble->parsed()) return run_ensemble(ncfg);
        if (oracle->parsed()) return run_oracle_check(ocfg);
        if (reproduce->parsed()) return run_reproduce(rcfg);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kScientificFailure;
    }
    return kConfigError;
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    args.reserve(argc > 0 ? static_cast<std::size_t>(argc - 1) : 0);
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args);
}

}  // namespace symclone::cli
