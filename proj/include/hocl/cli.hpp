#pragma once

// hocl command-line front end. run_cli() is the whole program; main() only
// forwards to it so tests can drive commands in-process.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage or config error, 3 I/O error.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hocl/bench.hpp"
#include "hocl/config.hpp"
#include "hocl/io.hpp"
#include "hocl/model.hpp"
#include "hocl/scenarios.hpp"
#include "hocl/stability.hpp"

namespace hocl {

enum ExitCode : int { kExitOk = 0, kExitRuntime = 1, kExitUsage = 2, kExitIo = 3 };

namespace cli_detail {

namespace fs = std::filesystem;

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline Json null_if_nonfinite(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

// Output paths are recorded relative to the output directory so a re-run
// into another directory reproduces the manifest.
inline Json manifest(const std::string& command, Json config, std::uint64_t seed, const Json& outputs, Json summary,
                     double seconds) {
    Json m;
    m["version"] = kVersion;
    m["command"] = command;
    m["seed"] = seed;
    m["config"] = std::move(config);
    m["outputs"] = outputs;
    m["summary"] = std::move(summary);
    m["wall_clock_seconds"] = seconds;
    return m;
}

inline Json single_summary(const ScenarioConfig& c, const SimulationTrace& trace) {
    Json s;
    const OrderParameter final_op = order_parameter(trace.final_phases);
    s["final_r"] = final_op.r;
    s["final_frob_w"] = trace.final_weights.frobenius_norm();
    s["final_v"] = trace.rows.back().v_total;
    const auto opening = gate_opening_step(trace, c.plasticity.critical_r);
    s["gate_open_step"] = opening ? Json(*opening) : Json(nullptr);
    s["max_frob_w"] = max_weight_norm(trace);
    s["weight_bound"] = weight_bound(c.plasticity, c.plasticity.activation_bound, c.n);
    s["min_compatibility"] = min_compatibility(trace.frequencies, c.kernel_bandwidth);
    if (opening) {
        const PlasticityContrast pc = plasticity_contrast(trace, *opening);
        s["dw_before_opening"] = pc.before;
        s["dw_after_opening"] = pc.after;
        s["dw_contrast"] = null_if_nonfinite(pc.ratio());
        const TimescaleSeparation ts = timescale_separation(trace, *opening, c.average_window);
        s["zero_crossing_fast"] = ts.fast_rate;
        s["zero_crossing_slow"] = ts.slow_rate;
        s["timescale_ratio"] = null_if_nonfinite(ts.ratio());
    }
    if (c.id == ScenarioId::Fig3Coupling) {
        s["clusters"] = clusters_json(trace.clusters);
        if (c.frequencies.kind == FrequencySpec::Kind::TwoCluster && c.frequencies.count >= 2 &&
            c.frequencies.count < c.n) {
            const BlockStructure b = block_structure(trace.final_weights, c.frequencies.count);
            s["within_block_weight"] = b.within;
            s["cross_block_weight"] = b.cross;
            s["block_ratio"] = null_if_nonfinite(b.ratio());
        }
    }
    return s;
}

inline void write_single(const fs::path& out, const ScenarioConfig& c, const SimulationTrace& trace, Json& outputs) {
    write_atomic(out / "trace.csv", trace_csv(trace.rows));
    write_atomic(out / "final_state.json", dump(final_state_json(trace)));
    outputs["trace"] = "trace.csv";
    outputs["final_state"] = "final_state.json";
    (void)c;
}

inline std::string projection_csv(const BasinResult& b) {
    std::string out = "trajectory,t,w,phi_bar,v\n";
    for (std::size_t k = 0; k < b.projections.size(); ++k) {
        for (std::size_t t = 0; t < b.projections[k].size(); ++t) {
            const ProjectedPoint& p = b.projections[k][t];
            out += std::to_string(k) + ',' + std::to_string(t) + ',' + format_real(p.w) + ',' +
                   format_real(p.phi_bar) + ',' + format_real(p.v) + '\n';
        }
    }
    return out;
}

inline std::string surface_csv(const SurfaceGrid& g) {
    std::string out = "w,phi,v\n";
    for (std::size_t i = 0; i < g.w_axis.size(); ++i) {
        for (std::size_t j = 0; j < g.phi_axis.size(); ++j) {
            out += format_real(g.w_axis[i]) + ',' + format_real(g.phi_axis[j]) + ',' + format_real(g.values(i, j)) +
                   '\n';
        }
    }
    return out;
}

inline Json basin_summary(const ScenarioConfig& c, const BasinResult& b) {
    Json s;
    Json traj = Json::array();
    double worst_increase = -std::numeric_limits<double>::infinity();
    double worst_deviation = 0.0;
    for (std::size_t k = 0; k < b.trajectories.size(); ++k) {
        Vector v;
        for (const auto& p : b.projections[k]) v.push_back(p.v);
        const double inc = max_increase(v, c.burn_in);
        const double dev = b.projections[k].back().phi_bar;
        worst_increase = std::max(worst_increase, inc);
        worst_deviation = std::max(worst_deviation, dev);
        Json t;
        t["final_r"] = order_parameter(b.trajectories[k].final_phases).r;
        t["final_phase_deviation"] = dev;
        t["final_w"] = b.projections[k].back().w;
        t["final_v"] = b.projections[k].back().v;
        t["max_v_increase_after_burn_in"] = null_if_nonfinite(inc);
        traj.push_back(t);
    }
    s["trajectories"] = traj;
    s["max_final_phase_deviation"] = worst_deviation;
    s["max_v_increase_after_burn_in"] = null_if_nonfinite(worst_increase);
    const SurfaceGrid::Minimum m = b.surface.minimum();
    s["surface_minimum"] = {{"w", m.w}, {"phi", m.phi}, {"v", m.value}};
    return s;
}

inline int cmd_simulate(const std::string& name, std::optional<std::uint64_t> seed, std::optional<std::size_t> steps,
                        const std::string& out_dir, const std::string& config_path, std::ostream& out) {
    Stopwatch clock;
    const ScenarioId id = *parse_scenario(name);
    ScenarioConfig c = config_path.empty() ? scenario_preset(id) : scenario_config_from_json(read_json_file(config_path), id);
    if (c.id != id) throw ConfigError("scenario", "config is for '" + std::string(scenario_name(c.id)) + "', not '" + name + "'");
    if (seed) c.seed = *seed;
    if (steps) {
        if (*steps == 0) throw ConfigError("steps", "must be >= 1");
        c.steps = *steps;
    }
    c.validate();

    const fs::path dir(out_dir);
    ensure_directory(dir);
    Json outputs;
    Json summary;
    if (id == ScenarioId::Fig4Basin) {
        const BasinResult b = run_fig4(c);
        std::string csv(kTraceHeader);
        csv += '\n';
        for (const auto& t : b.trajectories) append_trace_rows(csv, t.rows);
        write_atomic(dir / "trace.csv", csv);
        write_atomic(dir / "projection.csv", projection_csv(b));
        write_atomic(dir / "surface.csv", surface_csv(b.surface));
        Json state;
        state["frequencies"] = b.trajectories.front().frequencies;
        Json trajs = Json::array();
        for (const auto& t : b.trajectories) {
            Json tj;
            tj["phases"] = t.final_phases;
            tj["weights"] = weights_json(t.final_weights);
            trajs.push_back(tj);
        }
        state["trajectories"] = trajs;
        state["clusters"] = Json::array();
        write_atomic(dir / "final_state.json", dump(state));
        outputs["trace"] = "trace.csv";
        outputs["projection"] = "projection.csv";
        outputs["surface"] = "surface.csv";
        outputs["final_state"] = "final_state.json";
        summary = basin_summary(c, b);
    } else {
        const SimulationTrace trace = id == ScenarioId::Fig3Coupling ? run_fig3(c) : run_fig2(c);
        write_single(dir, c, trace, outputs);
        summary = single_summary(c, trace);
    }
    outputs["manifest"] = "manifest.json";
    const Json m = manifest("simulate", to_json(c), c.seed, outputs, summary, clock.seconds());
    write_atomic(dir / "manifest.json", dump(m));
    out << dump(summary);
    return kExitOk;
}

inline Json train_final_state(const HoclModel& m) {
    Json j;
    Json z = Json::array();
    for (const auto& p : m.embeddings) z.push_back(std::vector<double>(p.coords().begin(), p.coords().end()));
    j["embeddings"] = z;
    j["projection"] = {{"rows", m.projection.rows()}, {"cols", m.projection.cols()},
                       {"row_major", std::vector<double>(m.projection.data().begin(), m.projection.data().end())}};
    j["readout"] = {{"rows", m.readout.rows()}, {"cols", m.readout.cols()},
                    {"row_major", std::vector<double>(m.readout.data().begin(), m.readout.data().end())}};
    j["phases"] = m.oscillator.phases;
    j["frequencies"] = m.oscillator.frequencies;
    j["weights"] = weights_json(m.weights);
    return j;
}

inline int cmd_train(const std::string& config_path, const std::string& out_dir, std::ostream& out) {
    Stopwatch clock;
    ToyConfig c = config_path.empty() ? ToyConfig{} : toy_config_from_json(read_json_file(config_path));
    ToyProblem tp = make_toy_problem(c);
    c.delta = tp.resolved_delta;  // echo the resolved threshold

    const fs::path dir(out_dir);
    ensure_directory(dir);
    const double initial_loss = forward_loss(tp.model, tp.data);
    const TrainResult res = train(tp.model, tp.data, c.max_iters, c.eps_conv);

    write_atomic(dir / "trace.csv", train_csv(res.trace));
    write_atomic(dir / "final_state.json", dump(train_final_state(tp.model)));

    Json summary;
    summary["iterations"] = res.trace.size();
    summary["converged"] = res.converged;
    summary["initial_loss"] = initial_loss;
    summary["final_loss"] = res.final_loss;
    summary["loss_reduction"] = initial_loss > 0.0 ? 1.0 - res.final_loss / initial_loss : 0.0;
    double zmax = 0.0;
    for (const auto& p : tp.model.embeddings) zmax = std::max(zmax, p.norm());
    summary["max_embedding_norm"] = zmax;
    summary["final_r"] = res.trace.back().r;
    summary["final_v"] = res.trace.back().v_total;
    summary["final_frob_w"] = res.trace.back().frob_w;
    summary["delta"] = tp.resolved_delta;
    summary["density"] = res.trace.back().density;
    summary["separation_bound"] =
        separation_bound(0.01, kernel_lipschitz(c.kernel_bandwidth), c.coupling, c.units, c.plasticity.eta, 1.0);
    summary["rate_ratio"] = c.alpha_fast > 0.0 ? Json(c.alpha_slow / c.alpha_fast) : Json(nullptr);

    const Json outputs = {{"trace", "trace.csv"}, {"final_state", "final_state.json"}, {"manifest", "manifest.json"}};
    write_atomic(dir / "manifest.json", dump(manifest("train", to_json(c), c.seed, outputs, summary, clock.seconds())));
    out << dump(summary);
    return kExitOk;
}

inline int cmd_bounds(double eps, double sigma_c, double k, std::size_t n, double eta, double m, double gamma,
                      std::ostream& out) {
    if (!(gamma > 0.0)) throw ConfigError("gamma", "must be > 0");
    if (!(m > 0.0)) throw ConfigError("m", "must be > 0");
    if (!(eta >= 0.0)) throw ConfigError("eta", "must be >= 0");
    const double lc = kernel_lipschitz(sigma_c);
    PlasticityParams p;
    p.eta = eta;
    p.gamma = gamma;
    Json j;
    j["separation_bound"] = separation_bound(eps, lc, k, n, eta, m);
    j["weight_bound"] = weight_bound(p, m, n);
    j["kernel_lipschitz"] = lc;
    out << dump(j);
    return kExitOk;
}

inline int cmd_bench(const std::vector<std::size_t>& sizes, std::size_t k, std::size_t reps, const std::string& out_dir,
                     std::ostream& out) {
    BenchOptions o;
    o.sizes = sizes;
    o.k_cap = k;
    o.reps = reps;
    const BenchResult r = run_bench(o);
    std::string csv = "n,median_ns_per_step,median_build_ns,entries\n";
    Json pts = Json::array();
    for (const auto& p : r.points) {
        csv += std::to_string(p.n) + ',' + format_real(p.step_ns) + ',' + format_real(p.build_ns) + ',' +
               std::to_string(p.entries) + '\n';
        pts.push_back({{"n", p.n}, {"median_ns_per_step", p.step_ns}, {"median_build_ns", p.build_ns}});
    }
    Json j;
    j["k"] = k;
    j["reps"] = reps;
    j["points"] = pts;
    j["exponent"] = r.exponent;
    if (!out_dir.empty()) {
        ensure_directory(out_dir);
        write_atomic(fs::path(out_dir) / "bench.csv", csv);
        write_atomic(fs::path(out_dir) / "bench.json", dump(j));
    }
    out << dump(j);
    return kExitOk;
}

}  // namespace cli_detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Oscillatory co-learning simulator: scenarios, toy training, bounds and scaling benchmark", "hocl"};
    app.require_subcommand(1);

    std::string scenario;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> steps;
    std::string sim_out;
    std::string sim_config;
    auto* sim = app.add_subcommand("simulate", "Run a preset scenario and write trace.csv, final_state.json, manifest.json");
    sim->add_option("scenario", scenario, "fig2 | fig3 | fig4")->required()->check(CLI::IsMember({"fig2", "fig3", "fig4"}));
    sim->add_option("--seed", seed, "RNG seed (overrides preset and config)");
    sim->add_option("--steps", steps, "Number of Euler steps (overrides preset and config)");
    sim->add_option("--out", sim_out, "Output directory (default runs/<scenario>)");
    sim->add_option("--config", sim_config, "JSON config or a previous manifest.json");

    std::string train_config;
    std::string train_out = "runs/train";
    auto* tr = app.add_subcommand("train", "Toy-scale training run on a synthetic regression target");
    tr->add_option("--config", train_config, "JSON config or a previous manifest.json (default toy config if omitted)");
    tr->add_option("--out", train_out, "Output directory")->capture_default_str();

    double eps = 0, sigma_c = 0, k = 0, eta = 0, m = 0, gamma = 0;
    std::size_t n = 0;
    auto* bd = app.add_subcommand("bounds", "Print the learning-rate separation bound, weight bound and kernel Lipschitz constant");
    bd->add_option("--eps", eps, "Tolerance epsilon")->required();
    bd->add_option("--sigma-c", sigma_c, "Compatibility kernel bandwidth")->required();
    bd->add_option("--k", k, "Coupling strength K")->required();
    bd->add_option("--n", n, "Number of units")->required();
    bd->add_option("--eta", eta, "Hebbian rate")->required();
    bd->add_option("--m", m, "Activation bound M")->required();
    bd->add_option("--gamma", gamma, "Weight decay")->required();

    std::vector<std::size_t> sizes{256, 512, 1024, 2048};
    std::size_t bench_k = 16;
    std::size_t reps = 5;
    std::string bench_out;
    auto* bn = app.add_subcommand("bench", "Time the per-step sparse pipeline across population sizes");
    bn->add_option("--n", sizes, "Comma-separated ascending sizes")->delimiter(',')->capture_default_str();
    bn->add_option("--k", bench_k, "Neighborhood cap")->capture_default_str();
    bn->add_option("--reps", reps, "Timed repetitions per size (one extra warmup rep is discarded)")->capture_default_str();
    bn->add_option("--out", bench_out, "Optional directory for bench.csv and bench.json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        CLI::App* failing = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        err << failing->help();
        return kExitUsage;
    }

    try {
        if (sim->parsed()) {
            const std::string dir = sim_out.empty() ? "runs/" + scenario : sim_out;
            return cli_detail::cmd_simulate(scenario, seed, steps, dir, sim_config, out);
        }
        if (tr->parsed()) return cli_detail::cmd_train(train_config, train_out, out);
        if (bd->parsed()) return cli_detail::cmd_bounds(eps, sigma_c, k, n, eta, m, gamma, out);
        if (bn->parsed()) return cli_detail::cmd_bench(sizes, bench_k, reps, bench_out, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ArgumentError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}

}  // namespace hocl
