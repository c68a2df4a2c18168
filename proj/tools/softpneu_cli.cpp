// Command-line front end: wires project configs, trace files, and the
// library workflows into reproducible runs. Every command writes its
// artifacts plus a manifest (inputs hash, seed, tool version) into the
// output directory, and identical config + seed must produce identical
// bytes.

#include <algorithm>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "softpneu/config.hpp"
#include "softpneu/lqr.hpp"
#include "softpneu/lti.hpp"
#include "softpneu/manifest.hpp"
#include "softpneu/plant.hpp"
#include "softpneu/sim.hpp"
#include "softpneu/sysid.hpp"
#include "softpneu/trace_csv.hpp"
#include "softpneu/uncertainty.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace softpneu;

namespace {

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Dependency:
            return 4;
        case ErrorKind::NumericFailure:
        case ErrorKind::BoundaryCase:
        case ErrorKind::SynthesisInfeasible:
        case ErrorKind::NominalInstability:
        case ErrorKind::StepSize:
        case ErrorKind::PoleOnGrid:
        case ErrorKind::NormUnbounded:
        case ErrorKind::DegenerateDivision:
            return 3;
        default:
            return 2;  // validation-type failures
    }
}

// Everything shared by the commands: parsed config, output dir, seed, and
// the rolling digest of consumed inputs.
struct RunContext {
    std::string config_path;
    ProjectConfig config;
    fs::path out_dir;
    std::uint64_t seed = 0;
    bool strict = false;
    InputsDigest digest;

    void write_json(const std::string& name, const json& j,
                    std::vector<std::string>* outputs) {
        fs::create_directories(out_dir);
        std::ofstream out(out_dir / name, std::ios::binary);
        if (!out)
            throw Error(ErrorKind::Parse,
                        (out_dir / name).string() + ": cannot open for writing");
        out << j.dump(2) << '\n';
        outputs->push_back(name);
    }

    void write_text(const std::string& name, const std::string& text,
                    std::vector<std::string>* outputs) {
        fs::create_directories(out_dir);
        std::ofstream out(out_dir / name, std::ios::binary);
        if (!out)
            throw Error(ErrorKind::Parse,
                        (out_dir / name).string() + ": cannot open for writing");
        out << text;
        outputs->push_back(name);
    }

    void finish(const std::string& command, std::vector<std::string> outputs) {
        RunManifest m;
        m.command = command;
        m.seed = seed;
        m.inputs_hash = digest.hex();
        m.outputs = std::move(outputs);
        std::string name = command + "_manifest.json";
        std::replace(name.begin(), name.end(), '-', '_');
        fs::create_directories(out_dir);
        std::ofstream out(out_dir / name, std::ios::binary);
        out << manifest_json(m).dump(2) << '\n';
    }

    json load_artifact(const std::string& name,
                       const std::string& producing_command) {
        const fs::path path = out_dir / name;
        if (!fs::exists(path))
            throw Error(ErrorKind::Dependency,
                        path.string() + ": missing; run 'softpneu " +
                            producing_command + "' first");
        digest.update_file(path.string());
        std::ifstream in(path, std::ios::binary);
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw Error(ErrorKind::Parse, path.string() + ": " + e.what());
        }
        return j;
    }
};

json tf_json(const TransferFunction& tf) {
    return json{{"num", tf.num()}, {"den", tf.den()}};
}

TransferFunction tf_from_json(const json& j, const std::string& origin) {
    if (!j.is_object() || !j.contains("num") || !j.contains("den"))
        throw Error(ErrorKind::Parse, origin + ": expected {num, den}");
    return TransferFunction(j.at("num").get<std::vector<double>>(),
                            j.at("den").get<std::vector<double>>());
}

json matrix_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

std::vector<std::complex<double>> sorted_poles(
    std::vector<std::complex<double>> p) {
    std::sort(p.begin(), p.end(), [](const auto& a, const auto& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return p;
}

json poles_json(const std::vector<std::complex<double>>& poles) {
    json out = json::array();
    for (const auto& p : sorted_poles(poles))
        out.push_back(json::array({p.real(), p.imag()}));
    return out;
}

std::string stability_verdict(const std::vector<std::complex<double>>& poles) {
    double scale = 1.0;
    for (const auto& p : poles) scale = std::max(scale, std::abs(p));
    const double tol = 1e-9 * scale;
    bool marginal = false;
    for (const auto& p : poles) {
        if (p.real() > tol) return "unstable";
        if (std::abs(p.real()) <= tol) marginal = true;
    }
    return marginal ? "marginally stable" : "stable";
}

std::vector<fs::path> list_trace_files(const RunContext& ctx) {
    const std::string& dir = ctx.config.paths.traces_dir;
    if (dir.empty())
        throw Error(ErrorKind::Validation,
                    "config paths.traces_dir is empty; this command reads "
                    "trace CSVs");
    if (!fs::is_directory(dir))
        throw Error(ErrorKind::Validation, dir + ": not a directory");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".csv")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty())
        throw Error(ErrorKind::Validation, dir + ": no .csv traces found");
    return files;
}

StateSpace canonical_plant(const ProjectConfig& cfg) {
    return to_controllable_canonical(full_system_tf(
        cfg.actuator, cfg.pump, cfg.pressure_gain_n_per_pa));
}

LqrSolution synthesize(const ProjectConfig& cfg) {
    LqrWeights w;
    w.p = cfg.lqr.p;
    w.r = cfg.lqr.r;
    return lqr_gain(canonical_plant(cfg), w);
}

std::string format_csv_row(std::initializer_list<double> vals) {
    std::string row;
    char buf[64];
    for (double v : vals) {
        if (!row.empty()) row.push_back(',');
        std::snprintf(buf, sizeof buf, "%.12g", v);
        row += buf;
    }
    row.push_back('\n');
    return row;
}

// ---- commands --------------------------------------------------------

void cmd_model(RunContext& ctx) {
    const auto& cfg = ctx.config;
    const double k_spring = spring_constant(cfg.actuator);
    const double wn = natural_frequency(cfg.actuator);
    const auto t_spa = actuator_tf(cfg.actuator, ctx.config.pressure_gain_n_per_pa);
    const auto t_pcs = pump_tf(cfg.pump);
    const auto t_sys = full_system_tf(cfg.actuator, cfg.pump,
                                      cfg.pressure_gain_n_per_pa);
    const auto sys_poles = poles(t_sys);
    const std::string verdict = stability_verdict(sys_poles);

    json report{{"spring_constant_nm_per_rad", k_spring},
                {"natural_frequency_rad_s", wn},
                {"damping_ratio", cfg.actuator.damping_ratio},
                {"actuator_tf", tf_json(t_spa)},
                {"pump_tf", tf_json(t_pcs)},
                {"system_tf", tf_json(t_sys)},
                {"open_loop_poles", poles_json(sys_poles)},
                {"open_loop_stability", verdict}};

    std::vector<std::string> outputs;
    ctx.write_json("model.json", report, &outputs);
    ctx.finish("model", std::move(outputs));

    std::printf("spring constant  %.6g N m/rad\n", k_spring);
    std::printf("natural freq     %.6g rad/s\n", wn);
    std::printf("open loop        %s\n", verdict.c_str());
}

void cmd_fit_zeta(RunContext& ctx) {
    const auto files = list_trace_files(ctx);
    std::vector<ExperimentTrace> traces;
    for (const auto& f : files) {
        ctx.digest.update_file(f.string());
        traces.push_back(read_trace_csv_file(f.string()));
    }
    const double amplitude = traces.front().input.back();
    const double wn = natural_frequency(ctx.config.actuator);
    const auto est = fit_damping_ratio(traces, wn, amplitude);

    json per_trace = json::array();
    for (std::size_t i = 0; i < files.size(); ++i)
        per_trace.push_back(json{{"file", files[i].filename().string()},
                                 {"zeta", est.per_trace_zetas[i]}});
    json report{{"omega_n_rad_s", wn},
                {"step_amplitude", amplitude},
                {"traces", per_trace},
                {"zeta_nominal", est.zeta_nominal},
                {"zeta_delta", est.zeta_delta},
                {"residual_rms_rad", est.residual_rms_rad},
                {"boundary_warning", est.boundary_warning}};

    std::vector<std::string> outputs;
    ctx.write_json("zeta.json", report, &outputs);
    ctx.finish("fit-zeta", std::move(outputs));

    std::printf("zeta = %.4f +/- %.4f over %zu traces\n", est.zeta_nominal,
                est.zeta_delta, traces.size());
    if (est.boundary_warning) {
        std::fprintf(stderr, "fit-zeta: warning: a fit landed on a search "
                             "bound; the second-order model may not explain "
                             "that trace\n");
        if (ctx.strict)
            throw Error(ErrorKind::Validation,
                        "boundary fit rejected under --strict");
    }
}

void cmd_sysid(RunContext& ctx, int order, int hankel_rows) {
    const auto files = list_trace_files(ctx);
    json models = json::array();
    for (const auto& f : files) {
        ctx.digest.update_file(f.string());
        const auto trace = read_trace_csv_file(f.string());
        const auto ident = identify_subspace(trace, order, hankel_rows);
        const auto tf = to_transfer_function(ident.model);
        models.push_back(json{{"file", f.filename().string()},
                              {"order", ident.order},
                              {"fit_percent", ident.fit_percent},
                              {"sample_period_s", trace.sample_period()},
                              {"singular_values", ident.singular_values},
                              {"A", matrix_json(ident.model.A())},
                              {"B", matrix_json(ident.model.B())},
                              {"C", matrix_json(ident.model.C())},
                              {"D", matrix_json(ident.model.D())},
                              {"tf", tf_json(tf)}});
        std::printf("%s: order %d, fit %.2f%%\n",
                    f.filename().string().c_str(), ident.order,
                    ident.fit_percent);
    }
    json report{{"requested_order", order},
                {"hankel_rows", hankel_rows},
                {"models", models}};

    std::vector<std::string> outputs;
    ctx.write_json("models.json", report, &outputs);
    ctx.finish("sysid", std::move(outputs));
}

// Removes the feedthrough from an identified model. The plant is strictly
// proper, so a nonzero D is a noise artifact, and it would dominate the
// relative error wherever the nominal has rolled off.
TransferFunction strictly_proper_part(const TransferFunction& tf) {
    if (tf.num().size() < tf.den().size()) return tf;
    const double d = tf.num().front();
    return TransferFunction(poly::add(tf.num(), poly::scale(tf.den(), -d)),
                            tf.den());
}

void cmd_weight(RunContext& ctx, int weight_order, bool against_full_chain) {
    const json models = ctx.load_artifact("models.json", "sysid");
    if (!models.contains("models") || models.at("models").empty())
        throw Error(ErrorKind::Dependency,
                    "models.json holds no identified models; rerun 'softpneu "
                    "sysid'");
    std::vector<TransferFunction> family;
    double band_hi = std::numeric_limits<double>::infinity();
    for (const auto& m : models.at("models")) {
        family.push_back(
            strictly_proper_part(tf_from_json(m.at("tf"), "models.json")));
        if (m.contains("sample_period_s")) {
            const double dt = m.at("sample_period_s").get<double>();
            // past half Nyquist the identified response is extrapolation
            band_hi = std::min(band_hi,
                               std::numbers::pi / (2.0 * dt));
        }
    }

    // Traces are pressure-step experiments, so the identified family lives
    // on the actuator stage. Relative errors are unchanged by the shared
    // pump stage, which divides out of T_k/T, so the fitted weight applies
    // to the full chain too.
    const auto& cfg = ctx.config;
    const auto nominal =
        against_full_chain
            ? full_system_tf(cfg.actuator, cfg.pump, cfg.pressure_gain_n_per_pa)
            : actuator_tf(cfg.actuator, cfg.pressure_gain_n_per_pa);
    const double wn = natural_frequency(cfg.actuator);
    std::vector<double> omegas = default_envelope_grid(wn);
    std::erase_if(omegas, [&](double w) { return w > band_hi; });
    if (omegas.size() < 8)
        throw Error(ErrorKind::Validation,
                    "trace sampling too slow to cover the envelope grid");
    const auto envelope = relative_error_envelope(nominal, family, omegas);
    const auto weight = fit_weight(envelope, omegas, weight_order);

    std::string csv = "omega_rad_s,envelope,weight\n";
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        const double wmag = std::abs(complex_response(weight, omegas[i]));
        csv += format_csv_row({omegas[i], envelope[i], wmag});
    }

    double env_peak = 0.0;
    for (double e : envelope) env_peak = std::max(env_peak, e);
    json report{{"order", weight_order},
                {"weight_tf", tf_json(weight)},
                {"envelope_peak", env_peak},
                {"grid_points", omegas.size()},
                {"band_hi_rad_s", omegas.back()},
                {"family_size", family.size()},
                {"nominal", against_full_chain ? "full" : "actuator"}};

    std::vector<std::string> outputs;
    ctx.write_text("envelope.csv", csv, &outputs);
    ctx.write_json("weight.json", report, &outputs);
    ctx.finish("weight", std::move(outputs));

    std::printf("envelope peak %.4g, weight order %d over %zu members\n",
                env_peak, weight_order, family.size());
}

void cmd_lqr(RunContext& ctx, double p_override, double r_override) {
    if (p_override > 0.0) ctx.config.lqr.p = p_override;
    if (r_override > 0.0) ctx.config.lqr.r = r_override;
    const auto sol = synthesize(ctx.config);
    const auto cert = lyapunov_certificate(sol);

    Eigen::EigenSolver<Eigen::MatrixXd> es(sol.closed_loop.A());
    std::vector<std::complex<double>> cl_poles;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        cl_poles.push_back(es.eigenvalues()(i));

    std::vector<double> k_gain(sol.K_gain.data(),
                               sol.K_gain.data() + sol.K_gain.size());
    json report{{"p", ctx.config.lqr.p},
                {"r", ctx.config.lqr.r},
                {"K_gain", k_gain},
                {"reference_gain", sol.reference_gain},
                {"Y", matrix_json(sol.Y)},
                {"closed_loop_poles", poles_json(cl_poles)},
                {"certificate", json{{"v_posdef", cert.v_posdef},
                                     {"vdot_negdef", cert.vdot_negdef}}}};

    std::vector<std::string> outputs;
    ctx.write_json("gain.json", report, &outputs);
    ctx.finish("lqr", std::move(outputs));

    std::printf("K = [");
    for (std::size_t i = 0; i < k_gain.size(); ++i)
        std::printf("%s%.6g", i ? ", " : "", k_gain[i]);
    std::printf("], Nbar = %.6g, certificate %s\n", sol.reference_gain,
                cert.v_posdef && cert.vdot_negdef ? "ok" : "FAILED");
}

void cmd_simulate(RunContext& ctx, const std::string& ref_kind,
                  const std::string& amplitude_text, bool saturate) {
    const auto& cfg = ctx.config;
    const auto sol = synthesize(cfg);
    const StateSpace plant = canonical_plant(cfg);
    const double amplitude = parse_angle(amplitude_text);
    std::optional<double> bound;
    if (saturate) bound = cfg.pump.max_motor_speed_rad_s;

    SimResult res = [&] {
        if (ref_kind == "step") {
            ReferenceSignal ref{ReferenceKind::Step, amplitude, 0.0,
                                cfg.sim.horizon_s};
            return simulate_closed_loop(plant, sol.K_gain, sol.reference_gain,
                                        ref, cfg.sim.dt_s, bound);
        }
        if (ref_kind == "square")
            return square_wave_response(plant, sol.K_gain, sol.reference_gain,
                                        amplitude, cfg.sim.square_period_s,
                                        cfg.sim.horizon_s, cfg.sim.dt_s,
                                        bound);
        throw Error(ErrorKind::Validation,
                    "--ref must be 'step' or 'square', got '" + ref_kind +
                        "'");
    }();

    std::string csv = "t,reference,output,command\n";
    for (std::size_t i = 0; i < res.timestamps_s.size(); ++i)
        csv += format_csv_row({res.timestamps_s[i], res.reference[i],
                               res.output_rad[i], res.input_command[i]});

    json metrics{{"reference", ref_kind},
                 {"amplitude_rad", amplitude},
                 {"dt_s", cfg.sim.dt_s},
                 {"horizon_s", cfg.sim.horizon_s},
                 {"saturated", saturate},
                 {"steady_state_error_rad",
                  res.metrics.steady_state_error_rad},
                 {"overshoot_percent", res.metrics.overshoot_percent}};
    metrics["settling_time_s"] =
        res.metrics.settling_time_s
            ? json(*res.metrics.settling_time_s)
            : json(nullptr);
    if (ref_kind == "square") {
        metrics["edge_delays_s"] = res.edge_delays_s;
        metrics["plateau_errors_rad"] = res.plateau_errors_rad;
    }

    std::vector<std::string> outputs;
    ctx.write_text("sim.csv", csv, &outputs);
    ctx.write_json("sim_metrics.json", metrics, &outputs);
    ctx.finish("simulate", std::move(outputs));

    if (res.metrics.settling_time_s)
        std::printf("settling %.4g s, ", *res.metrics.settling_time_s);
    else
        std::printf("not settled, ");
    std::printf("sse %.4g rad, overshoot %.3g%%\n",
                res.metrics.steady_state_error_rad,
                res.metrics.overshoot_percent);
}

void cmd_robust(RunContext& ctx, int n_samples) {
    const json weight_doc = ctx.load_artifact("weight.json", "weight");
    const json gain_doc = ctx.load_artifact("gain.json", "lqr");
    const auto weight = tf_from_json(weight_doc.at("weight_tf"), "weight.json");
    if (!gain_doc.contains("K_gain"))
        throw Error(ErrorKind::Parse, "gain.json: missing K_gain");
    const auto k_vec = gain_doc.at("K_gain").get<std::vector<double>>();
    Eigen::RowVectorXd K(static_cast<Eigen::Index>(k_vec.size()));
    for (std::size_t i = 0; i < k_vec.size(); ++i)
        K(static_cast<Eigen::Index>(i)) = k_vec[i];

    const auto& cfg = ctx.config;
    const auto nominal = full_system_tf(cfg.actuator, cfg.pump,
                                        cfg.pressure_gain_n_per_pa);
    const auto compensator = state_feedback_loop_compensator(K, nominal);
    const auto rep = robust_stability_check(nominal, weight, compensator);

    bool all_stable = false;
    int sampled = 0;
    if (rep.pass) {
        all_stable = sample_family_verify(nominal, weight, compensator,
                                          n_samples, ctx.seed);
        sampled = n_samples;
    }

    json report{{"margin", rep.margin},
                {"pass", rep.pass},
                {"samples", sampled},
                {"all_sampled_loops_stable",
                 rep.pass ? json(all_stable) : json(nullptr)}};

    std::vector<std::string> outputs;
    ctx.write_json("robust.json", report, &outputs);
    ctx.finish("robust", std::move(outputs));

    std::printf("small-gain margin %.4g -> %s", rep.margin,
                rep.pass ? "pass" : "FAIL");
    if (rep.pass)
        std::printf(" (%d sampled perturbations %s)", sampled,
                    all_stable ? "all stable" : "NOT all stable");
    std::printf("\n");
    if (!rep.pass && ctx.strict)
        throw Error(ErrorKind::NumericFailure,
                    "robust stability margin >= 1 under --strict");
}

void cmd_gripper(RunContext& ctx, double spread,
                 const std::string& amplitude_text) {
    const auto& cfg = ctx.config;
    if (spread < 0.0) spread = cfg.actuator.damping_spread;
    ReferenceSignal ref{ReferenceKind::Step, parse_angle(amplitude_text), 0.0,
                        cfg.sim.horizon_s};
    LqrWeights w;
    w.p = cfg.lqr.p;
    w.r = cfg.lqr.r;
    const auto res = gripper_sync_study(
        cfg.actuator, cfg.pump, cfg.pressure_gain_n_per_pa, w, spread, ref,
        cfg.sim.dt_s, ctx.seed);

    json report{{"zeta_spread", spread},
                {"open_loop_mismatch_rad", res.open_loop_mismatch_rad},
                {"closed_loop_mismatch_rad", res.closed_loop_mismatch_rad}};

    std::vector<std::string> outputs;
    ctx.write_json("gripper.json", report, &outputs);
    ctx.finish("gripper", std::move(outputs));

    std::printf("mismatch open %.4g rad, closed %.4g rad\n",
                res.open_loop_mismatch_rad, res.closed_loop_mismatch_rad);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"modeling, identification, and LQR control for syringe-pump "
                 "driven soft pneumatic actuators"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    std::uint64_t seed = 0;
    bool strict = false;
    app.add_option("--config", config_path, "project config JSON")
        ->required();
    app.add_option("--out", out_override,
                   "output directory (default: paths.out_dir from config)");
    app.add_option("--seed", seed, "seed for randomized steps");
    app.add_flag("--strict", strict, "turn warnings into failures");

    auto* model = app.add_subcommand("model", "derive the plant models");
    auto* fit = app.add_subcommand("fit-zeta",
                                   "fit damping ratio from step traces");
    auto* sysid = app.add_subcommand("sysid",
                                     "identify state-space models per trace");
    int order = 0, hankel_rows = 10;
    sysid->add_option("--order", order,
                      "model order; 0 picks the singular-value knee");
    sysid->add_option("--hankel-rows", hankel_rows, "block Hankel rows");
    auto* weight = app.add_subcommand("weight",
                                      "fit the robustness weight envelope");
    int weight_order = 2;
    bool against_full_chain = false;
    weight->add_option("--weight-order", weight_order,
                       "weight order 0, 1 or 2");
    weight->add_flag("--full-chain", against_full_chain,
                     "compare identified models against the full chain "
                     "instead of the actuator stage");
    auto* lqr = app.add_subcommand("lqr", "synthesize the LQR gain");
    double p_override = -1.0, r_override = -1.0;
    lqr->add_option("--p", p_override, "state penalty scale; overrides lqr.p");
    lqr->add_option("--r", r_override, "input penalty; overrides lqr.r");
    auto* simulate = app.add_subcommand("simulate",
                                        "closed-loop time response");
    std::string ref_kind = "step", amplitude = "90deg";
    bool saturate = false;
    simulate->add_option("--ref", ref_kind, "reference: step or square");
    simulate->add_option("--amplitude", amplitude,
                         "reference amplitude, e.g. 90deg or 1.57rad");
    simulate->add_flag("--saturate", saturate,
                       "clamp the motor command at the pump limit");
    auto* robust = app.add_subcommand("robust",
                                      "small-gain robust stability check");
    int n_samples = 200;
    robust->add_option("--samples", n_samples,
                       "random perturbed loops to verify");
    auto* gripper = app.add_subcommand("gripper",
                                       "two-finger synchronization study");
    double spread = -1.0;
    std::string grip_amplitude = "90deg";
    gripper->add_option("--spread", spread,
                        "damping spread; default: actuator.damping_spread");
    gripper->add_option("--amplitude", grip_amplitude, "step amplitude");

    for (auto* sub : app.get_subcommands({}))
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        RunContext ctx;
        ctx.config_path = config_path;
        ctx.config = load_project_config(config_path);
        ctx.out_dir = out_override.empty() ? ctx.config.paths.out_dir
                                           : out_override;
        ctx.seed = seed;
        ctx.strict = strict;
        // The hash covers what determines the outputs: the argument list
        // minus the two location options (config content is hashed on its
        // own), so re-running elsewhere reproduces the same digest.
        std::string argline;
        for (int i = 1; i < argc; ++i) {
            const std::string arg = argv[i];
            if (arg == "--config" || arg == "--out") {
                ++i;
                continue;
            }
            if (arg.rfind("--config=", 0) == 0 || arg.rfind("--out=", 0) == 0)
                continue;
            argline += arg;
            argline.push_back('\0');
        }
        ctx.digest.update(argline);
        ctx.digest.update_file(config_path);

        if (model->parsed()) cmd_model(ctx);
        if (fit->parsed()) cmd_fit_zeta(ctx);
        if (sysid->parsed()) cmd_sysid(ctx, order, hankel_rows);
        if (weight->parsed()) cmd_weight(ctx, weight_order, against_full_chain);
        if (lqr->parsed()) cmd_lqr(ctx, p_override, r_override);
        if (simulate->parsed()) cmd_simulate(ctx, ref_kind, amplitude,
                                             saturate);
        if (robust->parsed()) cmd_robust(ctx, n_samples);
        if (gripper->parsed()) cmd_gripper(ctx, spread, grip_amplitude);
        return 0;
    } catch (const Error& e) {
        std::fprintf(stderr, "softpneu: %s: %s\n", to_string(e.kind()),
                     e.what());
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "softpneu: internal error: %s\n", e.what());
        return 3;
    }
}
