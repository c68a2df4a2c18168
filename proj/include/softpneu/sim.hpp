#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "softpneu/error.hpp"
#include "softpneu/lqr.hpp"
#include "softpneu/lti.hpp"
#include "softpneu/plant.hpp"

namespace softpneu {

enum class ReferenceKind { Step, Square };

// Square references alternate between the amplitude and zero with 50% duty,
// starting high at t = 0.
struct ReferenceSignal {
    ReferenceKind kind = ReferenceKind::Step;
    double amplitude_rad = 0.0;
    double period_s = 0.0;  // square only
    double horizon_s = 10.0;

    void validate() const {
        if (!std::isfinite(amplitude_rad))
            throw Error(ErrorKind::InvalidArgument,
                        "reference amplitude must be finite");
        if (!(horizon_s > 0.0) || !std::isfinite(horizon_s))
            throw Error(ErrorKind::InvalidArgument,
                        "horizon must be positive");
        if (kind == ReferenceKind::Square &&
            (!(period_s > 0.0) || !std::isfinite(period_s)))
            throw Error(ErrorKind::InvalidArgument,
                        "square reference needs a positive period");
    }

    double value(double t) const {
        if (kind == ReferenceKind::Step) return amplitude_rad;
        const double phase = std::fmod(t, period_s);
        return phase < 0.5 * period_s ? amplitude_rad : 0.0;
    }
};

struct SimMetrics {
    std::optional<double> settling_time_s;  // empty means never settled
    double steady_state_error_rad = 0.0;
    double overshoot_percent = 0.0;
};

struct SimResult {
    std::vector<double> timestamps_s;
    std::vector<double> reference;
    std::vector<double> output_rad;
    // applied input; divided by the saturation bound when one is set, so a
    // clipped command reads exactly +/-1
    std::vector<double> input_command;
    SimMetrics metrics;
    // square references only: midpoint-crossing delay after each edge and the
    // tail error of each plateau
    std::vector<double> edge_delays_s;
    std::vector<double> plateau_errors_rad;
};

struct GripperStudyResult {
    double open_loop_mismatch_rad = 0.0;
    double closed_loop_mismatch_rad = 0.0;
};

// Last time the output leaves the +/-(band * |final_value|) tube, measured
// from the first timestamp. Empty when the output is still outside the tube
// at the end; zero when it never leaves.
inline std::optional<double> settling_time(const std::vector<double>& t,
                                           const std::vector<double>& y,
                                           double final_value,
                                           double band = 0.02) {
    if (t.empty() || t.size() != y.size())
        throw Error(ErrorKind::InvalidArgument,
                    "settling_time needs equal-length non-empty series");
    if (!(band > 0.0) || band > 0.1)
        throw Error(ErrorKind::InvalidArgument, "band must lie in (0, 0.1]");
    const double tube = band * std::abs(final_value);
    std::size_t last_outside = t.size();  // sentinel: never outside
    for (std::size_t i = 0; i < y.size(); ++i)
        if (std::abs(y[i] - final_value) > tube) last_outside = i;
    if (last_outside == t.size()) return 0.0;
    if (last_outside + 1 >= t.size()) return std::nullopt;
    return t[last_outside + 1] - t[0];
}

namespace detail {

inline void check_step_size(const Eigen::MatrixXd& A, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw Error(ErrorKind::InvalidArgument, "dt must be positive");
    Eigen::EigenSolver<Eigen::MatrixXd> es(A);
    double max_mag = 0.0;
    double min_re = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < A.rows(); ++k) {
        const std::complex<double> lam = es.eigenvalues()(k);
        max_mag = std::max(max_mag, std::abs(lam));
        const double re = std::abs(lam.real());
        if (re > 1e-12) min_re = std::min(min_re, re);
    }
    if (dt * max_mag > 0.5)
        throw Error(ErrorKind::StepSize,
                    "dt too large for the fastest system mode");
    if (std::isfinite(min_re) && dt > 0.01 / min_re)
        throw Error(ErrorKind::StepSize,
                    "dt exceeds 1% of the dominant time constant");
}

// One classic RK4 step of x' = A x + B u(x) with the reference held constant
// over the step; the command law is re-evaluated at every stage state.
template <typename CommandFn>
inline Eigen::VectorXd rk4_step(const Eigen::MatrixXd& A,
                                const Eigen::MatrixXd& B,
                                const Eigen::VectorXd& x, double dt,
                                const CommandFn& command) {
    auto f = [&](const Eigen::VectorXd& xs) -> Eigen::VectorXd {
        return A * xs + B * command(xs);
    };
    const Eigen::VectorXd k1 = f(x);
    const Eigen::VectorXd k2 = f(x + 0.5 * dt * k1);
    const Eigen::VectorXd k3 = f(x + 0.5 * dt * k2);
    const Eigen::VectorXd k4 = f(x + dt * k3);
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

inline double clamp_command(double u, const std::optional<double>& bound) {
    if (!bound) return u;
    return std::clamp(u, -*bound, *bound);
}

struct RawSim {
    std::vector<double> t, ref, y, u;
};

// Shared integration core. K empty means open loop (the reference itself is
// the command); otherwise u = sat(reference_gain * r - K x).
inline RawSim integrate(const StateSpace& sys, const Eigen::RowVectorXd& K,
                        double reference_gain, const ReferenceSignal& ref,
                        double dt, const std::optional<double>& saturation) {
    ref.validate();
    if (!sys.is_siso())
        throw Error(ErrorKind::InvalidArgument, "simulation is SISO only");
    if (saturation && !(*saturation > 0.0))
        throw Error(ErrorKind::InvalidArgument,
                    "saturation bound must be positive");
    const bool closed = K.size() > 0;
    if (closed && K.size() != sys.order())
        throw Error(ErrorKind::InvalidArgument,
                    "gain length must match the state dimension");
    const Eigen::MatrixXd A_eff =
        closed ? Eigen::MatrixXd(sys.A() - sys.B() * K) : sys.A();
    check_step_size(A_eff, dt);

    const auto n_steps = static_cast<std::size_t>(
        std::llround(ref.horizon_s / dt));
    if (n_steps < 2)
        throw Error(ErrorKind::InvalidArgument,
                    "horizon spans fewer than two steps");

    RawSim out;
    out.t.reserve(n_steps + 1);
    out.ref.reserve(n_steps + 1);
    out.y.reserve(n_steps + 1);
    out.u.reserve(n_steps + 1);

    Eigen::VectorXd x = Eigen::VectorXd::Zero(sys.order());
    for (std::size_t k = 0; k <= n_steps; ++k) {
        const double t = static_cast<double>(k) * dt;
        const double r = ref.value(t);
        auto command = [&](const Eigen::VectorXd& xs) {
            const double u_raw =
                closed ? reference_gain * r - (K * xs)(0, 0) : r;
            return clamp_command(u_raw, saturation);
        };
        const double u_now = command(x);
        out.t.push_back(t);
        out.ref.push_back(r);
        out.y.push_back((sys.C() * x)(0, 0) + sys.D()(0, 0) * u_now);
        out.u.push_back(u_now);
        if (k < n_steps) x = rk4_step(sys.A(), sys.B(), x, dt, command);
    }
    return out;
}

inline SimMetrics compute_metrics(const std::vector<double>& t,
                                  const std::vector<double>& y,
                                  double reference_final) {
    SimMetrics m;
    const std::size_t n = y.size();
    const std::size_t tail = std::max<std::size_t>(1, n / 10);
    double plateau = 0.0;
    for (std::size_t i = n - tail; i < n; ++i) plateau += y[i];
    plateau /= static_cast<double>(tail);

    m.steady_state_error_rad = std::abs(plateau - reference_final);
    m.settling_time_s = settling_time(t, y, plateau);

    // Overshoot is measured against the final sample, not the plateau mean:
    // on a monotone approach the mean of the tail sits below the last sample
    // and would register a spurious fraction of a percent.
    const double final_value = y.back();
    double y_extreme = 0.0;
    for (double v : y)
        if (std::abs(v) > std::abs(y_extreme)) y_extreme = v;
    if (std::abs(final_value) > 1e-12 * std::abs(y_extreme)) {
        const double over = (y_extreme - final_value) / final_value;
        m.overshoot_percent = std::max(0.0, 100.0 * over);
    }
    return m;
}

inline SimResult finish(RawSim raw, const std::optional<double>& saturation,
                        double reference_final) {
    SimResult res;
    res.metrics = compute_metrics(raw.t, raw.y, reference_final);
    if (saturation)
        for (double& u : raw.u) u /= *saturation;
    res.timestamps_s = std::move(raw.t);
    res.reference = std::move(raw.ref);
    res.output_rad = std::move(raw.y);
    res.input_command = std::move(raw.u);
    return res;
}

}  // namespace detail

// Open-loop simulation: the reference signal is the plant input.
inline SimResult simulate(const StateSpace& sys, const ReferenceSignal& ref,
                          double dt,
                          std::optional<double> saturation = std::nullopt) {
    detail::RawSim raw = detail::integrate(sys, Eigen::RowVectorXd(), 1.0,
                                           ref, dt, saturation);
    return detail::finish(std::move(raw), saturation,
                          ref.value(ref.horizon_s));
}

// Closed-loop simulation of a plant under static state feedback with
// reference feedforward: u = sat(reference_gain * r - K x).
inline SimResult simulate_closed_loop(
    const StateSpace& plant, const Eigen::RowVectorXd& K,
    double reference_gain, const ReferenceSignal& ref, double dt,
    std::optional<double> saturation = std::nullopt) {
    if (K.size() == 0)
        throw Error(ErrorKind::InvalidArgument, "feedback gain is empty");
    detail::RawSim raw =
        detail::integrate(plant, K, reference_gain, ref, dt, saturation);
    return detail::finish(std::move(raw), saturation,
                          ref.value(ref.horizon_s));
}

// Square-wave tracking run with per-edge midpoint-crossing delays and the
// tail error of every plateau (mean of its last quarter vs its level).
inline SimResult square_wave_response(
    const StateSpace& plant, const Eigen::RowVectorXd& K,
    double reference_gain, double amplitude_rad, double period_s,
    double horizon_s, double dt,
    std::optional<double> saturation = std::nullopt) {
    ReferenceSignal ref{ReferenceKind::Square, amplitude_rad, period_s,
                        horizon_s};
    SimResult res =
        simulate_closed_loop(plant, K, reference_gain, ref, dt, saturation);

    const auto& t = res.timestamps_s;
    const auto& y = res.output_rad;
    // An edge exactly on the inclusive horizon endpoint would open a
    // one-sample plateau, so the last index is not allowed to start one.
    std::vector<std::size_t> edges;  // first index of each plateau
    edges.push_back(0);
    for (std::size_t i = 1; i + 1 < t.size(); ++i)
        if (res.reference[i] != res.reference[i - 1]) edges.push_back(i);

    for (std::size_t e = 0; e < edges.size(); ++e) {
        const std::size_t lo = edges[e];
        const std::size_t hi =
            (e + 1 < edges.size()) ? edges[e + 1] : t.size();
        const double level = res.reference[lo];
        const double prev = lo == 0 ? 0.0 : res.reference[lo - 1];
        const double mid = 0.5 * (level + prev);
        const double dir = level - prev;
        for (std::size_t i = lo; i < hi; ++i) {
            if ((y[i] - mid) * dir >= 0.0 && dir != 0.0) {
                res.edge_delays_s.push_back(t[i] - t[lo]);
                break;
            }
        }
        const std::size_t len = hi - lo;
        const std::size_t tail = std::max<std::size_t>(1, len / 4);
        double mean = 0.0;
        for (std::size_t i = hi - tail; i < hi; ++i) mean += y[i];
        mean /= static_cast<double>(tail);
        res.plateau_errors_rad.push_back(std::abs(mean - level));
    }
    return res;
}

// Two-finger synchronization study. Both fingers share the nominal design
// except for damping, offset by a seeded draw of up to +/-zeta_spread. The
// open-loop case replays the nominal closed-loop command on both fingers;
// the closed-loop case runs an independent feedback loop on each. Mismatch
// is the largest instantaneous angle difference.
inline GripperStudyResult gripper_sync_study(
    const ActuatorDesign& design, const PumpConfig& pump,
    double pressure_gain, const LqrWeights& weights, double zeta_spread,
    const ReferenceSignal& ref, double dt, std::uint64_t seed,
    std::optional<double> saturation = std::nullopt) {
    design.validate();
    if (std::abs(zeta_spread) > design.damping_spread)
        throw Error(ErrorKind::InvalidArgument,
                    "zeta_spread exceeds the design's damping spread");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> frac(0.25, 1.0);
    const double delta = frac(rng) * std::abs(zeta_spread);

    auto canonical_with_zeta = [&](double zeta) {
        ActuatorDesign d = design;
        d.damping_ratio = zeta;
        return to_controllable_canonical(
            full_system_tf(d, pump, pressure_gain));
    };

    const StateSpace nominal = canonical_with_zeta(design.damping_ratio);
    const LqrSolution sol = lqr_gain(nominal, weights);
    const StateSpace lo = canonical_with_zeta(design.damping_ratio - delta);
    const StateSpace hi = canonical_with_zeta(design.damping_ratio + delta);

    // nominal command profile, replayed blind on both fingers
    detail::RawSim nominal_run = detail::integrate(
        nominal, sol.K_gain, sol.reference_gain, ref, dt, saturation);

    auto replay = [&](const StateSpace& sys) {
        std::vector<double> y(nominal_run.u.size());
        Eigen::VectorXd x = Eigen::VectorXd::Zero(sys.order());
        for (std::size_t k = 0; k < nominal_run.u.size(); ++k) {
            const double u = nominal_run.u[k];
            y[k] = (sys.C() * x)(0, 0);
            auto constant = [&](const Eigen::VectorXd&) { return u; };
            x = detail::rk4_step(sys.A(), sys.B(), x, dt, constant);
        }
        return y;
    };
    const std::vector<double> y_lo_open = replay(lo);
    const std::vector<double> y_hi_open = replay(hi);

    detail::RawSim run_lo = detail::integrate(lo, sol.K_gain,
                                              sol.reference_gain, ref, dt,
                                              saturation);
    detail::RawSim run_hi = detail::integrate(hi, sol.K_gain,
                                              sol.reference_gain, ref, dt,
                                              saturation);

    GripperStudyResult out;
    for (std::size_t k = 0; k < y_lo_open.size(); ++k)
        out.open_loop_mismatch_rad =
            std::max(out.open_loop_mismatch_rad,
                     std::abs(y_lo_open[k] - y_hi_open[k]));
    for (std::size_t k = 0; k < run_lo.y.size(); ++k)
        out.closed_loop_mismatch_rad =
            std::max(out.closed_loop_mismatch_rad,
                     std::abs(run_lo.y[k] - run_hi.y[k]));
    return out;
}

}  // namespace softpneu
