#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "softpneu/error.hpp"
#include "softpneu/lti.hpp"

namespace softpneu {

// Multiplicative-uncertainty description of a plant family: the nominal
// model, the fitted overbounding weight, and the raw per-member relative
// error curves the weight was fitted to.
struct UncertainPlant {
    TransferFunction nominal;
    TransferFunction weight;
    std::vector<double> sample_omegas;
    std::vector<std::vector<double>> relative_errors;
};

struct RobustStabilityReport {
    double margin = 0.0;
    bool pass = false;
};

// Two decades on each side of the plant's natural frequency.
inline std::vector<double> default_envelope_grid(double omega_n,
                                                 int points = 200) {
    return log_grid(omega_n / 100.0, omega_n * 100.0, points);
}

// Per-member relative error curves |T_k(jw)/T(jw) - 1| on the grid.
inline std::vector<std::vector<double>> relative_errors_per_member(
    const TransferFunction& nominal,
    const std::vector<TransferFunction>& family,
    const std::vector<double>& omegas) {
    if (family.empty())
        throw Error(ErrorKind::InvalidArgument, "plant family is empty");
    detail::check_grid(omegas);
    std::vector<std::vector<double>> errors(family.size());
    for (std::size_t k = 0; k < family.size(); ++k)
        errors[k].resize(omegas.size());
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        const std::complex<double> t0 = complex_response(nominal, omegas[i]);
        if (std::abs(t0) < 1e-12)
            throw Error(ErrorKind::DegenerateDivision,
                        "nominal response vanishes at omega = " +
                            std::to_string(omegas[i]));
        for (std::size_t k = 0; k < family.size(); ++k) {
            const std::complex<double> tk =
                complex_response(family[k], omegas[i]);
            errors[k][i] = std::abs(tk / t0 - 1.0);
        }
    }
    return errors;
}

// Pointwise maximum of the per-member curves.
inline std::vector<double> relative_error_envelope(
    const TransferFunction& nominal,
    const std::vector<TransferFunction>& family,
    const std::vector<double>& omegas) {
    const auto errors = relative_errors_per_member(nominal, family, omegas);
    std::vector<double> env(omegas.size(), 0.0);
    for (const auto& row : errors)
        for (std::size_t i = 0; i < omegas.size(); ++i)
            env[i] = std::max(env[i], row[i]);
    return env;
}

namespace detail {

struct WeightCandidate {
    TransferFunction tf = TransferFunction(0.0);
    double sup_ratio = std::numeric_limits<double>::infinity();
};

// Lifts a shaped magnitude curve onto the envelope: scale so the curve
// touches the envelope from above, then report the worst overshoot ratio.
inline WeightCandidate lift_onto_envelope(std::vector<double> num,
                                          std::vector<double> den,
                                          const std::vector<double>& envelope,
                                          const std::vector<double>& omegas) {
    TransferFunction shape(std::move(num), std::move(den));
    double gain = 0.0;
    std::vector<double> mag(omegas.size());
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        mag[i] = std::abs(complex_response(shape, omegas[i]));
        if (mag[i] <= 0.0) return {};  // shape vanishes on the grid; reject
        gain = std::max(gain, envelope[i] / mag[i]);
    }
    if (gain == 0.0) return {};
    gain *= 1.0 + 1e-12;  // keep the touching point strictly above

    WeightCandidate cand{gain * shape, 0.0};
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        if (envelope[i] <= 0.0) continue;
        cand.sup_ratio = std::max(cand.sup_ratio, gain * mag[i] / envelope[i]);
    }
    return cand;
}

}  // namespace detail

// Fits a stable minimum-phase weight of the requested order whose magnitude
// overbounds the envelope at every grid point. Corner frequencies are chosen
// from a log-spaced candidate set by minimizing the worst overshoot of the
// bound; order 2 composes a second corner pair on the residual of the first.
inline TransferFunction fit_weight(const std::vector<double>& envelope,
                                   const std::vector<double>& omegas,
                                   int order) {
    if (order < 0 || order > 2)
        throw Error(ErrorKind::InvalidArgument, "weight order must be 0, 1 or 2");
    if (envelope.size() != omegas.size() || envelope.empty())
        throw Error(ErrorKind::InvalidArgument,
                    "envelope and grid sizes differ or are empty");
    detail::check_grid(omegas);
    double peak = 0.0;
    for (double e : envelope) {
        if (!(e >= 0.0) || !std::isfinite(e))
            throw Error(ErrorKind::InvalidArgument,
                        "envelope values must be non-negative and finite");
        peak = std::max(peak, e);
    }
    if (peak == 0.0) return TransferFunction(0.0);
    if (order == 0) return TransferFunction(peak * (1.0 + 1e-12));

    const std::vector<double> corners =
        log_grid(omegas.front(), omegas.back(), 30);

    auto best_first_order = [&](const std::vector<double>& env) {
        detail::WeightCandidate best;
        for (double a : corners) {
            for (double b : corners) {
                if (a == b) continue;
                auto cand = detail::lift_onto_envelope({1.0, a}, {1.0, b},
                                                       env, omegas);
                if (cand.sup_ratio < best.sup_ratio) best = cand;
            }
        }
        // a flat envelope can beat every corner pair; keep the constant too
        auto flat = detail::lift_onto_envelope({1.0}, {1.0}, env, omegas);
        if (flat.sup_ratio < best.sup_ratio) best = flat;
        if (!std::isfinite(best.sup_ratio))
            throw Error(ErrorKind::NumericFailure,
                        "no candidate weight overbounds the envelope");
        return best;
    };

    detail::WeightCandidate first = best_first_order(envelope);
    if (order == 1) return first.tf;

    // second stage: fit the leftover ratio, then re-lift the product so the
    // overbound holds exactly on the grid
    std::vector<double> residual(omegas.size());
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        const double w1 = std::abs(complex_response(first.tf, omegas[i]));
        residual[i] = w1 > 0.0 ? envelope[i] / w1 : 0.0;
    }
    detail::WeightCandidate second = best_first_order(residual);
    const TransferFunction product = first.tf * second.tf;
    auto lifted = detail::lift_onto_envelope(product.num(), product.den(),
                                             envelope, omegas);
    if (!std::isfinite(lifted.sup_ratio))
        throw Error(ErrorKind::NumericFailure,
                    "second-order weight fit degenerated");
    // keep whichever of the two stages bounds more tightly
    return lifted.sup_ratio < first.sup_ratio ? lifted.tf : first.tf;
}

// Small-gain test: margin = ||W_T * TK/(1+TK)||_inf, pass iff margin < 1.
// The nominal closed loop must be stable for the question to make sense.
inline RobustStabilityReport robust_stability_check(
    const TransferFunction& nominal, const TransferFunction& weight,
    const TransferFunction& controller) {
    const TransferFunction loop = nominal * controller;
    const TransferFunction comp_sens = feedback_unity(loop);
    if (!is_stable(comp_sens))
        throw Error(ErrorKind::NominalInstability,
                    "nominal closed loop is unstable");
    RobustStabilityReport rep;
    rep.margin = hinf_norm(weight * comp_sens);
    rep.pass = rep.margin < 1.0;
    return rep;
}

// Draws random first-order all-pass perturbations with norm at most one,
// forms T(1 + Delta*W_T), and checks every sampled closed loop is stable.
// Callers must have passed robust_stability_check first.
inline bool sample_family_verify(const TransferFunction& nominal,
                                 const TransferFunction& weight,
                                 const TransferFunction& controller,
                                 int n_samples, std::uint64_t seed) {
    if (n_samples < 1)
        throw Error(ErrorKind::InvalidArgument, "need at least one sample");
    const RobustStabilityReport rep =
        robust_stability_check(nominal, weight, controller);
    if (!rep.pass)
        throw Error(ErrorKind::InvalidArgument,
                    "small-gain margin must pass before family sampling");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> log_pole(std::log(1e-2),
                                                    std::log(1e2));
    std::uniform_real_distribution<double> gain(0.1, 1.0);
    std::uniform_int_distribution<int> coin(0, 1);

    for (int k = 0; k < n_samples; ++k) {
        const double p = std::exp(log_pole(rng));
        const double g = gain(rng) * (coin(rng) == 0 ? 1.0 : -1.0);
        // g*(s - p)/(s + p): flat magnitude |g| <= 1 at every frequency
        const TransferFunction delta({g, -g * p}, {1.0, p});
        const TransferFunction perturbed =
            nominal * (TransferFunction(1.0) + delta * weight);
        if (!is_stable(feedback_unity(perturbed * controller))) return false;
    }
    return true;
}

}  // namespace softpneu
