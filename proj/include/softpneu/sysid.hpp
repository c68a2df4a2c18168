#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "softpneu/error.hpp"
#include "softpneu/lti.hpp"

namespace softpneu {

// One recorded experiment on a uniform time grid. Input units are whatever
// drove the rig (pressure or normalized motor command); output is radians.
struct ExperimentTrace {
    std::vector<double> timestamps_s;
    std::vector<double> input;
    std::vector<double> output_rad;

    void validate() const {
        const std::size_t n = timestamps_s.size();
        if (n < 16 || input.size() != n || output_rad.size() != n)
            throw Error(ErrorKind::InvalidTrace,
                        "trace needs >= 16 samples with equal-length columns");
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(timestamps_s[i]) || !std::isfinite(input[i]) ||
                !std::isfinite(output_rad[i]))
                throw Error(ErrorKind::InvalidTrace,
                            "non-finite sample at row " + std::to_string(i));
        }
        const double dt0 = timestamps_s[1] - timestamps_s[0];
        if (dt0 <= 0.0)
            throw Error(ErrorKind::InvalidTrace,
                        "timestamps must be strictly increasing");
        for (std::size_t i = 1; i < n; ++i) {
            const double dt = timestamps_s[i] - timestamps_s[i - 1];
            if (dt <= 0.0)
                throw Error(ErrorKind::InvalidTrace,
                            "timestamps must be strictly increasing");
            if (std::abs(dt - dt0) > 1e-9 * dt0)
                throw Error(ErrorKind::InvalidTrace,
                            "non-uniform sampling at row " + std::to_string(i));
        }
    }

    double sample_period() const { return timestamps_s[1] - timestamps_s[0]; }
};

struct DampingEstimate {
    double zeta_nominal = 0.0;
    double zeta_delta = 0.0;
    std::vector<double> per_trace_zetas;
    double residual_rms_rad = 0.0;
    // set when any per-trace fit lands on a search bound, which means the
    // underdamped model did not explain that trace
    bool boundary_warning = false;
};

struct IdentifiedModel {
    StateSpace model;  // continuous-time, for reporting
    int order;
    double fit_percent;
    std::vector<double> singular_values;
};

namespace detail {

inline double golden_minimize(const std::function<double(double)>& f,
                              double lo, double hi, double tol) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

// unit step response of 1/(s^2/wn^2 + 2 zeta s/wn + 1) for 0 < zeta < 1
inline double underdamped_step(double t, double zeta, double omega_n) {
    const double wd = omega_n * std::sqrt(1.0 - zeta * zeta);
    const double decay = std::exp(-zeta * omega_n * t);
    return 1.0 - decay * (std::cos(wd * t) +
                          zeta / std::sqrt(1.0 - zeta * zeta) * std::sin(wd * t));
}

struct ShapeFit {
    double scale = 0.0;
    double sse = 0.0;
};

inline ShapeFit fit_output_scale(const std::vector<double>& t,
                                 const std::vector<double>& y, double zeta,
                                 double omega_n) {
    double ss = 0.0, sy = 0.0;
    std::vector<double> shape(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        shape[i] = underdamped_step(t[i] - t[0], zeta, omega_n);
        ss += shape[i] * shape[i];
        sy += shape[i] * y[i];
    }
    ShapeFit r;
    r.scale = ss > 0.0 ? sy / ss : 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double e = y[i] - r.scale * shape[i];
        r.sse += e * e;
    }
    return r;
}

}  // namespace detail

// Normalized-RMSE fit in percent: 100 for a perfect model, 0 for a model that
// only reproduces the mean.
inline double fit_percent(const std::vector<double>& y_measured,
                          const std::vector<double>& y_model) {
    if (y_measured.size() != y_model.size() || y_measured.size() < 2)
        throw Error(ErrorKind::InvalidArgument,
                    "fit_percent needs equal-length series of at least 2 samples");
    double mean = 0.0;
    for (double v : y_measured) mean += v;
    mean /= static_cast<double>(y_measured.size());
    double num = 0.0, den = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < y_measured.size(); ++i) {
        const double e = y_measured[i] - y_model[i];
        const double d = y_measured[i] - mean;
        num += e * e;
        den += d * d;
        scale = std::max(scale, std::abs(y_measured[i]));
    }
    if (std::sqrt(den) <= 1e-14 * (scale + 1.0))
        throw Error(ErrorKind::UndefinedFit,
                    "fit is undefined for a constant measured series");
    return 100.0 * (1.0 - std::sqrt(num) / std::sqrt(den));
}

// Fits the damping ratio of a second-order step response with the natural
// frequency held fixed and the output scale co-fitted per trace. The search
// interval is (0.01, 0.99); a fit that lands on either end sets
// boundary_warning instead of failing.
inline DampingEstimate fit_damping_ratio(
    const std::vector<ExperimentTrace>& traces, double omega_n,
    double step_amplitude) {
    if (traces.empty())
        throw Error(ErrorKind::InvalidArgument, "no traces to fit");
    if (!(omega_n > 0.0) || !std::isfinite(omega_n))
        throw Error(ErrorKind::InvalidArgument,
                    "natural frequency must be positive");
    if (!(std::abs(step_amplitude) > 0.0) || !std::isfinite(step_amplitude))
        throw Error(ErrorKind::InvalidArgument,
                    "step amplitude must be nonzero");

    constexpr double kZetaLo = 0.01;
    constexpr double kZetaHi = 0.99;
    constexpr double kTol = 1e-7;

    DampingEstimate est;
    double total_sq = 0.0;
    std::size_t total_n = 0;
    for (const auto& tr : traces) {
        tr.validate();
        // a step experiment holds the input at the amplitude from the first
        // sample on (the very first sample may still read zero)
        for (std::size_t i = 1; i < tr.input.size(); ++i) {
            if (std::abs(tr.input[i] - step_amplitude) >
                1e-6 * std::abs(step_amplitude))
                throw Error(ErrorKind::InvalidExperiment,
                            "input is not a constant step at row " +
                                std::to_string(i));
        }
        if (std::abs(tr.input[0] - step_amplitude) >
                1e-6 * std::abs(step_amplitude) &&
            std::abs(tr.input[0]) > 1e-6 * std::abs(step_amplitude))
            throw Error(ErrorKind::InvalidExperiment,
                        "input before the step must be zero or the amplitude");

        auto sse_of = [&](double zeta) {
            return detail::fit_output_scale(tr.timestamps_s, tr.output_rad,
                                            zeta, omega_n)
                .sse;
        };
        const double zeta =
            detail::golden_minimize(sse_of, kZetaLo, kZetaHi, kTol);
        if (zeta - kZetaLo < 2.0 * kTol || kZetaHi - zeta < 2.0 * kTol)
            est.boundary_warning = true;
        est.per_trace_zetas.push_back(zeta);
        total_sq += sse_of(zeta);
        total_n += tr.output_rad.size();
    }

    for (double z : est.per_trace_zetas) est.zeta_nominal += z;
    est.zeta_nominal /= static_cast<double>(est.per_trace_zetas.size());
    for (double z : est.per_trace_zetas)
        est.zeta_delta = std::max(est.zeta_delta,
                                  std::abs(z - est.zeta_nominal));
    est.residual_rms_rad =
        std::sqrt(total_sq / static_cast<double>(total_n));
    return est;
}

namespace detail {

inline Eigen::MatrixXd block_hankel(const std::vector<double>& v,
                                    std::size_t first_row, std::size_t rows,
                                    std::size_t cols) {
    Eigen::MatrixXd H(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            H(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                v[first_row + r + c];
    return H;
}

// inverse of the trapezoidal (Tustin) discretization at sample period ts
inline StateSpace bilinear_to_continuous(const Eigen::MatrixXd& Ad,
                                         const Eigen::MatrixXd& Bd,
                                         const Eigen::MatrixXd& Cd,
                                         const Eigen::MatrixXd& Dd,
                                         double ts) {
    const Eigen::Index n = Ad.rows();
    const Eigen::MatrixXd ApI =
        Ad + Eigen::MatrixXd::Identity(n, n);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(ApI);
    if (!lu.isInvertible())
        throw Error(ErrorKind::NumericFailure,
                    "discrete eigenvalue at -1 blocks the bilinear map");
    const Eigen::MatrixXd inv_half =
        2.0 * lu.inverse();  // equals inv(I - (ts/2) A_cont)
    const Eigen::MatrixXd A =
        (inv_half * (Ad - Eigen::MatrixXd::Identity(n, n))) / ts;
    const Eigen::MatrixXd B = inv_half * Bd / ts;
    const Eigen::MatrixXd C = Cd * inv_half;
    const Eigen::MatrixXd D = Dd - 0.5 * C * Bd;
    return StateSpace(A, B, C, D);
}

}  // namespace detail

constexpr int kAutoOrder = 0;

// Deterministic subspace identification (MOESP family with past-input and
// past-output instruments). Returns a continuous-time model converted through
// the inverse bilinear map, with the fit computed against the trace by
// simulating the identified discrete model. Pass kAutoOrder to pick the order
// at the largest log-gap of the singular-value curve.
inline IdentifiedModel identify_subspace(const ExperimentTrace& trace,
                                         int order, int hankel_rows) {
    trace.validate();
    const std::size_t n_samples = trace.timestamps_s.size();
    if (hankel_rows < 2)
        throw Error(ErrorKind::InvalidArgument, "hankel_rows must be >= 2");
    const std::size_t i = static_cast<std::size_t>(hankel_rows);
    if (n_samples < 4 * i)
        throw Error(ErrorKind::InvalidArgument,
                    "trace shorter than 4x hankel_rows");
    if (order != kAutoOrder && (order < 1 || order > hankel_rows))
        throw Error(ErrorKind::InvalidArgument,
                    "order must lie in [1, hankel_rows]");

    const std::size_t j = n_samples - 2 * i + 1;

    // data equation blocks: past inputs/outputs as instruments, future
    // outputs carry the observability range
    Eigen::MatrixXd H(static_cast<Eigen::Index>(4 * i),
                      static_cast<Eigen::Index>(j));
    H.topRows(static_cast<Eigen::Index>(i)) =
        detail::block_hankel(trace.input, i, i, j);  // U_f
    H.middleRows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) =
        detail::block_hankel(trace.input, 0, i, j);  // U_p
    H.middleRows(static_cast<Eigen::Index>(2 * i),
                 static_cast<Eigen::Index>(i)) =
        detail::block_hankel(trace.output_rad, 0, i, j);  // Y_p
    H.bottomRows(static_cast<Eigen::Index>(i)) =
        detail::block_hankel(trace.output_rad, i, i, j);  // Y_f

    // LQ factorization via QR of the transpose
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(H.transpose());
    const Eigen::Index lcols =
        std::min<Eigen::Index>(static_cast<Eigen::Index>(j),
                               static_cast<Eigen::Index>(4 * i));
    Eigen::MatrixXd R = qr.matrixQR()
                            .topRows(lcols)
                            .triangularView<Eigen::Upper>();
    Eigen::MatrixXd L = R.transpose();  // 4i x lcols, lower trapezoidal

    const Eigen::Index wp_lo = static_cast<Eigen::Index>(i);
    const Eigen::Index wp_cols =
        std::min<Eigen::Index>(static_cast<Eigen::Index>(2 * i),
                               lcols - wp_lo);
    if (wp_cols < 1)
        throw Error(ErrorKind::OrderTooHigh,
                    "not enough data columns for the requested structure");
    const Eigen::MatrixXd L32 =
        L.block(static_cast<Eigen::Index>(3 * i), wp_lo,
                static_cast<Eigen::Index>(i), wp_cols);

    Eigen::BDCSVD<Eigen::MatrixXd> svd(L32,
                                       Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd sv = svd.singularValues();

    std::vector<double> svals(sv.data(), sv.data() + sv.size());
    if (sv.size() == 0 || sv(0) <= 0.0)
        throw Error(ErrorKind::OrderTooHigh, "projection has no signal content");

    int n_order = order;
    if (order == kAutoOrder) {
        // knee of the singular-value curve: largest log-gap, capped so the
        // shift-invariance solve stays overdetermined
        const int max_n = std::min<int>(hankel_rows - 1,
                                        static_cast<int>(sv.size()) - 1);
        double best_gap = -1.0;
        n_order = 1;
        for (int k = 0; k < max_n; ++k) {
            if (sv(k + 1) <= 0.0) {
                n_order = k + 1;
                break;
            }
            const double gap = std::log10(sv(k)) - std::log10(sv(k + 1));
            if (gap > best_gap) {
                best_gap = gap;
                n_order = k + 1;
            }
        }
    }
    if (n_order > sv.size() || sv(n_order - 1) <= 1e-8 * sv(0))
        throw Error(ErrorKind::OrderTooHigh,
                    "projection rank below the requested order");

    // extended observability range and shift-invariance estimate of A
    const Eigen::MatrixXd gamma =
        svd.matrixU().leftCols(n_order) *
        sv.head(n_order).cwiseSqrt().asDiagonal();
    const Eigen::MatrixXd Cd = gamma.topRows(1);
    const Eigen::MatrixXd Ad =
        gamma.topRows(static_cast<Eigen::Index>(i) - 1)
            .colPivHouseholderQr()
            .solve(gamma.bottomRows(static_cast<Eigen::Index>(i) - 1));

    // x0, B, D enter the output linearly; regress on simulated basis columns
    const Eigen::Index N = static_cast<Eigen::Index>(n_samples);
    const Eigen::Index nb = static_cast<Eigen::Index>(n_order);
    Eigen::MatrixXd phi(N, 2 * nb + 1);
    for (Eigen::Index m = 0; m < nb; ++m) {
        Eigen::VectorXd x = Eigen::VectorXd::Unit(nb, m);
        for (Eigen::Index k = 0; k < N; ++k) {
            phi(k, m) = (Cd * x)(0, 0);
            x = Ad * x;
        }
    }
    for (Eigen::Index m = 0; m < nb; ++m) {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(nb);
        for (Eigen::Index k = 0; k < N; ++k) {
            phi(k, nb + m) = (Cd * x)(0, 0);
            x = Ad * x + Eigen::VectorXd::Unit(nb, m) *
                             trace.input[static_cast<std::size_t>(k)];
        }
    }
    for (Eigen::Index k = 0; k < N; ++k)
        phi(k, 2 * nb) = trace.input[static_cast<std::size_t>(k)];

    Eigen::VectorXd y(N);
    for (Eigen::Index k = 0; k < N; ++k)
        y(k) = trace.output_rad[static_cast<std::size_t>(k)];
    const Eigen::VectorXd theta = phi.colPivHouseholderQr().solve(y);
    const Eigen::VectorXd x0 = theta.head(nb);
    const Eigen::MatrixXd Bd = theta.segment(nb, nb);
    const Eigen::MatrixXd Dd = theta.tail(1);

    // fit against the trace with the identified discrete model
    std::vector<double> y_hat(n_samples);
    {
        Eigen::VectorXd x = x0;
        for (std::size_t k = 0; k < n_samples; ++k) {
            y_hat[k] = (Cd * x)(0, 0) + Dd(0, 0) * trace.input[k];
            x = Ad * x + Bd * trace.input[k];
        }
    }

    return IdentifiedModel{
        detail::bilinear_to_continuous(Ad, Bd, Cd, Dd, trace.sample_period()),
        n_order, fit_percent(trace.output_rad, y_hat), std::move(svals)};
}

}  // namespace softpneu
