#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "softpneu/error.hpp"
#include "softpneu/polynomial.hpp"

namespace softpneu {

// Rational transfer function in s. Coefficients are descending-power; the
// denominator is normalized monic on construction, the numerator keeps its
// scale but loses numerically dead leading terms.
class TransferFunction {
 public:
    TransferFunction(std::vector<double> num, std::vector<double> den) {
        if (num.empty() || den.empty())
            throw Error(ErrorKind::InvalidModel, "empty coefficient list");
        for (double v : num)
            if (!std::isfinite(v))
                throw Error(ErrorKind::InvalidModel, "non-finite numerator coefficient");
        for (double v : den)
            if (!std::isfinite(v))
                throw Error(ErrorKind::InvalidModel, "non-finite denominator coefficient");
        den = poly::trim(den, 0.0);
        double dmax = 0.0;
        for (double v : den) dmax = std::max(dmax, std::abs(v));
        if (dmax == 0.0 || std::abs(den[0]) < 1e-12 * dmax)
            throw Error(ErrorKind::InvalidModel,
                        "denominator leading coefficient is numerically zero");
        const double lead = den[0];
        for (double& v : den) v /= lead;
        for (double& v : num) v /= lead;
        num_ = poly::trim(num);
        den_ = den;
    }

    // Constant gain.
    explicit TransferFunction(double gain)
        : TransferFunction({gain}, {1.0}) {}

    const std::vector<double>& num() const { return num_; }
    const std::vector<double>& den() const { return den_; }

    int num_degree() const { return static_cast<int>(num_.size()) - 1; }
    int den_degree() const { return static_cast<int>(den_.size()) - 1; }

    bool is_zero() const { return poly::is_zero(num_); }
    bool is_proper() const { return num_degree() <= den_degree(); }
    bool is_strictly_proper() const { return num_degree() < den_degree(); }

 private:
    std::vector<double> num_;
    std::vector<double> den_;
};

// Continuous-time state-space model x' = Ax + Bu, y = Cx + Du.
class StateSpace {
 public:
    StateSpace(Eigen::MatrixXd A, Eigen::MatrixXd B, Eigen::MatrixXd C,
               Eigen::MatrixXd D)
        : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)), D_(std::move(D)) {
        if (A_.rows() != A_.cols())
            throw Error(ErrorKind::InvalidModel, "A must be square");
        if (B_.rows() != A_.rows())
            throw Error(ErrorKind::InvalidModel, "B row count must match A");
        if (C_.cols() != A_.cols())
            throw Error(ErrorKind::InvalidModel, "C column count must match A");
        if (D_.rows() != C_.rows() || D_.cols() != B_.cols())
            throw Error(ErrorKind::InvalidModel, "D dimensions must match B and C");
        if (!A_.allFinite() || !B_.allFinite() || !C_.allFinite() || !D_.allFinite())
            throw Error(ErrorKind::InvalidModel, "non-finite state-space entry");
    }

    StateSpace(Eigen::MatrixXd A, Eigen::MatrixXd B, Eigen::MatrixXd C)
        : StateSpace(A, B, C,
                     Eigen::MatrixXd::Zero(C.rows(), B.cols())) {}

    const Eigen::MatrixXd& A() const { return A_; }
    const Eigen::MatrixXd& B() const { return B_; }
    const Eigen::MatrixXd& C() const { return C_; }
    const Eigen::MatrixXd& D() const { return D_; }

    Eigen::Index order() const { return A_.rows(); }
    bool is_siso() const { return B_.cols() == 1 && C_.rows() == 1; }

 private:
    Eigen::MatrixXd A_, B_, C_, D_;
};

struct FrequencyResponsePoint {
    double omega_rad_s = 0.0;
    double magnitude = 0.0;
    double phase_rad = 0.0;
};

// ---- pole analysis -------------------------------------------------------

inline std::vector<std::complex<double>> poles(const TransferFunction& tf) {
    if (tf.den_degree() == 0) return {};
    return poly::roots(tf.den());
}

inline bool is_hurwitz(const Eigen::MatrixXd& A) {
    if (A.rows() != A.cols())
        throw Error(ErrorKind::InvalidArgument, "is_hurwitz needs a square matrix");
    if (A.rows() == 0) return true;
    Eigen::EigenSolver<Eigen::MatrixXd> es(A, /*computeEigenvectors=*/false);
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        if (es.eigenvalues()(i).real() >= 0.0) return false;
    return true;
}

inline bool is_stable(const TransferFunction& tf) {
    for (const auto& p : poles(tf))
        if (p.real() >= 0.0) return false;
    return true;
}

// ---- realization ---------------------------------------------------------

// Controllable canonical form of a strictly proper transfer function: the
// companion A with coefficients in the last row, B = e_n, C from the
// numerator, D = 0.
inline StateSpace to_controllable_canonical(const TransferFunction& tf) {
    const int n = tf.den_degree();
    if (n < 1)
        throw Error(ErrorKind::UnsupportedModel,
                    "canonical form needs denominator degree >= 1");
    if (!tf.is_strictly_proper())
        throw Error(ErrorKind::UnsupportedModel,
                    "canonical form needs a strictly proper transfer function");
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) A(i, i + 1) = 1.0;
    for (int i = 0; i < n; ++i) A(n - 1, i) = -tf.den()[static_cast<std::size_t>(n - i)];
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, 1);
    B(n - 1, 0) = 1.0;
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(1, n);
    const auto& b = tf.num();
    const int m = static_cast<int>(b.size()) - 1;
    for (int i = 0; i <= m; ++i) C(0, m - i) = b[static_cast<std::size_t>(i)];
    return StateSpace(A, B, C);
}

// Transfer function of a SISO realization through the Faddeev-LeVerrier
// resolvent expansion: the characteristic polynomial and C adj(sI - A) B
// come out of one recursion, with no eigenvalue rounding involved.
inline TransferFunction to_transfer_function(const StateSpace& sys) {
    if (!sys.is_siso())
        throw Error(ErrorKind::UnsupportedModel,
                    "transfer function conversion needs a SISO realization");
    const Eigen::Index n = sys.order();
    std::vector<double> den(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<double> cnb(static_cast<std::size_t>(n), 0.0);
    den[0] = 1.0;
    Eigen::MatrixXd N = Eigen::MatrixXd::Identity(n, n);
    for (Eigen::Index k = 1; k <= n; ++k) {
        cnb[static_cast<std::size_t>(k - 1)] =
            (sys.C() * N * sys.B())(0, 0);
        const Eigen::MatrixXd AN = sys.A() * N;
        den[static_cast<std::size_t>(k)] =
            -AN.trace() / static_cast<double>(k);
        N = AN + den[static_cast<std::size_t>(k)] *
                     Eigen::MatrixXd::Identity(n, n);
    }
    std::vector<double> num = poly::add(cnb, poly::scale(den, sys.D()(0, 0)));
    return TransferFunction(std::move(num), std::move(den));
}

// ---- frequency response --------------------------------------------------

inline std::complex<double> complex_response(const TransferFunction& tf,
                                             double omega) {
    const std::complex<double> s(0.0, omega);
    const std::complex<double> d = poly::eval(tf.den(), s);
    if (std::abs(d) <= 1e-12 * poly::eval_scale(tf.den(), omega))
        throw Error(ErrorKind::PoleOnGrid,
                    "pole at grid frequency " + std::to_string(omega) + " rad/s");
    return poly::eval(tf.num(), s) / d;
}

inline std::complex<double> complex_response(const StateSpace& sys,
                                             double omega) {
    if (!sys.is_siso())
        throw Error(ErrorKind::UnsupportedModel,
                    "frequency response implemented for SISO models");
    const Eigen::Index n = sys.order();
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Identity(n, n) * std::complex<double>(0.0, omega)
                         - sys.A().cast<std::complex<double>>();
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(M);
    if (!lu.isInvertible())
        throw Error(ErrorKind::PoleOnGrid,
                    "pole at grid frequency " + std::to_string(omega) + " rad/s");
    Eigen::VectorXcd x = lu.solve(sys.B().cast<std::complex<double>>().col(0));
    std::complex<double> h =
        (sys.C().cast<std::complex<double>>().row(0) * x)(0) + sys.D()(0, 0);
    return h;
}

namespace detail {

inline void check_grid(const std::vector<double>& omegas) {
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        if (!(omegas[i] > 0.0))
            throw Error(ErrorKind::InvalidArgument,
                        "frequency grid must be strictly positive");
        if (i > 0 && !(omegas[i] > omegas[i - 1]))
            throw Error(ErrorKind::InvalidArgument,
                        "frequency grid must be strictly ascending");
    }
}

template <typename System>
std::vector<FrequencyResponsePoint> sampled_response(
        const System& sys, const std::vector<double>& omegas) {
    check_grid(omegas);
    std::vector<FrequencyResponsePoint> out;
    out.reserve(omegas.size());
    double prev_phase = 0.0;
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        const std::complex<double> h = complex_response(sys, omegas[i]);
        FrequencyResponsePoint pt;
        pt.omega_rad_s = omegas[i];
        pt.magnitude = std::abs(h);
        double phase = std::arg(h);
        if (i > 0) {
            // unwrap against the previous grid point
            const double twopi = 2.0 * M_PI;
            while (phase - prev_phase > M_PI) phase -= twopi;
            while (phase - prev_phase < -M_PI) phase += twopi;
        }
        pt.phase_rad = phase;
        prev_phase = phase;
        out.push_back(pt);
    }
    return out;
}

}  // namespace detail

inline std::vector<FrequencyResponsePoint> frequency_response(
        const TransferFunction& tf, const std::vector<double>& omegas) {
    return detail::sampled_response(tf, omegas);
}

inline std::vector<FrequencyResponsePoint> frequency_response(
        const StateSpace& sys, const std::vector<double>& omegas) {
    return detail::sampled_response(sys, omegas);
}

inline std::vector<double> log_grid(double lo, double hi, int points) {
    if (!(lo > 0.0) || !(hi > lo) || points < 2)
        throw Error(ErrorKind::InvalidArgument, "bad log grid parameters");
    std::vector<double> out(static_cast<std::size_t>(points));
    const double llo = std::log10(lo), lhi = std::log10(hi);
    for (int i = 0; i < points; ++i)
        out[static_cast<std::size_t>(i)] =
            std::pow(10.0, llo + (lhi - llo) * i / (points - 1));
    return out;
}

// ---- H-infinity norm -----------------------------------------------------

struct HinfOptions {
    double grid_lo = 1e-3;   // rad/s
    double grid_hi = 1e3;    // rad/s
    int grid_points = 400;
    double log_tol = 1e-6;   // golden-section width on log10(omega)
};

// Peak magnitude over frequency for a stable, proper transfer function.
// A coarse log-spaced scan brackets the peak and golden-section refinement
// pins it; the DC and high-frequency limits compete as candidates.
inline double hinf_norm(const TransferFunction& tf, const HinfOptions& opt = {}) {
    if (tf.is_zero()) return 0.0;
    if (!tf.is_proper())
        throw Error(ErrorKind::NormUnbounded,
                    "improper system has unbounded high-frequency gain");
    if (!is_stable(tf))
        throw Error(ErrorKind::NormUnbounded, "H-infinity norm of an unstable system");

    double best = std::abs(poly::eval(tf.num(), 0.0) / poly::eval(tf.den(), 0.0));
    if (tf.num_degree() == tf.den_degree())
        best = std::max(best, std::abs(tf.num()[0]));  // den is monic

    const auto grid = log_grid(opt.grid_lo, opt.grid_hi, opt.grid_points);
    std::size_t arg = 0;
    double peak = -1.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double m = std::abs(complex_response(tf, grid[i]));
        if (m > peak) { peak = m; arg = i; }
    }

    const auto mag_at = [&](double u) {
        return std::abs(complex_response(tf, std::pow(10.0, u)));
    };
    double lo = std::log10(grid[arg > 0 ? arg - 1 : 0]);
    double hi = std::log10(grid[std::min(arg + 1, grid.size() - 1)]);
    if (hi > lo) {
        const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
        double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
        double f1 = mag_at(x1), f2 = mag_at(x2);
        while (hi - lo > opt.log_tol) {
            if (f1 < f2) {
                lo = x1; x1 = x2; f1 = f2;
                x2 = lo + gr * (hi - lo); f2 = mag_at(x2);
            } else {
                hi = x2; x2 = x1; f2 = f1;
                x1 = hi - gr * (hi - lo); f1 = mag_at(x1);
            }
        }
        peak = std::max({peak, f1, f2});
    }
    return std::max(best, peak);
}

// ---- rational arithmetic -------------------------------------------------

inline TransferFunction operator*(const TransferFunction& a,
                                  const TransferFunction& b) {
    return TransferFunction(poly::multiply(a.num(), b.num()),
                            poly::multiply(a.den(), b.den()));
}

inline TransferFunction operator*(double k, const TransferFunction& a) {
    return TransferFunction(poly::scale(a.num(), k), a.den());
}

inline TransferFunction operator+(const TransferFunction& a,
                                  const TransferFunction& b) {
    return TransferFunction(
        poly::add(poly::multiply(a.num(), b.den()),
                  poly::multiply(b.num(), a.den())),
        poly::multiply(a.den(), b.den()));
}

inline TransferFunction operator-(const TransferFunction& a,
                                  const TransferFunction& b) {
    return a + (-1.0 * b);
}

// Unity-feedback closure L/(1+L) without pole-zero cancellation.
inline TransferFunction feedback_unity(const TransferFunction& loop) {
    return TransferFunction(loop.num(), poly::add(loop.den(), loop.num()));
}

}  // namespace softpneu
