#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "softpneu/error.hpp"
#include "softpneu/lti.hpp"

namespace softpneu {

// State penalty is p*diag(1, 0.1, 0) on the third-order canonical plant
// unless an explicit Q is supplied; R is a scalar input penalty.
struct LqrWeights {
    double p = 1.0;
    double r = 1.0;
    std::optional<Eigen::MatrixXd> q_override;

    Eigen::MatrixXd q_matrix(Eigen::Index n) const {
        if (q_override) {
            if (q_override->rows() != n || q_override->cols() != n)
                throw Error(ErrorKind::InvalidArgument,
                            "Q override dimension does not match the plant");
            return *q_override;
        }
        if (n != 3)
            throw Error(ErrorKind::InvalidArgument,
                        "default state penalty is defined for third-order "
                        "plants only; supply Q explicitly");
        Eigen::MatrixXd q = Eigen::MatrixXd::Zero(3, 3);
        q(0, 0) = p;
        q(1, 1) = 0.1 * p;
        return q;
    }
};

namespace detail {

inline void check_care_inputs(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                              const Eigen::MatrixXd& Q, double R) {
    if (A.rows() != A.cols())
        throw Error(ErrorKind::InvalidArgument, "A must be square");
    if (B.rows() != A.rows() || B.cols() != 1)
        throw Error(ErrorKind::InvalidArgument,
                    "B must be a column matching A");
    if (Q.rows() != A.rows() || Q.cols() != A.rows())
        throw Error(ErrorKind::InvalidArgument, "Q must match A");
    if ((Q - Q.transpose()).cwiseAbs().maxCoeff() >
        1e-10 * std::max(1.0, Q.cwiseAbs().maxCoeff()))
        throw Error(ErrorKind::InvalidArgument, "Q must be symmetric");
    if (!(R > 0.0) || !std::isfinite(R))
        throw Error(ErrorKind::InvalidArgument, "R must be positive");
    if (!A.allFinite() || !B.allFinite() || !Q.allFinite())
        throw Error(ErrorKind::InvalidArgument, "non-finite synthesis input");
}

inline void check_stabilizable(const Eigen::MatrixXd& A,
                               const Eigen::MatrixXd& B) {
    const Eigen::Index n = A.rows();
    Eigen::EigenSolver<Eigen::MatrixXd> es(A);
    for (Eigen::Index k = 0; k < n; ++k) {
        const std::complex<double> lam = es.eigenvalues()(k);
        if (lam.real() < -1e-12) continue;
        Eigen::MatrixXcd pencil(n, n + B.cols());
        pencil.leftCols(n) =
            A.cast<std::complex<double>>() -
            lam * Eigen::MatrixXcd::Identity(n, n);
        pencil.rightCols(B.cols()) = B.cast<std::complex<double>>();
        Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(pencil);
        qr.setThreshold(1e-10);
        if (qr.rank() < n)
            throw Error(ErrorKind::SynthesisInfeasible,
                        "unstable mode is not controllable");
    }
}

// Solves A'X + XA + Q = 0 by stacking columns into one dense linear system.
// The orders handled here are tiny, so the n^2-by-n^2 solve costs nothing.
inline Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& A,
                                      const Eigen::MatrixXd& Q) {
    const Eigen::Index n = A.rows();
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n * n, n * n);
    for (Eigen::Index c = 0; c < n; ++c) {
        M.block(c * n, c * n, n, n) += A.transpose();
        for (Eigen::Index r = 0; r < n; ++r)
            for (Eigen::Index k = 0; k < n; ++k)
                M(c * n + r, k * n + r) += A(k, c);
    }
    Eigen::VectorXd rhs(n * n);
    for (Eigen::Index c = 0; c < n; ++c) rhs.segment(c * n, n) = -Q.col(c);
    const Eigen::VectorXd x = M.fullPivLu().solve(rhs);
    Eigen::MatrixXd X(n, n);
    for (Eigen::Index c = 0; c < n; ++c) X.col(c) = x.segment(c * n, n);
    return 0.5 * (X + X.transpose());
}

}  // namespace detail

// Stabilizing solution of A'Y + YA - Y B R^-1 B' Y + Q = 0, obtained from the
// stable invariant subspace of the Hamiltonian matrix and polished by Newton
// steps, since the raw subspace solution loses accuracy as the weights grow.
// The residual is checked against 1e-9 * max(1, ||Q||_F) before returning.
inline Eigen::MatrixXd solve_care(const Eigen::MatrixXd& A,
                                  const Eigen::MatrixXd& B,
                                  const Eigen::MatrixXd& Q, double R) {
    detail::check_care_inputs(A, B, Q, R);
    detail::check_stabilizable(A, B);
    const Eigen::Index n = A.rows();

    Eigen::MatrixXd H(2 * n, 2 * n);
    H.topLeftCorner(n, n) = A;
    H.topRightCorner(n, n) = -B * B.transpose() / R;
    H.bottomLeftCorner(n, n) = -Q;
    H.bottomRightCorner(n, n) = -A.transpose();

    Eigen::EigenSolver<Eigen::MatrixXd> es(H);
    if (es.info() != Eigen::Success)
        throw Error(ErrorKind::NumericFailure,
                    "Hamiltonian eigendecomposition failed");

    const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
    std::vector<Eigen::Index> stable;
    for (Eigen::Index k = 0; k < 2 * n; ++k) {
        const std::complex<double> lam = es.eigenvalues()(k);
        if (std::abs(lam.real()) < 1e-9 * scale)
            throw Error(ErrorKind::BoundaryCase,
                        "Hamiltonian eigenvalue on the imaginary axis");
        if (lam.real() < 0.0) stable.push_back(k);
    }
    if (static_cast<Eigen::Index>(stable.size()) != n)
        throw Error(ErrorKind::NumericFailure,
                    "stable Hamiltonian subspace has wrong dimension");

    Eigen::MatrixXcd X(2 * n, n);
    for (Eigen::Index c = 0; c < n; ++c)
        X.col(c) = es.eigenvectors().col(stable[static_cast<std::size_t>(c)]);
    const Eigen::MatrixXcd X1 = X.topRows(n);
    const Eigen::MatrixXcd X2 = X.bottomRows(n);

    Eigen::FullPivLU<Eigen::MatrixXcd> lu(X1);
    if (!lu.isInvertible())
        throw Error(ErrorKind::SynthesisInfeasible,
                    "no stabilizing Riccati solution for this pair");
    Eigen::MatrixXd Y = (X2 * lu.inverse()).real();
    Y = 0.5 * (Y + Y.transpose());

    // Each Newton step re-solves the closed-loop Lyapunov equation at the
    // current gain; improvement is monotone from a stabilizing start, so stop
    // as soon as a step fails to shrink the residual.
    const auto residual_norm = [&](const Eigen::MatrixXd& Yc) {
        return (A.transpose() * Yc + Yc * A -
                Yc * B * B.transpose() * Yc / R + Q).norm();
    };
    double best = residual_norm(Y);
    for (int it = 0; it < 8 && best > 1e-13 * std::max(1.0, Q.norm()); ++it) {
        const Eigen::MatrixXd K = B.transpose() * Y / R;
        const Eigen::MatrixXd Yn =
            detail::solve_lyapunov(A - B * K, Q + K.transpose() * K * R);
        if (!Yn.allFinite()) break;
        const double cand = residual_norm(Yn);
        if (cand >= best) break;
        Y = 0.5 * (Yn + Yn.transpose());
        best = cand;
    }

    const Eigen::MatrixXd residual = A.transpose() * Y + Y * A -
                                     Y * B * B.transpose() * Y / R + Q;
    if (residual.norm() > 1e-9 * std::max(1.0, Q.norm()))
        throw Error(ErrorKind::NumericFailure,
                    "Riccati residual exceeds tolerance");
    return Y;
}

struct LqrSolution {
    Eigen::MatrixXd Y;
    Eigen::RowVectorXd K_gain;
    double reference_gain;  // feedforward scale for unit DC tracking
    StateSpace closed_loop;
};

// Synthesizes the state-feedback gain K = R^-1 B' Y for a strictly proper
// SISO plant and forms the reference-driven closed loop
// x' = (A - BK)x + B*nbar*r with unit DC gain.
inline LqrSolution lqr_gain(const StateSpace& sys, const LqrWeights& w) {
    if (!sys.is_siso())
        throw Error(ErrorKind::InvalidArgument, "plant must be SISO");
    if (sys.D().cwiseAbs().maxCoeff() != 0.0)
        throw Error(ErrorKind::InvalidArgument,
                    "plant must be strictly proper");

    const Eigen::MatrixXd Q = w.q_matrix(sys.order());
    const Eigen::MatrixXd Y = solve_care(sys.A(), sys.B(), Q, w.r);
    const Eigen::RowVectorXd K = (sys.B().transpose() * Y) / w.r;
    const Eigen::MatrixXd A_cl = sys.A() - sys.B() * K;
    if (!is_hurwitz(A_cl))
        throw Error(ErrorKind::NumericFailure,
                    "closed loop is not Hurwitz after synthesis");

    Eigen::FullPivLU<Eigen::MatrixXd> lu(-A_cl);
    const double dc = (sys.C() * lu.solve(sys.B()))(0, 0);
    if (std::abs(dc) < 1e-14)
        throw Error(ErrorKind::NumericFailure,
                    "closed loop has zero DC gain; cannot scale reference");
    const double nbar = 1.0 / dc;

    return LqrSolution{Y, K, nbar,
                       StateSpace(A_cl, sys.B() * nbar, sys.C())};
}

// Series compensator that reproduces the state-feedback loop gain on the
// controllable canonical realization of the plant: K (sI - A)^-1 B equals
// (k_n s^(n-1) + ... + k_1) / den(s), so the compensator is that polynomial
// over the plant numerator. Restricted to constant-numerator plants because
// the unity-feedback algebra would otherwise re-introduce the plant zeros as
// spurious closed-loop poles.
inline TransferFunction state_feedback_loop_compensator(
    const Eigen::RowVectorXd& K, const TransferFunction& plant) {
    if (K.size() == 0)
        throw Error(ErrorKind::InvalidArgument, "feedback gain is empty");
    if (plant.num_degree() != 0)
        throw Error(ErrorKind::InvalidArgument,
                    "loop compensator needs a constant-numerator plant");
    std::vector<double> pk(static_cast<std::size_t>(K.size()));
    for (Eigen::Index i = 0; i < K.size(); ++i)
        pk[static_cast<std::size_t>(i)] = K(K.size() - 1 - i);
    return TransferFunction(pk, plant.num());
}

struct LyapunovCertificate {
    bool v_posdef = false;
    bool vdot_negdef = false;
};

// Checks V(x) = x'Yx as a Lyapunov function for the closed loop: Y positive
// definite by Cholesky, and A_cl'Y + YA_cl negative definite by eigenvalue
// test with a 1e-10 ceiling.
inline LyapunovCertificate lyapunov_certificate(const LqrSolution& sol) {
    LyapunovCertificate cert;
    Eigen::LLT<Eigen::MatrixXd> llt(sol.Y);
    cert.v_posdef = (llt.info() == Eigen::Success) &&
                    sol.Y.diagonal().minCoeff() > 0.0;

    const Eigen::MatrixXd& A_cl = sol.closed_loop.A();
    Eigen::MatrixXd S = A_cl.transpose() * sol.Y + sol.Y * A_cl;
    S = 0.5 * (S + S.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    cert.vdot_negdef = es.info() == Eigen::Success &&
                       es.eigenvalues().maxCoeff() < 1e-10;
    return cert;
}

}  // namespace softpneu
