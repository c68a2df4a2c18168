#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "softpneu/error.hpp"

namespace softpneu {
namespace poly {

// Coefficients are stored in descending powers of s, e.g. {1, 3, 2} is
// s^2 + 3s + 2. An empty vector is not a polynomial; the zero polynomial
// is {0}.

inline std::complex<double> eval(const std::vector<double>& c,
                                 std::complex<double> s) {
    std::complex<double> acc = 0.0;
    for (double ck : c) acc = acc * s + ck;
    return acc;
}

inline double eval(const std::vector<double>& c, double s) {
    double acc = 0.0;
    for (double ck : c) acc = acc * s + ck;
    return acc;
}

// Scale of the terms contributing to eval(c, jw); used to decide whether a
// near-zero value means an actual root on the grid.
inline double eval_scale(const std::vector<double>& c, double omega) {
    double acc = 0.0, p = 1.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        acc += std::abs(*it) * p;
        p *= omega;
    }
    return acc;
}

inline std::vector<double> multiply(const std::vector<double>& a,
                                    const std::vector<double>& b) {
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

inline std::vector<double> add(const std::vector<double>& a,
                               const std::vector<double>& b) {
    std::size_t n = std::max(a.size(), b.size());
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) out[n - a.size() + i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) out[n - b.size() + i] += b[i];
    return out;
}

inline std::vector<double> scale(const std::vector<double>& a, double k) {
    std::vector<double> out = a;
    for (double& v : out) v *= k;
    return out;
}

inline std::vector<double> derivative(const std::vector<double>& c) {
    if (c.size() <= 1) return {0.0};
    std::vector<double> out(c.size() - 1);
    std::size_t deg = c.size() - 1;
    for (std::size_t i = 0; i + 1 < c.size(); ++i)
        out[i] = c[i] * static_cast<double>(deg - i);
    return out;
}

// Drop leading coefficients that are exactly zero or negligible against the
// largest coefficient. Keeps at least one term so {0} survives.
inline std::vector<double> trim(const std::vector<double>& c,
                                double rel_tol = 1e-12) {
    double big = 0.0;
    for (double v : c) big = std::max(big, std::abs(v));
    std::size_t first = 0;
    while (first + 1 < c.size() && std::abs(c[first]) <= rel_tol * big) ++first;
    return std::vector<double>(c.begin() + static_cast<long>(first), c.end());
}

inline bool is_zero(const std::vector<double>& c) {
    return std::all_of(c.begin(), c.end(), [](double v) { return v == 0.0; });
}

// Real polynomial from a root list; complex roots must come in conjugate
// pairs (not checked pairwise, the imaginary residue is just dropped).
inline std::vector<double> from_roots(
        const std::vector<std::complex<double>>& roots) {
    std::vector<std::complex<double>> c{1.0};
    for (const auto& r : roots) {
        std::vector<std::complex<double>> next(c.size() + 1, 0.0);
        for (std::size_t i = 0; i < c.size(); ++i) {
            next[i] += c[i];
            next[i + 1] -= c[i] * r;
        }
        c = next;
    }
    std::vector<double> out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i].real();
    return out;
}

// Roots of a real polynomial via the companion matrix. The input must have
// a nonzero leading coefficient; degree 0 yields no roots.
inline std::vector<std::complex<double>> roots(const std::vector<double>& c) {
    std::vector<double> p = trim(c, 0.0);
    if (is_zero(p))
        throw Error(ErrorKind::InvalidModel, "roots of the zero polynomial");
    std::size_t deg = p.size() - 1;
    if (deg == 0) return {};
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(static_cast<long>(deg),
                                                 static_cast<long>(deg));
    for (std::size_t i = 1; i <= deg; ++i)
        comp(0, static_cast<long>(i - 1)) = -p[i] / p[0];
    for (std::size_t i = 1; i < deg; ++i)
        comp(static_cast<long>(i), static_cast<long>(i - 1)) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, /*computeEigenvectors=*/false);
    std::vector<std::complex<double>> out(deg);
    for (std::size_t i = 0; i < deg; ++i) out[i] = es.eigenvalues()(static_cast<long>(i));
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return out;
}

}  // namespace poly
}  // namespace softpneu
