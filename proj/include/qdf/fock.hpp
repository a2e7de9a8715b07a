#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "qdf/errors.hpp"

namespace qdf {

using Complex = std::complex<double>;
using Vector  = Eigen::VectorXcd;
using Matrix  = Eigen::MatrixXcd;

inline constexpr double kSqrt2 = 1.4142135623730950488;

// A point of the (q, p) plane.  The complex amplitude is always derived,
// never stored: alpha = q/sqrt(2) + i p/sqrt(2).
struct PhasePoint {
    double q = 0.0;
    double p = 0.0;
    Complex alpha() const { return {q / kSqrt2, p / kSqrt2}; }
};

// ---------------------------------------------------------------------------
// Special functions
// ---------------------------------------------------------------------------

namespace detail {
inline constexpr int kPolyOrderGuard = 200;
}

// Physicists' Hermite polynomial H_n(x) by the three-term recurrence.
inline double hermite(int n, double x) {
    if (n < 0) throw RangeError("hermite: order must be non-negative");
    if (n > detail::kPolyOrderGuard) throw RangeError("hermite: order exceeds guard (200)");
    if (n == 0) return 1.0;
    double hm = 1.0, h = 2.0 * x;
    for (int k = 1; k < n; ++k) {
        double next = 2.0 * x * h - 2.0 * k * hm;
        hm = h;
        h = next;
    }
    return h;
}

// Associated Laguerre polynomial L_n^k(x); L_n^0 is the plain Laguerre.
inline double laguerre(int n, int k, double x) {
    if (n < 0 || k < 0) throw RangeError("laguerre: indices must be non-negative");
    if (n > detail::kPolyOrderGuard) throw RangeError("laguerre: degree exceeds guard (200)");
    if (n == 0) return 1.0;
    double lm = 1.0, l = 1.0 + k - x;
    for (int m = 1; m < n; ++m) {
        double next = ((2.0 * m + k + 1.0 - x) * l - (m + k) * lm) / (m + 1.0);
        lm = l;
        l = next;
    }
    return l;
}

namespace detail {

// Fills g[n] = sqrt(n!/(n+k)!) * L_n^k(x) for n = 0..count-1.  The scaling is
// folded into the recurrence so intermediates stay inside double range even
// when the bare Laguerre values or factorial ratios would overflow.
inline void scaled_laguerre(int k, double x, int count, double* g) {
    if (count <= 0) return;
    g[0] = std::exp(-0.5 * std::lgamma(static_cast<double>(k) + 1.0));
    if (count == 1) return;
    g[1] = g[0] * (1.0 + k - x) / std::sqrt(static_cast<double>(k) + 1.0);
    for (int n = 1; n + 1 < count; ++n) {
        double a = std::sqrt((n + 1.0) / (n + k + 1.0));
        double b = std::sqrt(n * (n + 1.0) * (n + k) / (n + k + 1.0));
        g[n + 1] = ((2.0 * n + k + 1.0 - x) * a * g[n] - b * g[n - 1]) / (n + 1.0);
    }
}

} // namespace detail

// ---------------------------------------------------------------------------
// States
// ---------------------------------------------------------------------------

// Pure state in the truncated number basis.  Factories normalize and record
// the probability mass dropped by truncation so callers can widen tolerances.
struct FockVector {
    Vector coeffs;
    int dim = 0;
    double truncation_tail = 0.0;  // mass lost to truncation before renormalization
    bool truncation_warning = false;

    double norm_sq() const { return coeffs.squaredNorm(); }
};

namespace detail {

inline void check_dim(int n, const char* where) {
    if (n < 1) throw DimensionError(std::string(where) + ": dimension must be >= 1");
}

} // namespace detail

inline FockVector fock_state(int n, int dim) {
    detail::check_dim(dim, "fock_state");
    if (n < 0 || n >= dim)
        throw DimensionError("fock_state: level " + std::to_string(n) +
                             " outside dimension " + std::to_string(dim));
    FockVector v;
    v.dim = dim;
    v.coeffs = Vector::Zero(dim);
    v.coeffs[n] = 1.0;
    return v;
}

// Truncated coherent state, renormalized.  |alpha|^2 > dim/4 degrades the
// truncation fidelity; the factory flags it instead of failing.
inline FockVector coherent_state(Complex alpha, int dim) {
    detail::check_dim(dim, "coherent_state");
    FockVector v;
    v.dim = dim;
    v.coeffs = Vector(dim);
    const double x = std::norm(alpha);
    // c_n = exp(-x/2) alpha^n / sqrt(n!), built multiplicatively
    Complex c = std::exp(-0.5 * x);
    v.coeffs[0] = c;
    for (int n = 1; n < dim; ++n) {
        c *= alpha / std::sqrt(static_cast<double>(n));
        v.coeffs[n] = c;
    }
    const double captured = v.coeffs.squaredNorm();
    v.truncation_tail = std::max(0.0, 1.0 - captured);
    v.truncation_warning = x > 0.25 * dim;
    v.coeffs /= std::sqrt(captured);
    return v;
}

inline Complex coherent_overlap(Complex a1, Complex a2) {
    return std::exp(-0.5 * std::norm(a1) - 0.5 * std::norm(a2) + std::conj(a1) * a2);
}

enum class CatSign { plus, minus };

// Normalized superposition (|a1> +/- |a2>) / sqrt(2 +/- 2 Re<a1|a2>), formed
// and renormalized in the truncated basis.
inline FockVector cat_state(Complex a1, Complex a2, CatSign sign, int dim) {
    detail::check_dim(dim, "cat_state");
    const double s = (sign == CatSign::plus) ? 1.0 : -1.0;
    const double denom = 2.0 + 2.0 * s * std::real(coherent_overlap(a1, a2));
    if (denom < 1e-14)
        throw DegenerateStateError("cat_state: destructive superposition has vanishing norm");
    FockVector c1 = coherent_state(a1, dim);
    FockVector c2 = coherent_state(a2, dim);
    FockVector v;
    v.dim = dim;
    v.coeffs = c1.coeffs + s * c2.coeffs;
    v.truncation_tail = std::max(c1.truncation_tail, c2.truncation_tail);
    v.truncation_warning = c1.truncation_warning || c2.truncation_warning;
    const double nrm = v.coeffs.norm();
    if (nrm * nrm < 1e-14)
        throw DegenerateStateError("cat_state: truncated superposition has vanishing norm");
    v.coeffs /= nrm;
    return v;
}

// ---------------------------------------------------------------------------
// Density operators
// ---------------------------------------------------------------------------

// Hermitian, unit-trace matrix.  When built from a pure state the vector is
// kept alongside; the displaced-diagonal evaluations then run in O(N^2)
// instead of O(N^3) without changing any contract.
struct DensityOperator {
    Matrix matrix;
    int dim = 0;
    std::optional<Vector> pure;

    static DensityOperator from_matrix(Matrix rho) {
        const int n = static_cast<int>(rho.rows());
        if (n < 1 || rho.cols() != n)
            throw DimensionError("DensityOperator: matrix must be square and non-empty");
        if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
            throw ParameterError("DensityOperator: matrix not Hermitian within 1e-12");
        if (std::abs(rho.trace() - Complex(1.0, 0.0)) > 1e-10)
            throw ParameterError("DensityOperator: trace differs from 1 beyond 1e-10");
        Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -1e-10)
            throw ParameterError("DensityOperator: negative eigenvalue beyond -1e-10");
        DensityOperator d;
        d.matrix = std::move(rho);
        d.dim = n;
        return d;
    }
};

inline DensityOperator density_from_pure(const FockVector& psi) {
    if (std::abs(psi.norm_sq() - 1.0) > 1e-12)
        throw ParameterError("density_from_pure: state not normalized");
    DensityOperator d;
    d.dim = psi.dim;
    d.matrix = psi.coeffs * psi.coeffs.adjoint();
    d.pure = psi.coeffs;
    return d;
}

// ---------------------------------------------------------------------------
// Operators
// ---------------------------------------------------------------------------

enum class OperatorLabel { displacement, quadratic_phase, number_phase, position, momentum };

struct OperatorMatrix {
    Matrix matrix;
    OperatorLabel label;
};

// Glauber displacement operator, exact matrix elements in the truncated
// basis:
//   <m|D(a)|n> = sqrt(n!/m!) a^(m-n) exp(-|a|^2/2) L_n^(m-n)(|a|^2),  m >= n,
// with the conjugate-symmetric relation (under a -> -a) below the diagonal.
// Filled one diagonal offset at a time so the whole matrix costs O(N^2).
inline OperatorMatrix displacement_matrix(Complex alpha, int dim) {
    detail::check_dim(dim, "displacement_matrix");
    const double x = std::norm(alpha);
    const double ex = std::exp(-0.5 * x);
    Matrix d(dim, dim);
    std::vector<double> g(dim);
    Complex apow(1.0, 0.0);          // alpha^k
    Complex mpow(1.0, 0.0);          // (-conj(alpha))^k
    for (int k = 0; k < dim; ++k) {
        const int count = dim - k;
        detail::scaled_laguerre(k, x, count, g.data());
        const Complex sub = apow * ex;
        const Complex sup = mpow * ex;
        for (int n = 0; n < count; ++n) {
            d(n + k, n) = g[n] * sub;
            if (k > 0) d(n, n + k) = g[n] * sup;
        }
        apow *= alpha;
        mpow *= -std::conj(alpha);
    }
    return {std::move(d), OperatorLabel::displacement};
}

// q = (a + a^dag)/sqrt(2), p = i(a^dag - a)/sqrt(2); [q, p] = i away from the
// truncation edge.
inline std::pair<OperatorMatrix, OperatorMatrix> quadrature_operators(int dim) {
    if (dim < 2) throw DimensionError("quadrature_operators: need dimension >= 2");
    Matrix q = Matrix::Zero(dim, dim);
    Matrix p = Matrix::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) {
        const double r = std::sqrt(n / 2.0);
        q(n - 1, n) = r;
        q(n, n - 1) = r;
        p(n, n - 1) = Complex(0.0, r);
        p(n - 1, n) = Complex(0.0, -r);
    }
    return {{std::move(q), OperatorLabel::position}, {std::move(p), OperatorLabel::momentum}};
}

// diag(e^{i theta n})
inline OperatorMatrix number_phase_diag(double theta, int dim) {
    detail::check_dim(dim, "number_phase_diag");
    Matrix d = Matrix::Zero(dim, dim);
    for (int n = 0; n < dim; ++n) d(n, n) = std::polar(1.0, theta * n);
    return {std::move(d), OperatorLabel::number_phase};
}

// exp( i cot_b p^2/2 - i cot_a q^2/2 ), built at dim+16 and cropped so the
// truncation edge error stays out of the returned block.
inline OperatorMatrix quadratic_phase_operator(double cot_a, double cot_b, int dim) {
    if (dim < 8) throw DimensionError("quadratic_phase_operator: need dimension >= 8");
    const int big = dim + 16;
    auto [q, p] = quadrature_operators(big);
    Matrix gen = Complex(0.0, 0.5 * cot_b) * (p.matrix * p.matrix) -
                 Complex(0.0, 0.5 * cot_a) * (q.matrix * q.matrix);
    Matrix full = gen.exp();
    return {full.topLeftCorner(dim, dim), OperatorLabel::quadratic_phase};
}

} // namespace qdf
