#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <mutex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qdf/errors.hpp"
#include "qdf/fock.hpp"
#include "qdf/grid.hpp"

namespace qdf::dist {

// arg of (2i - pi)/(2i + pi) = ((4 - pi^2) + 4 pi i)/(4 + pi^2), taken with
// the two-argument arctangent so it lands in the correct (second) quadrant.
inline double theta() {
    return std::atan2(4.0 * M_PI, 4.0 - M_PI * M_PI);
}

namespace detail {

using qdf::detail::parallel_for;

inline constexpr double kDefaultTailTol = 1e-12;

// Superdiagonals of a Hermitian matrix, trimmed at the last exactly-nonzero
// entry.  Together with the scaled Laguerre recurrence this evaluates
// Tr(rho D(beta)) in O(occupied block) per beta; Hermitian symmetry supplies
// the subdiagonal half.
struct RhoDiagonals {
    int dim = 0;
    std::vector<std::vector<Complex>> diag;  // diag[k][n] = rho(n, n+k)
};

inline RhoDiagonals rho_diagonals(const Matrix& rho) {
    RhoDiagonals d;
    d.dim = static_cast<int>(rho.rows());
    d.diag.resize(d.dim);
    for (int k = 0; k < d.dim; ++k) {
        int last = -1;
        for (int n = 0; n + k < d.dim; ++n) {
            const Complex v = rho(n, n + k);
            if (v.real() != 0.0 || v.imag() != 0.0) last = n;
        }
        if (last >= 0) {
            auto& row = d.diag[k];
            row.resize(last + 1);
            for (int n = 0; n <= last; ++n) row[n] = rho(n, n + k);
        }
    }
    return d;
}

// Tr(rho D(beta)) assembled per diagonal offset:
//   sum_k [ beta^k T_k + (-1)^k conj(beta^k T_k) ] e^{-|beta|^2/2},
//   T_k = sum_n sqrt(n!/(n+k)!) L_n^k(|beta|^2) rho(n, n+k).
inline Complex characteristic_from_diagonals(const RhoDiagonals& d, Complex beta,
                                             std::vector<double>& work) {
    const double x = std::norm(beta);
    work.resize(d.dim);
    Complex acc = 0.0;
    Complex bpow = 1.0;
    double sgn = 1.0;
    for (int k = 0; k < d.dim; ++k) {
        const auto& row = d.diag[k];
        if (!row.empty()) {
            const int count = static_cast<int>(row.size());
            qdf::detail::scaled_laguerre(k, x, count, work.data());
            Complex t = 0.0;
            for (int n = 0; n < count; ++n) t += work[n] * row[n];
            if (k == 0) {
                acc += t;
            } else {
                const Complex bt = bpow * t;
                acc += bt + sgn * std::conj(bt);
            }
        }
        bpow *= beta;
        sgn = -sgn;
    }
    return std::exp(-0.5 * x) * acc;
}

} // namespace detail

// Characteristic function Tr(rho D(beta)).
inline Complex characteristic(const DensityOperator& rho, Complex beta) {
    auto diags = detail::rho_diagonals(rho.matrix);
    std::vector<double> work;
    return detail::characteristic_from_diagonals(diags, beta, work);
}

// Diagonal of D(alpha)^dag rho D(alpha): the displaced-number populations
// feeding every series route.  Pure states use |<k|D^dag psi>|^2 directly.
inline Vector displaced_diagonal(const DensityOperator& rho, Complex alpha) {
    const OperatorMatrix d = displacement_matrix(alpha, rho.dim);
    Vector out(rho.dim);
    if (rho.pure) {
        Vector phi = d.matrix.adjoint() * (*rho.pure);
        for (int k = 0; k < rho.dim; ++k) out[k] = Complex(std::norm(phi[k]), 0.0);
        return out;
    }
    Matrix b = rho.matrix * d.matrix;
    for (int k = 0; k < rho.dim; ++k) out[k] = d.matrix.col(k).dot(b.col(k));
    return out;
}

// s-parametrized family, the displaced-number series
//   F(alpha, s) = 2/(pi(1-s)) sum_k ((s+1)/(s-1))^k <k|D^dag rho D|k>.
// For 0 < s < 1 the weights exceed 1 in modulus and the series has no
// meaning as written; the route is restricted to s <= 0.
inline Complex s_param(const DensityOperator& rho, PhasePoint point, double s) {
    if (s >= 1.0) throw ParameterError("s_param: s = 1 is singular");
    if (s > 0.0) throw ParameterError("s_param: s in (0,1) unsupported (growing series weights)");
    const Vector pops = displaced_diagonal(rho, point.alpha());
    const double w = (s + 1.0) / (s - 1.0);
    const double eps = detail::kDefaultTailTol;
    Complex acc = 0.0;
    double cum = 0.0, wp = 1.0;
    bool done = false;
    for (int k = 0; k < rho.dim; ++k) {
        acc += wp * pops[k];
        cum += pops[k].real();
        wp *= w;
        const bool weight_ok = std::abs(w) >= 1.0 || std::abs(wp) < eps;
        if (cum > 1.0 - eps && weight_ok) {
            done = true;
            break;
        }
    }
    if (!done)
        throw TruncationError("s_param: series mass not reached; raise the Fock dimension");
    return acc * (2.0 / (M_PI * (1.0 - s)));
}

// Wigner function as the displaced parity expectation (1/pi prefactor as in
// the trace representation; note this is half the s = 0 member of s_param,
// which carries 2/pi -- both normalizations are kept as printed).
inline double wigner_parity(const DensityOperator& rho, PhasePoint point) {
    const Vector pops = displaced_diagonal(rho, point.alpha());
    Complex acc = 0.0;
    double sgn = 1.0;
    for (int k = 0; k < rho.dim; ++k) {
        acc += sgn * pops[k];
        sgn = -sgn;
    }
    acc /= M_PI;
    if (std::abs(acc.imag()) > 1e-6)
        throw TruncationError("wigner_parity: imaginary residue above 1e-6");
    return acc.real();
}

// Trace route for J: unimodular-weight series over displaced populations,
// truncated once the accumulated mass passes 1 - tail_tol (the tail then
// bounds the truncation error).
inline Complex j_trace(const DensityOperator& rho, PhasePoint point, const QuadratureSpec& quad) {
    quad.validate();
    const Vector pops = displaced_diagonal(rho, point.alpha());
    const double th = theta();
    Complex acc = 0.0;
    double cum = 0.0;
    bool done = false;
    for (int k = 0; k < rho.dim; ++k) {
        acc += std::polar(1.0, th * k) * pops[k];
        cum += pops[k].real();
        if (cum > 1.0 - quad.series_tail_tol) {
            done = true;
            break;
        }
    }
    if (!done)
        throw TruncationError("j_trace: series mass not reached within " +
                              std::to_string(rho.dim) + " terms; raise the Fock dimension");
    return acc / Complex(M_PI, 2.0);
}

namespace detail {

struct QuadNodes {
    std::vector<double> x;  // -L + i h
    std::vector<double> w;  // trapezoid weights
};

inline QuadNodes quad_nodes(const QuadratureSpec& quad) {
    QuadNodes n;
    const int m = quad.points_per_axis;
    const double h = 2.0 * quad.box_half_width / (m - 1);
    n.x.resize(m);
    n.w.assign(m, h);
    for (int i = 0; i < m; ++i) n.x[i] = -quad.box_half_width + i * h;
    n.w.front() = n.w.back() = 0.5 * h;
    return n;
}

// Samples of the characteristic function on the (u, v) product grid under
// the module-wide map beta = (u + iv)/sqrt(2).
struct CharTable {
    QuadNodes nodes;
    Matrix chi;  // chi(i, j) at (u_i, v_j)
};

inline CharTable char_table(const DensityOperator& rho, const QuadratureSpec& quad, int threads) {
    CharTable t;
    t.nodes = quad_nodes(quad);
    const int m = quad.points_per_axis;
    t.chi.resize(m, m);
    const RhoDiagonals diags = rho_diagonals(rho.matrix);
    parallel_for(m, threads, [&](int i) {
        std::vector<double> work;
        for (int j = 0; j < m; ++j) {
            const Complex beta(t.nodes.x[i] / kSqrt2, t.nodes.x[j] / kSqrt2);
            t.chi(i, j) = characteristic_from_diagonals(diags, beta, work);
        }
    });
    return t;
}

// Eight boundary probes (edge midpoints and corners); a characteristic that
// has not decayed there means the box truncates real integrand mass.
inline void boundary_check(const Matrix& samples, double tol, const char* what,
                           std::vector<std::string>* warnings) {
    if (!warnings) return;
    const int m = static_cast<int>(samples.rows());
    const int c = (m - 1) / 2;
    double worst = 0.0;
    const int probes[8][2] = {{0, c}, {m - 1, c}, {c, 0}, {c, m - 1},
                              {0, 0}, {0, m - 1}, {m - 1, 0}, {m - 1, m - 1}};
    for (const auto& pr : probes) worst = std::max(worst, std::abs(samples(pr[0], pr[1])));
    if (worst > tol)
        warnings->push_back(std::string(what) + " magnitude " + std::to_string(worst) +
                            " at box edge exceeds tail tolerance; enlarge the box");
}

// Flat row-major reduction sum_{i,j} e^{i(u_i p - v_j q)} G(i, j); the fixed
// accumulation order is part of the reproducibility contract.
inline Complex fourier_reduce(const QuadNodes& nodes, const Matrix& g, double q, double p) {
    const int m = static_cast<int>(nodes.x.size());
    std::vector<Complex> pv(m);
    for (int j = 0; j < m; ++j) pv[j] = std::polar(1.0, -nodes.x[j] * q);
    Complex acc = 0.0;
    for (int i = 0; i < m; ++i) {
        const Complex pu = std::polar(1.0, nodes.x[i] * p);
        for (int j = 0; j < m; ++j) acc += pu * pv[j] * g(i, j);
    }
    return acc;
}

enum class IntegralKind { fresnel_j, kirkwood };

// Weight-and-chirp folded integrand G(i,j) = w_i w_j chirp(u_i, v_j) chi(i,j).
inline Matrix folded_integrand(const CharTable& t, IntegralKind kind) {
    const int m = static_cast<int>(t.nodes.x.size());
    Matrix g(m, m);
    for (int i = 0; i < m; ++i) {
        const double u = t.nodes.x[i];
        for (int j = 0; j < m; ++j) {
            const double v = t.nodes.x[j];
            const Complex chirp = (kind == IntegralKind::fresnel_j)
                                      ? std::polar(1.0, -(u * u + v * v) / (2.0 * M_PI))
                                      : std::polar(1.0, 0.5 * u * v);
            g(i, j) = t.nodes.w[i] * t.nodes.w[j] * chirp * t.chi(i, j);
        }
    }
    return g;
}

inline Complex integral_route_point(const CharTable& t, IntegralKind kind, PhasePoint pt) {
    const Matrix g = folded_integrand(t, kind);
    return fourier_reduce(t.nodes, g, pt.q, pt.p) / (4.0 * M_PI * M_PI);
}

} // namespace detail

// J as the Fresnel-chirped Fourier transform of the characteristic function:
//   J(q,p) = (1/4pi^2) \iint du dv e^{i(up - vq)} e^{-i(u^2+v^2)/2pi}
//            Tr(rho e^{i v q_hat - i u p_hat}).
inline Complex j_integral(const DensityOperator& rho, PhasePoint point, const QuadratureSpec& quad,
                          std::vector<std::string>* warnings = nullptr) {
    quad.validate();
    const auto table = detail::char_table(rho, quad, 1);
    detail::boundary_check(table.chi, quad.series_tail_tol, "characteristic", warnings);
    return detail::integral_route_point(table, detail::IntegralKind::fresnel_j, point);
}

// Kirkwood distribution, same transform with the e^{iuv/2} cross chirp.
inline Complex kirkwood_integral(const DensityOperator& rho, PhasePoint point,
                                 const QuadratureSpec& quad,
                                 std::vector<std::string>* warnings = nullptr) {
    quad.validate();
    const auto table = detail::char_table(rho, quad, 1);
    detail::boundary_check(table.chi, quad.series_tail_tol, "characteristic", warnings);
    return detail::integral_route_point(table, detail::IntegralKind::kirkwood, point);
}

enum class ChirpMultiplier { fresnel, identity };

// Characteristic-multiplier route over a whole grid: sample chi, multiply by
// the chirp (the Fourier-domain action of exp((i/pi) d^2/dalpha dalpha*)),
// transform back with a separated two-pass sum.  The identity multiplier
// reproduces the Wigner field.
inline ComplexField characteristic_transform(const DensityOperator& rho, const PhaseGrid& grid,
                                             const QuadratureSpec& quad, ChirpMultiplier mult,
                                             int threads = 1) {
    grid.validate();
    quad.validate();
    const auto table = detail::char_table(rho, quad, threads);

    ComplexField field;
    field.grid = grid;
    field.provenance.quad = quad;
    field.provenance.route = (mult == ChirpMultiplier::fresnel) ? "multiplier" : "integral";
    field.provenance.distribution = (mult == ChirpMultiplier::fresnel) ? "j" : "wigner";
    detail::boundary_check(table.chi, quad.series_tail_tol, "characteristic",
                           &field.provenance.warnings);

    const int m = quad.points_per_axis;
    Matrix h(m, m);  // w_j * multiplier * chi
    for (int i = 0; i < m; ++i) {
        const double u = table.nodes.x[i];
        for (int j = 0; j < m; ++j) {
            const double v = table.nodes.x[j];
            const Complex c = (mult == ChirpMultiplier::fresnel)
                                  ? std::polar(1.0, -(u * u + v * v) / (2.0 * M_PI))
                                  : Complex(1.0, 0.0);
            h(i, j) = table.nodes.w[j] * c * table.chi(i, j);
        }
    }
    // pass 1: partial transform over v for every output q column
    Matrix s(m, grid.n_q);
    detail::parallel_for(grid.n_q, threads, [&](int c) {
        const double q = grid.q_at(c);
        std::vector<Complex> pv(m);
        for (int j = 0; j < m; ++j) pv[j] = std::polar(1.0, -table.nodes.x[j] * q);
        for (int i = 0; i < m; ++i) {
            Complex acc = 0.0;
            for (int j = 0; j < m; ++j) acc += pv[j] * h(i, j);
            s(i, c) = acc;
        }
    });
    // pass 2: transform over u for every output point
    field.values.resize(grid.n_q, grid.n_p);
    detail::parallel_for(grid.n_q * grid.n_p, threads, [&](int idx) {
        const int c = idx / grid.n_p;
        const int r = idx % grid.n_p;
        const double p = grid.p_at(r);
        Complex acc = 0.0;
        for (int i = 0; i < m; ++i)
            acc += table.nodes.w[i] * std::polar(1.0, table.nodes.x[i] * p) * s(i, c);
        field.values(c, r) = acc / (4.0 * M_PI * M_PI);
    });
    return field;
}

inline ComplexField j_multiplier(const DensityOperator& rho, const PhaseGrid& grid,
                                 const QuadratureSpec& quad, int threads = 1) {
    return characteristic_transform(rho, grid, quad, ChirpMultiplier::fresnel, threads);
}

namespace detail {

// Low-rank spectral split of a density matrix for table builds where a
// per-node O(N^3) product would be prohibitive.  Eigenpairs below the mass
// threshold contribute less than the quadrature tolerances in play.
struct SpectralState {
    std::vector<double> weight;
    std::vector<Vector> vec;
};

inline SpectralState spectral_split(const DensityOperator& rho) {
    SpectralState s;
    if (rho.pure) {
        s.weight.push_back(1.0);
        s.vec.push_back(*rho.pure);
        return s;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix);
    for (int k = 0; k < rho.dim; ++k) {
        const double lam = es.eigenvalues()[k];
        if (lam > 1e-12) {
            s.weight.push_back(lam);
            s.vec.push_back(es.eigenvectors().col(k));
        }
    }
    return s;
}

// Wigner values W(v_j/pi, -u_i/pi) sampled for the Fresnel-of-Wigner route.
inline Eigen::MatrixXd wigner_table(const DensityOperator& rho, const QuadratureSpec& quad,
                                    int threads) {
    const QuadNodes nodes = quad_nodes(quad);
    const int m = quad.points_per_axis;
    const SpectralState spec = spectral_split(rho);
    Eigen::MatrixXd w(m, m);
    parallel_for(m, threads, [&](int i) {
        for (int j = 0; j < m; ++j) {
            const PhasePoint pt{nodes.x[j] / M_PI, -nodes.x[i] / M_PI};
            const OperatorMatrix d = displacement_matrix(pt.alpha(), rho.dim);
            double acc = 0.0;
            for (size_t r = 0; r < spec.weight.size(); ++r) {
                Vector phi = d.matrix.adjoint() * spec.vec[r];
                double par = 0.0, sgn = 1.0;
                for (int k = 0; k < rho.dim; ++k) {
                    par += sgn * std::norm(phi[k]);
                    sgn = -sgn;
                }
                acc += spec.weight[r] * par;
            }
            w(i, j) = acc / M_PI;
        }
    });
    return w;
}

inline Matrix wigner_fresnel_fold(const QuadNodes& nodes, const Eigen::MatrixXd& wig) {
    const int m = static_cast<int>(nodes.x.size());
    Matrix g(m, m);
    for (int i = 0; i < m; ++i) {
        const double u = nodes.x[i];
        for (int j = 0; j < m; ++j) {
            const double v = nodes.x[j];
            g(i, j) = nodes.w[i] * nodes.w[j] *
                      std::polar(1.0, (u * u + v * v) / (2.0 * M_PI)) * wig(i, j);
        }
    }
    return g;
}

inline Complex wigner_fresnel_reduce(const QuadNodes& nodes, const Matrix& folded, PhasePoint pt) {
    const Complex pref = std::polar(1.0, 0.5 * M_PI * (pt.q * pt.q + pt.p * pt.p)) /
                         Complex(0.0, 4.0 * M_PI);
    return pref * fourier_reduce(nodes, folded, pt.q, pt.p);
}

} // namespace detail

// J as printed in its Fresnel-of-Wigner form,
//   (1/4 pi i) e^{i pi (q^2+p^2)/2} \iint du dv e^{i(up - vq)}
//   e^{i(u^2+v^2)/2pi} W(v/pi, -u/pi),
// which keeps the pre-normalization factors the derivation later drops; it
// differs from j_integral by a constant factor (tested, not assumed).
inline Complex j_wigner_fresnel(const DensityOperator& rho, PhasePoint point,
                                const QuadratureSpec& quad,
                                std::vector<std::string>* warnings = nullptr) {
    quad.validate();
    const auto nodes = detail::quad_nodes(quad);
    const Eigen::MatrixXd wig = detail::wigner_table(rho, quad, 1);
    detail::boundary_check(wig.cast<Complex>(), quad.series_tail_tol, "Wigner integrand", warnings);
    return detail::wigner_fresnel_reduce(nodes, detail::wigner_fresnel_fold(nodes, wig), point);
}

namespace detail {

// Sandwich table Tr(rho D(b') Omega D(b')^dag) with b' = (v tanA + i u tanB)/sqrt(2),
// the displaced quadratic-phase kernel of the general-angle route.
inline Matrix general_table(const DensityOperator& rho, const QuadratureSpec& quad, double tan_a,
                            double tan_b, const Matrix& omega, int threads) {
    const QuadNodes nodes = quad_nodes(quad);
    const int m = quad.points_per_axis;
    const SpectralState spec = spectral_split(rho);
    Matrix t(m, m);
    parallel_for(m, threads, [&](int i) {
        for (int j = 0; j < m; ++j) {
            const Complex bp(nodes.x[j] * tan_a / kSqrt2, nodes.x[i] * tan_b / kSqrt2);
            const OperatorMatrix d = displacement_matrix(bp, rho.dim);
            Complex acc = 0.0;
            for (size_t r = 0; r < spec.weight.size(); ++r) {
                Vector phi = d.matrix.adjoint() * spec.vec[r];
                acc += spec.weight[r] * phi.dot(omega * phi);
            }
            t(i, j) = acc;
        }
    });
    return t;
}

inline Matrix general_fold(const QuadNodes& nodes, const Matrix& table, double cot_a,
                           double cot_b) {
    const double tan_a = 1.0 / cot_a, tan_b = 1.0 / cot_b;
    const int m = static_cast<int>(nodes.x.size());
    Matrix g(m, m);
    for (int i = 0; i < m; ++i) {
        const double u = nodes.x[i];
        for (int j = 0; j < m; ++j) {
            const double v = nodes.x[j];
            g(i, j) = nodes.w[i] * nodes.w[j] *
                      std::polar(1.0, -0.5 * u * u * tan_b + 0.5 * v * v * tan_a) * table(i, j);
        }
    }
    return g;
}

inline Complex general_reduce(const QuadNodes& nodes, const Matrix& folded, double cot_a,
                              double cot_b, PhasePoint pt) {
    const Complex pref =
        std::polar(1.0, 0.5 * pt.q * pt.q * cot_a - 0.5 * pt.p * pt.p * cot_b) /
        (4.0 * M_PI * M_PI);
    return pref * fourier_reduce(nodes, folded, pt.q, pt.p);
}

inline void general_guard(double cot_a, double cot_b) {
    if (std::abs(cot_a) < 1e-6 || std::abs(cot_b) < 1e-6)
        throw ParameterError("j_general: |cot| below 1e-6 (tangent overflow)");
}

} // namespace detail

// General-angle J.  Exposed unnormalized: only the cot = +/- pi case carries
// a normalization statement.  The factorized operator identity behind this
// form holds on a restricted angle domain (opposite-sign cotangents are
// safe); callers pick angles accordingly.
inline Complex j_general(const DensityOperator& rho, PhasePoint point, double cot_a, double cot_b,
                         const QuadratureSpec& quad, std::vector<std::string>* warnings = nullptr) {
    quad.validate();
    detail::general_guard(cot_a, cot_b);
    const Matrix omega = quadratic_phase_operator(cot_a, cot_b, rho.dim).matrix;
    const Matrix table =
        detail::general_table(rho, quad, 1.0 / cot_a, 1.0 / cot_b, omega, 1);
    detail::boundary_check(table, quad.series_tail_tol, "general-route integrand", warnings);
    const auto nodes = detail::quad_nodes(quad);
    return detail::general_reduce(nodes, detail::general_fold(nodes, table, cot_a, cot_b), cot_a,
                                  cot_b, point);
}

// Expectation-value form of the Kirkwood distribution,
//   (1/sqrt(2) pi) e^{(q^2+p^2)/2 + iqp} <-i sqrt2 p| e^{a^2/2} rho e^{-a^dag^2/2} |sqrt2 q>.
// The e^{(q^2+p^2)/2} prefactor amplifies truncation error, hence the guarded
// domain.  The exponentials are exact: a^2 is nilpotent in the truncated
// basis, so the series is the matrix exponential.
inline Complex kirkwood_expectation(const FockVector& psi, PhasePoint point) {
    if (std::abs(point.q) > 4.0 || std::abs(point.p) > 4.0)
        throw ParameterError("kirkwood_expectation: |q|, |p| must be <= 4");
    if (psi.dim < 96)
        throw ParameterError("kirkwood_expectation: need Fock dimension >= 96");
    const int n = psi.dim;
    Matrix upper_plus = Matrix::Zero(n, n);   // e^{a^2/2}
    Matrix upper_minus = Matrix::Zero(n, n);  // e^{-a^2/2}
    for (int m = 0; m < n; ++m) {
        double lg_m = std::lgamma(m + 1.0);
        for (int col = m; col < n; col += 2) {
            const int j = (col - m) / 2;
            const double mag =
                std::exp(-j * std::log(2.0) - std::lgamma(j + 1.0) +
                         0.5 * (std::lgamma(col + 1.0) - lg_m));
            upper_plus(m, col) = mag;
            upper_minus(m, col) = (j % 2 == 0) ? mag : -mag;
        }
    }
    const FockVector bra = coherent_state(Complex(0.0, -kSqrt2 * point.p), n);
    const FockVector ket = coherent_state(Complex(kSqrt2 * point.q, 0.0), n);
    const double amp = std::exp(0.5 * (point.q * point.q + point.p * point.p));
    const double tail_est = amp * (bra.truncation_tail + ket.truncation_tail + psi.truncation_tail);
    if (tail_est > 1e-3)
        throw TruncationError("kirkwood_expectation: amplified truncation tail " +
                              std::to_string(tail_est) + " exceeds 1e-3; raise the dimension");
    const Complex left = bra.coeffs.dot(upper_plus * psi.coeffs);       // <bra|e^{a^2/2}|psi>
    const Complex right = psi.coeffs.dot(upper_minus.adjoint() * ket.coeffs);  // <psi|e^{-adag^2/2}|ket>
    return left * right * amp * std::polar(1.0, point.q * point.p) / (kSqrt2 * M_PI);
}

// Quadrature of (1/2pi^2) \int d^2beta e^{-i|beta|^2/pi} D(beta) over the
// square |Re beta|, |Im beta| <= L, elementwise in the truncated basis.
inline Matrix gaussian_displacement_integral(const QuadratureSpec& quad) {
    quad.validate();
    if (quad.fock_dim < 20) throw ParameterError("gaussian_displacement_integral: need N >= 20");
    if (quad.box_half_width < 8.0)
        throw ParameterError("gaussian_displacement_integral: need box half-width >= 8");
    const auto nodes = detail::quad_nodes(quad);
    const int m = quad.points_per_axis;
    const int n = quad.fock_dim;
    Matrix acc = Matrix::Zero(n, n);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            const Complex beta(nodes.x[i], nodes.x[j]);
            const Complex c =
                nodes.w[i] * nodes.w[j] * std::polar(1.0, -std::norm(beta) / M_PI);
            acc += c * displacement_matrix(beta, n).matrix;
        }
    }
    return acc / (2.0 * M_PI * M_PI);
}

// Frobenius distance of the integral above from (1/(2i+pi)) e^{i theta n} on
// the top 10x10 block.
inline double gaussian_displacement_identity(const QuadratureSpec& quad) {
    const Matrix integral = gaussian_displacement_integral(quad);
    const Matrix target = number_phase_diag(theta(), quad.fock_dim).matrix / Complex(M_PI, 2.0);
    return (integral.topLeftCorner(10, 10) - target.topLeftCorner(10, 10)).norm();
}

// ---------------------------------------------------------------------------
// Grid evaluation
// ---------------------------------------------------------------------------

enum class RouteKind {
    j_integral,
    j_trace,
    j_multiplier,
    j_general,
    j_wigner_fresnel,
    kirkwood_integral,
    wigner_parity,
    s_param,
};

struct Route {
    RouteKind kind = RouteKind::j_trace;
    double s = 0.0;
    double cot_a = 0.0;
    double cot_b = 0.0;

    static Route j_integral() { return {RouteKind::j_integral}; }
    static Route j_trace() { return {RouteKind::j_trace}; }
    static Route j_multiplier() { return {RouteKind::j_multiplier}; }
    static Route j_general(double cot_a, double cot_b) {
        return {RouteKind::j_general, 0.0, cot_a, cot_b};
    }
    static Route j_wigner_fresnel() { return {RouteKind::j_wigner_fresnel}; }
    static Route kirkwood_integral() { return {RouteKind::kirkwood_integral}; }
    static Route wigner_parity() { return {RouteKind::wigner_parity}; }
    static Route s_param(double s) {
        Route r{RouteKind::s_param};
        r.s = s;
        return r;
    }
};

inline const char* route_tag(RouteKind kind) {
    switch (kind) {
        case RouteKind::j_integral: return "integral";
        case RouteKind::j_trace: return "trace";
        case RouteKind::j_multiplier: return "multiplier";
        case RouteKind::j_general: return "general";
        case RouteKind::j_wigner_fresnel: return "wigner-fresnel";
        case RouteKind::kirkwood_integral: return "integral";
        case RouteKind::wigner_parity: return "trace";
        case RouteKind::s_param: return "trace";
    }
    return "?";
}

inline const char* route_distribution(RouteKind kind) {
    switch (kind) {
        case RouteKind::kirkwood_integral: return "kirkwood";
        case RouteKind::wigner_parity: return "wigner";
        case RouteKind::s_param: return "sparam";
        default: return "j";
    }
}

// Evaluates a route over a phase grid.  Heavy per-state tables (the
// characteristic, Wigner, or sandwich samples) are built once and shared by
// every point; the per-point reduction is the same code the scalar
// operations run, so a 1x1 grid reproduces them bit for bit, and the result
// does not depend on the worker count.
inline ComplexField grid_eval(const Route& route, const DensityOperator& rho,
                              const PhaseGrid& grid, const QuadratureSpec& quad, int threads = 1,
                              const std::string& state_descriptor = "") {
    grid.validate();
    quad.validate();

    if (route.kind == RouteKind::j_multiplier) {
        ComplexField f = j_multiplier(rho, grid, quad, threads);
        f.provenance.state = state_descriptor;
        return f;
    }

    ComplexField field;
    field.grid = grid;
    field.values.resize(grid.n_q, grid.n_p);
    field.provenance.quad = quad;
    field.provenance.state = state_descriptor;
    field.provenance.distribution = route_distribution(route.kind);
    field.provenance.route = route_tag(route.kind);

    std::mutex err_mutex;
    auto record_error = [&](int c, int r, const std::exception& e) {
        std::lock_guard<std::mutex> lock(err_mutex);
        field.provenance.failed = true;
        field.provenance.errors.push_back("(" + std::to_string(grid.q_at(c)) + ", " +
                                          std::to_string(grid.p_at(r)) + "): " + e.what());
    };

    auto eval_points = [&](const std::function<Complex(PhasePoint)>& f) {
        detail::parallel_for(grid.n_q * grid.n_p, threads, [&](int idx) {
            const int c = idx / grid.n_p;
            const int r = idx % grid.n_p;
            const PhasePoint pt{grid.q_at(c), grid.p_at(r)};
            try {
                field.values(c, r) = f(pt);
            } catch (const std::exception& e) {
                field.values(c, r) = Complex(std::nan(""), std::nan(""));
                record_error(c, r, e);
            }
        });
    };

    switch (route.kind) {
        case RouteKind::j_integral:
        case RouteKind::kirkwood_integral: {
            const auto table = detail::char_table(rho, quad, threads);
            detail::boundary_check(table.chi, quad.series_tail_tol, "characteristic",
                                   &field.provenance.warnings);
            const auto kind = route.kind == RouteKind::j_integral
                                  ? detail::IntegralKind::fresnel_j
                                  : detail::IntegralKind::kirkwood;
            const Matrix folded = detail::folded_integrand(table, kind);
            eval_points([&](PhasePoint pt) {
                return detail::fourier_reduce(table.nodes, folded, pt.q, pt.p) /
                       (4.0 * M_PI * M_PI);
            });
            break;
        }
        case RouteKind::j_wigner_fresnel: {
            const auto nodes = detail::quad_nodes(quad);
            const Eigen::MatrixXd wig = detail::wigner_table(rho, quad, threads);
            detail::boundary_check(wig.cast<Complex>(), quad.series_tail_tol, "Wigner integrand",
                                   &field.provenance.warnings);
            const Matrix folded = detail::wigner_fresnel_fold(nodes, wig);
            eval_points([&](PhasePoint pt) {
                return detail::wigner_fresnel_reduce(nodes, folded, pt);
            });
            break;
        }
        case RouteKind::j_general: {
            detail::general_guard(route.cot_a, route.cot_b);
            const Matrix omega =
                quadratic_phase_operator(route.cot_a, route.cot_b, rho.dim).matrix;
            const Matrix table = detail::general_table(rho, quad, 1.0 / route.cot_a,
                                                       1.0 / route.cot_b, omega, threads);
            detail::boundary_check(table, quad.series_tail_tol, "general-route integrand",
                                   &field.provenance.warnings);
            const auto nodes = detail::quad_nodes(quad);
            const Matrix folded = detail::general_fold(nodes, table, route.cot_a, route.cot_b);
            eval_points([&](PhasePoint pt) {
                return detail::general_reduce(nodes, folded, route.cot_a, route.cot_b, pt);
            });
            break;
        }
        case RouteKind::j_trace:
            eval_points([&](PhasePoint pt) { return j_trace(rho, pt, quad); });
            break;
        case RouteKind::wigner_parity:
            eval_points([&](PhasePoint pt) { return Complex(wigner_parity(rho, pt), 0.0); });
            break;
        case RouteKind::s_param:
            eval_points([&](PhasePoint pt) { return s_param(rho, pt, route.s); });
            break;
        case RouteKind::j_multiplier:
            break;  // handled above
    }
    return field;
}

// Trapezoid integral of a field over its grid.
inline Complex field_integral(const ComplexField& field) {
    field.grid.validate();
    if (!field.finite()) throw ParameterError("field_integral: field has non-finite cells");
    if (field.grid.n_q < 2 || field.grid.n_p < 2)
        throw ParameterError("field_integral: need at least 2 points per axis");
    const double hq = (field.grid.q_max - field.grid.q_min) / (field.grid.n_q - 1);
    const double hp = (field.grid.p_max - field.grid.p_min) / (field.grid.n_p - 1);
    Complex acc = 0.0;
    for (int i = 0; i < field.grid.n_q; ++i) {
        const double wq = (i == 0 || i == field.grid.n_q - 1) ? 0.5 * hq : hq;
        for (int j = 0; j < field.grid.n_p; ++j) {
            const double wp = (j == 0 || j == field.grid.n_p - 1) ? 0.5 * hp : hp;
            acc += wq * wp * field.values(i, j);
        }
    }
    return acc;
}

} // namespace qdf::dist
