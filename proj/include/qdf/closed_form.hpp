#pragma once

#include <cmath>
#include <complex>

#include "qdf/distributions.hpp"
#include "qdf/errors.hpp"
#include "qdf/fock.hpp"

// Analytic evaluators for the four closed-form distributions; every
// numerical route is tested against these.

namespace qdf::closedform {

// e^{i theta} = (2i - pi)/(2i + pi)
inline Complex theta_phase() {
    return Complex(-M_PI, 2.0) / Complex(M_PI, 2.0);
}

// J for the number state |n>:
//   (1/(2i+pi)) e^{i theta n} exp(-pi r^2/(2i+pi)) L_n(2 pi^2 r^2/(4+pi^2)),
// r^2 = q^2 + p^2.  The complex division pi/(2i+pi) is carried out once so
// the exponent does not cancel catastrophically at large r.
inline Complex j_fock(int n, PhasePoint point) {
    if (n < 0 || n > 100) throw RangeError("j_fock: level outside [0, 100]");
    const double r2 = point.q * point.q + point.p * point.p;
    const Complex c = M_PI * Complex(M_PI, -2.0) / (M_PI * M_PI + 4.0);  // pi/(2i+pi)
    const Complex lobe = std::exp(-c * r2);
    const double lag = laguerre(n, 0, 2.0 * M_PI * M_PI * r2 / (4.0 + M_PI * M_PI));
    return std::pow(theta_phase(), n) * lobe * lag / Complex(M_PI, 2.0);
}

// Kirkwood for the number state |n>:
//   (i^n / (2^n n! pi sqrt2)) e^{-q^2/2 - p^2/2 + iqp} H_n(q) H_n(p).
inline Complex kirkwood_fock(int n, PhasePoint point) {
    if (n < 0 || n > 100) throw RangeError("kirkwood_fock: level outside [0, 100]");
    const double q = point.q, p = point.p;
    const double lognorm = -n * std::log(2.0) - std::lgamma(n + 1.0);
    const Complex in = std::pow(Complex(0.0, 1.0), n);
    return in * std::exp(lognorm) / (M_PI * kSqrt2) *
           std::exp(Complex(-0.5 * (q * q + p * p), q * p)) * hermite(n, q) * hermite(n, p);
}

// Superposition of two coherent states with q_k, p_k derived from
// alpha_k = q_k/sqrt2 + i p_k/sqrt2.
struct CatSpec {
    Complex alpha1;
    Complex alpha2;
    CatSign sign = CatSign::plus;

    double sgn() const { return sign == CatSign::plus ? 1.0 : -1.0; }
    double q1() const { return kSqrt2 * alpha1.real(); }
    double p1() const { return kSqrt2 * alpha1.imag(); }
    double q2() const { return kSqrt2 * alpha2.real(); }
    double p2() const { return kSqrt2 * alpha2.imag(); }

    double norm_denominator() const {
        const double d = 2.0 + 2.0 * sgn() * std::real(coherent_overlap(alpha1, alpha2));
        if (d < 1e-14)
            throw DegenerateStateError("CatSpec: normalization denominator below 1e-14");
        return d;
    }
};

// J for the cat: two Gaussian lobes plus two interference terms whose
// overlap factors carry the right-hand amplitude rotated by e^{i theta}.
inline Complex j_cat(const CatSpec& spec, PhasePoint point) {
    const double denom = spec.norm_denominator();
    const double q = point.q, p = point.p;
    const Complex c = M_PI * Complex(M_PI, -2.0) / (M_PI * M_PI + 4.0);  // pi/(2i+pi)
    const Complex eith = theta_phase();
    const Complex al = point.alpha();

    const Complex lobe1 =
        std::exp(-c * ((q - spec.q1()) * (q - spec.q1()) + (p - spec.p1()) * (p - spec.p1())));
    const Complex lobe2 =
        std::exp(-c * ((q - spec.q2()) * (q - spec.q2()) + (p - spec.p2()) * (p - spec.p2())));
    const Complex phase =
        std::polar(1.0, 0.5 * (q * (spec.p1() - spec.p2()) - p * (spec.q1() - spec.q2())));
    const Complex cross1 = phase * coherent_overlap(spec.alpha2 - al, eith * (spec.alpha1 - al));
    const Complex cross2 =
        std::conj(phase) * coherent_overlap(spec.alpha1 - al, eith * (spec.alpha2 - al));

    return (lobe1 + lobe2 + spec.sgn() * (cross1 + cross2)) / (Complex(M_PI, 2.0) * denom);
}

// Kirkwood for the cat, the four-term expression as printed.  The cross
// terms genuinely mix indices (q1 with p2 and vice versa); the expectation-
// value route confirms them, they are not typos.
inline Complex kirkwood_cat(const CatSpec& spec, PhasePoint point) {
    const double denom = spec.norm_denominator();
    const double q = point.q, p = point.p;
    const double q1 = spec.q1(), p1 = spec.p1(), q2 = spec.q2(), p2 = spec.p2();

    const Complex common =
        std::exp(Complex(-0.5 * (q * q + p * p), q * p)) / (kSqrt2 * M_PI * denom);
    const Complex diag1 = std::exp(Complex(-0.5 * (q1 * q1 + p1 * p1) + q * q1 - p * p1,
                                           0.5 * q1 * (p1 + 2.0 * p) + 0.5 * p1 * (q1 - 2.0 * q)));
    const Complex diag2 = std::exp(Complex(-0.5 * (q2 * q2 + p2 * p2) + q * q2 - p * p2,
                                           0.5 * q2 * (p2 + 2.0 * p) + 0.5 * p2 * (q2 - 2.0 * q)));
    const Complex cross1 = std::exp(Complex(-0.5 * (q1 * q1 + p2 * p2) + q * q1 - p * p2,
                                            0.5 * q2 * (p2 + 2.0 * p) + 0.5 * p1 * (q1 - 2.0 * q)));
    const Complex cross2 = std::exp(Complex(-0.5 * (q2 * q2 + p1 * p1) + q * q2 - p * p1,
                                            0.5 * q1 * (p1 + 2.0 * p) + 0.5 * p2 * (q2 - 2.0 * q)));
    return common * (diag1 + diag2 + spec.sgn() * (cross1 + cross2));
}

} // namespace qdf::closedform
