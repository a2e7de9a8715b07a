#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "qdf/fock.hpp"

using namespace qdf;
using Catch::Approx;

namespace {

// Independent monomial-sum oracles for the polynomial recurrences.
double hermite_monomial(int n, double x) {
    double acc = 0.0;
    for (int j = 0; 2 * j <= n; ++j) {
        const double term = std::pow(-1.0, j) * std::pow(2.0 * x, n - 2 * j) /
                            (std::tgamma(j + 1.0) * std::tgamma(n - 2 * j + 1.0));
        acc += term;
    }
    return acc * std::tgamma(n + 1.0);
}

double laguerre_monomial(int n, int k, double x) {
    double acc = 0.0;
    for (int j = 0; j <= n; ++j) {
        const double binom = std::tgamma(n + k + 1.0) /
                             (std::tgamma(n - j + 1.0) * std::tgamma(k + j + 1.0));
        acc += binom * std::pow(-x, j) / std::tgamma(j + 1.0);
    }
    return acc;
}

} // namespace

TEST_CASE("hermite polynomials") {
    CHECK(hermite(0, 1.7) == 1.0);
    CHECK(hermite(1, 0.0) == 0.0);
    CHECK(hermite(3, 1.0) == Approx(hermite_monomial(3, 1.0)));  // 8x^3 - 12x at 1 = -4
    CHECK(hermite(3, 1.0) == Approx(-4.0));
    CHECK_THROWS_AS(hermite(201, 0.5), RangeError);
    CHECK_THROWS_AS(hermite(-1, 0.5), RangeError);

    for (int n = 0; n <= 10; ++n) {
        for (double x = -5.0; x <= 5.0; x += 1.25) {
            const double ref = hermite_monomial(n, x);
            const double scale = std::max(1.0, std::abs(ref));
            CHECK(std::abs(hermite(n, x) - ref) < 1e-10 * scale);
        }
    }
}

TEST_CASE("associated laguerre polynomials") {
    CHECK(laguerre(0, 0, 3.2) == 1.0);
    CHECK(laguerre(1, 0, 2.0) == Approx(laguerre_monomial(1, 0, 2.0)));  // 1 - x = -1
    CHECK(laguerre(1, 0, 2.0) == Approx(-1.0));
    CHECK(laguerre(1, 1, 1.0) == Approx(laguerre_monomial(1, 1, 1.0)));  // 2 - x = 1
    CHECK(laguerre(1, 1, 1.0) == Approx(1.0));
    CHECK_THROWS_AS(laguerre(201, 0, 0.5), RangeError);

    for (int n = 0; n <= 10; ++n) {
        for (int k : {0, 1, 3}) {
            for (double x = 0.0; x <= 5.0; x += 1.25) {
                const double ref = laguerre_monomial(n, k, x);
                const double scale = std::max(1.0, std::abs(ref));
                CHECK(std::abs(laguerre(n, k, x) - ref) < 1e-10 * scale);
            }
        }
    }
}

TEST_CASE("fock state factory") {
    const FockVector v = fock_state(0, 4);
    CHECK(v.coeffs[0] == Complex(1.0, 0.0));
    CHECK(v.coeffs.tail(3).cwiseAbs().maxCoeff() == 0.0);

    const FockVector w = fock_state(3, 8);
    CHECK(w.coeffs[3] == Complex(1.0, 0.0));
    CHECK(std::abs(w.norm_sq() - 1.0) < 1e-12);

    CHECK_THROWS_AS(fock_state(5, 4), DimensionError);
}

TEST_CASE("coherent state factory") {
    const FockVector vac = coherent_state(0.0, 8);
    CHECK((vac.coeffs - fock_state(0, 8).coeffs).cwiseAbs().maxCoeff() == 0.0);

    const FockVector c1 = coherent_state(Complex(1.0, 0.0), 32);
    CHECK(std::abs(c1.coeffs[1] / c1.coeffs[0] - 1.0) < 1e-14);

    // Poisson tail oracle for |alpha|^2 = 4, truncated at 64 terms
    const FockVector c2 = coherent_state(Complex(2.0, 0.0), 64);
    double tail = 1.0;
    double term = std::exp(-4.0);
    for (int n = 0; n < 64; ++n) {
        tail -= term;
        term *= 4.0 / (n + 1.0);
    }
    CHECK(tail < 1e-10);
    CHECK(c2.truncation_tail < 1e-10);
    CHECK(std::abs(c2.norm_sq() - 1.0) < 1e-12);
    CHECK_FALSE(c2.truncation_warning);
    CHECK(coherent_state(Complex(4.0, 0.0), 32).truncation_warning);
}

TEST_CASE("coherent overlaps") {
    const Complex z(0.7, -1.2);
    CHECK(std::abs(coherent_overlap(z, z) - 1.0) < 1e-14);
    const double a = 2.0 * kSqrt2;
    CHECK(std::abs(coherent_overlap(a, -a) - std::exp(-16.0)) < 1e-20);
    CHECK(std::abs(coherent_overlap(0.0, z) - std::exp(-0.5 * std::norm(z))) < 1e-14);
}

TEST_CASE("cat state factory") {
    const Complex z(1.0, 0.5);
    const FockVector same = cat_state(z, z, CatSign::plus, 32);
    const FockVector coh = coherent_state(z, 32);
    CHECK((same.coeffs - coh.coeffs).cwiseAbs().maxCoeff() < 1e-14);

    CHECK_THROWS_AS(cat_state(z, z, CatSign::minus, 32), DegenerateStateError);

    // Even cat keeps only even levels: direct expansion oracle
    const double a = 2.0 * kSqrt2;
    const FockVector even = cat_state(a, -a, CatSign::plus, 64);
    for (int n = 1; n < 64; n += 2) CHECK(std::abs(even.coeffs[n]) < 1e-10);
    CHECK(std::abs(even.norm_sq() - 1.0) < 1e-12);
}

TEST_CASE("displacement matrix") {
    const OperatorMatrix id = displacement_matrix(0.0, 16);
    CHECK((id.matrix - Matrix::Identity(16, 16)).cwiseAbs().maxCoeff() == 0.0);

    const Complex alpha(0.8, -0.3);
    const OperatorMatrix d = displacement_matrix(alpha, 32);
    CHECK(std::abs(d.matrix(1, 0) - alpha * std::exp(-0.5 * std::norm(alpha))) < 1e-14);

    // closed-form element check against the printed formula, m >= n
    const double x = std::norm(alpha);
    const Complex el = std::exp(0.5 * (std::lgamma(3.0) - std::lgamma(6.0))) *
                       std::pow(alpha, 3) * std::exp(-0.5 * x) * laguerre(2, 3, x);
    CHECK(std::abs(d.matrix(5, 2) - el) < 1e-14);

    SECTION("inverse on the top block") {
        const Complex a(1.0, 0.5);
        const int n = 64;
        const Matrix prod = displacement_matrix(a, n).matrix * displacement_matrix(-a, n).matrix;
        const Matrix err = prod.topLeftCorner(n / 2, n / 2) - Matrix::Identity(n / 2, n / 2);
        CHECK(err.cwiseAbs().maxCoeff() < 1e-8);
    }

    SECTION("Weyl composition") {
        const int n = 64;
        std::mt19937 rng(1234);
        std::uniform_real_distribution<double> amp(-1.4, 1.4);
        for (int trial = 0; trial < 4; ++trial) {
            const Complex a(amp(rng), amp(rng));
            const Complex b(amp(rng), amp(rng));
            const Complex phase = std::exp(Complex(0.0, std::imag(a * std::conj(b))));
            const Matrix lhs = displacement_matrix(a, n).matrix * displacement_matrix(b, n).matrix;
            const Matrix rhs = phase * displacement_matrix(a + b, n).matrix;
            CHECK((lhs.topLeftCorner(32, 32) - rhs.topLeftCorner(32, 32)).cwiseAbs().maxCoeff() <
                  1e-7);
        }
    }

    SECTION("ladder recurrence across rows") {
        // sqrt(m+1) D(m+1,n) = sqrt(n) D(m,n-1) + alpha D(m,n)
        const OperatorMatrix dm = displacement_matrix(alpha, 24);
        for (int m = 0; m < 12; ++m) {
            for (int n = 1; n < 12; ++n) {
                const Complex lhs = std::sqrt(m + 1.0) * dm.matrix(m + 1, n);
                const Complex rhs = std::sqrt(static_cast<double>(n)) * dm.matrix(m, n - 1) +
                                    alpha * dm.matrix(m, n);
                CHECK(std::abs(lhs - rhs) < 1e-12);
            }
        }
    }
}

TEST_CASE("quadrature operators") {
    const auto [q2, p2] = quadrature_operators(2);
    CHECK(std::abs(q2.matrix(0, 1) - 1.0 / kSqrt2) < 1e-15);
    CHECK(std::abs(q2.matrix(1, 0) - 1.0 / kSqrt2) < 1e-15);
    CHECK(std::abs(q2.matrix(0, 0)) == 0.0);

    const auto [q, p] = quadrature_operators(16);
    const Matrix comm = q.matrix * p.matrix - p.matrix * q.matrix;
    CHECK(std::abs(comm(0, 0) - Complex(0.0, 1.0)) < 1e-14);

    const Matrix h = 0.5 * (q.matrix * q.matrix + p.matrix * p.matrix);
    for (int n = 0; n < 15; ++n) CHECK(std::abs(h(n, n) - (n + 0.5)) < 1e-13);
}

TEST_CASE("number phase diagonal") {
    const OperatorMatrix id = number_phase_diag(0.0, 8);
    CHECK((id.matrix - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff() == 0.0);

    const OperatorMatrix par = number_phase_diag(M_PI, 8);
    for (int n = 0; n < 8; ++n)
        CHECK(std::abs(par.matrix(n, n) - Complex(n % 2 == 0 ? 1.0 : -1.0, 0.0)) < 1e-15);

    // complex division oracle: (2i-pi)/(2i+pi) = ((4-pi^2) + 4 pi i)/(4+pi^2)
    const double theta = std::atan2(4.0 * M_PI, 4.0 - M_PI * M_PI);
    const Complex expect((4.0 - M_PI * M_PI) / (4.0 + M_PI * M_PI),
                         4.0 * M_PI / (4.0 + M_PI * M_PI));
    const OperatorMatrix nd = number_phase_diag(theta, 4);
    CHECK(std::abs(nd.matrix(1, 1) - expect) < 1e-14);
    CHECK(std::abs(expect - Complex(-0.4231991217, 0.9060367009)) < 1e-9);
}

TEST_CASE("quadratic phase operator") {
    const OperatorMatrix id = quadratic_phase_operator(0.0, 0.0, 16);
    CHECK((id.matrix - Matrix::Identity(16, 16)).cwiseAbs().maxCoeff() < 1e-12);

    SECTION("cot = +/- pi reduces to -i parity") {
        const int n = 32;
        const OperatorMatrix om = quadratic_phase_operator(M_PI, -M_PI, n);
        for (int k = 0; k < n; ++k) {
            const Complex expect = Complex(0.0, -1.0) * (k % 2 == 0 ? 1.0 : -1.0);
            CHECK(std::abs(om.matrix(k, k) - expect) < 1e-6);
        }
        // applied to fock states (top half)
        for (int k = 0; k < n / 2; ++k) {
            Vector e = Vector::Zero(n);
            e[k] = 1.0;
            const Vector out = om.matrix * e;
            const Complex expect = Complex(0.0, -1.0) * (k % 2 == 0 ? 1.0 : -1.0);
            Vector want = Vector::Zero(n);
            want[k] = expect;
            CHECK((out - want).cwiseAbs().maxCoeff() < 1e-6);
        }
    }

    SECTION("unitarity of the exponential, cotA = 1, cotB = 2") {
        // Same-sign cotangents give a squeezing flow (real eigenvalues
        // +/- sqrt(cotA cotB)), so the exact operator moves the upper half
        // of the basis past any fixed truncation and a cropped matrix
        // cannot stay unitary there.  The anti-Hermitian argument pins the
        // exponential itself, which is what this checks.
        const int n = 48;
        const auto [q, p] = quadrature_operators(n);
        Matrix gen = Complex(0.0, 0.5 * 2.0) * (p.matrix * p.matrix) -
                     Complex(0.0, 0.5 * 1.0) * (q.matrix * q.matrix);
        const Matrix om = gen.exp();
        const Matrix prod = om.adjoint() * om;
        CHECK((prod.topLeftCorner(n / 2, n / 2) - Matrix::Identity(n / 2, n / 2)).norm() < 1e-6);
    }

    CHECK_THROWS_AS(quadratic_phase_operator(1.0, 1.0, 4), DimensionError);
}

TEST_CASE("density operators") {
    const DensityOperator d0 = density_from_pure(fock_state(0, 2));
    CHECK(d0.matrix(0, 0) == Complex(1.0, 0.0));
    CHECK(d0.matrix(1, 1) == Complex(0.0, 0.0));
    CHECK(std::abs(d0.matrix.trace() - 1.0) < 1e-14);

    const FockVector cat = cat_state(Complex(1.2, 0.0), Complex(-1.2, 0.0), CatSign::plus, 48);
    const DensityOperator dc = density_from_pure(cat);
    CHECK(std::abs(dc.matrix.trace() - 1.0) < 1e-12);
    CHECK((dc.matrix * dc.matrix - dc.matrix).cwiseAbs().maxCoeff() < 1e-10);  // purity

    SECTION("matrix factory guards") {
        Matrix bad = Matrix::Identity(4, 4) * 0.25;
        bad(0, 1) = Complex(0.1, 0.0);  // not Hermitian
        CHECK_THROWS_AS(DensityOperator::from_matrix(bad), ParameterError);

        Matrix wrong_trace = Matrix::Identity(4, 4);
        CHECK_THROWS_AS(DensityOperator::from_matrix(wrong_trace), ParameterError);

        Matrix ok = Matrix::Zero(4, 4);
        ok(0, 0) = 0.5;
        ok(1, 1) = 0.5;
        CHECK_NOTHROW(DensityOperator::from_matrix(ok));
    }
}

TEST_CASE("phase point amplitude is derived") {
    const PhasePoint pt{1.0, -2.0};
    CHECK(pt.alpha() == Complex(1.0 / kSqrt2, -2.0 / kSqrt2));
}
