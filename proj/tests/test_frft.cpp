#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "qdf/frft.hpp"

using namespace qdf;
using frft::FrFTOrder;
using frft::SampledSignal;
using frft::SignalGrid;

namespace {
const SignalGrid kGrid = SignalGrid::symmetric(8.0, 512);
}

TEST_CASE("order guard rejects singular omega") {
    CHECK_THROWS_AS(FrFTOrder(0.0), OrderError);
    CHECK_THROWS_AS(FrFTOrder(M_PI), OrderError);
    CHECK_THROWS_AS(FrFTOrder(1e-7), OrderError);
    CHECK_NOTHROW(FrFTOrder(1e-3));
}

TEST_CASE("kernel values") {
    const FrFTOrder quarter(M_PI / 2.0);
    // cot = 0, csc = 1: the plain Fourier kernel e^{-ixx'}/sqrt(2 pi)
    for (double x : {-1.3, 0.0, 2.1}) {
        for (double xp : {-0.4, 1.7}) {
            const Complex k = frft::kernel(x, xp, quarter);
            CHECK(std::abs(std::abs(k) - 1.0 / std::sqrt(2.0 * M_PI)) < 1e-14);
            const Complex expect = std::polar(1.0, -x * xp) / std::sqrt(2.0 * M_PI);
            CHECK(std::abs(k - expect) < 1e-14);
        }
    }

    // chirps are unimodular: |K| independent of x, x'
    const FrFTOrder om(0.8);
    const double mag = std::abs(frft::kernel(0.0, 0.0, om));
    for (double x : {-3.0, 1.0, 5.5})
        CHECK(std::abs(std::abs(frft::kernel(x, 2.0 * x - 1.0, om)) - mag) < 1e-13);

    // direct substitution at omega = pi/4
    const double w = M_PI / 4.0;
    const Complex pref = 1.0 / std::sqrt(Complex(0.0, 2.0 * M_PI)) *
                         std::sqrt(std::exp(Complex(0.0, w)) / std::sin(w));
    CHECK(std::abs(frft::kernel(0.0, 0.0, FrFTOrder(w)) - pref) < 1e-15);
}

TEST_CASE("hermite gauss fixtures") {
    const SampledSignal h0 = frft::hermite_gauss(0, kGrid);
    const int c = kGrid.count / 2;
    // grid is even-count so the closest node sits half a step off centre
    const double x0 = kGrid.x_at(c);
    CHECK(std::abs(h0.samples[c] - std::pow(M_PI, -0.25) * std::exp(-0.5 * x0 * x0)) < 1e-12);

    const SignalGrid odd = SignalGrid::symmetric(8.0, 513);
    const SampledSignal h0c = frft::hermite_gauss(0, odd);
    CHECK(std::abs(h0c.samples[256] - std::pow(M_PI, -0.25)) < 1e-14);
    const SampledSignal h1 = frft::hermite_gauss(1, odd);
    CHECK(std::abs(h1.samples[256]) == 0.0);

    // discrete L2 norm and orthogonality
    const SampledSignal h2 = frft::hermite_gauss(2, kGrid);
    const SampledSignal h3 = frft::hermite_gauss(3, kGrid);
    Complex dot = 0.0, norm2 = 0.0;
    for (int i = 0; i < kGrid.count; ++i) {
        const double w = (i == 0 || i == kGrid.count - 1) ? 0.5 * kGrid.step : kGrid.step;
        dot += w * std::conj(h2.samples[i]) * h3.samples[i];
        norm2 += w * std::norm(h2.samples[i]);
    }
    CHECK(std::abs(dot) < 1e-8);
    CHECK(std::abs(norm2 - 1.0) < 1e-8);

    CHECK_THROWS_AS(frft::hermite_gauss(21, kGrid), RangeError);
}

TEST_CASE("eigenrelation for low orders") {
    const FrFTOrder om(M_PI / 3.0);
    const Complex phi0 = frft::measured_phase(om, kGrid);
    CHECK(std::abs(std::abs(phi0) - 1.0) < 1e-9);

    const SampledSignal h0 = frft::hermite_gauss(0, kGrid);
    const SampledSignal t0 = frft::apply(h0, om);
    CHECK((t0.samples - phi0 * h0.samples).cwiseAbs().maxCoeff() < 1e-6);

    for (int n = 1; n <= 4; ++n) {
        const SampledSignal hn = frft::hermite_gauss(n, kGrid);
        const SampledSignal tn = frft::apply(hn, om);
        const Complex expect = phi0 * std::polar(1.0, -n * om.omega);
        CHECK((tn.samples - expect * hn.samples).cwiseAbs().maxCoeff() < 1e-5);
    }
}

TEST_CASE("roundtrip inverse") {
    const SampledSignal s = frft::hermite_gauss(3, kGrid);
    const SampledSignal rt = frft::apply(frft::apply(s, FrFTOrder(0.9)), FrFTOrder(-0.9));
    CHECK((rt.samples - s.samples).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("delta roundtrip") {
    CHECK(frft::delta_roundtrip_check(0.0, FrFTOrder(M_PI / 3.0), kGrid) < 1e-4);
    CHECK(frft::delta_roundtrip_check(2.0, FrFTOrder(M_PI / 2.0), kGrid) < 1e-4);
    CHECK_THROWS_AS(frft::delta_roundtrip_check(0.0, FrFTOrder(1e-8), kGrid), OrderError);
    CHECK_THROWS_AS(frft::delta_roundtrip_check(99.0, FrFTOrder(1.0), kGrid), ParameterError);
}

TEST_CASE("order additivity up to a constant phase") {
    SampledSignal s = frft::hermite_gauss(2, kGrid);
    for (int i = 0; i < kGrid.count; ++i)
        s.samples[i] += 0.3 * frft::hermite_gauss(0, kGrid).samples[i];

    const SampledSignal two_step = frft::apply(frft::apply(s, FrFTOrder(0.7)), FrFTOrder(0.9));
    const SampledSignal one_step = frft::apply(s, FrFTOrder(1.6));
    Complex num = 0.0, den = 0.0;
    for (int i = 0; i < kGrid.count; ++i) {
        num += std::conj(one_step.samples[i]) * two_step.samples[i];
        den += std::norm(one_step.samples[i]);
    }
    const Complex phase = num / den;
    CHECK(std::abs(std::abs(phase) - 1.0) < 1e-6);
    CHECK((two_step.samples - phase * one_step.samples).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("discrete Parseval") {
    const SampledSignal s = frft::hermite_gauss(4, kGrid);
    const SampledSignal t = frft::apply(s, FrFTOrder(1.1));
    double in = 0.0, out = 0.0;
    for (int i = 0; i < kGrid.count; ++i) {
        const double w = (i == 0 || i == kGrid.count - 1) ? 0.5 * kGrid.step : kGrid.step;
        in += w * std::norm(s.samples[i]);
        out += w * std::norm(t.samples[i]);
    }
    CHECK(std::abs(in - out) < 1e-6);
}

TEST_CASE("pi/2 matches a direct Fourier quadrature") {
    const SampledSignal s = frft::hermite_gauss(2, kGrid);
    const SampledSignal t = frft::apply(s, FrFTOrder(M_PI / 2.0));
    for (int i = 0; i < kGrid.count; i += 37) {
        Complex acc = 0.0;
        for (int j = 0; j < kGrid.count; ++j) {
            const double w = (j == 0 || j == kGrid.count - 1) ? 0.5 * kGrid.step : kGrid.step;
            acc += w * std::polar(1.0, -kGrid.x_at(i) * kGrid.x_at(j)) * s.samples[j];
        }
        acc /= std::sqrt(2.0 * M_PI);
        CHECK(std::abs(t.samples[i] - acc) < 1e-8);
    }
}

TEST_CASE("edge decay warning") {
    SampledSignal flat;
    flat.grid = SignalGrid::symmetric(4.0, 64);
    flat.samples = Vector::Ones(64);
    std::vector<std::string> warnings;
    frft::apply(flat, FrFTOrder(1.0), &warnings);
    REQUIRE_FALSE(warnings.empty());
}

TEST_CASE("signal grid validation") {
    CHECK_THROWS_AS(SignalGrid::symmetric(8.0, 4), ParameterError);
    SignalGrid skew{0.0, 0.1, 64};
    CHECK_THROWS_AS(skew.validate(), ParameterError);
}
