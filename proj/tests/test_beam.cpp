#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "oam/beam.hpp"
#include "oam/errors.hpp"
#include "oam/special.hpp"
#include "oracle_values.hpp"

using namespace oam;
using std::numbers::pi;

TEST_SUITE("beamgen") {

TEST_CASE("source_vortex values") {
    const auto g = make_grid(256, 0.026);
    const auto s0 = source_vortex({0, 2e-3, kHeNeWavelength}, g);
    CHECK(s0.at(128, 128).real() == doctest::Approx(std::sqrt(2.0 / pi)).epsilon(1e-15));
    for (const auto& v : s0.values) {
        CHECK(v.imag() == 0.0);
        CHECK(v.real() > 0.0);
    }
    const auto s2 = source_vortex({2, 2e-3, kHeNeWavelength}, g);
    CHECK(std::arg(s2.at(128, 140)) == 0.0);
    CHECK(s2.at(128, 128) == std::complex<double>(std::sqrt(2.0 / pi), 0.0));
    // Quarter turn counterclockwise: phase -2 * pi/2.
    CHECK(std::abs(std::abs(std::arg(s2.at(140, 128))) - pi) < 1e-12);
}

TEST_CASE("source power is w0^2 on the default grid") {
    const auto f = source_vortex({3, 2e-3, kHeNeWavelength}, default_grid());
    CHECK(testutil::rel_err(power(f), 4e-6) < 5e-3);
}

TEST_CASE("misalignment moves the envelope, not the singularity") {
    const auto g = make_grid(128, 0.026);
    const auto f = source_vortex({1, 2e-3, kHeNeWavelength}, g, 0.2e-3, 0.0);
    CHECK(std::arg(f.at(64, 100)) == 0.0);
    CHECK(std::abs(f.at(64, 65)) > std::abs(f.at(64, 63)));
}

TEST_CASE("apply_phase examples") {
    const auto g = make_grid(32, 0.01);
    const auto f = testutil::random_field(g, 1);
    std::vector<double> zero(g.size(), 0.0), flip(g.size(), pi), any(g.size());
    Rng rng(2);
    for (auto& p : any) p = rng.uniform(-20.0, 20.0);
    CHECK(apply_phase(f, g, zero).values == f.values);
    const auto neg = apply_phase(f, g, flip);
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        CHECK(std::abs(neg.values[i] + f.values[i]) <= 1e-15 * std::abs(f.values[i]));
    }
    const auto a = apply_phase(f, g, any);
    for (std::size_t i = 0; i < f.values.size(); ++i)
        CHECK(std::abs(a.values[i]) == doctest::Approx(std::abs(f.values[i])).epsilon(1e-15));
    CHECK_THROWS_AS(apply_phase(f, make_grid(64, 0.01), std::vector<double>(64 * 64)), ValidationError);
}

TEST_CASE("hygg_field vanishes on axis for ell >= 1") {
    for (int ell = 1; ell <= 5; ++ell) {
        CHECK(hygg_value({ell, 2e-3, kHeNeWavelength}, 0.0, 0.0, 0.7) == cplx(0.0, 0.0));
        const auto f = hygg_field({ell, 2e-3, kHeNeWavelength}, make_grid(64, 0.026), 0.7);
        CHECK(f.at(32, 32) == cplx(0.0, 0.0));
    }
    CHECK(std::abs(hygg_value({0, 2e-3, kHeNeWavelength}, 0.0, 0.0, 0.7)) > 0.0);
}

TEST_CASE("hygg_value matches the high-precision oracle") {
    for (const auto& c : oracle::kHygg) {
        const auto v = hygg_value({c.ell, 2e-3, kHeNeWavelength}, c.r1, c.theta1, c.z);
        CHECK(std::abs(v - c.value) / std::abs(c.value) < 1e-8);
    }
}

TEST_CASE("ell = 0 reduces to the propagated Gaussian") {
    const BeamParams p{0, 2e-3, kHeNeWavelength};
    const auto g = make_grid(256, 0.026);
    for (double z : {0.4, 1.0}) {
        const auto f = hygg_field(p, g, z);
        ComplexField ref(g, p.wavelength);
        for (int r = 0; r < g.n; ++r)
            for (int c = 0; c < g.n; ++c)
                ref.at(r, c) = gaussian_propagated(p, std::hypot(g.coord(r), g.coord(c)), z);
        CHECK(testutil::rel_l2(f, ref) < 1e-8);
    }
}

TEST_CASE("Gaussian beam law at 1 m") {
    const double zr = pi * 4e-6 / kHeNeWavelength;
    CHECK(zr == doctest::Approx(oracle::kRayleigh).epsilon(1e-12));
    CHECK(gaussian_waist_at(2e-3, kHeNeWavelength, 1.0) ==
          doctest::Approx(oracle::kWaistAt1m).epsilon(1e-12));
    // 1/e^2 radius of |E2| from the analytic field
    const BeamParams p{0, 2e-3, kHeNeWavelength};
    const double w = gaussian_waist_at(2e-3, kHeNeWavelength, 1.0);
    const double ratio = std::norm(gaussian_propagated(p, w, 1.0)) / std::norm(gaussian_propagated(p, 0.0, 1.0));
    CHECK(ratio == doctest::Approx(std::exp(-2.0)).epsilon(1e-10));
}

TEST_CASE("|hygg| does not depend on theta1") {
    for (int ell = 1; ell <= 5; ++ell) {
        const BeamParams p{ell, 2e-3, kHeNeWavelength};
        for (double r1 : {0.3e-3, 0.8e-3, 1.7e-3}) {
            const int m = 64;
            std::vector<double> v(m);
            for (int i = 0; i < m; ++i) v[i] = std::norm(hygg_value(p, r1, 2.0 * pi * i / m - pi, 0.55));
            double mean = 0.0, ss = 0.0;
            for (double x : v) mean += x / m;
            for (double x : v) ss += (x - mean) * (x - mean);
            const double sd = std::sqrt(ss / m);
            CHECK(sd / mean < 1e-10);
        }
    }
}

TEST_CASE("ring radius of the analytic field grows with z and ell") {
    const auto g = make_grid(1024, 0.026);
    std::vector<std::vector<double>> radius(5);
    for (int ell = 1; ell <= 5; ++ell)
        for (int s = 0; s <= 12; ++s)
            radius[ell - 1].push_back(ring_peak_radius(intensity(hygg_field({ell, 2e-3, kHeNeWavelength}, g, 0.40 + 0.05 * s))));
    for (int ell = 1; ell <= 5; ++ell)
        for (int s = 1; s <= 12; ++s) CHECK(radius[ell - 1][s] >= radius[ell - 1][s - 1]);
    for (int s = 0; s <= 12; ++s)
        for (int ell = 2; ell <= 5; ++ell) CHECK(radius[ell - 1][s] >= radius[ell - 2][s]);
}

TEST_CASE("hygg rejects z <= 0") {
    const BeamParams p{1, 2e-3, kHeNeWavelength};
    CHECK_THROWS_AS(hygg_field(p, make_grid(16, 0.026), 0.0), ValidationError);
    CHECK_THROWS_AS(hygg_value(p, 1e-3, 0.0, -0.1), ValidationError);
    CHECK_THROWS_AS(BeamParams({13, 2e-3, kHeNeWavelength}).validate(), ValidationError);
    CHECK_THROWS_AS(BeamParams({1, 0.0, kHeNeWavelength}).validate(), ValidationError);
    CHECK(hygg_terms(p, 1e-3, 0.5).eps1.real() > 0.0);
}

TEST_CASE("kummer_1f1 identities and oracle values") {
    CHECK(kummer_1f1(2.5, 4.0, 0.0) == cplx(1.0, 0.0));
    CHECK(kummer_1f1(1.0, 1.0, 1.0).real() == doctest::Approx(std::exp(1.0)).epsilon(1e-15));
    CHECK(kummer_1f1(1.0, 2.0, 1.0).real() == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-15));
    for (const auto& c : oracle::kKummer) {
        const auto v = kummer_1f1(c.a, c.b, c.x);
        CHECK(std::abs(v - c.value) / std::abs(c.value) < 1e-10);
    }
    CHECK_THROWS_AS(kummer_1f1(1.0, -2.0, 0.5), ValidationError);
    CHECK_THROWS_AS(kummer_1f1(1.0, 0.0, 0.5), ValidationError);
}

TEST_CASE("kummer_1f1 contiguous relation on the operating range") {
    Rng rng(44);
    for (int i = 0; i < 200; ++i) {
        const int ell = static_cast<int>(rng.below(6));
        const double a = (ell + 2) / 2.0, b = ell + 1.0;
        // -b1^2/eps1 over r1 <= 2.2 mm, z in 0.4..1 m
        const cplx x(-rng.uniform(0.0, 30.0), -rng.uniform(0.0, 3000.0));
        const cplx f = kummer_1f1(a, b, x);
        const cplx lhs = b * f - b * kummer_1f1(a - 1.0, b, x) - x * kummer_1f1(a, b + 1.0, x);
        const double scale = std::max({std::abs(b * f), std::abs(x * kummer_1f1(a, b + 1.0, x))});
        CHECK(std::abs(lhs) / scale < 1e-10);
    }
}

TEST_CASE("log_gamma") {
    CHECK(std::abs(log_gamma(1.0)) < 1e-15);
    CHECK(std::abs(log_gamma(0.5) - oracle::kLogGammaHalf) < 1e-12 * oracle::kLogGammaHalf);
    CHECK(std::abs(log_gamma(5.0) - oracle::kLogGamma5) < 1e-12 * oracle::kLogGamma5);
    CHECK(std::abs(log_gamma(7.5) - oracle::kLogGamma7_5) < 1e-12 * oracle::kLogGamma7_5);
    CHECK_THROWS_AS(log_gamma(0.0), ValidationError);
    CHECK_THROWS_AS(log_gamma(-1.5), ValidationError);
}

}
