#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "oam/beam.hpp"
#include "oam/errors.hpp"
#include "oam/log.hpp"
#include "oam/propagate.hpp"

using namespace oam;

namespace {

struct NodeSample {
    std::vector<PolarPoint> points;
    std::vector<cplx> spectral;
};

// Random grid nodes with radius <= max_r, paired with the spectral field there.
NodeSample pick_nodes(const ComplexField& prop, int count, double max_r, std::uint64_t seed) {
    NodeSample s;
    Rng rng(seed);
    const auto& g = prop.grid;
    while (static_cast<int>(s.points.size()) < count) {
        const int r = static_cast<int>(rng.below(g.n));
        const int c = static_cast<int>(rng.below(g.n));
        const double x = g.coord(c), y = g.coord(r);
        const double rr = std::hypot(x, y);
        if (rr > max_r || rr == 0.0) continue;
        s.points.push_back({rr, std::atan2(y, x)});
        s.spectral.push_back(prop.at(r, c));
    }
    return s;
}

double rel_rms(const std::vector<cplx>& a, const std::vector<cplx>& ref) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::norm(a[i] - ref[i]);
        den += std::norm(ref[i]);
    }
    return std::sqrt(num / den);
}

}  // namespace

TEST_SUITE("propagate") {

TEST_CASE("z = 0 is the identity, bit for bit") {
    const auto f = testutil::random_field(make_grid(64, 0.01), 3);
    CHECK(propagate_spectral(f, 0.0).values == f.values);
    CHECK(propagate_spectral(f, 0.0, false).values == f.values);
}

TEST_CASE("negative z is rejected") {
    const auto f = testutil::random_field(make_grid(16, 0.01), 3);
    CHECK_THROWS_AS(propagate_spectral(f, -0.1), ValidationError);
    CHECK_THROWS_AS(propagate(f, {-1.0, PropagationConfig::Method::spectral, true}), ValidationError);
    CHECK_THROWS_AS(propagate(f, {0.5, PropagationConfig::Method::quadrature, true}), ValidationError);
    const PolarPoint p{0.0, 0.0};
    CHECK_THROWS_AS(propagate_quadrature(f, 0.0, {&p, 1}), ValidationError);
    const PolarPoint far{0.02, 0.0};
    CHECK_THROWS_AS(propagate_quadrature(f, 0.5, {&far, 1}), ValidationError);
}

TEST_CASE("sampling criterion on the default grids") {
    CHECK(transfer_function_sampled(make_grid(1024, 0.026), kHeNeWavelength, 1.0));
    CHECK(!transfer_function_sampled(make_grid(2048, 0.026), kHeNeWavelength, 1.0));
    CHECK(transfer_function_sampled(make_grid(2048, 0.026), kHeNeWavelength, 0.5));
}

TEST_CASE("unbanded spectral propagation conserves power") {
    set_warnings_enabled(false);
    Rng rng(17);
    for (int i = 0; i < 5; ++i) {
        const auto f = testutil::random_field(make_grid(128, 0.01), 100 + i);
        const double z = rng.uniform(0.01, 3.0);
        const auto h = propagate_spectral(f, z, false);
        CHECK(testutil::rel_err(power(h), power(f)) < 1e-10);
    }
    set_warnings_enabled(true);
}

TEST_CASE("semigroup property without band limit") {
    const auto g = make_grid(256, 0.026);
    const auto f = source_vortex({2, 2e-3, kHeNeWavelength}, g);
    const auto a = propagate_spectral(propagate_spectral(f, 0.3, false), 0.45, false);
    const auto b = propagate_spectral(f, 0.75, false);
    CHECK(testutil::rel_l2(a, b) < 1e-8);
}

TEST_CASE("Gaussian waist after 1 m") {
    const auto f = source_vortex({0, 2e-3, kHeNeWavelength}, make_grid(1024, 0.026));
    const double w = second_moment_waist(intensity(propagate_spectral(f, 1.0)));
    CHECK(testutil::rel_err(w, 2.0025e-3) < 1e-3);
}

TEST_CASE("quadrature is linear") {
    const auto g = make_grid(64, 0.01);
    const auto f = testutil::random_field(g, 8);
    ComplexField f3 = f;
    const cplx alpha(2.5, -1.25);
    for (auto& v : f3.values) v *= alpha;
    const std::vector<PolarPoint> pts = {{1e-3, 0.2}, {2e-3, -1.0}, {0.0, 0.0}};
    const auto a = propagate_quadrature(f, 0.5, pts);
    const auto b = propagate_quadrature(f3, 0.5, pts);
    for (std::size_t i = 0; i < pts.size(); ++i) CHECK(std::abs(b[i] - alpha * a[i]) <= 1e-13 * std::abs(b[i]));
}

TEST_CASE("quadrature of a Gaussian on axis matches the closed form") {
    const BeamParams p{0, 2e-3, kHeNeWavelength};
    const auto f = source_vortex(p, make_grid(1024, 0.026));
    const PolarPoint axis{0.0, 0.0};
    const auto q = propagate_quadrature(f, 1.0, {&axis, 1});
    const auto ref = gaussian_propagated(p, 0.0, 1.0);
    CHECK(std::abs(q[0] - ref) / std::abs(ref) < 1e-4);
}

TEST_CASE("quadrature and spectral agree for vortices at 0.40 m") {
    const auto g = default_grid();
    for (int ell = 1; ell <= 5; ++ell) {
        const auto src = source_vortex({ell, 2e-3, kHeNeWavelength}, g);
        const auto s = pick_nodes(propagate_spectral(src, 0.40), 25, 2.2e-3, 900 + ell);
        const auto q = propagate_quadrature(src, 0.40, s.points);
        CHECK(rel_rms(s.spectral, q) < 1e-3);
    }
}

// All 65 (ell, z) cells at 256 samples over 26 mm.
TEST_CASE("oracle agreement over the label grid at 256 samples") {
    const auto g = make_grid(256, 0.026);
    int failures = 0;
    double worst = 0.0;
    for (int ell = 1; ell <= 5; ++ell) {
        const auto src = source_vortex({ell, 2e-3, kHeNeWavelength}, g);
        for (int s = 0; s <= 12; ++s) {
            const double z = 0.40 + 0.05 * s;
            const auto n = pick_nodes(propagate_spectral(src, z), 25, 2.2e-3, 1000 + 13 * ell + s);
            const double err = rel_rms(n.spectral, propagate_quadrature(src, z, n.points));
            worst = std::max(worst, err);
            if (err >= 1e-3) ++failures;
        }
    }
    INFO("worst relative RMS " << worst);
    CHECK(failures == 0);
}

}
