#include "oam/verify.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "oam/beam.hpp"
#include "oam/classifier.hpp"
#include "oam/dataset.hpp"
#include "oam/errors.hpp"
#include "oam/propagate.hpp"
#include "oam/rng.hpp"
#include "oam/special.hpp"
#include "oam/turbulence.hpp"

namespace oam {

namespace {

double rel_l2(const ComplexField& a, const ComplexField& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        num += std::norm(a.values[i] - b.values[i]);
        den += std::norm(b.values[i]);
    }
    return std::sqrt(num / den);
}

ComplexField random_field(const GridSpec& g, std::uint64_t seed) {
    Rng rng(seed);
    ComplexField f(g, kHeNeWavelength);
    for (auto& v : f.values) v = {rng.normal(), rng.normal()};
    return f;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

using Check = std::function<CheckResult()>;

CheckResult bounded(std::string name, double value, double limit) {
    return {std::move(name), value <= limit, "value " + fmt(value) + " (limit " + fmt(limit) + ")"};
}

std::vector<Check> quick_checks() {
    std::vector<Check> checks;
    checks.push_back([] {
        const double e = std::abs(kummer_1f1(1.0, 1.0, 1.0) - std::exp(1.0)) / std::exp(1.0);
        return bounded("kummer 1F1(1;1;1) = e", e, 1e-14);
    });
    checks.push_back([] {
        double worst = 0.0;
        Rng rng(11);
        for (int i = 0; i < 50; ++i) {
            const double a = rng.uniform(0.5, 7.5), b = rng.uniform(1.0, 13.0);
            const std::complex<double> x(-rng.uniform(0.0, 60.0), -rng.uniform(0.0, 60.0));
            const auto f = kummer_1f1(a, b, x);
            const auto r = b * f - b * kummer_1f1(a - 1.0, b, x) - x * kummer_1f1(a, b + 1.0, x);
            worst = std::max(worst, std::abs(r) / (std::abs(b * f) + 1e-300));
        }
        return bounded("kummer contiguous relation", worst, 1e-10);
    });
    checks.push_back([] {
        const double e = std::abs(log_gamma(0.5) - 0.5 * std::log(std::numbers::pi));
        return bounded("log_gamma(0.5)", e, 1e-12);
    });
    checks.push_back([] {
        const auto g = make_grid(512, 0.026);
        const BeamParams p{0, kDefaultWaist, kHeNeWavelength};
        const auto out = propagate_spectral(source_vortex(p, g), 1.0);
        const double w = second_moment_waist(intensity(out));
        const double expect = gaussian_waist_at(kDefaultWaist, kHeNeWavelength, 1.0);
        return bounded("gaussian waist at z = 1 m", std::abs(w / expect - 1.0), 1e-3);
    });
    checks.push_back([] {
        const auto g = make_grid(64, 0.026);
        const auto f = random_field(g, 3);
        const double e = std::abs(power(propagate_spectral(f, 0.7, false)) / power(f) - 1.0);
        return bounded("spectral unitarity", e, 1e-10);
    });
    checks.push_back([] {
        const auto g = make_grid(64, 0.026);
        const auto f = random_field(g, 4);
        const auto two = propagate_spectral(propagate_spectral(f, 0.3, false), 0.45, false);
        return bounded("spectral semigroup", rel_l2(two, propagate_spectral(f, 0.75, false)), 1e-8);
    });
    checks.push_back([] {
        const auto g = make_grid(64, 0.026);
        const TurbulenceParams tp{5e-8, 1.0, kDefaultKappa0, kDefaultKappaM, 99};
        const auto a = generate_screen(g, tp, kHeNeWavelength);
        const auto b = generate_screen(g, tp, kHeNeWavelength);
        return CheckResult{"screen determinism", a.values == b.values, ""};
    });
    checks.push_back([] {
        const auto s = default_label_space();
        const bool ok = class_index(s, 1, 0.40) == 0 && class_index(s, 5, 1.00) == 64 &&
                        class_index(s, 3, 0.70) == 32 && s.class_count() == 65;
        return CheckResult{"class index grid", ok, ""};
    });
    checks.push_back([] {
        ClassifierModel<double> m(65, 8, 0.5);
        Tensor<double> x({1, 1, 8, 8});
        const auto fwd = forward(m, x, Mode::eval, 0);
        const double loss = cross_entropy(fwd.probs, {7});
        return bounded("untrained loss = ln 65", std::abs(loss - std::log(65.0)), 1e-12);
    });
    checks.push_back([] {
        // Central differences on a few parameters of every tensor.
        ClassifierModel<double> m(9, 8, 0.5);
        m.init_he_uniform(5);
        Rng rng(6);
        Tensor<double> x({2, 1, 8, 8});
        for (double& v : x.values) v = rng.uniform();
        const std::vector<int> labels = {2, 7};
        const auto fwd = forward(m, x, Mode::train, 17);
        const auto grads = backward(m, fwd.cache, fwd.probs, labels);
        double worst = 0.0;
        for (std::size_t p = 0; p < m.params().size(); ++p) {
            for (int trial = 0; trial < 3; ++trial) {
                const std::size_t k = rng.below(m.params()[p].size());
                double& w = m.params()[p].values[k];
                const double w0 = w;
                w = w0 + 1e-5;
                const double lp = cross_entropy(forward(m, x, Mode::train, 17).probs, labels);
                w = w0 - 1e-5;
                const double lm = cross_entropy(forward(m, x, Mode::train, 17).probs, labels);
                w = w0;
                const double fd = (lp - lm) / 2e-5;
                const double g = grads[p].values[k];
                worst = std::max(worst, std::abs(g - fd) / std::max({std::abs(g), std::abs(fd), 1e-6}));
            }
        }
        return bounded("gradient finite differences", worst, 1e-4);
    });
    return checks;
}

std::vector<Check> full_checks() {
    std::vector<Check> checks;
    checks.push_back([] {
        const auto g = default_grid();
        double worst = 0.0;
        for (int ell : {1, 5}) {
            const BeamParams p{ell, kDefaultWaist, kHeNeWavelength};
            const auto num = propagate_spectral(source_vortex(p, g), 0.7);
            worst = std::max(worst, rel_l2(num, hygg_field(p, g, 0.7)));
        }
        return bounded("analytic/spectral closure at z = 0.70 m", worst, 2e-2);
    });
    checks.push_back([] {
        const auto g = default_grid();
        const auto a = count_side_lobes(cross_section(intensity(hygg_field({3, kDefaultWaist, kHeNeWavelength}, g, 0.70))));
        const auto b = count_side_lobes(cross_section(intensity(hygg_field({4, kDefaultWaist, kHeNeWavelength}, g, 0.50))));
        const bool ok = a.left == 4 && a.right == 4 && b.left == 6 && b.right == 6;
        return CheckResult{"side lobes (3, 0.70 m) and (4, 0.50 m)", ok,
                           std::to_string(a.left) + "/" + std::to_string(a.right) + ", " +
                               std::to_string(b.left) + "/" + std::to_string(b.right)};
    });
    return checks;
}

}  // namespace

std::vector<CheckResult> run_verify(const std::string& suite) {
    require(suite == "quick" || suite == "full", "verify: suite must be quick or full");
    auto checks = quick_checks();
    if (suite == "full") {
        auto more = full_checks();
        checks.insert(checks.end(), more.begin(), more.end());
    }
    std::vector<CheckResult> out;
    for (const auto& c : checks) {
        try {
            out.push_back(c());
        } catch (const std::exception& e) {
            out.push_back({"(exception)", false, e.what()});
        }
    }
    return out;
}

}  // namespace oam
