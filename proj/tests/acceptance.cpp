// End-to-end acceptance checks. Usage: oam_acceptance <criterion 1..10> [work dir]
// Prints one "criterion N: PASS|FAIL ..." line and exits nonzero on failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

#include "oam/beam.hpp"
#include "oam/classifier.hpp"
#include "oam/dataset.hpp"
#include "oam/log.hpp"
#include "oam/propagate.hpp"
#include "oam/rng.hpp"
#include "oam/training.hpp"
#include "oam/turbulence.hpp"

using namespace oam;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

fs::path g_work;

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double rel_l2(const ComplexField& a, const ComplexField& ref) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        num += std::norm(a.values[i] - ref.values[i]);
        den += std::norm(ref.values[i]);
    }
    return std::sqrt(num / den);
}

// Closure of the analytic field against spectral propagation of the source,
// plus quadrature at 25 random grid nodes inside the feature zone.
Outcome closure() {
    const auto g = default_grid();
    double worst_l2 = 0.0, worst_q = 0.0;
    bool ok = true;
    std::ostringstream os;
    for (int ell = 1; ell <= 5; ++ell) {
        const BeamParams p{ell, kDefaultWaist, kHeNeWavelength};
        const auto src = source_vortex(p, g);
        for (double z : {0.40, 0.70, 1.00}) {
            const auto num = propagate_spectral(src, z);
            const double e = rel_l2(num, hygg_field(p, g, z));

            Rng rng(derive_seed(2024, {static_cast<std::uint64_t>(ell), static_cast<std::uint64_t>(z * 100)}));
            std::vector<PolarPoint> pts;
            std::vector<cplx> ref;
            while (pts.size() < 25) {
                const int r = static_cast<int>(rng.below(g.n)), c = static_cast<int>(rng.below(g.n));
                const double x = g.coord(c), y = g.coord(r), rr = std::hypot(x, y);
                if (rr == 0.0 || rr > 2.2e-3) continue;
                pts.push_back({rr, std::atan2(y, x)});
                ref.push_back(num.at(r, c));
            }
            const auto q = propagate_quadrature(src, z, pts);
            double n2 = 0.0, d2 = 0.0;
            for (std::size_t i = 0; i < q.size(); ++i) {
                n2 += std::norm(ref[i] - q[i]);
                d2 += std::norm(q[i]);
            }
            const double eq = std::sqrt(n2 / d2);
            worst_l2 = std::max(worst_l2, e);
            worst_q = std::max(worst_q, eq);
            if (e > 2e-2 || eq > 1e-3) {
                ok = false;
                os << " [ell=" << ell << " z=" << z << " l2=" << e << " quad=" << eq << "]";
            }
        }
    }
    return {ok, "worst rel L2 " + fmt("%.3e", worst_l2) + " (<= 2e-2), worst quadrature rel RMS " +
                    fmt("%.3e", worst_q) + " (<= 1e-3)" + os.str()};
}

Outcome gaussian_law() {
    const auto f = source_vortex({0, kDefaultWaist, kHeNeWavelength}, default_grid());
    const double w = second_moment_waist(intensity(propagate_spectral(f, 1.0)));
    const double expect = gaussian_waist_at(kDefaultWaist, kHeNeWavelength, 1.0);
    const double err = std::abs(w - expect) / expect;
    return {err <= 1e-3, "waist " + fmt("%.6e", w) + " m vs " + fmt("%.6e", expect) + " m, rel " + fmt("%.2e", err)};
}

Outcome unitarity() {
    set_warnings_enabled(false);
    const auto g = default_grid();
    Rng rng(77);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        ComplexField f(g, kHeNeWavelength);
        for (auto& v : f.values) v = {rng.normal(), rng.normal()};
        const double z = rng.uniform(0.0, 2.0);
        const double p0 = power(f);
        worst = std::max(worst, std::abs(power(propagate_spectral(f, z, false)) - p0) / p0);
    }
    set_warnings_enabled(true);
    return {worst <= 1e-10, "worst relative power change " + fmt("%.2e", worst) + " over 20 fields"};
}

Outcome side_lobes() {
    const auto g = default_grid();
    struct Case { int ell; double z; int expect; };
    bool ok = true;
    std::ostringstream os;
    for (const Case c : {Case{3, 0.70, 4}, Case{4, 0.50, 6}}) {
        const BeamParams p{c.ell, kDefaultWaist, kHeNeWavelength};
        const auto a = count_side_lobes(cross_section(intensity(hygg_field(p, g, c.z))));
        const auto s = count_side_lobes(cross_section(intensity(propagate_spectral(source_vortex(p, g), c.z))));
        const bool this_ok = a.left == c.expect && a.right == c.expect && s.left == c.expect && s.right == c.expect;
        ok = ok && this_ok;
        os << " ell=" << c.ell << " z=" << c.z << ": analytic " << a.left << "/" << a.right << ", spectral "
           << s.left << "/" << s.right << " (expect " << c.expect << ")";
    }
    return {ok, os.str()};
}

Outcome monotonicity() {
    const auto g = default_grid();
    double radius[5][13];
    for (int ell = 1; ell <= 5; ++ell) {
        const auto src = source_vortex({ell, kDefaultWaist, kHeNeWavelength}, g);
        for (int s = 0; s <= 12; ++s) radius[ell - 1][s] = ring_peak_radius(intensity(propagate_spectral(src, 0.40 + 0.05 * s)));
    }
    int violations = 0;
    std::ostringstream os;
    for (int ell = 0; ell < 5; ++ell)
        for (int s = 1; s <= 12; ++s)
            if (!(radius[ell][s] > radius[ell][s - 1])) {
                ++violations;
                os << " [ell=" << ell + 1 << " z step " << s << "]";
            }
    for (int s = 0; s <= 12; ++s)
        for (int ell = 1; ell < 5; ++ell)
            if (!(radius[ell][s] > radius[ell - 1][s])) {
                ++violations;
                os << " [z step " << s << " ell=" << ell + 1 << "]";
            }
    return {violations == 0, std::to_string(violations) + " violations of strict increase; radius range " +
                                 fmt("%.4e", radius[0][0]) + ".." + fmt("%.4e", radius[4][12]) + " m" + os.str()};
}

Outcome turbulence_statistics() {
    const auto g = make_grid(1024, 0.026);
    TurbulenceParams p;
    p.cn2 = 5e-8;
    p.z = 1.0;
    p.kappam = std::numeric_limits<double>::infinity();
    p.seed = 2025;
    const int screens = 200;
    const double r0 = fried_parameter(2.0 * std::numbers::pi / kHeNeWavelength, p.cn2, p.z);

    // Inertial range: 8 pitch .. min(extent / 8, 1 / kappa0).
    const double lo = 8 * g.pitch(), hi = std::min(g.extent / 8, 1.0 / p.kappa0);
    std::vector<double> seps;
    for (double s = lo; s <= hi * (1 + 1e-12); s *= 2) seps.push_back(s);
    const auto d = structure_function(p, g, kHeNeWavelength, screens, seps);

    bool sf_ok = true;
    std::ostringstream os;
    for (const auto& pt : d) {
        const double theory = 6.88 * std::pow(pt.lag * g.pitch() / r0, 5.0 / 3.0);
        const double ratio = pt.value / theory;
        if (std::abs(ratio - 1.0) > 0.2) sf_ok = false;
        os << " lag " << pt.lag << ": " << fmt("%.3f", ratio);
    }

    // Zero mean at every sample and determinism over the same ensemble.
    std::vector<double> sum(g.size(), 0.0), sum2(g.size(), 0.0);
    bool deterministic = true;
    for (int i = 0; i < screens; ++i) {
        auto q = p;
        q.seed = derive_seed(p.seed, {static_cast<std::uint64_t>(i)});
        const auto s = generate_screen(g, q, kHeNeWavelength);
        if (i < 3) deterministic = deterministic && generate_screen(g, q, kHeNeWavelength).values == s.values;
        for (std::size_t j = 0; j < s.values.size(); ++j) {
            sum[j] += s.values[j];
            sum2[j] += s.values[j] * s.values[j];
        }
    }
    long outside = 0;
    for (std::size_t j = 0; j < sum.size(); ++j) {
        const double mean = sum[j] / screens;
        const double sigma = std::sqrt(sum2[j] / screens - mean * mean);
        if (std::abs(mean) > 3.0 * sigma / std::sqrt(double(screens))) ++outside;
    }
    const bool ok = sf_ok && outside == 0 && deterministic;
    return {ok, "D/theory" + os.str() + " (within 0.8..1.2: " + (sf_ok ? "yes" : "no") + "); samples with |mean| > 3 sigma/sqrt(200): " +
                    std::to_string(outside) + "; deterministic: " + (deterministic ? "yes" : "no")};
}

Outcome gradient_check() {
    ClassifierModel<double> m(9, 8, 0.5);
    m.init_he_uniform(5);
    Rng rng(6);
    Tensor<double> x({2, 1, 8, 8});
    for (double& v : x.values) v = rng.uniform();
    const std::vector<int> labels = {2, 7};
    const auto fwd = forward(m, x, Mode::train, 17);
    const auto grads = backward(m, fwd.cache, fwd.probs, labels);
    const char* names[] = {"conv1.w", "conv1.b", "conv2.w", "conv2.b", "conv3.w", "conv3.b", "dense.w", "dense.b"};
    bool ok = true;
    std::ostringstream os;
    long checked = 0;
    for (std::size_t p = 0; p < m.params().size(); ++p) {
        double worst = 0.0;
        for (std::size_t k = 0; k < m.params()[p].size(); ++k) {
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
            ++checked;
        }
        ok = ok && worst <= 1e-4;
        os << " " << names[p] << " " << fmt("%.1e", worst);
    }
    return {ok, std::to_string(checked) + " parameters, worst relative error per tensor:" + os.str()};
}

Outcome loss_sanity() {
    ClassifierModel<float> m(65, 64);
    LabeledImages data;
    data.images = Tensor<float>({65, 1, 64, 64});
    Rng rng(8);
    for (auto& v : data.images.values) v = static_cast<float>(rng.uniform());
    for (int c = 0; c < 65; ++c) data.labels.push_back(c);
    const auto e = evaluate(m, data);
    const double err = std::abs(e.loss - std::log(65.0));
    return {err <= 1e-3, "per-sample loss " + fmt("%.6f", e.loss) + " vs ln 65 = " + fmt("%.6f", std::log(65.0))};
}

DatasetConfig desk_config(const fs::path& root, int threads) {
    DatasetConfig cfg;
    cfg.space = LabelSpace{{1, 2, 3}, {0.40, 0.70, 1.00}};
    cfg.per_class = {40, 10, 10};
    cfg.master_seed = 7;
    cfg.root = root;
    cfg.overwrite = true;
    cfg.threads = threads;
    return cfg;
}

TrainConfig desk_train_config() {
    TrainConfig t;
    t.epochs = 30;
    t.seed = 11;
    return t;
}

Outcome desk_classification() {
    const auto root = g_work / "desk";
    const auto manifest = generate_dataset(desk_config(root, 1));
    ClassifierModel<float> m(manifest.space.class_count(), 64, 0.5);
    m.init_he_uniform(derive_seed(11, {0}));
    auto tc = desk_train_config();
    tc.verbose = true;
    const auto r = train(m, root, tc);
    const auto val = evaluate(r.best_model, root, "val");
    const double adj = adjacent_z_error_fraction(val, manifest.space);
    const bool loss_down = r.history.size() >= 5 && r.history[4].train_loss < r.history[0].train_loss;
    const bool ok = val.accuracy >= 0.90 && adj >= 0.95 && loss_down;
    return {ok, "best epoch " + std::to_string(r.best_epoch) + ", val accuracy " + fmt("%.4f", val.accuracy) +
                    " (>= 0.90), adjacent-z error share " + fmt("%.3f", adj) + " (>= 0.95), train loss epoch 1 " +
                    fmt("%.4f", r.history.at(0).train_loss) + " -> epoch 5 " + fmt("%.4f", r.history.at(4).train_loss)};
}

Outcome determinism() {
    const auto a = generate_dataset(desk_config(g_work / "det_a", 1));
    const auto b = generate_dataset(desk_config(g_work / "det_b", 2));
    const bool same_hash = a.hash == b.hash;

    ClassifierModel<float> m(a.space.class_count(), 64, 0.5);
    m.init_he_uniform(derive_seed(11, {0}));
    auto tc = desk_train_config();
    tc.threads = 1;
    const auto h1 = train(m, g_work / "det_a", tc).history;
    const auto h2 = train(m, g_work / "det_b", tc).history;
    bool same_hist = h1.size() == h2.size();
    for (std::size_t e = 0; same_hist && e < h1.size(); ++e)
        same_hist = h1[e].train_loss == h2[e].train_loss && h1[e].val_loss == h2[e].val_loss &&
                    h1[e].train_accuracy == h2[e].train_accuracy && h1[e].val_accuracy == h2[e].val_accuracy;
    return {same_hash && same_hist, "manifest hash " + a.hash.substr(0, 16) + (same_hash ? " == " : " != ") +
                                        b.hash.substr(0, 16) + "; " + std::to_string(h1.size()) +
                                        "-epoch loss histories " + (same_hist ? "identical" : "differ")};
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: oam_acceptance <criterion 1..10> [work dir]\n");
        return 2;
    }
    const int id = std::atoi(argv[1]);
    g_work = argc > 2 ? fs::path(argv[2]) : fs::temp_directory_path() / "oam_acceptance";
    fs::create_directories(g_work);

    const std::map<int, std::function<Outcome()>> criteria = {
        {1, closure},      {2, gaussian_law},          {3, unitarity},       {4, side_lobes},
        {5, monotonicity}, {6, turbulence_statistics}, {7, gradient_check},  {8, loss_sanity},
        {9, desk_classification}, {10, determinism}};
    const auto it = criteria.find(id);
    if (it == criteria.end()) {
        std::fprintf(stderr, "unknown criterion %s\n", argv[1]);
        return 2;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = it->second();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %d: %s %s [%.1f s]\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    return o.pass ? 0 : 1;
}
