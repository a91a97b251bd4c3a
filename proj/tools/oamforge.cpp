// oamforge: vortex-beam simulation, dataset synthesis and classifier training.
//
// Exit codes: 0 success, 2 invalid input or usage, 1 runtime or I/O failure.

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "oam/beam.hpp"
#include "oam/dataset.hpp"
#include "oam/errors.hpp"
#include "oam/field_io.hpp"
#include "oam/log.hpp"
#include "oam/parallel.hpp"
#include "oam/propagate.hpp"
#include "oam/rng.hpp"
#include "oam/training.hpp"
#include "oam/turbulence.hpp"
#include "oam/units.hpp"
#include "oam/verify.hpp"

namespace fs = std::filesystem;
using namespace oam;

namespace {

// Config overlay: a JSON object (nested objects name subcommands) or the
// key=value / [section] format CLI11 reads natively.
class OverlayConfig : public CLI::ConfigTOML {
public:
    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        const std::string text{std::istreambuf_iterator<char>(input), std::istreambuf_iterator<char>()};
        const auto first = text.find_first_not_of(" \t\r\n");
        if (first == std::string::npos || text[first] != '{') {
            std::istringstream is(text);
            return CLI::ConfigTOML::from_config(is);
        }
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw CLI::ConfigError(std::string("config: ") + e.what());
        }
        std::vector<CLI::ConfigItem> items;
        flatten(doc, {}, items);
        return items;
    }

private:
    static std::string scalar(const nlohmann::json& v) {
        return v.is_string() ? v.get<std::string>() : v.dump();
    }

    static void flatten(const nlohmann::json& obj, const std::vector<std::string>& parents,
                        std::vector<CLI::ConfigItem>& items) {
        for (const auto& [key, value] : obj.items()) {
            if (value.is_object()) {
                auto p = parents;
                p.push_back(key);
                // CLI11 expects an opening marker before a section's items.
                items.push_back({p, "++", {}});
                flatten(value, p, items);
                items.push_back({p, "--", {}});
                continue;
            }
            CLI::ConfigItem item{parents, key, {}};
            if (value.is_array()) {
                for (const auto& v : value) item.inputs.push_back(scalar(v));
            } else {
                item.inputs.push_back(scalar(value));
            }
            items.push_back(std::move(item));
        }
    }
};

struct Common {
    int threads = 0;
    bool stamp = false;
    bool quiet = false;
};

std::string stamp_text() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    os << text;
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

std::string csv_header(const Common& c) { return c.stamp ? "# generated " + stamp_text() + "\n" : ""; }

struct BeamOpts {
    int ell = 1;
    std::string waist = "2mm";
    std::string wavelength = "632.8nm";
    int grid_n = kDefaultGridN;
    std::string extent = "26mm";

    BeamParams beam() const { return {ell, parse_length(waist), parse_length(wavelength)}; }
    GridSpec grid() const { return make_grid(grid_n, parse_length(extent)); }
};

void add_beam_options(CLI::App* sub, BeamOpts& o) {
    sub->add_option("--ell", o.ell, "topological charge (0..12)")->capture_default_str();
    sub->add_option("--waist", o.waist, "Gaussian waist w0 [length: m|cm|mm|um|nm]")->capture_default_str();
    sub->add_option("--wavelength", o.wavelength, "wavelength [length]")->capture_default_str();
    sub->add_option("--grid-n", o.grid_n, "samples per side")->capture_default_str();
    sub->add_option("--extent", o.extent, "grid side length [length]")->capture_default_str();
}

struct RenderOpts {
    int out_size = 360;
    std::string crop = "6mm";
};

void add_render_options(CLI::App* sub, RenderOpts& o) {
    sub->add_option("--out-size", o.out_size, "PGM size [pixels]")->capture_default_str();
    sub->add_option("--crop", o.crop, "rendered field of view [length]")->capture_default_str();
}

// beam ----------------------------------------------------------------------

struct BeamCmd {
    BeamOpts beam;
    RenderOpts render;
    std::string z;
    std::string out_pgm, out_field;

    int run(const Common&) const {
        require(!out_pgm.empty() || !out_field.empty(), "beam: give --out-pgm and/or --out-field");
        const auto params = beam.beam();
        const auto grid = beam.grid();
        const ComplexField field = z.empty() ? source_vortex(params, grid)
                                             : hygg_field(params, grid, parse_length(z));
        if (!out_field.empty()) write_field(out_field, field);
        if (!out_pgm.empty())
            write_pgm(out_pgm, render_image(intensity(field), render.out_size, parse_length(render.crop)));
        return 0;
    }
};

// propagate -----------------------------------------------------------------

struct PropagateCmd {
    BeamOpts beam;
    RenderOpts render;
    std::string in;
    std::string z;
    std::string method = "spectral";
    bool no_band_limit = false;
    std::vector<std::string> points;
    std::string out_field, out_pgm, out_csv;

    int run(const Common& c) const {
        const double dist = parse_length(z);
        const ComplexField src = in.empty() ? source_vortex(beam.beam(), beam.grid()) : read_field(in);
        if (method == "spectral") {
            require(!out_field.empty() || !out_pgm.empty(), "propagate: give --out-field and/or --out-pgm");
            const auto out = propagate_spectral(src, dist, !no_band_limit);
            if (!out_field.empty()) write_field(out_field, out);
            if (!out_pgm.empty())
                write_pgm(out_pgm, render_image(intensity(out), render.out_size, parse_length(render.crop)));
            return 0;
        }
        require(method == "quadrature", "propagate: method must be spectral or quadrature");
        require(!points.empty(), "propagate: quadrature needs at least one --point");
        require(!out_csv.empty(), "propagate: quadrature needs --out-csv");
        std::vector<PolarPoint> pts;
        for (const auto& p : points) {
            const auto comma = p.find(',');
            require(comma != std::string::npos, "point '" + p + "' must be r1,theta1");
            pts.push_back({parse_length(p.substr(0, comma)), parse_angle(p.substr(comma + 1))});
        }
        const auto vals = propagate_quadrature(src, dist, pts);
        std::ostringstream os;
        os << csv_header(c) << std::setprecision(17) << "r1_m,theta1_rad,re,im,intensity\n";
        for (std::size_t i = 0; i < pts.size(); ++i)
            os << pts[i].r1 << ',' << pts[i].theta1 << ',' << vals[i].real() << ',' << vals[i].imag()
               << ',' << std::norm(vals[i]) << '\n';
        write_text(out_csv, os.str());
        return 0;
    }
};

// screen --------------------------------------------------------------------

struct ScreenCmd {
    std::string cn2 = "5e-8m^-2/3";
    std::string z = "1m";
    std::string wavelength = "632.8nm";
    std::string kappa0 = "0.6283185307179586rad/m";
    std::string kappam = "592rad/m";
    std::uint64_t seed = 0;
    int grid_n = 1024;
    std::string extent = "26mm";
    std::string out;
    int structure = 0;
    std::string seps = "0.2mm,0.4mm,0.8mm,1.6mm,3.2mm";
    std::string report;

    int run(const Common& c) const {
        const TurbulenceParams tp{parse_cn2(cn2), parse_length(z), parse_wavenumber(kappa0),
                                  parse_wavenumber(kappam), seed};
        const auto grid = make_grid(grid_n, parse_length(extent));
        const double lambda = parse_length(wavelength);
        require(!out.empty() || structure > 0, "screen: give --out and/or --structure");
        if (!out.empty()) write_screen(out, generate_screen(grid, tp, lambda));
        if (structure > 0) {
            require(!report.empty(), "screen: --structure needs --report");
            const auto sf = structure_function(tp, grid, lambda, structure, parse_length_list(seps),
                                               resolve_threads(c.threads));
            const double r0 = fried_parameter(2.0 * std::numbers::pi / lambda, tp.cn2, tp.z);
            std::ostringstream os;
            os << csv_header(c) << std::setprecision(10)
               << "separation_m,lag_samples,d_phi_rad2,std_error_rad2,kolmogorov_rad2,ratio\n";
            for (const auto& p : sf) {
                const double law = 6.88 * std::pow(p.lag * grid.pitch() / r0, 5.0 / 3.0);
                os << p.separation << ',' << p.lag << ',' << p.value << ',' << p.std_error << ','
                   << law << ',' << (law > 0 ? p.value / law : 0.0) << '\n';
            }
            write_text(report, os.str());
        }
        return 0;
    }
};

// dataset -------------------------------------------------------------------

struct DatasetCmd {
    std::string ells = "1-5";
    std::string zs = "0.40m:1.00m:0.05m";
    std::string per_class = "86/10/10";
    std::uint64_t seed = 0;
    std::string out;
    bool overwrite = false;
    bool no_turbulence = false;
    std::string cn2 = "5e-8m^-2/3";
    std::string kappa0 = "0.6283185307179586rad/m";
    std::string kappam = "592rad/m";
    std::string screen_z;
    std::string max_offset = "0.2mm";
    std::string waist = "2mm";
    std::string wavelength = "632.8nm";
    int grid_n = 1024;
    std::string extent = "26mm";
    RenderOpts render;

    int run(const Common& c) const {
        DatasetConfig cfg;
        cfg.space.ells = parse_int_list(ells);
        cfg.space.zs = parse_length_list(zs);
        std::array<int, 3> counts{};
        {
            std::istringstream is(per_class);
            std::string part;
            int i = 0;
            while (std::getline(is, part, '/')) {
                require(i < 3, "per-class must be train/val/test");
                try {
                    counts[i++] = std::stoi(part);
                } catch (const std::exception&) {
                    throw ValidationError("per-class must be train/val/test integers");
                }
            }
            require(i == 3, "per-class must be train/val/test");
        }
        cfg.per_class = counts;
        cfg.master_seed = seed;
        cfg.root = out;
        cfg.overwrite = overwrite;
        cfg.threads = resolve_threads(c.threads);
        auto& s = cfg.sim;
        s.grid = make_grid(grid_n, parse_length(extent));
        s.waist = parse_length(waist);
        s.wavelength = parse_length(wavelength);
        s.out_size = render.out_size;
        s.crop_extent = parse_length(render.crop);
        s.max_offset = parse_length(max_offset);
        s.turbulence = !no_turbulence;
        s.cn2 = parse_cn2(cn2);
        s.kappa0 = parse_wavenumber(kappa0);
        s.kappam = parse_wavenumber(kappam);
        if (!screen_z.empty()) s.screen_z = parse_length(screen_z);

        const auto m = generate_dataset(cfg);
        if (!c.quiet) {
            std::cout << "train " << m.splits.at("train").size() << " val " << m.splits.at("val").size()
                      << " test " << m.splits.at("test").size() << " classes " << m.space.class_count()
                      << "\nmanifest sha256 " << m.hash << '\n';
        }
        return 0;
    }
};

// train ---------------------------------------------------------------------

struct TrainCmd {
    std::string data;
    int epochs = 30;
    int batch = 32;
    double lr = 1e-3;
    double dropout = 0.5;
    std::uint64_t seed = 0;
    int input_size = 64;
    std::string checkpoint = "model.oamc";
    std::string best;
    std::string history;

    int run(const Common& c) const {
        TrainConfig cfg;
        cfg.adam.lr = lr;
        cfg.batch_size = batch;
        cfg.epochs = epochs;
        cfg.dropout = dropout;
        cfg.seed = seed;
        cfg.input_size = input_size;
        cfg.threads = resolve_threads(c.threads);
        cfg.checkpoint = checkpoint;
        cfg.verbose = !c.quiet;
        cfg.validate();

        const auto manifest = load_manifest(data);
        ClassifierModel<float> model(manifest.space.class_count(), input_size, dropout);
        model.init_he_uniform(derive_seed(seed, {0}));
        const auto res = train(model, fs::path(data), cfg);
        if (cfg.epochs == 0) write_checkpoint(checkpoint, {res.model, res.adam, res.history});
        if (!best.empty()) write_checkpoint(best, {res.best_model, res.adam, res.history});
        if (!history.empty()) {
            std::ostringstream os;
            os << csv_header(c) << std::setprecision(10)
               << "epoch,train_loss,train_accuracy,val_loss,val_accuracy\n";
            for (const auto& e : res.history)
                os << e.epoch << ',' << e.train_loss << ',' << e.train_accuracy << ',' << e.val_loss
                   << ',' << e.val_accuracy << '\n';
            write_text(history, os.str());
        }
        return 0;
    }
};

// eval ----------------------------------------------------------------------

struct EvalCmd {
    std::string data;
    std::string checkpoint;
    std::string split = "test";
    std::string metrics;
    std::string confusion;

    int run(const Common& c) const {
        const auto ck = read_checkpoint(checkpoint);
        const auto manifest = load_manifest(data);
        require(manifest.space.class_count() == ck.model.classes(),
                "eval: checkpoint head does not match the dataset class count");
        const auto m = evaluate(ck.model, fs::path(data), split, resolve_threads(c.threads));
        std::string json = metrics_json(m, manifest.space);
        if (c.stamp) json = "{\"generated\": \"" + stamp_text() + "\",\n \"metrics\": " + json + "}\n";
        if (!metrics.empty()) write_text(metrics, json);
        if (!confusion.empty()) write_text(confusion, csv_header(c) + confusion_csv(m));
        if (!c.quiet) std::cout << "accuracy " << m.accuracy << " loss " << m.loss << '\n';
        return 0;
    }
};

// xsection ------------------------------------------------------------------

struct XsectionCmd {
    BeamOpts beam;
    std::string z;
    std::string method = "analytic";
    std::string out;

    int run(const Common& c) const {
        const auto params = beam.beam();
        const auto grid = beam.grid();
        const double dist = parse_length(z);
        ComplexField field;
        if (method == "analytic") {
            field = hygg_field(params, grid, dist);
        } else {
            require(method == "spectral", "xsection: method must be analytic or spectral");
            field = propagate_spectral(source_vortex(params, grid), dist);
        }
        const auto prof = cross_section(intensity(field));
        std::ostringstream os;
        os << csv_header(c) << std::setprecision(17) << "x_m,intensity\n";
        for (const auto& p : prof) os << p.x << ',' << p.value << '\n';
        write_text(out, os.str());
        if (!c.quiet) {
            const auto lobes = count_side_lobes(prof);
            std::cout << "side lobes within |x| <= 2.2 mm: left " << lobes.left << " right "
                      << lobes.right << '\n';
        }
        return 0;
    }
};

// verify --------------------------------------------------------------------

struct VerifyCmd {
    std::string suite = "quick";

    int run(const Common&) const {
        bool ok = true;
        for (const auto& r : run_verify(suite)) {
            std::cout << (r.pass ? "PASS " : "FAIL ") << r.name;
            if (!r.detail.empty()) std::cout << "  " << r.detail;
            std::cout << '\n';
            ok = ok && r.pass;
        }
        return ok ? 0 : 1;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"oamforge: vortex-beam diffraction, turbulence screens, datasets and classifier"};
    app.config_formatter(std::make_shared<OverlayConfig>());
    app.set_config("--config", "", "overlay file: key=value lines ([subcommand] sections) or a JSON object");
    Common common;
    app.add_option("--threads", common.threads, "worker threads (default: OAM_FORGE_THREADS or 1)");
    app.add_flag("--stamp", common.stamp, "add a generation timestamp to CSV/JSON outputs");
    app.add_flag("--quiet", common.quiet, "suppress progress and summary output");
    app.require_subcommand(1);

    BeamCmd beam;
    auto* s_beam = app.add_subcommand("beam", "render the source field, or the analytic field at --z");
    add_beam_options(s_beam, beam.beam);
    add_render_options(s_beam, beam.render);
    s_beam->add_option("--z", beam.z, "propagation distance [length]; omit for the source plane");
    s_beam->add_option("--out-pgm", beam.out_pgm, "intensity image (PGM)");
    s_beam->add_option("--out-field", beam.out_field, "complex field (OAMF)");

    PropagateCmd prop;
    auto* s_prop = app.add_subcommand("propagate", "free-space propagation (spectral or quadrature)");
    add_beam_options(s_prop, prop.beam);
    add_render_options(s_prop, prop.render);
    s_prop->add_option("--in", prop.in, "input field (OAMF); default: source vortex from beam options");
    s_prop->add_option("--z", prop.z, "distance [length]")->required();
    s_prop->add_option("--method", prop.method, "spectral | quadrature")->capture_default_str();
    s_prop->add_flag("--no-band-limit", prop.no_band_limit, "disable transfer-function band limiting");
    s_prop->add_option("--point", prop.points, "quadrature output point r1,theta1 [length],[rad|deg]");
    s_prop->add_option("--out-field", prop.out_field, "propagated field (OAMF)");
    s_prop->add_option("--out-pgm", prop.out_pgm, "propagated intensity (PGM)");
    s_prop->add_option("--out-csv", prop.out_csv, "quadrature values (CSV)");

    ScreenCmd screen;
    auto* s_screen = app.add_subcommand("screen", "phase screens and structure-function reports");
    s_screen->add_option("--cn2", screen.cn2, "Cn^2 [m^-2/3 | mm^-2/3]")->capture_default_str();
    s_screen->add_option("--z", screen.z, "path length for r0 [length]")->capture_default_str();
    s_screen->add_option("--wavelength", screen.wavelength, "wavelength [length]")->capture_default_str();
    s_screen->add_option("--kappa0", screen.kappa0, "outer-scale wavenumber [rad/m | rad/mm]")->capture_default_str();
    s_screen->add_option("--kappam", screen.kappam, "inner-scale wavenumber [rad/m | rad/mm | inf]")->capture_default_str();
    s_screen->add_option("--seed", screen.seed, "RNG seed")->capture_default_str();
    s_screen->add_option("--grid-n", screen.grid_n, "samples per side")->capture_default_str();
    s_screen->add_option("--extent", screen.extent, "grid side length [length]")->capture_default_str();
    s_screen->add_option("--out", screen.out, "screen file (OAMF)");
    s_screen->add_option("--structure", screen.structure, "screens to average for a structure-function report (>= 50)");
    s_screen->add_option("--seps", screen.seps, "separations [length list]")->capture_default_str();
    s_screen->add_option("--report", screen.report, "structure-function CSV");

    DatasetCmd ds;
    auto* s_ds = app.add_subcommand("dataset", "synthesize a labeled image dataset");
    s_ds->add_option("--ells", ds.ells, "charges, e.g. 1-5 or 1,3,5")->capture_default_str();
    s_ds->add_option("--zs", ds.zs, "distances, start:stop:step or list [length]")->capture_default_str();
    s_ds->add_option("--per-class", ds.per_class, "train/val/test images per class")->capture_default_str();
    s_ds->add_option("--seed", ds.seed, "master seed")->capture_default_str();
    s_ds->add_option("--out", ds.out, "dataset root directory")->required();
    s_ds->add_flag("--overwrite", ds.overwrite, "replace an existing dataset at --out");
    s_ds->add_flag("--no-turbulence", ds.no_turbulence, "skip phase screens");
    s_ds->add_option("--cn2", ds.cn2, "Cn^2 [m^-2/3 | mm^-2/3]")->capture_default_str();
    s_ds->add_option("--kappa0", ds.kappa0, "outer-scale wavenumber [rad/m]")->capture_default_str();
    s_ds->add_option("--kappam", ds.kappam, "inner-scale wavenumber [rad/m | inf]")->capture_default_str();
    s_ds->add_option("--screen-z", ds.screen_z, "path length for r0 [length]; default: each sample's z");
    s_ds->add_option("--max-offset", ds.max_offset, "misalignment bound per axis [length]")->capture_default_str();
    s_ds->add_option("--waist", ds.waist, "Gaussian waist [length]")->capture_default_str();
    s_ds->add_option("--wavelength", ds.wavelength, "wavelength [length]")->capture_default_str();
    s_ds->add_option("--grid-n", ds.grid_n, "simulation samples per side")->capture_default_str();
    s_ds->add_option("--extent", ds.extent, "simulation grid side [length]")->capture_default_str();
    add_render_options(s_ds, ds.render);

    TrainCmd tr;
    auto* s_tr = app.add_subcommand("train", "train the classifier on a dataset");
    s_tr->add_option("--data", tr.data, "dataset root")->required();
    s_tr->add_option("--epochs", tr.epochs, "epochs")->capture_default_str();
    s_tr->add_option("--batch", tr.batch, "batch size")->capture_default_str();
    s_tr->add_option("--lr", tr.lr, "Adam learning rate")->capture_default_str();
    s_tr->add_option("--dropout", tr.dropout, "dropout probability")->capture_default_str();
    s_tr->add_option("--seed", tr.seed, "master seed (init, shuffling, dropout)")->capture_default_str();
    s_tr->add_option("--input-size", tr.input_size, "network input size [pixels]")->capture_default_str();
    s_tr->add_option("--checkpoint", tr.checkpoint, "checkpoint written every epoch (OAMC)")->capture_default_str();
    s_tr->add_option("--best", tr.best, "checkpoint of the best-validation epoch (OAMC)");
    s_tr->add_option("--history", tr.history, "per-epoch metrics (CSV)");

    EvalCmd ev;
    auto* s_ev = app.add_subcommand("eval", "evaluate a checkpoint on a dataset split");
    s_ev->add_option("--data", ev.data, "dataset root")->required();
    s_ev->add_option("--checkpoint", ev.checkpoint, "model checkpoint (OAMC)")->required();
    s_ev->add_option("--split", ev.split, "train | val | test")->capture_default_str();
    s_ev->add_option("--metrics", ev.metrics, "metrics (JSON)");
    s_ev->add_option("--confusion", ev.confusion, "normalized confusion matrix (CSV)");

    XsectionCmd xs;
    auto* s_xs = app.add_subcommand("xsection", "y = 0 intensity profile of the propagated beam");
    add_beam_options(s_xs, xs.beam);
    s_xs->add_option("--z", xs.z, "distance [length]")->required();
    s_xs->add_option("--method", xs.method, "analytic | spectral")->capture_default_str();
    s_xs->add_option("--out", xs.out, "profile (CSV)")->required();

    VerifyCmd vf;
    auto* s_vf = app.add_subcommand("verify", "run oracle and invariant checks");
    s_vf->add_option("--suite", vf.suite, "quick | full")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e, std::cerr, std::cerr);
        std::cerr << app.help();
        return 2;
    }

    if (common.quiet) set_warnings_enabled(false);
    try {
        if (*s_beam) return beam.run(common);
        if (*s_prop) return prop.run(common);
        if (*s_screen) return screen.run(common);
        if (*s_ds) return ds.run(common);
        if (*s_tr) return tr.run(common);
        if (*s_ev) return ev.run(common);
        if (*s_xs) return xs.run(common);
        if (*s_vf) return vf.run(common);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
