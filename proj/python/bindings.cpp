#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <limits>

#include "oam/beam.hpp"
#include "oam/dataset.hpp"
#include "oam/errors.hpp"
#include "oam/propagate.hpp"
#include "oam/special.hpp"
#include "oam/turbulence.hpp"
#include "oam/verify.hpp"

namespace py = pybind11;
using namespace oam;

namespace {

using CArray = py::array_t<cplx, py::array::c_style | py::array::forcecast>;
using RArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

void check_square(const py::buffer_info& b, const GridSpec& g) {
    require(b.ndim == 2 && b.shape[0] == g.n && b.shape[1] == g.n, "array shape must be (grid.n, grid.n)");
}

py::array_t<cplx> to_array(const ComplexField& f) {
    py::array_t<cplx> out({f.grid.n, f.grid.n});
    std::memcpy(out.mutable_data(), f.values.data(), f.values.size() * sizeof(cplx));
    return out;
}

py::array_t<double> to_array(const GridSpec& g, const std::vector<double>& v) {
    py::array_t<double> out({g.n, g.n});
    std::memcpy(out.mutable_data(), v.data(), v.size() * sizeof(double));
    return out;
}

py::array_t<std::uint8_t> to_array(const Image8& img) {
    py::array_t<std::uint8_t> out({img.height, img.width});
    std::memcpy(out.mutable_data(), img.pixels.data(), img.pixels.size());
    return out;
}

ComplexField from_array(const CArray& a, const GridSpec& g, double wavelength) {
    const auto b = a.request();
    check_square(b, g);
    ComplexField f(g, wavelength);
    std::memcpy(f.values.data(), b.ptr, f.values.size() * sizeof(cplx));
    return f;
}

IntensityMap map_from_array(const RArray& a, const GridSpec& g) {
    const auto b = a.request();
    check_square(b, g);
    IntensityMap m{g, std::vector<double>(static_cast<std::size_t>(g.size()))};
    std::memcpy(m.values.data(), b.ptr, m.values.size() * sizeof(double));
    return m;
}

TurbulenceParams turbulence(double cn2, double z, std::uint64_t seed, double kappa0, double kappam) {
    TurbulenceParams p;
    p.cn2 = cn2;
    p.z = z;
    p.seed = seed;
    p.kappa0 = kappa0;
    p.kappam = kappam;
    return p;
}

}  // namespace

PYBIND11_MODULE(_oamforge, m) {
    m.doc() = "Vortex-beam optics, turbulence screens and dataset synthesis (SI units throughout).";
    m.attr("__version__") = "0.1.0";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

    py::class_<GridSpec>(m, "GridSpec")
        .def(py::init(&make_grid), py::arg("n"), py::arg("extent"))
        .def_readonly("n", &GridSpec::n)
        .def_readonly("extent", &GridSpec::extent)
        .def_property_readonly("pitch", &GridSpec::pitch)
        .def("coord", &GridSpec::coord)
        .def("__repr__", [](const GridSpec& g) {
            return "GridSpec(n=" + std::to_string(g.n) + ", extent=" + std::to_string(g.extent) + ")";
        });

    m.def("source_vortex",
          [](int ell, const GridSpec& g, double waist, double wavelength, double ox, double oy) {
              return to_array(source_vortex({ell, waist, wavelength}, g, ox, oy));
          },
          py::arg("ell"), py::arg("grid"), py::arg("waist") = kDefaultWaist,
          py::arg("wavelength") = kHeNeWavelength, py::arg("offset_x") = 0.0, py::arg("offset_y") = 0.0);

    m.def("hygg_field",
          [](int ell, const GridSpec& g, double z, double waist, double wavelength) {
              ComplexField f;
              {
                  py::gil_scoped_release release;
                  f = hygg_field({ell, waist, wavelength}, g, z);
              }
              return to_array(f);
          },
          py::arg("ell"), py::arg("grid"), py::arg("z"), py::arg("waist") = kDefaultWaist,
          py::arg("wavelength") = kHeNeWavelength);

    m.def("propagate_spectral",
          [](const CArray& field, const GridSpec& g, double z, double wavelength, bool band_limit) {
              const auto in = from_array(field, g, wavelength);
              ComplexField out;
              {
                  py::gil_scoped_release release;
                  out = propagate_spectral(in, z, band_limit);
              }
              return to_array(out);
          },
          py::arg("field"), py::arg("grid"), py::arg("z"), py::arg("wavelength") = kHeNeWavelength,
          py::arg("band_limit") = true);

    m.def("propagate_quadrature",
          [](const CArray& field, const GridSpec& g, double z, const std::vector<std::pair<double, double>>& pts,
             double wavelength) {
              const auto in = from_array(field, g, wavelength);
              std::vector<PolarPoint> points;
              for (const auto& [r, t] : pts) points.push_back({r, t});
              std::vector<cplx> v;
              {
                  py::gil_scoped_release release;
                  v = propagate_quadrature(in, z, points);
              }
              return py::array_t<cplx>(static_cast<py::ssize_t>(v.size()), v.data());
          },
          py::arg("field"), py::arg("grid"), py::arg("z"), py::arg("points"),
          py::arg("wavelength") = kHeNeWavelength);

    m.def("render_image",
          [](const RArray& inten, const GridSpec& g, int out_size, double crop) {
              return to_array(render_image(map_from_array(inten, g), out_size, crop));
          },
          py::arg("intensity"), py::arg("grid"), py::arg("out_size") = 360, py::arg("crop_extent") = 6.0e-3);

    m.def("cross_section",
          [](const RArray& inten, const GridSpec& g) {
              const auto prof = cross_section(map_from_array(inten, g));
              py::array_t<double> x(static_cast<py::ssize_t>(prof.size())), v(static_cast<py::ssize_t>(prof.size()));
              for (std::size_t i = 0; i < prof.size(); ++i) {
                  x.mutable_at(i) = prof[i].x;
                  v.mutable_at(i) = prof[i].value;
              }
              return py::make_tuple(x, v);
          },
          py::arg("intensity"), py::arg("grid"), "(x, value) arrays of the y = 0 row.");

    m.def("count_side_lobes",
          [](const RArray& x, const RArray& v, double max_abs_x, double rel) {
              require(x.size() == v.size(), "x and value lengths differ");
              std::vector<ProfilePoint> prof(static_cast<std::size_t>(x.size()));
              for (py::ssize_t i = 0; i < x.size(); ++i) prof[i] = {x.at(i), v.at(i)};
              const auto c = count_side_lobes(prof, max_abs_x, rel);
              return py::make_tuple(c.left, c.right);
          },
          py::arg("x"), py::arg("value"), py::arg("max_abs_x") = 2.2e-3, py::arg("rel_threshold") = 5e-3);

    m.def("ring_peak_radius",
          [](const RArray& inten, const GridSpec& g) { return ring_peak_radius(map_from_array(inten, g)); },
          py::arg("intensity"), py::arg("grid"));

    m.def("kummer_1f1", &kummer_1f1, py::arg("a"), py::arg("b"), py::arg("x"));
    m.def("fried_parameter", &fried_parameter, py::arg("k"), py::arg("cn2"), py::arg("z"));
    m.def("von_karman_psd", &von_karman_psd, py::arg("kappa"), py::arg("r0"), py::arg("kappa0"),
          py::arg("kappam"));

    m.def("phase_screen",
          [](const GridSpec& g, double cn2, double z, std::uint64_t seed, double wavelength, double kappa0,
             double kappam) {
              PhaseScreen s;
              {
                  py::gil_scoped_release release;
                  s = generate_screen(g, turbulence(cn2, z, seed, kappa0, kappam), wavelength);
              }
              return to_array(g, s.values);
          },
          py::arg("grid"), py::arg("cn2") = 5e-8, py::arg("z") = 1.0, py::arg("seed") = 0,
          py::arg("wavelength") = kHeNeWavelength, py::arg("kappa0") = kDefaultKappa0,
          py::arg("kappam") = kDefaultKappaM);

    m.def("structure_function",
          [](const GridSpec& g, int n_screens, const std::vector<double>& seps, double cn2, double z,
             std::uint64_t seed, double wavelength, double kappa0, double kappam, int threads) {
              std::vector<StructurePoint> pts;
              {
                  py::gil_scoped_release release;
                  pts = structure_function(turbulence(cn2, z, seed, kappa0, kappam), g, wavelength, n_screens,
                                           seps, threads);
              }
              py::list out;
              for (const auto& p : pts)
                  out.append(py::dict(py::arg("separation") = p.separation, py::arg("lag") = p.lag,
                                      py::arg("value") = p.value, py::arg("std_error") = p.std_error));
              return out;
          },
          py::arg("grid"), py::arg("n_screens"), py::arg("separations"), py::arg("cn2") = 5e-8,
          py::arg("z") = 1.0, py::arg("seed") = 0, py::arg("wavelength") = kHeNeWavelength,
          py::arg("kappa0") = kDefaultKappa0, py::arg("kappam") = kDefaultKappaM, py::arg("threads") = 1);

    m.def("class_index",
          [](int ell, double z, std::optional<std::vector<int>> ells, std::optional<std::vector<double>> zs) {
              LabelSpace s = default_label_space();
              if (ells) s.ells = *ells;
              if (zs) s.zs = *zs;
              s.validate();
              return class_index(s, ell, z);
          },
          py::arg("ell"), py::arg("z"), py::arg("ells") = py::none(), py::arg("zs") = py::none());

    m.def("synth_image",
          [](int ell, double z, std::uint64_t seed, bool turb, int grid_n, int out_size) {
              SimConfig cfg;
              cfg.grid = make_grid(grid_n, cfg.grid.extent);
              cfg.turbulence = turb;
              cfg.out_size = out_size;
              LabelSpace s = default_label_space();
              if (std::find(s.ells.begin(), s.ells.end(), ell) == s.ells.end()) s.ells = {ell};
              s.zs = {z};
              Sample smp;
              {
                  py::gil_scoped_release release;
                  smp = synth_sample(s, ell, z, cfg, seed);
              }
              return to_array(smp.image);
          },
          py::arg("ell"), py::arg("z"), py::arg("seed") = 0, py::arg("turbulence") = true,
          py::arg("grid_n") = 1024, py::arg("out_size") = 360);

    m.def("verify",
          [](const std::string& suite) {
              std::vector<CheckResult> r;
              {
                  py::gil_scoped_release release;
                  r = run_verify(suite);
              }
              py::list out;
              for (const auto& c : r) out.append(py::make_tuple(c.name, c.pass, c.detail));
              return out;
          },
          py::arg("suite") = "quick");
}
