#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "tomolab/array.hpp"
#include "tomolab/coupling.hpp"
#include "tomolab/experiments.hpp"
#include "tomolab/fbp.hpp"
#include "tomolab/metrics.hpp"
#include "tomolab/phantom.hpp"
#include "tomolab/projectors.hpp"
#include "tomolab/rng.hpp"
#include "tomolab/solvers.hpp"

namespace py = pybind11;
using namespace tomolab;

namespace {

using Arr = py::array_t<double, py::array::c_style | py::array::forcecast>;

ImageGrid to_image(const Arr& a) {
  if (a.ndim() != 2) throw std::invalid_argument("expected a 2-D array");
  ImageGrid img(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)));
  std::memcpy(img.data(), a.data(), sizeof(double) * img.size());
  return img;
}

Sinogram to_sino(const Arr& a) {
  if (a.ndim() != 2) throw std::invalid_argument("expected a 2-D array");
  Sinogram s(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)));
  std::memcpy(s.data(), a.data(), sizeof(double) * s.size());
  return s;
}

py::array_t<double> from_image(const ImageGrid& img) {
  py::array_t<double> out({img.height(), img.width()});
  std::memcpy(out.mutable_data(), img.data(), sizeof(double) * img.size());
  return out;
}

py::array_t<double> from_sino(const Sinogram& s) {
  py::array_t<double> out({s.views(), s.cells()});
  std::memcpy(out.mutable_data(), s.data(), sizeof(double) * s.size());
  return out;
}

py::array_t<double> from_vec(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::memcpy(out.mutable_data(), v.data(), sizeof(double) * v.size());
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "parallel-beam tomography laboratory: projector pairs, FBP, iterative solvers";

  m.def(
      "phantom", [](int size) { return from_image(rasterize(shepp_logan(), size)); },
      py::arg("size") = 256, "Shepp-Logan rasterization");

  m.def(
      "analytic_sinogram",
      [](int views, int cells, py::object scale) {
        const Geometry g{views, cells};
        if (scale.is_none()) return from_sino(analytic_sinogram(shepp_logan(), g));
        return from_sino(analytic_sinogram(shepp_logan(), g, scale.cast<double>()));
      },
      py::arg("views") = 402, py::arg("cells") = 256, py::arg("scale") = py::none(),
      "exact Shepp-Logan line integrals");

  m.def(
      "forward",
      [](const std::string& kind, const Arr& image, int views) {
        const ImageGrid img = to_image(image);
        if (img.height() != img.width()) throw std::invalid_argument("image must be square");
        ProjectorPair pair(kind_from_token(kind), Geometry{views, img.width()});
        return from_sino(pair.forward(img));
      },
      py::arg("kind"), py::arg("image"), py::arg("views"),
      "discrete Radon transform of a square image");

  m.def(
      "adjoint",
      [](const std::string& kind, const Arr& sino) {
        const Sinogram s = to_sino(sino);
        ProjectorPair pair(kind_from_token(kind), s.geom());
        return from_image(pair.adjoint(s));
      },
      py::arg("kind"), py::arg("sinogram"), "backprojection (exact transpose of forward)");

  m.def(
      "fbp",
      [](const Arr& sino, const std::string& adjoint, const std::string& filter) {
        return from_image(
            fbp_reconstruct(to_sino(sino), kind_from_token(adjoint), filter_from_token(filter)));
      },
      py::arg("sinogram"), py::arg("adjoint") = "pd", py::arg("filter") = "ramp",
      "filtered backprojection");

  m.def(
      "add_noise",
      [](const Arr& sino, double sigma, uint64_t seed) {
        SeededRng rng(seed);
        return from_sino(add_poisson_noise(to_sino(sino), sigma, rng));
      },
      py::arg("sinogram"), py::arg("sigma"), py::arg("seed") = 7,
      "scaled Poisson noise with std = sigma * mean at the mean");

  m.def(
      "mse",
      [](const Arr& a, const Arr& b) { return mse(to_image(a), to_image(b)); }, py::arg("a"),
      py::arg("b"));

  m.def(
      "psnr",
      [](const Arr& a, const Arr& b, py::object mask) {
        const ImageGrid fa = to_image(a), fb = to_image(b);
        if (mask.is_none()) return psnr(fa, fb);
        const ImageGrid fm = to_image(mask.cast<Arr>());
        return psnr(fa, fb, &fm);
      },
      py::arg("a"), py::arg("b"), py::arg("mask") = py::none());

  m.def(
      "circle_mask", [](int size) { return from_image(reconstruction_circle_mask(size)); },
      py::arg("size") = 256);

  m.def(
      "is_undersampled", [](int views, int cells) { return is_undersampled(Geometry{views, cells}); },
      py::arg("views"), py::arg("cells"));

  m.def(
      "adjoint_ratio",
      [](const std::string& fwd, const std::string& adj, int views, int cells, uint64_t seed) {
        SeededRng rng(seed);
        return adjoint_ratio(kind_from_token(fwd), kind_from_token(adj), Geometry{views, cells},
                             rng);
      },
      py::arg("fwd"), py::arg("adj"), py::arg("views") = 402, py::arg("cells") = 256,
      py::arg("seed") = 7, "randomized inner-product coupling ratio");

  m.def(
      "coupling",
      [](int views, int cells, const std::vector<uint64_t>& seeds) {
        py::list rows;
        for (const CouplingReport& r : coupling_matrix(Geometry{views, cells}, seeds)) {
          py::dict d;
          d["fwd"] = to_token(r.forward_kind);
          d["adj"] = to_token(r.adjoint_kind);
          d["max_abs_r_minus_1"] = r.max_abs_r_minus_1();
          d["digits"] = r.digits_of_agreement();
          rows.append(d);
        }
        return rows;
      },
      py::arg("views") = 402, py::arg("cells") = 256,
      py::arg("seeds") = std::vector<uint64_t>{1, 2, 3}, "full 6x6 coupling audit");

  m.def(
      "preset_sinogram",
      [](const std::string& name, int size, py::object seed) {
        DatasetPreset p = preset_by_name(name, size);
        if (!seed.is_none()) p.seed = seed.cast<uint64_t>();
        return from_sino(generate_dataset(p));
      },
      py::arg("name"), py::arg("size") = 256, py::arg("seed") = py::none(),
      "named dataset preset (sl-full, sl-under, sl-noise, sl-uconstr, fig4a..c)");

  m.def(
      "recon",
      [](const Arr& sino, const std::string& algo, const std::string& fwd, py::object adj,
         int iterations, double tv_weight, double admm_penalty, double huber_weight,
         double huber_delta, int inner_cg_iters, bool constraints, py::object weights,
         py::object ref) {
        const Sinogram s = to_sino(sino);
        SolverConfig cfg;
        cfg.algorithm = algorithm_from_token(algo);
        cfg.iterations = iterations;
        cfg.tv_weight = tv_weight;
        cfg.admm_penalty = admm_penalty;
        cfg.huber_weight = huber_weight;
        cfg.huber_delta = huber_delta;
        cfg.inner_cg_iters = inner_cg_iters;
        cfg.constraints_enabled = constraints;
        const ProjectorKind fk = kind_from_token(fwd);
        const ProjectorKind ak = adj.is_none() ? fk : kind_from_token(adj.cast<std::string>());
        Sinogram w;
        const Sinogram* wp = nullptr;
        if (!weights.is_none()) {
          w = to_sino(weights.cast<Arr>());
          wp = &w;
        }
        ImageGrid r;
        const ImageGrid* rp = nullptr;
        if (!ref.is_none()) {
          r = to_image(ref.cast<Arr>());
          rp = &r;
        }
        const SolveResult res = run_solver(s, fk, ak, cfg, wp, rp);
        py::dict out;
        out["image"] = from_image(res.image);
        out["cost"] = from_vec(res.trace.cost);
        out["psnr"] = from_vec(res.trace.psnr);
        out["diverged"] = res.trace.diverged;
        return out;
      },
      py::arg("sinogram"), py::arg("algo") = "admm", py::arg("fwd") = "pd",
      py::arg("adj") = py::none(), py::arg("iterations") = 100, py::arg("tv_weight") = 0.0,
      py::arg("admm_penalty") = 1.0, py::arg("huber_weight") = 0.0,
      py::arg("huber_delta") = 1e-3, py::arg("inner_cg_iters") = 4,
      py::arg("constraints") = true, py::arg("weights") = py::none(),
      py::arg("ref") = py::none(),
      "iterative reconstruction; returns image, cost/psnr traces, diverged flag");

  m.attr("kinds") = std::vector<std::string>{"pd", "rd", "dd", "ss", "wf", "kb"};
  m.attr("filters") = std::vector<std::string>{"ramp", "shlo", "hann", "parz"};
  m.attr("algorithms") = std::vector<std::string>{"admm", "pwls", "mlem", "sirt"};
}
