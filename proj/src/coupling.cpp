#include "tomolab/coupling.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace tomolab {

double CouplingReport::max_abs_r_minus_1() const {
  double m = 0.0;
  for (double r : ratios) m = std::max(m, std::abs(r - 1.0));
  return m;
}

double CouplingReport::digits_of_agreement() const {
  const double m = max_abs_r_minus_1();
  if (m <= 0.0) return 16.0;  // beyond double resolution
  return -std::log10(m);
}

namespace {

double ratio_once(const ProjectorPair& fp, const ProjectorPair& ap, SeededRng& rng) {
  const int P = fp.image_size();
  ImageGrid x(P, P);
  Sinogram y(fp.geom());
  for (size_t k = 0; k < x.size(); ++k) x[k] = rng.uniform(-1.0, 1.0);
  for (size_t k = 0; k < y.size(); ++k) y[k] = rng.uniform(-1.0, 1.0);
  const Sinogram rx = fp.forward(x);
  const ImageGrid ay = ap.adjoint(y);
  const double den = dot(y.vec(), rx.vec());
  if (den == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return dot(ay.vec(), x.vec()) / den;
}

}  // namespace

double adjoint_ratio(ProjectorKind fwd, ProjectorKind adj, const Geometry& g,
                     SeededRng& rng) {
  const ProjectorPair fp(fwd, g), ap(adj, g);
  double r = ratio_once(fp, ap, rng);
  if (std::isnan(r)) r = ratio_once(fp, ap, rng);  // resample once
  if (std::isnan(r)) throw std::runtime_error("adjoint_ratio: zero denominator");
  return r;
}

std::vector<CouplingReport> coupling_matrix(const Geometry& g,
                                            const std::vector<uint64_t>& seeds) {
  if (seeds.size() < 3)
    throw std::invalid_argument("coupling_matrix: need at least 3 seeds");
  std::vector<CouplingReport> out;
  out.reserve(36);
  for (ProjectorKind f : kAllKinds) {
    const ProjectorPair fp(f, g);
    for (ProjectorKind a : kAllKinds) {
      const ProjectorPair ap(a, g);
      CouplingReport rep{f, a, {}};
      rep.ratios.reserve(seeds.size());
      for (uint64_t s : seeds) {
        SeededRng rng = SeededRng(s).derive(
            {static_cast<uint64_t>(f), static_cast<uint64_t>(a)});
        double r = ratio_once(fp, ap, rng);
        if (std::isnan(r)) r = ratio_once(fp, ap, rng);
        if (std::isnan(r)) throw std::runtime_error("coupling_matrix: zero denominator");
        rep.ratios.push_back(r);
      }
      out.push_back(std::move(rep));
    }
  }
  return out;
}

std::string coupling_csv(const std::vector<CouplingReport>& reports) {
  std::ostringstream os;
  os << "fwd,adj,max_abs_r_minus_1,digits\n";
  os.precision(17);
  for (const auto& r : reports)
    os << to_token(r.forward_kind) << ',' << to_token(r.adjoint_kind) << ','
       << r.max_abs_r_minus_1() << ',' << r.digits_of_agreement() << '\n';
  return os.str();
}

}  // namespace tomolab
