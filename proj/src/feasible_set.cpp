#include "dro/feasible_set.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "dro/kernels.hpp"

namespace dro {

namespace {

void check_dim(std::size_t expect, std::size_t got, const char* what) {
  if (expect != got)
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

}  // namespace

FeasibleSet FeasibleSet::box(std::vector<double> lower, std::vector<double> upper) {
  if (lower.empty() || lower.size() != upper.size())
    throw std::invalid_argument("FeasibleSet::box: bad bounds");
  for (std::size_t i = 0; i < lower.size(); ++i)
    if (!(lower[i] <= upper[i]))
      throw std::invalid_argument("FeasibleSet::box: lower > upper");
  FeasibleSet s;
  s.variant_ = Variant::box;
  s.dim_ = lower.size();
  s.lower_ = std::move(lower);
  s.upper_ = std::move(upper);
  return s;
}

FeasibleSet FeasibleSet::centered_box(std::size_t dim, double half_width) {
  if (dim == 0 || !(half_width > 0.0))
    throw std::invalid_argument("FeasibleSet::centered_box: bad parameters");
  return box(std::vector<double>(dim, -half_width), std::vector<double>(dim, half_width));
}

FeasibleSet FeasibleSet::l2_ball(std::vector<double> center, double radius) {
  if (center.empty() || !(radius > 0.0))
    throw std::invalid_argument("FeasibleSet::l2_ball: bad parameters");
  FeasibleSet s;
  s.variant_ = Variant::l2_ball;
  s.dim_ = center.size();
  s.center_ = std::move(center);
  s.radius_ = radius;
  return s;
}

FeasibleSet FeasibleSet::simplex(std::size_t dim, double scale) {
  if (dim == 0 || !(scale > 0.0))
    throw std::invalid_argument("FeasibleSet::simplex: bad parameters");
  FeasibleSet s;
  s.variant_ = Variant::simplex;
  s.dim_ = dim;
  s.scale_ = scale;
  return s;
}

void FeasibleSet::project(std::span<const double> p, std::span<double> out) const {
  check_dim(dim_, p.size(), "FeasibleSet::project");
  check_dim(dim_, out.size(), "FeasibleSet::project out");
  switch (variant_) {
    case Variant::box:
      kern::clamp(p, lower_, upper_, out);
      return;
    case Variant::l2_ball: {
      double sq = 0.0;
      for (std::size_t i = 0; i < dim_; ++i) {
        const double d = p[i] - center_[i];
        sq += d * d;
      }
      const double dist = std::sqrt(sq);
      if (dist <= radius_) {
        std::copy(p.begin(), p.end(), out.begin());
      } else {
        const double t = radius_ / dist;
        for (std::size_t i = 0; i < dim_; ++i) out[i] = center_[i] + t * (p[i] - center_[i]);
      }
      return;
    }
    case Variant::simplex: {
      // Sort-based thresholding: find the largest active prefix of the
      // descending sort and shift it onto the simplex.
      std::vector<double> sorted(p.begin(), p.end());
      std::sort(sorted.begin(), sorted.end(), std::greater<double>());
      double cumsum = 0.0;
      double theta = (kern::sum(sorted) - scale_) / static_cast<double>(dim_);
      for (std::size_t j = 0; j < dim_; ++j) {
        cumsum += sorted[j];
        const double cand = (cumsum - scale_) / static_cast<double>(j + 1);
        if (j + 1 < dim_ && sorted[j + 1] <= cand) {
          theta = cand;
          break;
        }
        theta = cand;
      }
      for (std::size_t i = 0; i < dim_; ++i) out[i] = std::max(0.0, p[i] - theta);
      return;
    }
  }
}

std::vector<double> FeasibleSet::project(std::span<const double> p) const {
  std::vector<double> out(dim_);
  project(p, out);
  return out;
}

bool FeasibleSet::contains(std::span<const double> x, double tol) const {
  check_dim(dim_, x.size(), "FeasibleSet::contains");
  std::vector<double> proj(dim_);
  project(x, proj);
  double sq = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    const double d = x[i] - proj[i];
    sq += d * d;
  }
  return sq <= tol * tol;
}

GapDiagnostic FeasibleSet::solve_prox_step(std::span<const double> x,
                                           std::span<const double> z, double c) const {
  check_dim(dim_, x.size(), "solve_prox_step x");
  check_dim(dim_, z.size(), "solve_prox_step z");
  if (!(c > 0.0)) throw std::invalid_argument("solve_prox_step: c must be positive");
  if (!contains(x, kFeasTol))
    throw std::invalid_argument("solve_prox_step: x is outside the feasible set");

  // y_bar is the projection of x - z/c onto X.
  std::vector<double> target(dim_);
  for (std::size_t i = 0; i < dim_; ++i) target[i] = x[i] - z[i] / c;
  GapDiagnostic diag;
  diag.y_bar.resize(dim_);
  project(target, diag.y_bar);

  double inner = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    const double d = diag.y_bar[i] - x[i];
    inner += z[i] * d;
    sq += d * d;
  }
  diag.eta = inner + 0.5 * c * sq;
  return diag;
}

}  // namespace dro
