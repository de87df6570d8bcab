#pragma once

#include <span>
#include <vector>

namespace dro {

// Feasibility tolerance used for solver preconditions: a point is accepted
// as a member when it lies within this distance of its projection.
inline constexpr double kFeasTol = 1e-9;

// Result of the proximal subproblem
//   min over y in X of <z, y - x> + (c/2) ||y - x||^2.
// eta is the (nonpositive) minimum value and y_bar the minimizer; eta = 0
// exactly when y_bar = x.
struct GapDiagnostic {
  double eta = 0.0;
  std::vector<double> y_bar;
};

// Convex compact feasible set with exact Euclidean projection. Three
// variants: a coordinate box, an l2 ball, and the scaled probability
// simplex {y >= 0, sum y = scale}.
class FeasibleSet {
 public:
  enum class Variant { box, l2_ball, simplex };

  static FeasibleSet box(std::vector<double> lower, std::vector<double> upper);
  // Cube [-half_width, half_width]^dim.
  static FeasibleSet centered_box(std::size_t dim, double half_width);
  static FeasibleSet l2_ball(std::vector<double> center, double radius);
  static FeasibleSet simplex(std::size_t dim, double scale);

  Variant variant() const { return variant_; }
  std::size_t dimension() const { return dim_; }

  // argmin over y in X of ||y - p||; exact for all variants.
  std::vector<double> project(std::span<const double> p) const;
  void project(std::span<const double> p, std::span<double> out) const;

  // Distance-to-set membership test: ||x - project(x)|| <= tol.
  bool contains(std::span<const double> x, double tol = kFeasTol) const;

  // Solves the proximal subproblem at (x, z) with coefficient c > 0.
  // Requires x in X within kFeasTol (a violated solver invariant otherwise).
  GapDiagnostic solve_prox_step(std::span<const double> x, std::span<const double> z,
                                double c) const;

 private:
  FeasibleSet() = default;

  Variant variant_ = Variant::box;
  std::size_t dim_ = 0;
  std::vector<double> lower_, upper_;   // box
  std::vector<double> center_;          // l2_ball
  double radius_ = 0.0;                 // l2_ball
  double scale_ = 0.0;                  // simplex
};

}  // namespace dro
