#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "dro/data.hpp"
#include "dro/sgd.hpp"
#include "dro/synthetic.hpp"

using namespace dro;

namespace {

Dataset repeated_sample(std::vector<double> features, double label, int count) {
  const std::size_t n = features.size();
  std::vector<DataSample> rows(count, DataSample{std::move(features), label});
  return Dataset(std::move(rows), n, "inline");
}

}  // namespace

TEST_CASE("one dimensional least squares converges to the target") {
  // Every sample is (a=1, b=3): the mean loss is (x-3)^2.
  const auto data = repeated_sample({1.0}, 3.0, 10);
  const LeastSquaresLoss model(1);
  const auto set = FeasibleSet::centered_box(1, 10.0);
  const auto schedule = StepSchedule::polynomial(0.4, 0.75);

  SgdParams params;
  params.max_iters = 4000;
  const auto res = run_sgd(params, schedule, set, model, data, 500);
  REQUIRE(res.x.size() == 1);
  CHECK(std::abs(res.x[0] - 3.0) < 1e-3);

  // Final record: stationarity proxy near zero, exact mean loss near zero,
  // u_minus_h pinned at zero, one sample per iteration.
  const auto& last = res.records.back();
  CHECK(last.k == params.max_iters);
  CHECK(last.eta < 1e-2);
  CHECK(last.u_minus_h == 0.0);
  CHECK(last.robust_obj < 1e-5);
  CHECK(last.samples == static_cast<std::int64_t>(params.max_iters));
}

TEST_CASE("projection keeps the iterate on the feasible set") {
  // Unconstrained optimum x = 3 sits outside the box [-1, 1].
  const auto data = repeated_sample({1.0}, 3.0, 5);
  const LeastSquaresLoss model(1);
  const auto set = FeasibleSet::centered_box(1, 1.0);
  const auto schedule = StepSchedule::polynomial(0.4, 0.75);

  SgdParams params;
  params.max_iters = 2000;
  const auto res = run_sgd(params, schedule, set, model, data, 200);
  CHECK(res.x[0] == doctest::Approx(1.0).epsilon(1e-9));
  // The constrained point is not stationary for the unconstrained gradient,
  // but it is a fixed point of the projected step.
  CHECK(set.contains(res.x, 1e-12));
}

TEST_CASE("same seed, same trajectory; different seed differs") {
  const auto data = make_binary_problem({.dim = 4, .count = 90, .seed = 5});
  const LogisticLoss model(4);
  const auto set = FeasibleSet::centered_box(4, 3.0);
  const auto schedule = StepSchedule::polynomial(1.0, 0.75);

  SgdParams params;
  params.max_iters = 300;
  params.seed = 42;
  const auto a = run_sgd(params, schedule, set, model, data, 50);
  const auto b = run_sgd(params, schedule, set, model, data, 50);
  CHECK(a.x == b.x);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].eta == b.records[i].eta);
    CHECK(a.records[i].robust_obj == b.records[i].robust_obj);
  }

  params.seed = 43;
  const auto c = run_sgd(params, schedule, set, model, data, 50);
  CHECK(c.x != a.x);
}

TEST_CASE("batching averages the drawn subgradients") {
  const auto data = make_binary_problem({.dim = 3, .count = 40, .seed = 8});
  const LogisticLoss model(3);
  const auto set = FeasibleSet::centered_box(3, 3.0);
  const auto schedule = StepSchedule::polynomial(1.0, 0.75);

  SgdParams params;
  params.batch = 4;
  params.max_iters = 100;
  const auto res = run_sgd(params, schedule, set, model, data, 100);
  CHECK(res.records.back().samples == 400);

  SgdParams bad = params;
  bad.batch = 0;
  CHECK_THROWS_AS(run_sgd(bad, schedule, set, model, data, 10), std::invalid_argument);
  CHECK_THROWS_AS(run_sgd(SgdParams{.max_iters = 0}, schedule, set, model, data, 10),
                  std::invalid_argument);
}

TEST_CASE("explicit start must be feasible") {
  const auto data = repeated_sample({1.0}, 0.0, 4);
  const LeastSquaresLoss model(1);
  const auto set = FeasibleSet::centered_box(1, 1.0);
  const auto schedule = StepSchedule::polynomial(1.0, 0.75);
  SgdParams params;
  params.max_iters = 10;

  const auto res =
      run_sgd(params, schedule, set, model, data, 5, std::vector<double>{0.5});
  CHECK(set.contains(res.x, 1e-12));
  CHECK_THROWS_AS(
      run_sgd(params, schedule, set, model, data, 5, std::vector<double>{2.0}),
      std::invalid_argument);
}
