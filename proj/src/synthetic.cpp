#include "dro/synthetic.hpp"

#include <cmath>
#include <stdexcept>

#include "dro/rng.hpp"

namespace dro {

namespace {

std::vector<double> random_direction(Rng& rng, std::size_t dim, double length) {
  std::vector<double> v(dim);
  double sq = 0.0;
  for (auto& c : v) {
    c = rng.normal();
    sq += c * c;
  }
  const double norm = std::sqrt(sq);
  const double s = norm > 0.0 ? length / norm : 0.0;
  for (auto& c : v) c *= s;
  return v;
}

}  // namespace

Dataset make_binary_problem(const BinarySyntheticSpec& spec) {
  if (spec.dim == 0 || spec.count == 0)
    throw std::invalid_argument("make_binary_problem: dim and count must be positive");
  if (!(spec.minority_fraction >= 0.0) || !(spec.minority_fraction <= 1.0))
    throw std::invalid_argument("make_binary_problem: minority_fraction must be in [0,1]");
  if (!(spec.noise >= 0.0) || !(spec.separation >= 0.0))
    throw std::invalid_argument("make_binary_problem: noise and separation must be >= 0");

  Rng rng(spec.seed);
  const std::vector<double> axis = random_direction(rng, spec.dim, spec.separation / 2.0);

  std::vector<DataSample> samples;
  samples.reserve(spec.count);
  for (std::size_t i = 0; i < spec.count; ++i) {
    DataSample s;
    s.label = rng.uniform() < spec.minority_fraction ? 1.0 : -1.0;
    s.features.resize(spec.dim);
    for (std::size_t j = 0; j < spec.dim; ++j)
      s.features[j] = s.label * axis[j] + spec.noise * rng.normal();
    samples.push_back(std::move(s));
  }
  return Dataset(std::move(samples), spec.dim,
                 "synthetic:binary(dim=" + std::to_string(spec.dim) +
                     ",count=" + std::to_string(spec.count) +
                     ",seed=" + std::to_string(spec.seed) + ")");
}

Dataset make_blobs_problem(const BlobsSpec& spec) {
  if (spec.dim == 0 || spec.count == 0 || spec.n_classes < 2)
    throw std::invalid_argument("make_blobs_problem: need dim, count > 0 and >= 2 classes");
  std::vector<double> props = spec.proportions;
  if (props.empty()) props.assign(spec.n_classes, 1.0 / spec.n_classes);
  if (props.size() != spec.n_classes)
    throw std::invalid_argument("make_blobs_problem: proportions size mismatch");
  double total = 0.0;
  for (double p : props) {
    if (!(p > 0.0)) throw std::invalid_argument("make_blobs_problem: proportions must be positive");
    total += p;
  }
  for (auto& p : props) p /= total;

  Rng rng(spec.seed);
  std::vector<std::vector<double>> means;
  means.reserve(spec.n_classes);
  for (std::size_t c = 0; c < spec.n_classes; ++c)
    means.push_back(random_direction(rng, spec.dim, spec.separation / 2.0));

  std::vector<DataSample> samples;
  samples.reserve(spec.count);
  for (std::size_t i = 0; i < spec.count; ++i) {
    const double r = rng.uniform();
    std::size_t cls = spec.n_classes - 1;
    double acc = 0.0;
    for (std::size_t c = 0; c < spec.n_classes; ++c) {
      acc += props[c];
      if (r < acc) {
        cls = c;
        break;
      }
    }
    DataSample s;
    s.label = static_cast<double>(cls);
    s.features.resize(spec.dim);
    for (std::size_t j = 0; j < spec.dim; ++j)
      s.features[j] = means[cls][j] + spec.noise * rng.normal();
    samples.push_back(std::move(s));
  }
  return Dataset(std::move(samples), spec.dim,
                 "synthetic:blobs(dim=" + std::to_string(spec.dim) +
                     ",count=" + std::to_string(spec.count) +
                     ",classes=" + std::to_string(spec.n_classes) +
                     ",seed=" + std::to_string(spec.seed) + ")");
}

}  // namespace dro
