#pragma once

#include <cstdint>
#include <vector>

#include "dro/data.hpp"

namespace dro {

// Binary classification data with labels in {-1, +1}. Class-conditional
// gaussians centered at +-(separation/2) along a seeded random direction;
// +1 is the minority class drawn with probability minority_fraction.
struct BinarySyntheticSpec {
  std::size_t dim = 5;
  std::size_t count = 200;
  std::uint64_t seed = 0;
  double minority_fraction = 0.25;
  double separation = 2.0;
  double noise = 1.0;
};

Dataset make_binary_problem(const BinarySyntheticSpec& spec);

// Multi-class gaussian blobs with labels 0..n_classes-1. Class means are
// seeded random directions of length separation/2; proportions empty means
// uniform class weights.
struct BlobsSpec {
  std::size_t dim = 20;
  std::size_t count = 600;
  std::uint64_t seed = 0;
  std::size_t n_classes = 3;
  std::vector<double> proportions;
  double separation = 4.0;
  double noise = 1.0;
};

Dataset make_blobs_problem(const BlobsSpec& spec);

}  // namespace dro
