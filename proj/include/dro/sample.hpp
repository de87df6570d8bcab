#pragma once

#include <stdexcept>
#include <vector>

namespace dro {

// One observation: feature vector a and label b (a class index for the MLP,
// +/-1 for binary models, a regression target for least squares).
struct DataSample {
  std::vector<double> features;
  double label = 0.0;
};

// Thrown by finite sample sources once their draw budget is spent.
class SampleStreamExhausted : public std::runtime_error {
 public:
  SampleStreamExhausted() : std::runtime_error("sample source exhausted") {}
};

// A stream of data draws. Implementations own their randomness; one solver
// instance owns one source.
class SampleSource {
 public:
  virtual ~SampleSource() = default;
  virtual const DataSample& next() = 0;
};

}  // namespace dro
