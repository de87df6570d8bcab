#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dro/rng.hpp"
#include "dro/sample.hpp"

namespace dro {

// Explicit raw-label -> model-label pairs applied at load time (e.g. 0 -> -1
// for binary logistic data stored with {0, 1} labels).
struct LabelMap {
  std::vector<std::pair<double, double>> pairs;
  double apply(double raw) const;
};

// Parses "raw:mapped,raw:mapped,..." into a LabelMap.
LabelMap parse_label_pairs(const std::string& text);

// Immutable after construction. label_domain holds the distinct labels in
// ascending order; provenance records the source and every transform in
// application order.
class Dataset {
 public:
  Dataset(std::vector<DataSample> samples, std::size_t n_features, std::string source);

  const std::vector<DataSample>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  std::size_t n_features() const { return n_features_; }
  const std::vector<double>& label_domain() const { return label_domain_; }
  bool has_label(double label) const;
  std::size_t count_label(double label) const;

  const std::string& source() const { return source_; }
  const std::vector<std::string>& transforms() const { return transforms_; }
  void append_transform(std::string description);

 private:
  std::vector<DataSample> samples_;
  std::size_t n_features_;
  std::vector<double> label_domain_;
  std::string source_;
  std::vector<std::string> transforms_;
};

// Deletes a seeded-uniform fraction of the samples carrying target_label.
struct ContaminationSpec {
  double target_label = 0.0;
  double deletion_fraction = 0.0;  // in [0, 1]; 1 removes every match
  std::uint64_t seed = 0;
};

// Sparse text format: one sample per line, "label index:value ...",
// 1-based indices. n_features_override extends (never truncates) the
// inferred feature count; labels go through label_map when given.
Dataset load_libsvm(const std::string& path, std::size_t n_features_override = 0,
                    const LabelMap* label_map = nullptr);

// Writes in the same format (indices of nonzero features, 1-based).
void save_libsvm(const Dataset& ds, const std::string& path);

// Dense CSV with a header row. The column named "label" carries the label
// (falls back to the last column when absent); all other columns are
// features in file order.
Dataset load_csv(const std::string& path);

// Removes floor(fraction * count(target_label)) uniformly chosen matching
// samples. Survivors keep their order and exact bytes.
Dataset contaminate(const Dataset& ds, const ContaminationSpec& spec);

enum class NormalizeMode { none, unit_scale, standardize };

NormalizeMode parse_normalize_mode(const std::string& name);
std::string normalize_mode_name(NormalizeMode mode);

// Feature transform fitted on one dataset and applicable to another, so test
// data can reuse the training statistics.
struct NormalizerRecord {
  NormalizeMode mode = NormalizeMode::none;
  std::vector<double> offset;  // subtracted
  std::vector<double> scale;   // then divided by
  Dataset apply(const Dataset& ds) const;
};

// Fits the transform on ds and returns the transformed dataset plus the
// record. standardize leaves zero-variance features unchanged; unit_scale
// divides by the per-feature max absolute value.
std::pair<Dataset, NormalizerRecord> normalize_features(const Dataset& ds,
                                                        NormalizeMode mode);

// Appends a constant-1 coordinate to every sample (bias term).
Dataset add_bias(const Dataset& ds);

// I.i.d. uniform draws with replacement, deterministic per seed. An optional
// draw budget turns the stream finite; exceeding it throws
// SampleStreamExhausted.
class UniformSampler final : public SampleSource {
 public:
  UniformSampler(const Dataset& ds, std::uint64_t seed,
                 std::optional<std::uint64_t> max_draws = std::nullopt);
  const DataSample& next() override;
  std::uint64_t draws() const { return draws_; }

 private:
  const Dataset* ds_;
  Rng rng_;
  std::uint64_t draws_ = 0;
  std::optional<std::uint64_t> max_draws_;
};

}  // namespace dro
