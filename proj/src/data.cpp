#include "dro/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace dro {

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

[[noreturn]] void parse_error(const std::string& path, std::size_t line_no,
                              const std::string& what) {
  std::ostringstream msg;
  msg << path << ":" << line_no << ": " << what;
  throw std::runtime_error(msg.str());
}

}  // namespace

double LabelMap::apply(double raw) const {
  for (const auto& [from, to] : pairs)
    if (raw == from) return to;
  return raw;
}

LabelMap parse_label_pairs(const std::string& text) {
  LabelMap map;
  std::istringstream in(text);
  std::string entry;
  while (std::getline(in, entry, ',')) {
    const auto colon = entry.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("label map entry '" + entry + "': expected raw:mapped");
    std::size_t used = 0;
    const std::string raw = entry.substr(0, colon);
    const std::string mapped = entry.substr(colon + 1);
    const double from = std::stod(raw, &used);
    if (used != raw.size())
      throw std::invalid_argument("label map entry '" + entry + "': bad raw label");
    const double to = std::stod(mapped, &used);
    if (used != mapped.size())
      throw std::invalid_argument("label map entry '" + entry + "': bad mapped label");
    map.pairs.emplace_back(from, to);
  }
  if (map.pairs.empty()) throw std::invalid_argument("empty label map");
  return map;
}

Dataset::Dataset(std::vector<DataSample> samples, std::size_t n_features,
                 std::string source)
    : samples_(std::move(samples)), n_features_(n_features), source_(std::move(source)) {
  std::set<double> labels;
  for (const auto& s : samples_) {
    if (s.features.size() != n_features_)
      throw std::invalid_argument("Dataset: inconsistent feature dimension");
    labels.insert(s.label);
  }
  label_domain_.assign(labels.begin(), labels.end());
}

bool Dataset::has_label(double label) const {
  return std::binary_search(label_domain_.begin(), label_domain_.end(), label);
}

std::size_t Dataset::count_label(double label) const {
  std::size_t n = 0;
  for (const auto& s : samples_)
    if (s.label == label) ++n;
  return n;
}

void Dataset::append_transform(std::string description) {
  transforms_.push_back(std::move(description));
}

Dataset load_libsvm(const std::string& path, std::size_t n_features_override,
                    const LabelMap* label_map) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);

  struct SparseRow {
    double label;
    std::vector<std::pair<std::size_t, double>> entries;
  };
  std::vector<SparseRow> rows;
  std::size_t max_index = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    // Strip trailing CR and skip blank lines.
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::istringstream ls(line);
    SparseRow row;
    if (!(ls >> row.label)) parse_error(path, line_no, "missing label");
    std::string tok;
    while (ls >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos)
        parse_error(path, line_no, "malformed entry '" + tok + "' (expected index:value)");
      std::size_t idx = 0;
      double val = 0.0;
      try {
        std::size_t used = 0;
        idx = std::stoull(tok.substr(0, colon), &used);
        if (used != colon) throw std::invalid_argument("");
        val = std::stod(tok.substr(colon + 1), &used);
        if (used != tok.size() - colon - 1) throw std::invalid_argument("");
      } catch (const std::exception&) {
        parse_error(path, line_no, "malformed entry '" + tok + "'");
      }
      if (idx == 0) parse_error(path, line_no, "feature index 0 (indices are 1-based)");
      row.entries.emplace_back(idx, val);
      max_index = std::max(max_index, idx);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error(path + ": no samples");

  const std::size_t n_features = std::max(max_index, n_features_override);
  if (n_features == 0) throw std::runtime_error(path + ": no features");
  std::vector<DataSample> samples;
  samples.reserve(rows.size());
  for (auto& row : rows) {
    DataSample s;
    s.features.assign(n_features, 0.0);
    for (const auto& [idx, val] : row.entries) s.features[idx - 1] = val;
    s.label = label_map ? label_map->apply(row.label) : row.label;
    samples.push_back(std::move(s));
  }
  Dataset ds(std::move(samples), n_features, path);
  ds.append_transform("load_libsvm(n_features=" + std::to_string(n_features) + ")");
  return ds;
}

void save_libsvm(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const auto& s : ds.samples()) {
    out << format_double(s.label);
    for (std::size_t i = 0; i < s.features.size(); ++i)
      if (s.features[i] != 0.0) out << ' ' << (i + 1) << ':' << format_double(s.features[i]);
    out << '\n';
  }
}

Dataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::vector<std::string> header;
  {
    std::istringstream hs(line);
    std::string col;
    while (std::getline(hs, col, ',')) header.push_back(col);
  }
  if (header.empty()) throw std::runtime_error(path + ": empty header");
  std::size_t label_col = header.size() - 1;
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == "label") label_col = i;

  std::vector<DataSample> samples;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t,") == std::string::npos) continue;
    std::istringstream ls(line);
    std::string cell;
    DataSample s;
    std::size_t col = 0;
    while (std::getline(ls, cell, ',')) {
      double v = 0.0;
      try {
        std::size_t used = 0;
        v = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument("");
      } catch (const std::exception&) {
        parse_error(path, line_no, "non-numeric cell '" + cell + "'");
      }
      if (col == label_col)
        s.label = v;
      else
        s.features.push_back(v);
      ++col;
    }
    if (col != header.size())
      parse_error(path, line_no, "expected " + std::to_string(header.size()) + " columns");
    samples.push_back(std::move(s));
  }
  if (samples.empty()) throw std::runtime_error(path + ": no samples");
  Dataset ds(std::move(samples), header.size() - 1, path);
  ds.append_transform("load_csv");
  return ds;
}

Dataset contaminate(const Dataset& ds, const ContaminationSpec& spec) {
  if (spec.deletion_fraction < 0.0 || spec.deletion_fraction > 1.0)
    throw std::invalid_argument("contaminate: deletion_fraction must be in [0, 1]");
  if (!ds.has_label(spec.target_label))
    throw std::invalid_argument("contaminate: target label not in dataset label domain");

  std::vector<std::size_t> matches;
  for (std::size_t i = 0; i < ds.size(); ++i)
    if (ds.samples()[i].label == spec.target_label) matches.push_back(i);

  const std::size_t to_delete = static_cast<std::size_t>(
      std::floor(spec.deletion_fraction * static_cast<double>(matches.size())));

  // Partial Fisher-Yates over the match list picks the victims uniformly.
  Rng rng(spec.seed);
  std::vector<bool> deleted(ds.size(), false);
  for (std::size_t i = 0; i < to_delete; ++i) {
    const std::size_t j = i + rng.uniform_index(matches.size() - i);
    std::swap(matches[i], matches[j]);
    deleted[matches[i]] = true;
  }

  std::vector<DataSample> survivors;
  survivors.reserve(ds.size() - to_delete);
  for (std::size_t i = 0; i < ds.size(); ++i)
    if (!deleted[i]) survivors.push_back(ds.samples()[i]);

  Dataset out(std::move(survivors), ds.n_features(), ds.source());
  for (const auto& t : ds.transforms()) out.append_transform(t);
  std::ostringstream desc;
  desc << "contaminate(label=" << format_double(spec.target_label)
       << ", fraction=" << format_double(spec.deletion_fraction) << ", seed=" << spec.seed
       << ", removed=" << to_delete << ")";
  out.append_transform(desc.str());
  return out;
}

NormalizeMode parse_normalize_mode(const std::string& name) {
  if (name == "none") return NormalizeMode::none;
  if (name == "unit_scale") return NormalizeMode::unit_scale;
  if (name == "standardize") return NormalizeMode::standardize;
  throw std::invalid_argument("unknown normalize mode '" + name + "'");
}

std::string normalize_mode_name(NormalizeMode mode) {
  switch (mode) {
    case NormalizeMode::none: return "none";
    case NormalizeMode::unit_scale: return "unit_scale";
    case NormalizeMode::standardize: return "standardize";
  }
  return "none";
}

Dataset NormalizerRecord::apply(const Dataset& ds) const {
  if (mode == NormalizeMode::none) {
    Dataset out = ds;
    out.append_transform("normalize(none)");
    return out;
  }
  if (offset.size() != ds.n_features() || scale.size() != ds.n_features())
    throw std::invalid_argument("NormalizerRecord: dimension mismatch");
  std::vector<DataSample> samples = ds.samples();
  for (auto& s : samples)
    for (std::size_t j = 0; j < s.features.size(); ++j)
      s.features[j] = (s.features[j] - offset[j]) / scale[j];
  Dataset out(std::move(samples), ds.n_features(), ds.source());
  for (const auto& t : ds.transforms()) out.append_transform(t);
  out.append_transform("normalize(" + normalize_mode_name(mode) + ")");
  return out;
}

std::pair<Dataset, NormalizerRecord> normalize_features(const Dataset& ds,
                                                        NormalizeMode mode) {
  NormalizerRecord rec;
  rec.mode = mode;
  if (mode == NormalizeMode::none) return {rec.apply(ds), rec};

  const std::size_t d = ds.n_features();
  const double n = static_cast<double>(ds.size());
  rec.offset.assign(d, 0.0);
  rec.scale.assign(d, 1.0);
  if (mode == NormalizeMode::unit_scale) {
    std::vector<double> max_abs(d, 0.0);
    for (const auto& s : ds.samples())
      for (std::size_t j = 0; j < d; ++j)
        max_abs[j] = std::max(max_abs[j], std::abs(s.features[j]));
    // A feature that is identically zero keeps scale 1.
    for (std::size_t j = 0; j < d; ++j) rec.scale[j] = max_abs[j] > 0.0 ? max_abs[j] : 1.0;
  } else {  // standardize
    std::vector<double> mean(d, 0.0), sq(d, 0.0);
    for (const auto& s : ds.samples())
      for (std::size_t j = 0; j < d; ++j) mean[j] += s.features[j];
    for (std::size_t j = 0; j < d; ++j) mean[j] /= n;
    for (const auto& s : ds.samples())
      for (std::size_t j = 0; j < d; ++j) {
        const double c = s.features[j] - mean[j];
        sq[j] += c * c;
      }
    for (std::size_t j = 0; j < d; ++j) {
      const double var = sq[j] / n;
      if (var > 0.0) {
        rec.offset[j] = mean[j];
        rec.scale[j] = std::sqrt(var);
      }
      // Zero-variance features stay untouched (offset 0, scale 1).
    }
  }
  return {rec.apply(ds), rec};
}

Dataset add_bias(const Dataset& ds) {
  std::vector<DataSample> samples = ds.samples();
  for (auto& s : samples) s.features.push_back(1.0);
  Dataset out(std::move(samples), ds.n_features() + 1, ds.source());
  for (const auto& t : ds.transforms()) out.append_transform(t);
  out.append_transform("add_bias");
  return out;
}

UniformSampler::UniformSampler(const Dataset& ds, std::uint64_t seed,
                               std::optional<std::uint64_t> max_draws)
    : ds_(&ds), rng_(seed), max_draws_(max_draws) {
  if (ds.size() == 0) throw std::invalid_argument("UniformSampler: empty dataset");
}

const DataSample& UniformSampler::next() {
  if (max_draws_ && draws_ >= *max_draws_) throw SampleStreamExhausted();
  ++draws_;
  return ds_->samples()[rng_.uniform_index(ds_->size())];
}

}  // namespace dro
