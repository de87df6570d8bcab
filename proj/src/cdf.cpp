#include "dro/cdf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "dro/rng.hpp"

namespace dro {

namespace {

std::string fmt_g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<double> make_ordinates(std::size_t repeats) {
  std::vector<double> ord(repeats);
  for (std::size_t i = 0; i < repeats; ++i)
    ord[i] = static_cast<double>(i + 1) / static_cast<double>(repeats);
  return ord;
}

}  // namespace

CdfArtifact evaluate_cdf(const LossModel& model, std::span<const double> x,
                         const Dataset& test, std::size_t group_size,
                         std::size_t repeats, std::uint64_t seed,
                         bool with_replacement) {
  if (test.size() == 0) throw std::invalid_argument("evaluate_cdf: empty test set");
  if (group_size < 1 || repeats < 1)
    throw std::invalid_argument("evaluate_cdf: group_size and repeats must be >= 1");
  if (!with_replacement && group_size != test.size())
    throw std::invalid_argument(
        "evaluate_cdf: without replacement only the exhaustive mode "
        "(group_size == test size) is supported");

  CdfArtifact cdf;
  cdf.values.reserve(repeats);
  if (!with_replacement) {
    double sum = 0.0;
    for (const auto& s : test.samples()) sum += model.value(x, s);
    cdf.values.assign(repeats, sum / static_cast<double>(test.size()));
  } else {
    Rng rng(seed);
    for (std::size_t r = 0; r < repeats; ++r) {
      double sum = 0.0;
      for (std::size_t g = 0; g < group_size; ++g)
        sum += model.value(x, test.samples()[rng.uniform_index(test.size())]);
      cdf.values.push_back(sum / static_cast<double>(group_size));
    }
    std::sort(cdf.values.begin(), cdf.values.end());
  }
  cdf.ordinates = make_ordinates(repeats);
  return cdf;
}

double cdf_quantile(const CdfArtifact& cdf, double q) {
  if (cdf.values.empty()) throw std::invalid_argument("cdf_quantile: empty artifact");
  if (!(q > 0.0) || !(q <= 1.0))
    throw std::invalid_argument("cdf_quantile: q must be in (0, 1]");
  const auto r = static_cast<double>(cdf.values.size());
  auto idx = static_cast<std::size_t>(std::ceil(q * r));
  idx = std::min(idx, cdf.values.size());
  return cdf.values[idx - 1];
}

double cdf_mean(const CdfArtifact& cdf) {
  if (cdf.values.empty()) throw std::invalid_argument("cdf_mean: empty artifact");
  double sum = 0.0;
  for (double v : cdf.values) sum += v;
  return sum / static_cast<double>(cdf.values.size());
}

DominanceReport compare_cdfs(const CdfArtifact& a, const CdfArtifact& b) {
  if (a.values.empty() || a.values.size() != b.values.size())
    throw std::invalid_argument("compare_cdfs: artifacts must have equal repeats");

  DominanceReport rep;
  std::size_t wins = 0;
  for (int d = 1; d <= 9; ++d) {
    const double q = d / 10.0;
    const double diff = cdf_quantile(a, q) - cdf_quantile(b, q);
    rep.decile_diff[d - 1] = diff;
    if (diff <= 0.0) ++wins;
  }
  rep.dominance_fraction = wins / 9.0;

  const auto n = static_cast<double>(a.values.size());
  double ks = 0.0;
  auto step = [](const std::vector<double>& v, double t) {
    return static_cast<double>(std::upper_bound(v.begin(), v.end(), t) - v.begin());
  };
  for (const auto* v : {&a.values, &b.values})
    for (double t : *v)
      ks = std::max(ks, std::abs(step(a.values, t) - step(b.values, t)) / n);
  rep.ks_statistic = ks;
  return rep;
}

void write_cdf_csv(const CdfArtifact& cdf, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open cdf file: " + path);
  out << "value,cdf\n";
  for (std::size_t i = 0; i < cdf.values.size(); ++i)
    out << fmt_g17(cdf.values[i]) << ',' << fmt_g17(cdf.ordinates[i]) << '\n';
  if (!out) throw std::runtime_error("failed writing cdf file: " + path);
}

CdfArtifact read_cdf_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open cdf file: " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("value,cdf", 0) != 0)
    throw std::runtime_error(path + ": missing value,cdf header");

  CdfArtifact cdf;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected value,cdf");
    std::size_t used = 0;
    double value;
    try {
      value = std::stod(line.substr(0, comma), &used);
    } catch (const std::exception&) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": bad value field");
    }
    if (used != comma)
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": bad value field");
    if (!cdf.values.empty() && value < cdf.values.back())
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": values not sorted");
    cdf.values.push_back(value);
  }
  if (cdf.values.empty()) throw std::runtime_error(path + ": no cdf rows");
  cdf.ordinates = make_ordinates(cdf.values.size());
  return cdf;
}

}  // namespace dro
