#include "dro/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "json.hpp"

#include "dro/cdf.hpp"
#include "dro/data.hpp"
#include "dro/kernels.hpp"
#include "dro/rng.hpp"
#include "dro/sgd.hpp"
#include "dro/sts.hpp"
#include "dro/synthetic.hpp"
#include "dro/version.hpp"

namespace dro {

namespace fs = std::filesystem;
using njson = nlohmann::ordered_json;

namespace {

std::string fmt_g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string kappa_tag(double kappa) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", kappa);
  return buf;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const std::string& want) {
  throw ConfigError("config key " + key + ": cannot parse '" + value + "' as " + want);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) bad_value(key, v, "a real number");
    return d;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    bad_value(key, v, "a real number");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    if (!v.empty() && v[0] == '-') bad_value(key, v, "a nonnegative integer");
    std::size_t used = 0;
    const std::uint64_t n = std::stoull(v, &used);
    if (used != v.size()) bad_value(key, v, "a nonnegative integer");
    return n;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    bad_value(key, v, "a nonnegative integer");
  }
}

std::size_t parse_size(const std::string& key, const std::string& v) {
  return static_cast<std::size_t>(parse_u64(key, v));
}

int parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const int n = std::stoi(v, &used);
    if (used != v.size()) bad_value(key, v, "an integer");
    return n;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    bad_value(key, v, "an integer");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  std::string s = v;
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  bad_value(key, v, "a boolean");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  return parts;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& part : split(v, ',')) out.push_back(parse_double(key, trim(part)));
  if (out.empty()) bad_value(key, v, "a comma-separated list of reals");
  return out;
}

std::vector<std::size_t> parse_size_list(const std::string& key, const std::string& v) {
  std::vector<std::size_t> out;
  for (const auto& part : split(v, ',')) out.push_back(parse_size(key, trim(part)));
  if (out.empty()) bad_value(key, v, "a comma-separated list of integers");
  return out;
}

std::vector<std::pair<double, double>> parse_label_map(const std::string& key,
                                                       const std::string& v) {
  try {
    return parse_label_pairs(v).pairs;
  } catch (const std::exception&) {
    bad_value(key, v, "raw:mapped label pairs");
  }
}

void set_config_value(RunConfig& c, const std::string& key, const std::string& value) {
  if (key == "model.type") c.model_type = value;
  else if (key == "model.layers") c.mlp_layers = parse_size_list(key, value);
  else if (key == "model.add_bias") c.add_bias = parse_bool(key, value);
  else if (key == "data.train") c.train_path = value;
  else if (key == "data.test") c.test_path = value;
  else if (key == "data.synthetic") c.synthetic_kind = value;
  else if (key == "data.dim") c.synth_dim = parse_size(key, value);
  else if (key == "data.train_count") c.synth_train_count = parse_size(key, value);
  else if (key == "data.test_count") c.synth_test_count = parse_size(key, value);
  else if (key == "data.minority_fraction") c.synth_minority_fraction = parse_double(key, value);
  else if (key == "data.separation") c.synth_separation = parse_double(key, value);
  else if (key == "data.noise") c.synth_noise = parse_double(key, value);
  else if (key == "data.classes") c.synth_classes = parse_size(key, value);
  else if (key == "data.normalize") c.normalize = value;
  else if (key == "data.label_map") c.label_map = parse_label_map(key, value);
  else if (key == "contamination.enabled") c.contamination_enabled = parse_bool(key, value);
  else if (key == "contamination.label") c.contamination_label = parse_double(key, value);
  else if (key == "contamination.fraction") c.contamination_fraction = parse_double(key, value);
  else if (key == "contamination.seed") c.contamination_seed = parse_u64(key, value);
  else if (key == "feasible.type") c.set_type = value;
  else if (key == "feasible.half_width") c.half_width = parse_double(key, value);
  else if (key == "feasible.radius") c.radius = parse_double(key, value);
  else if (key == "feasible.scale") c.simplex_scale = parse_double(key, value);
  else if (key == "solver.a") c.a = parse_double(key, value);
  else if (key == "solver.b") c.b = parse_double(key, value);
  else if (key == "solver.c") c.c = parse_double(key, value);
  else if (key == "solver.kappa") c.kappas = parse_double_list(key, value);
  else if (key == "solver.batch") c.batch = parse_int(key, value);
  else if (key == "solver.max_iters") c.max_iters = parse_size(key, value);
  else if (key == "solver.init") c.init = value;
  else if (key == "solver.init_scale") c.init_scale = parse_double(key, value);
  else if (key == "solver.sgd_baseline") c.sgd_baseline = parse_bool(key, value);
  else if (key == "schedule.type") c.schedule_type = value;
  else if (key == "schedule.tau0") c.tau0 = parse_double(key, value);
  else if (key == "schedule.exponent") c.exponent = parse_double(key, value);
  else if (key == "eval.group_size") c.group_size = parse_size(key, value);
  else if (key == "eval.repeats") c.repeats = parse_size(key, value);
  else if (key == "eval.seed") c.eval_seed = parse_u64(key, value);
  else if (key == "run.seed") c.seed = parse_u64(key, value);
  else if (key == "run.out") c.out_dir = value;
  else if (key == "run.telemetry_interval") c.telemetry_interval = parse_size(key, value);
  else throw ConfigError("unknown config key: " + key);
}

RunConfig config_from_ini_text(const std::string& text, const std::string& path) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw ConfigError(path + ":" + std::to_string(line_no) + ": unterminated section");
      section = trim(t.substr(1, t.size() - 2));
      if (section.empty())
        throw ConfigError(path + ":" + std::to_string(line_no) + ": empty section name");
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw ConfigError(path + ":" + std::to_string(line_no) + ": empty key");
    const std::string full = section.empty() ? key : section + "." + key;
    try {
      set_config_value(cfg, full, value);
    } catch (const ConfigError& e) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

njson config_to_json(const RunConfig& c) {
  njson j;
  j["model"]["type"] = c.model_type;
  j["model"]["layers"] = c.mlp_layers;
  j["model"]["add_bias"] = c.add_bias;
  j["data"]["train"] = c.train_path;
  j["data"]["test"] = c.test_path;
  j["data"]["synthetic"] = c.synthetic_kind;
  j["data"]["dim"] = c.synth_dim;
  j["data"]["train_count"] = c.synth_train_count;
  j["data"]["test_count"] = c.synth_test_count;
  j["data"]["minority_fraction"] = c.synth_minority_fraction;
  j["data"]["separation"] = c.synth_separation;
  j["data"]["noise"] = c.synth_noise;
  j["data"]["classes"] = c.synth_classes;
  j["data"]["normalize"] = c.normalize;
  j["data"]["label_map"] = c.label_map;
  j["contamination"]["enabled"] = c.contamination_enabled;
  j["contamination"]["label"] = c.contamination_label;
  j["contamination"]["fraction"] = c.contamination_fraction;
  if (c.contamination_seed) j["contamination"]["seed"] = *c.contamination_seed;
  j["feasible"]["type"] = c.set_type;
  j["feasible"]["half_width"] = c.half_width;
  j["feasible"]["radius"] = c.radius;
  j["feasible"]["scale"] = c.simplex_scale;
  j["solver"]["a"] = c.a;
  j["solver"]["b"] = c.b;
  j["solver"]["c"] = c.c;
  j["solver"]["kappa"] = c.kappas;
  j["solver"]["batch"] = c.batch;
  j["solver"]["max_iters"] = c.max_iters;
  j["solver"]["init"] = c.init;
  j["solver"]["init_scale"] = c.init_scale;
  j["solver"]["sgd_baseline"] = c.sgd_baseline;
  j["schedule"]["type"] = c.schedule_type;
  j["schedule"]["tau0"] = c.tau0;
  j["schedule"]["exponent"] = c.exponent;
  j["eval"]["group_size"] = c.group_size;
  j["eval"]["repeats"] = c.repeats;
  if (c.eval_seed) j["eval"]["seed"] = *c.eval_seed;
  j["run"]["seed"] = c.seed;
  j["run"]["out"] = c.out_dir;
  j["run"]["telemetry_interval"] = c.telemetry_interval;
  return j;
}

template <typename T>
void get_to_if(const njson& j, const char* key, T& out) {
  if (j.contains(key)) j.at(key).get_to(out);
}

RunConfig config_from_json(const njson& j) {
  RunConfig c;
  if (j.contains("model")) {
    const auto& m = j.at("model");
    get_to_if(m, "type", c.model_type);
    get_to_if(m, "layers", c.mlp_layers);
    get_to_if(m, "add_bias", c.add_bias);
  }
  if (j.contains("data")) {
    const auto& d = j.at("data");
    get_to_if(d, "train", c.train_path);
    get_to_if(d, "test", c.test_path);
    get_to_if(d, "synthetic", c.synthetic_kind);
    get_to_if(d, "dim", c.synth_dim);
    get_to_if(d, "train_count", c.synth_train_count);
    get_to_if(d, "test_count", c.synth_test_count);
    get_to_if(d, "minority_fraction", c.synth_minority_fraction);
    get_to_if(d, "separation", c.synth_separation);
    get_to_if(d, "noise", c.synth_noise);
    get_to_if(d, "classes", c.synth_classes);
    get_to_if(d, "normalize", c.normalize);
    get_to_if(d, "label_map", c.label_map);
  }
  if (j.contains("contamination")) {
    const auto& k = j.at("contamination");
    get_to_if(k, "enabled", c.contamination_enabled);
    get_to_if(k, "label", c.contamination_label);
    get_to_if(k, "fraction", c.contamination_fraction);
    if (k.contains("seed")) c.contamination_seed = k.at("seed").get<std::uint64_t>();
  }
  if (j.contains("feasible")) {
    const auto& f = j.at("feasible");
    get_to_if(f, "type", c.set_type);
    get_to_if(f, "half_width", c.half_width);
    get_to_if(f, "radius", c.radius);
    get_to_if(f, "scale", c.simplex_scale);
  }
  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    get_to_if(s, "a", c.a);
    get_to_if(s, "b", c.b);
    get_to_if(s, "c", c.c);
    get_to_if(s, "kappa", c.kappas);
    get_to_if(s, "batch", c.batch);
    get_to_if(s, "max_iters", c.max_iters);
    get_to_if(s, "init", c.init);
    get_to_if(s, "init_scale", c.init_scale);
    get_to_if(s, "sgd_baseline", c.sgd_baseline);
  }
  if (j.contains("schedule")) {
    const auto& s = j.at("schedule");
    get_to_if(s, "type", c.schedule_type);
    get_to_if(s, "tau0", c.tau0);
    get_to_if(s, "exponent", c.exponent);
  }
  if (j.contains("eval")) {
    const auto& e = j.at("eval");
    get_to_if(e, "group_size", c.group_size);
    get_to_if(e, "repeats", c.repeats);
    if (e.contains("seed")) c.eval_seed = e.at("seed").get<std::uint64_t>();
  }
  if (j.contains("run")) {
    const auto& r = j.at("run");
    get_to_if(r, "seed", c.seed);
    get_to_if(r, "out", c.out_dir);
    get_to_if(r, "telemetry_interval", c.telemetry_interval);
  }
  return c;
}

RunConfig config_from_manifest_text(const std::string& text, const std::string& path) {
  njson m;
  try {
    m = njson::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(path + ": invalid manifest JSON: " + e.what());
  }
  if (!m.contains("config"))
    throw ConfigError(path + ": manifest has no config object");
  RunConfig c;
  try {
    c = config_from_json(m.at("config"));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(path + ": bad manifest config: " + e.what());
  }
  if (m.contains("kernel_backend")) {
    const auto want = m.at("kernel_backend").get<std::string>();
    try {
      kern::set_backend(kern::resolve_backend(want));
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error("manifest kernel backend '" + want +
                               "' is unavailable here: " + e.what());
    }
  }
  return c;
}

void apply_override(RunConfig& cfg, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override '" + spec + "': expected section.key=value");
  const std::string key = trim(spec.substr(0, eq));
  const std::string value = trim(spec.substr(eq + 1));
  if (key.empty()) throw ConfigError("override '" + spec + "': empty key");
  set_config_value(cfg, key, value);
}

void write_failed_marker(const std::string& out_dir, const std::string& stage,
                         const std::string& what) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  std::ofstream f(fs::path(out_dir) / "FAILED");
  f << stage << ": " << what << '\n';
}

Dataset load_file(const RunConfig& c, const std::string& path, std::size_t dim_override) {
  const bool csv = path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
  if (csv) return load_csv(path);
  if (c.label_map.empty()) return load_libsvm(path, dim_override);
  const LabelMap lm{c.label_map};
  return load_libsvm(path, dim_override, &lm);
}

struct PreparedData {
  Dataset train;
  Dataset test;
  std::uint64_t contamination_seed;
};

PreparedData prepare_data(const RunConfig& c) {
  std::optional<Dataset> train, test;
  if (!c.train_path.empty()) {
    train = load_file(c, c.train_path, 0);
    test = load_file(c, c.test_path, train->n_features());
    if (test->n_features() > train->n_features())
      train = load_file(c, c.train_path, test->n_features());
    if (train->n_features() != test->n_features())
      throw std::runtime_error("train/test feature counts differ (" +
                               std::to_string(train->n_features()) + " vs " +
                               std::to_string(test->n_features()) + ")");
  } else if (c.synthetic_kind == "binary") {
    BinarySyntheticSpec s;
    s.dim = c.synth_dim;
    s.minority_fraction = c.synth_minority_fraction;
    s.separation = c.synth_separation;
    s.noise = c.synth_noise;
    s.count = c.synth_train_count;
    s.seed = derive_seed(c.seed, 10);
    train = make_binary_problem(s);
    s.count = c.synth_test_count;
    s.seed = derive_seed(c.seed, 11);
    test = make_binary_problem(s);
  } else {
    BlobsSpec s;
    s.dim = c.synth_dim;
    s.n_classes = c.synth_classes;
    s.separation = c.synth_separation;
    s.noise = c.synth_noise;
    // Class 0 carries minority_fraction of the mass; the rest is uniform.
    s.proportions.assign(c.synth_classes, (1.0 - c.synth_minority_fraction) /
                                              static_cast<double>(c.synth_classes - 1));
    s.proportions[0] = c.synth_minority_fraction;
    s.count = c.synth_train_count;
    s.seed = derive_seed(c.seed, 10);
    train = make_blobs_problem(s);
    s.count = c.synth_test_count;
    s.seed = derive_seed(c.seed, 11);
    test = make_blobs_problem(s);
  }

  const std::uint64_t cseed = c.contamination_seed.value_or(derive_seed(c.seed, 101));
  if (c.contamination_enabled && c.contamination_fraction > 0.0) {
    if (!train->has_label(c.contamination_label))
      throw std::runtime_error("contamination label " + kappa_tag(c.contamination_label) +
                               " not present in the training data");
    train = contaminate(*train, ContaminationSpec{c.contamination_label,
                                                  c.contamination_fraction, cseed});
  }

  const NormalizeMode mode = parse_normalize_mode(c.normalize);
  if (mode != NormalizeMode::none) {
    auto [tr, rec] = normalize_features(*train, mode);
    test = rec.apply(*test);
    train = std::move(tr);
  }
  if (c.add_bias) {
    train = add_bias(*train);
    test = add_bias(*test);
  }
  return PreparedData{std::move(*train), std::move(*test), cseed};
}

std::unique_ptr<LossModel> build_model(const RunConfig& c, const Dataset& train) {
  const std::size_t nf = train.n_features();
  if (c.model_type == "logistic") {
    for (double l : train.label_domain())
      if (l != -1.0 && l != 1.0)
        throw std::runtime_error("logistic loss expects labels in {-1, +1}, found " +
                                 kappa_tag(l) + "; map labels with data.label_map");
    return std::make_unique<LogisticLoss>(nf);
  }
  if (c.model_type == "least_squares") return std::make_unique<LeastSquaresLoss>(nf);
  if (c.mlp_layers.front() != nf)
    throw std::runtime_error("mlp input width " + std::to_string(c.mlp_layers.front()) +
                             " does not match the feature count " + std::to_string(nf) +
                             (c.add_bias ? " (bias column included)" : ""));
  return std::make_unique<MlpReluLoss>(c.mlp_layers);
}

FeasibleSet build_set(const RunConfig& c, std::size_t dim) {
  if (c.set_type == "box") return FeasibleSet::centered_box(dim, c.half_width);
  if (c.set_type == "ball")
    return FeasibleSet::l2_ball(std::vector<double>(dim, 0.0), c.radius);
  return FeasibleSet::simplex(dim, c.simplex_scale);
}

}  // namespace

void RunConfig::validate() const {
  if (model_type != "logistic" && model_type != "least_squares" && model_type != "mlp")
    throw ConfigError("model.type must be logistic, least_squares or mlp");
  if (model_type == "mlp") {
    if (mlp_layers.size() < 2)
      throw ConfigError("model.layers needs at least input and output widths");
    for (std::size_t w : mlp_layers)
      if (w == 0) throw ConfigError("model.layers entries must be positive");
    if (mlp_layers.back() < 2)
      throw ConfigError("model.layers output width must be >= 2 classes");
  }
  if (!train_path.empty() && test_path.empty())
    throw ConfigError("data.test is required when data.train is set");
  if (train_path.empty()) {
    if (synthetic_kind != "binary" && synthetic_kind != "blobs")
      throw ConfigError("data.synthetic must be binary or blobs");
    if (synth_dim == 0 || synth_train_count == 0 || synth_test_count == 0)
      throw ConfigError("synthetic dim and counts must be positive");
    if (!(synth_minority_fraction >= 0.0) || !(synth_minority_fraction <= 1.0))
      throw ConfigError("data.minority_fraction must be in [0, 1]");
    if (!(synth_separation >= 0.0) || !(synth_noise >= 0.0))
      throw ConfigError("data.separation and data.noise must be >= 0");
    if (synthetic_kind == "blobs") {
      if (synth_classes < 2) throw ConfigError("data.classes must be >= 2");
      if (!(synth_minority_fraction > 0.0) || !(synth_minority_fraction < 1.0))
        throw ConfigError("data.minority_fraction must be in (0, 1) for blobs");
    }
  }
  try {
    parse_normalize_mode(normalize);
  } catch (const std::exception&) {
    throw ConfigError("data.normalize must be none, unit_scale or standardize");
  }
  if (!(contamination_fraction >= 0.0) || !(contamination_fraction <= 1.0))
    throw ConfigError("contamination.fraction must be in [0, 1]");
  if (set_type != "box" && set_type != "ball" && set_type != "simplex")
    throw ConfigError("feasible.type must be box, ball or simplex");
  if (!(half_width > 0.0)) throw ConfigError("feasible.half_width must be positive");
  if (!(radius > 0.0)) throw ConfigError("feasible.radius must be positive");
  if (!(simplex_scale > 0.0)) throw ConfigError("feasible.scale must be positive");
  if (!(a > 0.0) || !(b > 0.0) || !(c > 0.0))
    throw ConfigError("solver.a, solver.b, solver.c must be positive");
  if (kappas.empty()) throw ConfigError("solver.kappa must list at least one value");
  for (double k : kappas)
    if (!(k >= 0.0) || !(k <= 1.0))
      throw ConfigError("solver.kappa values must be in [0, 1]");
  {
    std::vector<double> sorted = kappas;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw ConfigError("solver.kappa values must be distinct");
  }
  if (batch < 1) throw ConfigError("solver.batch must be >= 1");
  if (max_iters < 1) throw ConfigError("solver.max_iters must be >= 1");
  if (init != "zero" && init != "random")
    throw ConfigError("solver.init must be zero or random");
  if (init == "random" && !(init_scale > 0.0))
    throw ConfigError("solver.init_scale must be positive");
  if (schedule_type != "polynomial" && schedule_type != "constant_over_sqrt")
    throw ConfigError("schedule.type must be polynomial or constant_over_sqrt");
  if (!(tau0 > 0.0)) throw ConfigError("schedule.tau0 must be positive");
  if (schedule_type == "polynomial" && (!(exponent > 0.5) || !(exponent <= 1.0)))
    throw ConfigError("schedule.exponent must be in (0.5, 1]");
  if (group_size < 1 || repeats < 1)
    throw ConfigError("eval.group_size and eval.repeats must be >= 1");
  if (telemetry_interval < 1)
    throw ConfigError("run.telemetry_interval must be >= 1");
  if (out_dir.empty()) throw ConfigError("run.out must be set");
}

RunConfig load_run_config(const std::string& path,
                          const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  const auto first = text.find_first_not_of(" \t\r\n");
  RunConfig cfg = (first != std::string::npos && text[first] == '{')
                      ? config_from_manifest_text(text, path)
                      : config_from_ini_text(text, path);
  for (const auto& ov : overrides) apply_override(cfg, ov);
  cfg.validate();
  return cfg;
}

ExperimentResult run_experiment(const RunConfig& config) {
  config.validate();

  ExperimentResult result;
  result.out_dir = config.out_dir;
  auto out_path = [&](const std::string& name) {
    return (fs::path(config.out_dir) / name).string();
  };

  std::string stage = "setup";
  try {
    fs::create_directories(config.out_dir);
    std::error_code ec;
    fs::remove(fs::path(config.out_dir) / "FAILED", ec);

    stage = "data";
    PreparedData data = prepare_data(config);

    stage = "model";
    const std::unique_ptr<LossModel> model = build_model(config, data.train);
    const std::size_t dim = model->dimension();
    const FeasibleSet set = build_set(config, dim);
    const StepSchedule schedule =
        config.schedule_type == "polynomial"
            ? StepSchedule::polynomial(config.tau0, config.exponent)
            : StepSchedule::constant_over_sqrt(config.tau0, config.max_iters);

    std::optional<std::vector<double>> x0;
    if (config.init == "random") {
      Rng rng(derive_seed(config.seed, 3));
      std::vector<double> v(dim);
      for (auto& coord : v) coord = config.init_scale * rng.normal();
      x0 = set.project(v);
    }

    const std::uint64_t solver_seed = derive_seed(config.seed, 1);
    const std::uint64_t eval_seed = config.eval_seed.value_or(derive_seed(config.seed, 2));

    for (double kappa : config.kappas) {
      const std::string tag = kappa_tag(kappa);
      stage = "train sts kappa=" + tag;
      SolverParams sp;
      sp.a = config.a;
      sp.b = config.b;
      sp.c = config.c;
      sp.kappa = kappa;
      sp.batch = config.batch;
      sp.max_iters = config.max_iters;
      sp.seed = solver_seed;
      const RunResult rr =
          run(sp, schedule, set, *model, data.train, config.telemetry_interval, x0);

      stage = "eval sts kappa=" + tag;
      const CdfArtifact cdf = evaluate_cdf(*model, rr.state.x, data.test,
                                           config.group_size, config.repeats, eval_seed);

      stage = "artifacts sts kappa=" + tag;
      const std::string telemetry = "telemetry_sts_kappa_" + tag + ".csv";
      const std::string solution = "solution_sts_kappa_" + tag + ".txt";
      const std::string cdf_name = "cdf_sts_kappa_" + tag + ".csv";
      write_telemetry_csv(rr.records, out_path(telemetry));
      write_solution(out_path(solution), model->spec(), rr.state.x, config.add_bias);
      write_cdf_csv(cdf, out_path(cdf_name));
      result.artifacts.insert(result.artifacts.end(), {telemetry, solution, cdf_name});
      result.summaries.push_back({"sts kappa=" + tag, rr.records.back().robust_obj,
                                  cdf_mean(cdf), cdf_quantile(cdf, 0.9)});
    }

    if (config.sgd_baseline) {
      stage = "train sgd";
      SgdParams gp;
      gp.batch = config.batch;
      gp.max_iters = config.max_iters;
      gp.seed = solver_seed;
      const SgdResult gr =
          run_sgd(gp, schedule, set, *model, data.train, config.telemetry_interval, x0);

      stage = "eval sgd";
      const CdfArtifact cdf = evaluate_cdf(*model, gr.x, data.test, config.group_size,
                                           config.repeats, eval_seed);

      stage = "artifacts sgd";
      write_telemetry_csv(gr.records, out_path("telemetry_sgd.csv"));
      write_solution(out_path("solution_sgd.txt"), model->spec(), gr.x, config.add_bias);
      write_cdf_csv(cdf, out_path("cdf_sgd.csv"));
      result.artifacts.insert(result.artifacts.end(),
                              {"telemetry_sgd.csv", "solution_sgd.txt", "cdf_sgd.csv"});
      result.summaries.push_back({"sgd", gr.records.back().robust_obj, cdf_mean(cdf),
                                  cdf_quantile(cdf, 0.9)});
    }

    stage = "summary";
    {
      std::ofstream out(out_path("summary.csv"));
      if (!out) throw std::runtime_error("cannot open summary.csv");
      out << "method,final_robust_obj,mean_test_loss,p90_test_loss\n";
      for (const auto& s : result.summaries)
        out << s.method << ',' << fmt_g17(s.final_robust_obj) << ','
            << fmt_g17(s.mean_test_loss) << ',' << fmt_g17(s.p90_test_loss) << '\n';
      if (!out) throw std::runtime_error("failed writing summary.csv");
      result.artifacts.push_back("summary.csv");
    }

    stage = "manifest";
    {
      RunConfig resolved = config;
      resolved.contamination_seed = data.contamination_seed;
      resolved.eval_seed = eval_seed;

      njson m;
      m["kind"] = "dro-run-manifest";
      m["version"] = kVersion;
      m["kernel_backend"] = kern::backend_name(kern::active_backend());
      m["config"] = config_to_json(resolved);
      m["provenance"]["train"]["source"] = data.train.source();
      m["provenance"]["train"]["transforms"] = data.train.transforms();
      m["provenance"]["test"]["source"] = data.test.source();
      m["provenance"]["test"]["transforms"] = data.test.transforms();
      njson rows = njson::array();
      for (const auto& s : result.summaries)
        rows.push_back({{"method", s.method},
                        {"final_robust_obj", s.final_robust_obj},
                        {"mean_test_loss", s.mean_test_loss},
                        {"p90_test_loss", s.p90_test_loss}});
      m["summaries"] = rows;
      m["artifacts"] = result.artifacts;

      std::ofstream out(out_path("manifest.json"));
      if (!out) throw std::runtime_error("cannot open manifest.json");
      out << m.dump(2) << '\n';
      if (!out) throw std::runtime_error("failed writing manifest.json");
    }
    return result;
  } catch (const ConfigError& e) {
    write_failed_marker(config.out_dir, stage, e.what());
    throw;
  } catch (const std::exception& e) {
    write_failed_marker(config.out_dir, stage, e.what());
    throw std::runtime_error("stage '" + stage + "': " + e.what());
  }
}

void write_solution(const std::string& path, const std::string& model_spec,
                    std::span<const double> x, bool add_bias) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open solution file: " + path);
  out << "# dro-solution v1\n";
  out << "# model: " << model_spec << '\n';
  out << "# dim: " << x.size() << '\n';
  out << "# add_bias: " << (add_bias ? "true" : "false") << '\n';
  for (double v : x) out << fmt_g17(v) << '\n';
  if (!out) throw std::runtime_error("failed writing solution file: " + path);
}

SolutionFile read_solution(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open solution file: " + path);
  std::string line;
  if (!std::getline(in, line) || trim(line) != "# dro-solution v1")
    throw std::runtime_error(path + ": not a solution file (missing header)");

  SolutionFile sol;
  std::size_t declared_dim = 0;
  bool have_dim = false;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      const std::string body = trim(t.substr(1));
      if (body.rfind("model:", 0) == 0) sol.model_spec = trim(body.substr(6));
      else if (body.rfind("dim:", 0) == 0) {
        declared_dim = parse_size("dim", trim(body.substr(4)));
        have_dim = true;
      } else if (body.rfind("add_bias:", 0) == 0)
        sol.add_bias = parse_bool("add_bias", trim(body.substr(9)));
      continue;
    }
    try {
      std::size_t used = 0;
      const double v = std::stod(t, &used);
      if (used != t.size()) throw std::invalid_argument(t);
      sol.x.push_back(v);
    } catch (const std::exception&) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": bad value");
    }
  }
  if (sol.model_spec.empty())
    throw std::runtime_error(path + ": missing model header line");
  if (sol.x.empty()) throw std::runtime_error(path + ": no solution values");
  if (have_dim && declared_dim != sol.x.size())
    throw std::runtime_error(path + ": declared dim " + std::to_string(declared_dim) +
                             " but found " + std::to_string(sol.x.size()) + " values");
  return sol;
}

std::unique_ptr<LossModel> make_model_from_spec(const std::string& spec,
                                                std::size_t dim) {
  if (spec == "logistic") return std::make_unique<LogisticLoss>(dim);
  if (spec == "least_squares") return std::make_unique<LeastSquaresLoss>(dim);
  if (spec.rfind("mlp ", 0) == 0) {
    const auto layers = parse_size_list("mlp layers", trim(spec.substr(4)));
    auto model = std::make_unique<MlpReluLoss>(layers);
    if (model->dimension() != dim)
      throw std::runtime_error("mlp spec wants " + std::to_string(model->dimension()) +
                               " parameters, solution has " + std::to_string(dim));
    return model;
  }
  throw std::runtime_error("unknown model spec: " + spec);
}

}  // namespace dro
