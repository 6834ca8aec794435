// Copyright 2026 The qrc-floquet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qrc/experiment.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qrc/encoding.hpp"
#include "qrc/error.hpp"
#include "qrc/hash.hpp"
#include "qrc/network.hpp"

namespace qrc {

namespace {

// ---- value formatting / parsing ------------------------------------------

std::string fmt_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fmt_fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  T v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw ConfigError("invalid value for " + key + ": '" + raw + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  throw ConfigError("invalid boolean for " + key + ": '" + raw + "'");
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& raw) {
  std::vector<T> out;
  if (trim(raw).empty()) return out;
  std::stringstream ss(raw + ",");
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) throw ConfigError(key + ": empty item in list '" + raw + "'");
    out.push_back(parse_number<T>(key, item));
  }
  return out;
}

template <typename T>
std::string join_list(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    if constexpr (std::is_floating_point_v<T>) {
      out += fmt_double(v[i]);
    } else {
      out += std::to_string(v[i]);
    }
  }
  return out;
}

// ---- key table --------------------------------------------------------------

struct KeySpec {
  std::string help;
  std::function<void(ExperimentConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
  bool hashed = true;  // output locations are excluded from the provenance hash
};

template <typename T, typename Member>
KeySpec number_key(std::string help, Member member) {
  return {std::move(help),
          [member](ExperimentConfig& c, const std::string& k, const std::string& v) {
            std::invoke(member, c) = parse_number<T>(k, v);
          },
          [member](const ExperimentConfig& c) {
            const T v = std::invoke(member, const_cast<ExperimentConfig&>(c));
            if constexpr (std::is_floating_point_v<T>) {
              return fmt_double(v);
            } else {
              return std::to_string(v);
            }
          }};
}

const std::vector<std::pair<std::string, KeySpec>>& key_table() {
  using C = ExperimentConfig;
  static const std::vector<std::pair<std::string, KeySpec>> table = [] {
    std::vector<std::pair<std::string, KeySpec>> t;
    t.emplace_back("num_qubits", number_key<int>("qubits N (PCA keeps 2N components)",
                                                 [](C& c) -> int& { return c.drive.num_qubits; }));
    t.emplace_back("epsilon", number_key<double>("rotation error of the x pulse",
                                                 [](C& c) -> double& { return c.drive.epsilon; }));
    t.emplace_back("j0t", number_key<double>("coupling J0*T", [](C& c) -> double& { return c.drive.j0t; }));
    t.emplace_back("alpha", number_key<double>("power-law exponent of J_lm",
                                               [](C& c) -> double& { return c.drive.alpha; }));
    t.emplace_back("periods", number_key<unsigned>("drive periods n",
                                                   [](C& c) -> unsigned& { return c.drive.periods; }));
    t.emplace_back("disorder_width", number_key<double>("onsite sigma^z disorder width W (0 = off)",
                                                        [](C& c) -> double& { return c.drive.disorder_width; }));
    t.emplace_back("drive_seed", number_key<std::uint64_t>("seed for the disorder fields",
                                                           [](C& c) -> std::uint64_t& { return c.drive.seed; }));
    t.emplace_back("max_qubits", number_key<int>("dense-matrix qubit cap",
                                                 [](C& c) -> int& { return c.drive.max_qubits; }));
    t.emplace_back("shot_mode",
                   KeySpec{"exact | sampled",
                           [](C& c, const std::string& k, const std::string& v) {
                             const auto s = trim(v);
                             if (s == "exact") {
                               c.shots.mode = ShotMode::kExact;
                             } else if (s == "sampled") {
                               c.shots.mode = ShotMode::kSampled;
                             } else {
                               throw ConfigError("invalid value for " + k + ": '" + v + "'");
                             }
                           },
                           [](const C& c) {
                             return std::string(c.shots.mode == ShotMode::kExact ? "exact" : "sampled");
                           }});
    t.emplace_back("shots", number_key<std::uint64_t>("measurement shots per sample (sampled mode)",
                                                      [](C& c) -> std::uint64_t& { return c.shots.shots; }));
    t.emplace_back("shot_seed", number_key<std::uint64_t>("seed for sampled measurements",
                                                          [](C& c) -> std::uint64_t& { return c.shots.seed; }));
    t.emplace_back("standardize",
                   KeySpec{"per_sample | per_feature",
                           [](C& c, const std::string& k, const std::string& v) {
                             const auto s = trim(v);
                             if (s == "per_sample") {
                               c.axis = StandardizeAxis::kPerSample;
                             } else if (s == "per_feature") {
                               c.axis = StandardizeAxis::kPerFeature;
                             } else {
                               throw ConfigError("invalid value for " + k + ": '" + v + "'");
                             }
                           },
                           [](const C& c) {
                             return std::string(c.axis == StandardizeAxis::kPerSample ? "per_sample"
                                                                                      : "per_feature");
                           }});
    t.emplace_back("learning_rate", number_key<double>("gradient-descent step eta",
                                                       [](C& c) -> double& { return c.train.learning_rate; }));
    t.emplace_back("batch_size", number_key<std::size_t>("mini-batch size M",
                                                         [](C& c) -> std::size_t& { return c.train.batch_size; }));
    t.emplace_back("epochs", number_key<int>("training epochs", [](C& c) -> int& { return c.train.epochs; }));
    t.emplace_back("dropout", number_key<double>("dropout rate D on the M-layer",
                                                 [](C& c) -> double& { return c.train.dropout; }));
    t.emplace_back("train_seed", number_key<std::uint64_t>("seed for init, shuffling and dropout",
                                                           [](C& c) -> std::uint64_t& { return c.train.seed; }));
    t.emplace_back("init_scale", number_key<double>("uniform init half-width (<= 0: sqrt(6/(m+10)))",
                                                    [](C& c) -> double& { return c.train.init_scale; }));
    t.emplace_back("mnist_dir",
                   KeySpec{"directory with the four MNIST IDX files",
                           [](C& c, const std::string&, const std::string& v) { c.mnist_dir = trim(v); },
                           [](const C& c) { return c.mnist_dir.string(); }, false});
    t.emplace_back("train_samples", number_key<std::size_t>("stratified training subsample (0 = all)",
                                                            [](C& c) -> std::size_t& { return c.train_samples; }));
    t.emplace_back("test_samples", number_key<std::size_t>("stratified test subsample (0 = all)",
                                                           [](C& c) -> std::size_t& { return c.test_samples; }));
    t.emplace_back("subsample_seed", number_key<std::uint64_t>("seed for the stratified subsample",
                                                               [](C& c) -> std::uint64_t& { return c.subsample_seed; }));
    t.emplace_back("cache_dir",
                   KeySpec{"cache directory for PCA, propagators and features",
                           [](C& c, const std::string&, const std::string& v) { c.cache_dir = trim(v); },
                           [](const C& c) { return c.cache_dir.string(); }, false});
    t.emplace_back("run_dir", KeySpec{"output directory for CSV/JSON results",
                                      [](C& c, const std::string&, const std::string& v) { c.run_dir = trim(v); },
                                      [](const C& c) { return c.run_dir.string(); }, false});
    t.emplace_back("epsilons", KeySpec{"comma-separated epsilon sweep",
                                       [](C& c, const std::string& k, const std::string& v) {
                                         c.epsilons = parse_list<double>(k, v);
                                       },
                                       [](const C& c) { return join_list(c.epsilons); }});
    t.emplace_back("periods_list", KeySpec{"comma-separated period sweep",
                                           [](C& c, const std::string& k, const std::string& v) {
                                             c.period_list = parse_list<unsigned>(k, v);
                                           },
                                           [](const C& c) { return join_list(c.period_list); }});
    t.emplace_back("qubits_list", KeySpec{"comma-separated qubit-count sweep",
                                          [](C& c, const std::string& k, const std::string& v) {
                                            c.qubit_list = parse_list<int>(k, v);
                                          },
                                          [](const C& c) { return join_list(c.qubit_list); }});
    t.emplace_back("dropouts", KeySpec{"comma-separated dropout sweep",
                                       [](C& c, const std::string& k, const std::string& v) {
                                         c.dropout_list = parse_list<double>(k, v);
                                       },
                                       [](const C& c) { return join_list(c.dropout_list); }});
    const auto bool_key = [](std::string help, bool C::*member) {
      return KeySpec{std::move(help),
                     [member](C& c, const std::string& k, const std::string& v) { c.*member = parse_bool(k, v); },
                     [member](const C& c) { return std::string(c.*member ? "true" : "false"); }};
    };
    t.emplace_back("baseline_onn784", bool_key("add the classical 784-PCA ONN row to sweeps", &C::baseline_onn784));
    t.emplace_back("baseline_epsilon_zero",
                   bool_key("add an epsilon = 0 reference row to sweeps", &C::baseline_epsilon_zero));
    t.emplace_back("export_edges", bool_key("also write edge lists in `network`", &C::export_edges));
    t.emplace_back("window_first", number_key<int>("first epoch of the statistics window",
                                                   [](C& c) -> int& { return c.window_first; }));
    t.emplace_back("window_last", number_key<int>("last epoch of the statistics window",
                                                  [](C& c) -> int& { return c.window_last; }));
    return t;
  }();
  return table;
}

const KeySpec& find_key(const std::string& key) {
  for (const auto& [name, spec] : key_table()) {
    if (name == key) return spec;
  }
  throw ConfigError("unknown configuration key: " + key);
}

// ---- misc helpers -----------------------------------------------------------

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void note(std::ostream* log, const std::string& msg) {
  if (log) *log << "[qrc] " << msg << std::endl;
}

std::string provenance(const ExperimentConfig& cfg) { return "config-hash: " + config_hash(cfg); }

std::ofstream open_text(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out.precision(17);
  return out;
}

std::string cache_name(const std::string& stem, std::uint64_t key, const std::string& ext) {
  return stem + "_" + hex_digest(key) + ext;
}

std::filesystem::path pca_path(const ExperimentConfig& cfg, const PreparedData& data, bool rotation) {
  Fnv1a h;
  h.text(rotation ? "pca-rotation" : "pca").value(data.content_hash).value(rotation ? 0 : cfg.pca_components());
  return cfg.cache_dir / cache_name("pca", h.digest(), ".bin");
}

PcaModel obtain_pca(const ExperimentConfig& cfg, const PreparedData& data, bool rotation, std::ostream* log) {
  const auto path = pca_path(cfg, data, rotation);
  if (std::filesystem::exists(path)) return load_pca(path);
  Stopwatch sw;
  PcaModel pca = rotation ? fit_pca_rotation(to_matrix(data.train)) : fit_pca(data.train, cfg.pca_components());
  save_pca(path, pca);
  note(log, "fitted PCA with " + std::to_string(pca.components()) + " components in " +
                fmt_fixed(sw.seconds(), 2) + " s");
  return pca;
}

std::optional<PcaModel> cached_pca(const ExperimentConfig& cfg, const PreparedData& data, bool rotation) {
  const auto path = pca_path(cfg, data, rotation);
  if (!std::filesystem::exists(path)) return std::nullopt;
  return load_pca(path);
}

std::uint64_t drive_key(const DriveParameters& d) {
  Fnv1a h;
  h.text("drive")
      .value(d.num_qubits)
      .value(d.epsilon)
      .value(d.j0t)
      .value(d.alpha)
      .value(d.periods)
      .value(d.disorder_width)
      .value(d.disorder_width == 0.0 ? std::uint64_t{0} : d.seed);
  return h.digest();
}

CMatrix obtain_propagator(const ExperimentConfig& cfg, std::ostream* log) {
  const auto path = cfg.cache_dir / cache_name("propagator", drive_key(cfg.drive), ".bin");
  if (std::filesystem::exists(path)) return load_propagator(path, cfg.drive);
  Stopwatch sw;
  CMatrix u = propagator(cfg.drive);
  save_propagator(path, cfg.drive, u);
  note(log, "built F^" + std::to_string(cfg.drive.periods) + " for N=" + std::to_string(cfg.drive.num_qubits) +
                ", epsilon=" + fmt_double(cfg.drive.epsilon) + " in " + fmt_fixed(sw.seconds(), 2) + " s");
  return u;
}

FeatureHeader make_header(const ExperimentConfig& cfg, std::uint64_t key, std::size_t samples, std::size_t dim,
                          Baseline baseline) {
  FeatureHeader h;
  h.key = key;
  h.num_samples = samples;
  h.dim = dim;
  if (baseline != Baseline::kOnn784) {
    h.mode = cfg.shots.mode;
    h.shots = cfg.shots.mode == ShotMode::kSampled ? cfg.shots.shots : 0;
    h.seed = cfg.shots.mode == ShotMode::kSampled ? cfg.shots.seed : 0;
    h.axis = cfg.axis;
  }
  return h;
}

struct FeaturePaths {
  std::filesystem::path train;
  std::filesystem::path test;
};

FeaturePaths feature_paths(const ExperimentConfig& cfg, std::uint64_t key) {
  return {cfg.cache_dir / cache_name("features", key, ".train.bin"),
          cfg.cache_dir / cache_name("features", key, ".test.bin")};
}

std::optional<FeatureSet> try_load_features(const ExperimentConfig& cfg, std::uint64_t key, std::size_t dim,
                                            const PreparedData& data, Baseline baseline) {
  const auto paths = feature_paths(cfg, key);
  if (!std::filesystem::exists(paths.train) || !std::filesystem::exists(paths.test)) return std::nullopt;
  FeatureSet fs;
  fs.key = key;
  fs.cache_hit = true;
  fs.train = load_features(paths.train, make_header(cfg, key, data.train.size(), dim, baseline));
  fs.test = load_features(paths.test, make_header(cfg, key, data.test.size(), dim, baseline));
  return fs;
}

void store_features(const ExperimentConfig& cfg, const FeatureSet& fs) {
  const auto paths = feature_paths(cfg, fs.key);
  save_features(paths.train, fs.train);
  save_features(paths.test, fs.test);
}

ExperimentConfig with_baseline(ExperimentConfig cfg, Baseline baseline) {
  if (baseline == Baseline::kEpsilonZero) cfg.drive.epsilon = 0.0;
  return cfg;
}

nlohmann::json stats_json(const WindowStats& s) {
  return {{"mean", s.mean}, {"std", s.std}, {"epochs", s.count}};
}

}  // namespace

// ---- config -----------------------------------------------------------------

void ExperimentConfig::validate() const {
  drive.validate();
  shots.validate();
  if (window_first > window_last) throw ConfigError("window_first must be <= window_last");
  if (train.epochs < 1) throw ConfigError("epochs must be >= 1");
  if (!(train.dropout >= 0.0 && train.dropout < 1.0)) throw ConfigError("dropout must be in [0, 1)");
}

void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  find_key(trim(key)).set(cfg, trim(key), value);
}

std::string config_value(const ExperimentConfig& cfg, const std::string& key) { return find_key(key).get(cfg); }

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> out;
    for (const auto& [name, spec] : key_table()) out.push_back({name, spec.help});
    return out;
  }();
  return keys;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    }
    try {
      set_config_value(base, line.substr(0, eq), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return base;
}

std::string canonical_config(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& [name, spec] : key_table()) {
    if (spec.hashed) out += name + "=" + spec.get(cfg) + "\n";
  }
  return out;
}

std::string config_hash(const ExperimentConfig& cfg) {
  return hex_digest(Fnv1a{}.text(canonical_config(cfg)).digest());
}

// ---- data -------------------------------------------------------------------

PreparedData prepare_data(const ExperimentConfig& cfg) {
  const auto& dir = cfg.mnist_dir;
  PreparedData d;
  d.train = stratified_subsample(load_mnist_idx(dir / "train-images-idx3-ubyte", dir / "train-labels-idx1-ubyte"),
                                 cfg.train_samples, cfg.subsample_seed);
  d.test = stratified_subsample(load_mnist_idx(dir / "t10k-images-idx3-ubyte", dir / "t10k-labels-idx1-ubyte"),
                                cfg.test_samples, cfg.subsample_seed + 1);
  Fnv1a h;
  h.values(std::span<const std::uint8_t>(d.train.pixels)).values(std::span<const std::uint8_t>(d.train.labels));
  h.values(std::span<const std::uint8_t>(d.test.pixels)).values(std::span<const std::uint8_t>(d.test.labels));
  d.content_hash = h.digest();
  return d;
}

// ---- network ----------------------------------------------------------------

namespace {

NetworkSummary summarize(const EffectiveNetwork& net, double epsilon) {
  NetworkSummary s;
  s.epsilon = epsilon;
  s.nodes = net.num_nodes;
  s.edges = net.edges.size();
  s.histogram = degree_distribution(net);
  s.max_degree = s.histogram.empty() ? 0 : s.histogram.rbegin()->first;
  for (const auto& [k, count] : s.histogram) {
    if (k >= 1 && count > 0) ++s.distinct_degrees;
  }
  try {
    s.fit = powerlaw_diagnostic(s.histogram);
  } catch (const InsufficientData&) {
    s.fit.reset();
  }
  return s;
}

}  // namespace

NetworkSummary analyze_network(const DriveParameters& drive) {
  return summarize(percolation_network(effective_hamiltonian(floquet_operator(drive))), drive.epsilon);
}

std::vector<NetworkSummary> run_network(const ExperimentConfig& cfg, std::ostream* log) {
  if (cfg.epsilons.empty()) throw ConfigError("network: the epsilon list is empty (set epsilons=...)");
  cfg.validate();
  const auto dir = cfg.run_dir / "network";
  const std::string prov = provenance(cfg);
  std::vector<NetworkSummary> rows;
  for (double eps : cfg.epsilons) {
    DriveParameters d = cfg.drive;
    d.epsilon = eps;
    Stopwatch sw;
    const auto heff = effective_hamiltonian(floquet_operator(d));
    const EffectiveNetwork net = percolation_network(heff);
    NetworkSummary s = summarize(net, eps);
    write_histogram_csv(dir / ("degree_eps_" + fmt_double(eps) + ".csv"), s.histogram, prov);
    if (cfg.export_edges) write_edges_csv(dir / ("edges_eps_" + fmt_double(eps) + ".csv"), net, prov);
    note(log, "epsilon=" + fmt_double(eps) + ": " + std::to_string(s.edges) + " edges, max degree " +
                  std::to_string(s.max_degree) + " (" + fmt_fixed(sw.seconds(), 2) + " s)");
    rows.push_back(std::move(s));
  }

  auto out = open_text(dir / "summary.csv");
  out << "# " << prov << '\n';
  out << "epsilon,nodes,edges,max_degree,distinct_degrees,slope,r_squared\n";
  for (const auto& s : rows) {
    out << fmt_double(s.epsilon) << ',' << s.nodes << ',' << s.edges << ',' << s.max_degree << ','
        << s.distinct_degrees << ',';
    if (s.fit) {
      out << s.fit->slope << ',' << s.fit->r_squared << '\n';
    } else {
      out << "NA,NA\n";
    }
  }
  return rows;
}

// ---- features ---------------------------------------------------------------

std::uint64_t feature_key(const ExperimentConfig& cfg, std::uint64_t data_hash, std::uint64_t pca_key,
                          Baseline baseline) {
  Fnv1a h;
  // An epsilon = 0 baseline is an ordinary quantum feature set with a different drive.
  h.text("features").text(baseline == Baseline::kOnn784 ? "onn784" : "quantum").value(data_hash).value(pca_key);
  if (baseline != Baseline::kOnn784) {
    h.value(drive_key(with_baseline(cfg, baseline).drive));
    h.value(static_cast<std::uint8_t>(cfg.shots.mode));
    if (cfg.shots.mode == ShotMode::kSampled) h.value(cfg.shots.shots).value(cfg.shots.seed);
    h.value(static_cast<std::uint8_t>(cfg.axis));
  }
  return h.digest();
}

RMatrix quantum_probabilities(const PcaModel& pca, const ImageDataset& images, const CMatrix& propagator,
                              const ShotConfig& shots, std::uint64_t index_offset) {
  const Eigen::MatrixXd coeffs = project_all(pca, images);
  const Eigen::Index dim = propagator.rows();
  const auto n = static_cast<Eigen::Index>(images.size());
  RMatrix probs(n, dim);
  constexpr Eigen::Index kChunk = 512;
  CMatrix states;
  for (Eigen::Index start = 0; start < n; start += kChunk) {
    const Eigen::Index m = std::min(kChunk, n - start);
    states.resize(dim, m);
    for (Eigen::Index c = 0; c < m; ++c) {
      const RVector row = coeffs.row(start + c).transpose();
      product_amplitudes(encode_coefficients(pca, row), states.col(c));
    }
    const CMatrix evolved = evolve_batch(states, propagator);
    for (Eigen::Index c = 0; c < m; ++c) {
      RVector p = evolved.col(c).cwiseAbs2();
      if (shots.mode == ShotMode::kSampled) {
        p = sample_frequencies(p, shots.shots,
                               sample_seed(shots.seed, index_offset + static_cast<std::uint64_t>(start + c)));
      }
      probs.row(start + c) = p.transpose();
    }
  }
  return probs;
}

FeatureSet run_features(const ExperimentConfig& cfg, std::ostream* log) {
  cfg.validate();
  const PreparedData data = prepare_data(cfg);
  const PcaModel pca = obtain_pca(cfg, data, false, log);
  const std::uint64_t key = feature_key(cfg, data.content_hash, pca_hash(pca), Baseline::kNone);
  const std::size_t dim = cfg.drive.dimension();
  if (auto cached = try_load_features(cfg, key, dim, data, Baseline::kNone)) {
    note(log, "feature cache hit " + hex_digest(key));
    return std::move(*cached);
  }

  const CMatrix u = obtain_propagator(cfg, log);
  Stopwatch sw;
  RMatrix train_p = quantum_probabilities(pca, data.train, u, cfg.shots, 0);
  RMatrix test_p = quantum_probabilities(pca, data.test, u, cfg.shots, data.train.size());

  if (cfg.axis == StandardizeAxis::kPerSample) {
    for (RMatrix* m : {&train_p, &test_p}) {
      for (Eigen::Index r = 0; r < m->rows(); ++r) {
        m->row(r) = standardize(m->row(r).transpose()).transpose();
      }
    }
  } else {
    const FeatureScaler scaler = FeatureScaler::fit(train_p);
    scaler.apply(train_p);
    scaler.apply(test_p);
  }

  FeatureSet fs;
  fs.key = key;
  fs.train = {make_header(cfg, key, data.train.size(), dim, Baseline::kNone), std::move(train_p), data.train.labels};
  fs.test = {make_header(cfg, key, data.test.size(), dim, Baseline::kNone), std::move(test_p), data.test.labels};
  store_features(cfg, fs);
  note(log, "extracted " + std::to_string(data.train.size() + data.test.size()) + " feature rows in " +
                fmt_fixed(sw.seconds(), 2) + " s -> features_" + hex_digest(key));
  return fs;
}

FeatureSet run_classical_features(const ExperimentConfig& cfg, std::ostream* log) {
  const PreparedData data = prepare_data(cfg);
  const PcaModel pca = obtain_pca(cfg, data, true, log);
  const std::uint64_t key = feature_key(cfg, data.content_hash, pca_hash(pca), Baseline::kOnn784);
  const auto dim = static_cast<std::size_t>(pca.components());
  if (auto cached = try_load_features(cfg, key, dim, data, Baseline::kOnn784)) return std::move(*cached);

  RMatrix train_x = project_all(pca, data.train);
  RMatrix test_x = project_all(pca, data.test);
  const double rms = std::sqrt(train_x.squaredNorm() / static_cast<double>(train_x.size()));
  train_x /= rms;
  test_x /= rms;

  FeatureSet fs;
  fs.key = key;
  fs.train = {make_header(cfg, key, data.train.size(), dim, Baseline::kOnn784), std::move(train_x),
              data.train.labels};
  fs.test = {make_header(cfg, key, data.test.size(), dim, Baseline::kOnn784), std::move(test_x),
             data.test.labels};
  store_features(cfg, fs);
  return fs;
}

FeatureSet load_cached_features(const ExperimentConfig& cfg, Baseline baseline) {
  const ExperimentConfig eff = with_baseline(cfg, baseline);
  const PreparedData data = prepare_data(eff);
  const bool full = baseline == Baseline::kOnn784;
  const auto pca = cached_pca(eff, data, full);
  const std::string hint = " run `qrc features" + std::string(full ? " --baseline onn784" : "") +
                           "` with the same configuration first";
  if (!pca) throw ConfigError("no cached PCA basis under " + eff.cache_dir.string() + ";" + hint);
  const std::uint64_t key = feature_key(eff, data.content_hash, pca_hash(*pca), baseline);
  const std::size_t dim = full ? static_cast<std::size_t>(pca->components()) : eff.drive.dimension();
  auto fs = try_load_features(eff, key, dim, data, baseline);
  if (!fs) {
    throw ConfigError("no feature cache features_" + hex_digest(key) + " under " + eff.cache_dir.string() + ";" +
                      hint);
  }
  return std::move(*fs);
}

// ---- train / sweep ----------------------------------------------------------

TrainOutcome run_train(const ExperimentConfig& cfg, Baseline baseline, bool build_features, const std::string& label,
                       std::ostream* log) {
  cfg.validate();
  const ExperimentConfig eff = with_baseline(cfg, baseline);
  FeatureSet fs;
  if (build_features) {
    fs = baseline == Baseline::kOnn784 ? run_classical_features(eff, log) : run_features(eff, log);
  } else {
    fs = load_cached_features(eff, baseline);
  }

  Stopwatch sw;
  OnnModel init = OnnModel::random(fs.train.x.cols(), eff.train.seed, eff.train.init_scale);
  TrainOutcome out;
  out.label = label;
  out.result = train(std::move(init), {fs.train.x, fs.train.labels}, {fs.test.x, fs.test.labels}, eff.train);
  const auto& h = out.result.history;
  out.train_acc = window_stats(h, eff.window_first, eff.window_last, &EpochMetrics::train_acc);
  out.test_acc = window_stats(h, eff.window_first, eff.window_last, &EpochMetrics::test_acc);
  out.gap = window_stats(h, eff.window_first, eff.window_last, accuracy_gap);

  const std::string prov = provenance(eff) + " baseline: " + to_string(baseline) +
                           " feature-key: " + hex_digest(fs.key);
  write_metrics_csv(eff.run_dir / ("metrics_" + label + ".csv"), h, prov);
  save_checkpoint(eff.run_dir / ("model_" + label + ".bin"), out.result.model,
                  "# " + prov + "\n" + canonical_config(eff));

  nlohmann::json summary = {{"label", label},
                            {"config_hash", config_hash(eff)},
                            {"baseline", to_string(baseline)},
                            {"feature_key", hex_digest(fs.key)},
                            {"feature_dim", fs.train.x.cols()},
                            {"train_samples", fs.train.x.rows()},
                            {"test_samples", fs.test.x.rows()},
                            {"window", {eff.window_first, eff.window_last}},
                            {"train_acc", stats_json(out.train_acc)},
                            {"test_acc", stats_json(out.test_acc)},
                            {"gap", stats_json(out.gap)}};
  auto js = open_text(eff.run_dir / ("summary_" + label + ".json"));
  js << summary.dump(2) << '\n';

  note(log, label + ": test " + fmt_fixed(out.test_acc.mean, 4) + " +- " + fmt_fixed(out.test_acc.std, 4) +
                ", train " + fmt_fixed(out.train_acc.mean, 4) + " (" + fmt_fixed(sw.seconds(), 2) + " s)");
  return out;
}

Baseline parse_baseline(const std::string& name) {
  if (name == "none") return Baseline::kNone;
  if (name == "onn784") return Baseline::kOnn784;
  if (name == "epsilon0") return Baseline::kEpsilonZero;
  throw ConfigError("unknown baseline '" + name + "' (none, onn784, epsilon0)");
}

std::string to_string(Baseline baseline) {
  switch (baseline) {
    case Baseline::kOnn784:
      return "onn784";
    case Baseline::kEpsilonZero:
      return "epsilon0";
    case Baseline::kNone:
      break;
  }
  return "none";
}

SweepAxis parse_sweep_axis(const std::string& name) {
  if (name == "epsilon") return SweepAxis::kEpsilon;
  if (name == "periods") return SweepAxis::kPeriods;
  if (name == "qubits") return SweepAxis::kQubits;
  if (name == "dropout") return SweepAxis::kDropout;
  throw ConfigError("unknown sweep axis '" + name + "' (epsilon, periods, qubits, dropout)");
}

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kEpsilon:
      return "epsilon";
    case SweepAxis::kPeriods:
      return "periods";
    case SweepAxis::kQubits:
      return "qubits";
    case SweepAxis::kDropout:
      return "dropout";
  }
  return "?";
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, SweepAxis axis, std::ostream* log) {
  std::vector<std::pair<std::string, ExperimentConfig>> points;
  const auto add = [&](const std::string& value, ExperimentConfig c) { points.emplace_back(value, std::move(c)); };
  switch (axis) {
    case SweepAxis::kEpsilon:
      for (double v : cfg.epsilons) {
        ExperimentConfig c = cfg;
        c.drive.epsilon = v;
        add(fmt_double(v), c);
      }
      break;
    case SweepAxis::kPeriods:
      for (unsigned v : cfg.period_list) {
        ExperimentConfig c = cfg;
        c.drive.periods = v;
        add(std::to_string(v), c);
      }
      break;
    case SweepAxis::kQubits:
      for (int v : cfg.qubit_list) {
        ExperimentConfig c = cfg;
        c.drive.num_qubits = v;
        add(std::to_string(v), c);
      }
      break;
    case SweepAxis::kDropout:
      for (double v : cfg.dropout_list) {
        ExperimentConfig c = cfg;
        c.train.dropout = v;
        add(fmt_double(v), c);
      }
      break;
  }
  if (points.empty()) throw ConfigError("sweep: the " + to_string(axis) + " list is empty");

  const std::string axis_name = to_string(axis);
  std::vector<SweepRow> rows;
  for (auto& [value, c] : points) {
    rows.push_back({value, run_train(c, Baseline::kNone, true, axis_name + "_" + value, log)});
  }
  if (cfg.baseline_epsilon_zero) {
    rows.push_back({"epsilon0", run_train(cfg, Baseline::kEpsilonZero, true, axis_name + "_epsilon0", log)});
  }
  if (cfg.baseline_onn784) {
    rows.push_back({"onn784", run_train(cfg, Baseline::kOnn784, true, axis_name + "_onn784", log)});
  }

  auto out = open_text(cfg.run_dir / ("sweep_" + axis_name + ".csv"));
  out << "# " << provenance(cfg) << '\n';
  out << axis_name << ",train_mean,train_std,test_mean,test_std,gap_mean,gap_std\n";
  nlohmann::json js = nlohmann::json::array();
  for (const auto& r : rows) {
    const auto& o = r.outcome;
    out << r.axis_value << ',' << o.train_acc.mean << ',' << o.train_acc.std << ',' << o.test_acc.mean << ','
        << o.test_acc.std << ',' << o.gap.mean << ',' << o.gap.std << '\n';
    js.push_back({{axis_name, r.axis_value},
                  {"train_acc", stats_json(o.train_acc)},
                  {"test_acc", stats_json(o.test_acc)},
                  {"gap", stats_json(o.gap)}});
  }
  auto jout = open_text(cfg.run_dir / ("sweep_" + axis_name + ".json"));
  jout << nlohmann::json{{"config_hash", config_hash(cfg)}, {"axis", axis_name}, {"rows", js}}.dump(2) << '\n';
  return rows;
}

}  // namespace qrc
