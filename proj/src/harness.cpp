#include "gsample/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "gsample/errors.hpp"
#include "gsample/parallel.hpp"

namespace gsample {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Config

void apply_preset(ExperimentConfig& config, const std::string& preset) {
  FilterChoice identity;
  FilterChoice laplacian{"laplacian", 0.0, 1, false, {}, {}};
  if (preset == "fig1a") {
    config.measurement = laplacian;
    config.regularizer = laplacian;
    config.band = BandChoice{"low", -1, {}};
  } else if (preset == "fig1b") {
    config.measurement = identity;
    config.regularizer = FilterChoice{"tikhonov", 0.2, 2, true, {}, {}};
    config.band = BandChoice{"low", -1, {}};
  } else if (preset == "fig1c") {
    config.measurement = FilterChoice{"inverse_diffusion", 0.5, 1, false, {}, {}};
    config.regularizer = identity;
    config.band = BandChoice{"high", -1, {}};
  } else {
    throw DomainError("unknown preset '" + preset + "'");
  }
}

namespace {

template <class T>
void read_opt(const json& j, const char* key, T& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

FilterChoice filter_from_json(const json& j) {
  FilterChoice f;
  if (j.is_string()) {
    f.name = j.get<std::string>();
    return f;
  }
  read_opt(j, "name", f.name);
  read_opt(j, "parameter", f.parameter);
  read_opt(j, "power", f.power);
  read_opt(j, "dagger", f.dagger);
  read_opt(j, "indices", f.indices);
  read_opt(j, "table", f.table);
  return f;
}

json filter_to_json(const FilterChoice& f) {
  json j{{"name", f.name}, {"parameter", f.parameter}, {"power", f.power}, {"dagger", f.dagger}};
  if (!f.indices.empty()) j["indices"] = f.indices;
  if (!f.table.empty()) j["table"] = f.table;
  return j;
}

std::string resolve(const std::string& path, const std::filesystem::path& base) {
  if (path.empty()) return path;
  std::filesystem::path p(path);
  if (p.is_relative() && !base.empty()) p = base / p;
  return p.string();
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw StructuralError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw StructuralError("config must be a JSON object");

  ExperimentConfig c;
  try {
    if (j.contains("preset")) apply_preset(c, j.at("preset").get<std::string>());
    if (j.contains("graph")) {
      const json& g = j.at("graph");
      const std::string type = g.value("type", std::string("er"));
      if (type == "er") {
        ErGraphSpec er;
        read_opt(g, "n", er.n);
        read_opt(g, "p", er.p);
        read_opt(g, "weight_mean", er.weight_mean);
        read_opt(g, "weight_std", er.weight_std);
        read_opt(g, "seed", er.seed);
        c.er = er;
      } else if (type == "edge_list") {
        c.er.reset();
        c.edge_list = resolve(g.at("path").get<std::string>(), base_dir);
      } else {
        throw DomainError("unknown graph type '" + type + "'");
      }
    }
    if (j.contains("reference_node") && !j.at("reference_node").is_null()) {
      c.reference_node = j.at("reference_node").get<int>();
    }
    if (j.contains("measurement")) c.measurement = filter_from_json(j.at("measurement"));
    if (j.contains("regularizer")) c.regularizer = filter_from_json(j.at("regularizer"));
    if (j.contains("band")) {
      const json& b = j.at("band");
      read_opt(b, "mode", c.band.mode);
      read_opt(b, "size", c.band.size);
      read_opt(b, "indices", c.band.indices);
      if (!c.band.indices.empty()) c.band.mode = "indices";
    }
    read_opt(j, "mu", c.mu);
    read_opt(j, "sigma2", c.sigma2);
    if (j.contains("covariance_file")) {
      c.covariance_file = resolve(j.at("covariance_file").get<std::string>(), base_dir);
    }
    if (j.contains("x0")) {
      const json& x = j.at("x0");
      read_opt(x, "mode", c.x0_mode);
      if (x.contains("path")) c.x0_file = resolve(x.at("path").get<std::string>(), base_dir);
    }
    if (j.contains("methods")) {
      c.methods.clear();
      for (const auto& m : j.at("methods")) c.methods.push_back(parse_cost_kind(m.get<std::string>()));
    }
    read_opt(j, "solver", c.solver);
    if (j.contains("fast_path")) c.fast_path = parse_fast_path(j.at("fast_path").get<std::string>());
    if (j.contains("pgd")) {
      const json& p = j.at("pgd");
      read_opt(p, "rho0", c.pgd.rho0);
      read_opt(p, "beta", c.pgd.beta);
      read_opt(p, "max_iterations", c.pgd.max_iterations);
      read_opt(p, "max_backtracks", c.pgd.max_backtracks);
      read_opt(p, "eps", c.pgd.eps);
      read_opt(p, "alt_rounds", c.pgd.alt_rounds);
      read_opt(p, "euclidean_ball", c.pgd.euclidean_ball);
      read_opt(p, "relaxed_linesearch", c.pgd.relaxed_linesearch);
    }
    read_opt(j, "q_pct", c.q_pct);
    read_opt(j, "trials", c.trials);
    read_opt(j, "seed", c.seed);
    if (j.contains("robustness")) {
      const json& r = j.at("robustness");
      read_opt(r, "mode", c.robustness.mode);
      read_opt(r, "values", c.robustness.values);
    }
    read_opt(j, "threads", c.threads);
  } catch (const json::exception& e) {
    throw StructuralError(std::string("bad config field: ") + e.what());
  }

  if (c.trials < 1) throw DomainError("trials must be >= 1");
  for (double q : c.q_pct) {
    if (!(q > 0.0 && q <= 100.0)) throw DomainError("q_pct values must lie in (0, 100]");
  }
  if (c.solver != "greedy" && c.solver != "pgd") throw DomainError("solver must be greedy or pgd");
  if (c.x0_mode != "zero" && c.x0_mode != "file") throw DomainError("x0 mode must be zero or file");
  if (c.x0_mode == "file" && c.x0_file.empty()) throw DomainError("x0 mode 'file' needs a path");
  const std::string& rm = c.robustness.mode;
  if (rm != "none" && rm != "sigma" && rm != "delta_l") {
    throw DomainError("robustness mode must be none, sigma or delta_l");
  }
  if (c.band.mode != "low" && c.band.mode != "high" && c.band.mode != "indices") {
    throw DomainError("band mode must be low, high or indices");
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw StructuralError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  if (c.er) {
    j["graph"] = {{"type", "er"},          {"n", c.er->n},
                  {"p", c.er->p},          {"weight_mean", c.er->weight_mean},
                  {"weight_std", c.er->weight_std}, {"seed", c.er->seed}};
  } else {
    j["graph"] = {{"type", "edge_list"}, {"path", c.edge_list}};
  }
  j["reference_node"] = c.reference_node ? json(*c.reference_node) : json(nullptr);
  j["measurement"] = filter_to_json(c.measurement);
  j["regularizer"] = filter_to_json(c.regularizer);
  j["band"] = {{"mode", c.band.mode}, {"size", c.band.size}};
  if (!c.band.indices.empty()) j["band"]["indices"] = c.band.indices;
  j["mu"] = c.mu;
  j["sigma2"] = c.sigma2;
  if (!c.covariance_file.empty()) j["covariance_file"] = c.covariance_file;
  j["x0"] = {{"mode", c.x0_mode}};
  if (!c.x0_file.empty()) j["x0"]["path"] = c.x0_file;
  std::vector<std::string> methods;
  for (CostKind k : c.methods) methods.push_back(to_string(k));
  j["methods"] = methods;
  j["solver"] = c.solver;
  j["fast_path"] = to_string(c.fast_path);
  j["pgd"] = {{"rho0", c.pgd.rho0},
              {"beta", c.pgd.beta},
              {"max_iterations", c.pgd.max_iterations},
              {"max_backtracks", c.pgd.max_backtracks},
              {"eps", c.pgd.eps},
              {"alt_rounds", c.pgd.alt_rounds},
              {"euclidean_ball", c.pgd.euclidean_ball},
              {"relaxed_linesearch", c.pgd.relaxed_linesearch}};
  j["q_pct"] = c.q_pct;
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  j["robustness"] = {{"mode", c.robustness.mode}, {"values", c.robustness.values}};
  j["threads"] = c.threads;
  return j.dump(2);
}

FilterSpec make_filter(const FilterChoice& f, const std::vector<int>& band_complement) {
  FilterSpec spec = FilterSpec::identity();
  const std::string& name = f.name;
  if (name == "identity") {
    spec = FilterSpec::identity();
  } else if (name == "laplacian") {
    spec = FilterSpec::laplacian_power(1);
  } else if (name == "gmrf") {
    spec = FilterSpec::gmrf();
  } else if (name == "tikhonov") {
    spec = FilterSpec::tikhonov(f.parameter);
  } else if (name == "diffusion") {
    spec = FilterSpec::diffusion(f.parameter);
  } else if (name == "inverse_diffusion") {
    spec = FilterSpec::inverse_diffusion(f.parameter);
  } else if (name == "ideal_projector") {
    spec = FilterSpec::ideal_projector(f.indices.empty() ? band_complement : f.indices);
  } else if (name == "custom") {
    spec = FilterSpec::custom(f.table);
  } else {
    throw DomainError("unknown filter '" + name + "'");
  }
  if (f.power != 1) spec = spec.pow(f.power);
  if (f.dagger) spec = spec.dagger();
  return spec;
}

// ---------------------------------------------------------------------------
// Graphs and instances

WeightedGraph generate_er_graph(int n, double p, double weight_mean, double weight_std,
                                Rng& rng) {
  if (n < 1) throw DomainError("graph needs at least one node");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("edge probability must lie in [0, 1]");
  if (!(weight_std >= 0.0)) throw DomainError("weight std must be nonnegative");
  constexpr int kAttempts = 100;
  constexpr double kWeightFloor = 1e-3;
  std::bernoulli_distribution coin(p);
  std::normal_distribution<double> weight(weight_mean, weight_std);
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    std::vector<Edge> edges;
    for (int k = 0; k < n; ++k) {
      for (int l = k + 1; l < n; ++l) {
        if (coin(rng)) edges.push_back({k, l, std::max(kWeightFloor, weight(rng))});
      }
    }
    WeightedGraph g(n, std::move(edges));
    if (g.is_connected()) return g;
  }
  throw InfeasibleError("no connected ER graph after " + std::to_string(kAttempts) + " attempts");
}

namespace {

std::vector<int> band_indices(const BandChoice& b, int n) {
  if (b.mode == "indices") return b.indices;
  const int size = b.size < 0 ? n / 2 : b.size;
  if (size < 1 || size > n) throw DomainError("band size must lie in [1, N]");
  return b.mode == "high" ? BandlimitedSpec::high(n, size).band()
                          : BandlimitedSpec::low(n, size).band();
}

Vec drop_entry(const Vec& v, int idx) {
  Vec out(v.size() - 1);
  for (Eigen::Index i = 0, j = 0; i < v.size(); ++i) {
    if (i != idx) out(j++) = v(i);
  }
  return out;
}

}  // namespace

std::shared_ptr<const ProblemInstance> build_instance(const ExperimentConfig& config,
                                                      const WeightedGraph& graph,
                                                      std::vector<int>* node_map) {
  const int n_graph = graph.n_nodes();
  Mat lap = build_laplacian(graph);
  std::vector<int> map(n_graph);
  for (int i = 0; i < n_graph; ++i) map[i] = i;
  if (config.reference_node) {
    const int ref = *config.reference_node;
    if (ref < 0 || ref >= n_graph) throw StructuralError("reference node out of range");
    lap = grounded_laplacian(lap, ref);
    map.erase(map.begin() + ref);
  }
  const int n = static_cast<int>(lap.rows());
  SpectralDecomposition decomp = spectral_decompose(lap);
  const BandlimitedSpec band(band_indices(config.band, n), n);

  ProblemInstance::Options opt;
  opt.measurement = make_filter(config.measurement, band.complement());
  opt.regularizer = make_filter(config.regularizer, band.complement());
  opt.mu = config.mu;
  opt.sigma2 = config.sigma2;
  if (!config.covariance_file.empty()) {
    Mat r = read_matrix_file(config.covariance_file);
    if (config.reference_node && r.rows() == n_graph) {
      const int ref = *config.reference_node;
      Mat reduced(n, n);
      for (int i = 0, a = 0; i < n_graph; ++i) {
        if (i == ref) continue;
        for (int k = 0, b = 0; k < n_graph; ++k) {
          if (k == ref) continue;
          reduced(a, b++) = r(i, k);
        }
        ++a;
      }
      r = reduced;
    }
    opt.noise_cov = r;
  }
  if (config.x0_mode == "file") {
    Vec x0 = read_vector_file(config.x0_file);
    if (config.reference_node && x0.size() == n_graph) x0 = drop_entry(x0, *config.reference_node);
    opt.x0 = x0;
  }
  if (node_map) *node_map = map;
  return ProblemInstance::create(std::move(decomp), opt);
}

Experiment build_experiment(const ExperimentConfig& config) {
  Experiment e;
  if (config.er) {
    Rng rng(config.er->seed);
    e.graph = generate_er_graph(config.er->n, config.er->p, config.er->weight_mean,
                                config.er->weight_std, rng);
  } else {
    if (config.edge_list.empty()) throw StructuralError("config needs a graph source");
    e.graph = read_edge_list(config.edge_list);
    if (!e.graph.is_connected()) e.notices.push_back("edge-list graph is not connected");
  }
  e.instance = build_instance(config, e.graph, &e.node_map);
  const int n = e.instance->size();
  e.band = BandlimitedSpec(band_indices(config.band, n), n);
  for (const auto& w : e.instance->warnings()) e.notices.push_back(w);
  return e;
}

// ---------------------------------------------------------------------------
// Seeds

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t cell, std::uint64_t index) {
  return splitmix64(splitmix64(splitmix64(master) ^ cell) ^ index);
}

std::uint64_t hash_label(const std::string& label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : label) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

int budget_from_percent(double q_pct, int n) {
  const int q = static_cast<int>(std::lround(q_pct * n / 100.0));
  return std::clamp(q, 1, n);
}

// ---------------------------------------------------------------------------
// Selection and evaluation

SelectionOutcome select_nodes(std::shared_ptr<const ProblemInstance> instance, CostKind kind,
                              int budget, const ExperimentConfig& config,
                              const BandlimitedSpec& band) {
  SelectionOutcome out;
  const auto start = std::chrono::steady_clock::now();
  const int n = instance->size();
  try {
    if (config.solver == "greedy") {
      GreedyConfig g;
      g.kind = kind;
      g.budget = budget;
      g.band = band;
      g.threads = config.threads;
      const bool rank_one_ok =
          kind == CostKind::kBmse || kind == CostKind::kBcrb || kind == CostKind::kWcMse;
      if (config.fast_path == FastPath::kExactRankOne && rank_one_ok) g.fast_path = config.fast_path;
      if (config.fast_path == FastPath::kEigPerturbation && kind == CostKind::kWcBmse) {
        g.fast_path = config.fast_path;
      }
      out.selected = greedy_select(instance, g).selected;
    } else {
      PgdConfig p = config.pgd;
      p.budget = budget;
      p.band = band;
      out.selected = pgd_solve(instance, kind, p).selected;
    }
    const CostFunction cf(kind, instance, band);
    out.cost = cf.selection_value(SamplingVector::binary(n, out.selected, n));
  } catch (const ObservabilityError& e) {
    out.infeasible = true;
    out.message = e.what();
  } catch (const InfeasibleError& e) {
    out.infeasible = true;
    out.message = e.what();
  } catch (const RankError& e) {
    out.infeasible = true;
    out.message = e.what();
  }
  out.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

MseEstimate monte_carlo_mse(const ProblemInstance& data_model,
                            std::shared_ptr<const ProblemInstance> estimator,
                            const SamplingVector& d, int trials, std::uint64_t seed,
                            int threads) {
  if (trials < 1) throw DomainError("trials must be >= 1");
  if (data_model.size() != estimator->size()) {
    throw StructuralError("data model and estimator sizes differ");
  }
  const EstimatorState state = EstimatorState::build(estimator, d);
  const Mat gain = state.k_inverse() * state.data_operator();
  const Vec offset = state.solve(estimator->mu() * (estimator->h_r() * estimator->x0()));

  std::vector<double> errors(trials);
  parallel_for(trials, worker_count(threads), [&](int t) {
    Rng rng(derive_seed(seed, 0, static_cast<std::uint64_t>(t)));
    const Vec x = sample_prior(data_model, rng);
    const Vec y = sample_measurement(data_model, x, d, rng);
    const Vec x_hat = gain * y + offset;
    errors[t] = (x_hat - x).squaredNorm();
  });
  double sum = 0.0;
  for (double e : errors) sum += e;
  const double mean = sum / trials;
  double var = 0.0;
  for (double e : errors) var += (e - mean) * (e - mean);
  var = trials > 1 ? var / (trials - 1) : 0.0;
  return {mean, std::sqrt(var / trials)};
}

bool ResultRecord::infeasible() const { return std::isnan(mse); }

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<int> to_original(const std::vector<int>& selected, const std::vector<int>& map) {
  std::vector<int> out;
  out.reserve(selected.size());
  for (int s : selected) out.push_back(map[s]);
  return out;
}

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::uint64_t cell_seed(const ExperimentConfig& config, double q_pct) {
  return derive_seed(config.seed, hash_label("q=" + format_value(q_pct)), 0);
}

ResultRecord evaluate_cell(const std::string& label, double q_pct, const SelectionOutcome& sel,
                           const ProblemInstance& data_model,
                           std::shared_ptr<const ProblemInstance> estimator,
                           const ExperimentConfig& config, const std::vector<int>& node_map) {
  ResultRecord r;
  r.method = label;
  r.q_pct = q_pct;
  r.seed = cell_seed(config, q_pct);
  r.wall_ms = sel.wall_ms;
  if (sel.infeasible) {
    r.mse = kNaN;
    r.cost = kNaN;
    r.mse_sem = kNaN;
    return r;
  }
  const int n = estimator->size();
  const MseEstimate est = monte_carlo_mse(data_model, estimator,
                                          SamplingVector::binary(n, sel.selected, n),
                                          config.trials, r.seed, config.threads);
  r.mse = est.mean;
  r.mse_sem = est.sem;
  r.cost = sel.cost;
  r.selected = to_original(sel.selected, node_map);
  return r;
}

}  // namespace

std::vector<ResultRecord> run_monte_carlo(const ExperimentConfig& config) {
  const Experiment e = build_experiment(config);
  const int n = e.instance->size();
  std::vector<ResultRecord> records;
  for (double q_pct : config.q_pct) {
    const int q = budget_from_percent(q_pct, n);
    for (CostKind kind : config.methods) {
      const SelectionOutcome sel = select_nodes(e.instance, kind, q, config, e.band);
      records.push_back(
          evaluate_cell(to_string(kind), q_pct, sel, *e.instance, e.instance, config, e.node_map));
    }
  }
  return records;
}

std::vector<ResultRecord> run_robustness_sweep(const ExperimentConfig& config) {
  const std::string& mode = config.robustness.mode;
  if (mode == "none") return run_monte_carlo(config);
  const Experiment e = build_experiment(config);
  const int n = e.instance->size();
  std::vector<ResultRecord> records;

  if (mode == "sigma") {
    for (double q_pct : config.q_pct) {
      const int q = budget_from_percent(q_pct, n);
      for (CostKind kind : config.methods) {
        const SelectionOutcome sel = select_nodes(e.instance, kind, q, config, e.band);
        for (double s2 : config.robustness.values) {
          const auto inst = e.instance->with_sigma2(s2);
          records.push_back(evaluate_cell(to_string(kind) + "[sigma2=" + format_value(s2) + "]",
                                          q_pct, sel, *inst, inst, config, e.node_map));
        }
      }
    }
    return records;
  }

  // delta_l: selector and estimator use the perturbed Laplacian, data the true one.
  for (double dv : config.robustness.values) {
    const int delta = static_cast<int>(std::lround(dv));
    Rng rng(derive_seed(config.seed, hash_label("delta_l"), static_cast<std::uint64_t>(delta)));
    const PerturbedGraph pg = perturb_topology(e.graph, delta, rng);
    const auto perturbed = build_instance(config, pg.graph);
    for (double q_pct : config.q_pct) {
      const int q = budget_from_percent(q_pct, n);
      for (CostKind kind : config.methods) {
        const SelectionOutcome sel = select_nodes(perturbed, kind, q, config, e.band);
        records.push_back(evaluate_cell(to_string(kind) + "[delta=" + std::to_string(delta) + "]",
                                        q_pct, sel, *e.instance, perturbed, config, e.node_map));
      }
    }
  }
  return records;
}

std::vector<ResultRecord> run_experiment(const ExperimentConfig& config) {
  return config.robustness.mode == "none" ? run_monte_carlo(config)
                                          : run_robustness_sweep(config);
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string sci(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17e", v);
  return buf;
}

double parse_double(const std::string& s) {
  if (s == "nan") return kNaN;
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw StructuralError("bad number '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::string format_results(const std::vector<ResultRecord>& records) {
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (const auto& r : records) {
    os << r.method << ',' << sci(r.q_pct) << ',' << sci(r.mse) << ',' << sci(r.cost) << ','
       << sci(r.wall_ms) << ',' << r.seed << ',';
    for (std::size_t i = 0; i < r.selected.size(); ++i) {
      if (i) os << ';';
      os << r.selected[i];
    }
    os << '\n';
  }
  return os.str();
}

void emit_results(const std::vector<ResultRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw StructuralError("cannot write " + path.string());
  out << format_results(records);
}

std::vector<ResultRecord> parse_results(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw StructuralError("results file does not start with the expected header");
  }
  std::vector<ResultRecord> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 7) {
      throw StructuralError("line " + std::to_string(line_no) + ": expected 7 columns");
    }
    try {
      ResultRecord r;
      r.method = f[0];
      r.q_pct = parse_double(f[1]);
      r.mse = parse_double(f[2]);
      r.cost = parse_double(f[3]);
      r.wall_ms = parse_double(f[4]);
      r.seed = std::stoull(f[5]);
      if (!f[6].empty()) {
        for (const auto& s : split(f[6], ';')) r.selected.push_back(std::stoi(s));
      }
      r.mse_sem = kNaN;
      out.push_back(std::move(r));
    } catch (const std::logic_error& e) {
      throw StructuralError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<ResultRecord> read_results(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw StructuralError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_results(ss.str());
}

bool same_outcome(const ResultRecord& a, const ResultRecord& b) {
  auto eq = [](double x, double y) { return (std::isnan(x) && std::isnan(y)) || x == y; };
  return a.method == b.method && eq(a.q_pct, b.q_pct) && eq(a.mse, b.mse) && eq(a.cost, b.cost) &&
         a.seed == b.seed && a.selected == b.selected;
}

// ---------------------------------------------------------------------------
// Numeric files

namespace {

std::vector<std::vector<double>> read_rows(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw StructuralError("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    for (char& ch : line) {
      if (ch == ',' || ch == '\t' || ch == ';') ch = ' ';
    }
    std::istringstream ls(line);
    std::vector<double> row;
    std::string tok;
    while (ls >> tok) {
      try {
        row.push_back(parse_double(tok));
      } catch (const std::logic_error&) {
        throw StructuralError("non-numeric entry '" + tok + "' in " + path.string());
      }
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

Vec read_vector_file(const std::filesystem::path& path) {
  std::vector<double> vals;
  for (const auto& row : read_rows(path)) vals.insert(vals.end(), row.begin(), row.end());
  return Eigen::Map<const Vec>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

Mat read_matrix_file(const std::filesystem::path& path) {
  const auto rows = read_rows(path);
  if (rows.empty()) throw StructuralError("empty matrix file " + path.string());
  const std::size_t cols = rows.front().size();
  Mat m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw StructuralError("ragged matrix file " + path.string());
    for (std::size_t k = 0; k < cols; ++k) m(i, k) = rows[i][k];
  }
  return m;
}

}  // namespace gsample
