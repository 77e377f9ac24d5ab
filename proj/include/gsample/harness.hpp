#ifndef GSAMPLE_HARNESS_HPP
#define GSAMPLE_HARNESS_HPP

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gsample/greedy.hpp"
#include "gsample/pgd.hpp"

namespace gsample {

struct ErGraphSpec {
  int n = 50;
  double p = 0.1;
  double weight_mean = 5.0;
  double weight_std = 1.0;
  std::uint64_t seed = 1;
};

/// A named filter family with its parameters, e.g. {"tikhonov", 0.2, 2, true}.
struct FilterChoice {
  std::string name = "identity";
  double parameter = 0.0;
  int power = 1;
  bool dagger = false;
  /// Ideal projector: explicit eigenvalue indices, or empty to use the
  /// complement of the experiment band.
  std::vector<int> indices;
  std::vector<double> table;
};

struct BandChoice {
  std::string mode = "low";  // low | high | indices
  int size = -1;             // -1: N/2
  std::vector<int> indices;
};

struct RobustnessSweep {
  std::string mode = "none";  // none | sigma | delta_l
  std::vector<double> values;
};

struct ExperimentConfig {
  std::optional<ErGraphSpec> er = ErGraphSpec{};
  std::string edge_list;
  std::optional<int> reference_node;
  FilterChoice measurement;
  FilterChoice regularizer;
  BandChoice band;
  double mu = 0.1;
  double sigma2 = 0.01;
  std::string covariance_file;
  std::string x0_mode = "zero";  // zero | file
  std::string x0_file;
  std::vector<CostKind> methods = {CostKind::kBcrb,    CostKind::kWcMse,   CostKind::kBmse,
                                   CostKind::kWcBmse,  CostKind::kADesign, CostKind::kEDesign,
                                   CostKind::kLrDesign};
  std::string solver = "greedy";  // greedy | pgd
  FastPath fast_path = FastPath::kOff;
  PgdConfig pgd;
  std::vector<double> q_pct = {40.0, 60.0, 80.0};
  int trials = 1000;
  std::uint64_t seed = 1;
  RobustnessSweep robustness;
  /// 0: worker_count().
  int threads = 0;
};

/// Applies a Table 1 preset ("fig1a", "fig1b", "fig1c") to the filters and band.
void apply_preset(ExperimentConfig& config, const std::string& preset);

ExperimentConfig parse_config(const std::string& json_text,
                              const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const ExperimentConfig& config);

FilterSpec make_filter(const FilterChoice& choice, const std::vector<int>& band_complement);

/// Graph, problem instance and band built from a config.
struct Experiment {
  WeightedGraph graph{1, {}};
  std::shared_ptr<const ProblemInstance> instance;
  BandlimitedSpec band{{0}, 1};
  /// Original node index of each instance row (differs under pinning).
  std::vector<int> node_map;
  std::vector<std::string> notices;
};

Experiment build_experiment(const ExperimentConfig& config);
/// Instance on an explicit graph with the config's filters and noise model.
std::shared_ptr<const ProblemInstance> build_instance(const ExperimentConfig& config,
                                                      const WeightedGraph& graph,
                                                      std::vector<int>* node_map = nullptr);

/// ER graph: each pair with probability p, weights N(mean, std^2) truncated
/// below at 1e-3, redrawn until connected (at most 100 attempts).
WeightedGraph generate_er_graph(int n, double p, double weight_mean, double weight_std,
                                Rng& rng);

std::uint64_t splitmix64(std::uint64_t x);
/// Independent stream seed for (master, cell, index).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t cell, std::uint64_t index);
/// Stable 64-bit hash of a string (FNV-1a).
std::uint64_t hash_label(const std::string& label);

int budget_from_percent(double q_pct, int n);

struct SelectionOutcome {
  std::vector<int> selected;
  double cost = 0.0;
  double wall_ms = 0.0;
  bool infeasible = false;
  std::string message;
};

/// Runs the configured solver for one method and budget.
SelectionOutcome select_nodes(std::shared_ptr<const ProblemInstance> instance, CostKind kind,
                              int budget, const ExperimentConfig& config,
                              const BandlimitedSpec& band);

struct MseEstimate {
  double mean = 0.0;
  /// Standard error of the mean.
  double sem = 0.0;
};

/// Empirical MSE: x drawn from `data_model`'s prior, y from its measurement
/// model, x_hat from `estimator`. Trial t uses derive_seed(seed, 0, t), so
/// the result does not depend on the thread count.
MseEstimate monte_carlo_mse(const ProblemInstance& data_model,
                            std::shared_ptr<const ProblemInstance> estimator,
                            const SamplingVector& d, int trials, std::uint64_t seed,
                            int threads);

struct ResultRecord {
  std::string method;
  double q_pct = 0.0;
  double mse = 0.0;
  double cost = 0.0;
  double wall_ms = 0.0;
  std::uint64_t seed = 0;
  std::vector<int> selected;
  /// Not serialized.
  double mse_sem = 0.0;

  bool infeasible() const;
};

/// Every method at every budget; infeasible cells are recorded with NaN.
std::vector<ResultRecord> run_monte_carlo(const ExperimentConfig& config);
/// Sweep selected at nominal parameters, evaluated under each sweep value.
std::vector<ResultRecord> run_robustness_sweep(const ExperimentConfig& config);
/// run_monte_carlo or run_robustness_sweep depending on config.robustness.
std::vector<ResultRecord> run_experiment(const ExperimentConfig& config);

inline constexpr const char* kCsvHeader = "method,q_pct,mse,cost,wall_ms,seed,selected";

std::string format_results(const std::vector<ResultRecord>& records);
void emit_results(const std::vector<ResultRecord>& records, const std::filesystem::path& path);
std::vector<ResultRecord> parse_results(const std::string& csv);
std::vector<ResultRecord> read_results(const std::filesystem::path& path);

/// Equal on every serialized field except wall_ms (NaN equals NaN).
bool same_outcome(const ResultRecord& a, const ResultRecord& b);

Vec read_vector_file(const std::filesystem::path& path);
Mat read_matrix_file(const std::filesystem::path& path);

}  // namespace gsample

#endif  // GSAMPLE_HARNESS_HPP
