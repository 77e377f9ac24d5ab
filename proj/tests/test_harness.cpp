#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "gsample/errors.hpp"
#include "gsample/harness.hpp"
#include "test_util.hpp"

using namespace gsample;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.er = ErGraphSpec{14, 0.3, 5.0, 1.0, 3};
  apply_preset(c, "fig1a");
  c.q_pct = {50.0};
  c.trials = 200;
  c.seed = 9;
  return c;
}

}  // namespace

TEST_CASE("ER generator") {
  Rng rng(81);
  const WeightedGraph k = generate_er_graph(8, 1.0, 5.0, 1.0, rng);
  CHECK(k.n_edges() == 28);
  for (const auto& e : k.edges()) CHECK(e.weight >= 1e-3);
  CHECK_THROWS_AS(generate_er_graph(5, 0.0, 5.0, 1.0, rng), InfeasibleError);

  double total = 0.0;
  for (int t = 0; t < 500; ++t) total += static_cast<double>(generate_er_graph(50, 0.1, 5.0, 1.0, rng).n_edges());
  // Conditioning on connectivity shifts the mean slightly upward.
  CHECK(testutil::rel(total / 500.0, 122.5) <= 0.05);
}

TEST_CASE("seed derivation and budgets") {
  CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
  CHECK(derive_seed(1, 2, 3) != derive_seed(1, 2, 4));
  CHECK(derive_seed(1, 2, 3) != derive_seed(2, 2, 3));
  CHECK(hash_label("q=40") != hash_label("q=60"));
  CHECK(hash_label("") == 14695981039346656037ULL);  // FNV-1a offset basis
  CHECK(budget_from_percent(40, 50) == 20);
  CHECK(budget_from_percent(60, 20) == 12);
  CHECK(budget_from_percent(1, 20) == 1);
  CHECK(budget_from_percent(100, 20) == 20);
}

TEST_CASE("CSV format and round trip") {
  CHECK(format_results({}) == std::string(kCsvHeader) + "\n");
  ResultRecord a{"bmse", 40.0, 1.2345678901234567, 3.5, 12.0, 77, {0, 4, 7}, 0.0};
  ResultRecord b{"a_design", 60.0, std::numeric_limits<double>::quiet_NaN(),
                 std::numeric_limits<double>::infinity(), 1.0, 78, {}, 0.0};
  const std::string text = format_results({a, b});
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  CHECK(line == kCsvHeader);
  std::getline(in, line);
  CHECK(std::count(line.begin(), line.end(), ',') == 6);
  CHECK(line.find("0;4;7") != std::string::npos);
  const auto back = parse_results(text);
  REQUIRE(back.size() == 2);
  CHECK(same_outcome(back[0], a));
  CHECK(same_outcome(back[1], b));
  CHECK(back[0].mse == a.mse);
  CHECK(back[1].infeasible());

  const auto path = std::filesystem::temp_directory_path() / "gsample_results_test.csv";
  emit_results({a}, path);
  CHECK(same_outcome(read_results(path)[0], a));
  std::filesystem::remove(path);
}

TEST_CASE("config parse and round trip") {
  const ExperimentConfig c = parse_config(R"({
    "preset": "fig1b",
    "graph": {"type": "er", "n": 20, "p": 0.3, "seed": 4},
    "mu": 0.5, "sigma2": 0.02,
    "methods": ["bmse", "lr_design"],
    "solver": "pgd", "pgd": {"beta": 0.25},
    "q_pct": [25, 75], "trials": 50, "seed": 12,
    "robustness": {"mode": "sigma", "values": [1, 0.1]}
  })");
  CHECK(c.er->n == 20);
  CHECK(c.regularizer.name == "tikhonov");
  CHECK(c.regularizer.dagger);
  CHECK(c.methods == std::vector<CostKind>{CostKind::kBmse, CostKind::kLrDesign});
  CHECK(c.pgd.beta == 0.25);
  CHECK(c.robustness.values.size() == 2);
  const ExperimentConfig again = parse_config(config_to_json(c));
  CHECK(config_to_json(again) == config_to_json(c));
  CHECK_THROWS_AS(parse_config(R"({"solver": "anneal"})"), DomainError);
  CHECK_THROWS_AS(parse_config(R"({"q_pct": [0]})"), DomainError);
  CHECK_THROWS_AS(parse_config(R"({"trials": 0})"), DomainError);
  CHECK_THROWS_AS(parse_config("{"), StructuralError);
}

TEST_CASE("presets build the expected filters") {
  ExperimentConfig c;
  c.er = ErGraphSpec{10, 0.4, 5.0, 1.0, 2};
  apply_preset(c, "fig1b");
  const Experiment e = build_experiment(c);
  const Mat l = e.instance->laplacian();
  const Mat t = Mat::Identity(10, 10) + 0.2 * l;
  CHECK((e.instance->h_r() - t * t).norm() <= 1e-9 * (t * t).norm());
  CHECK(e.band.band() == std::vector<int>{0, 1, 2, 3, 4});
  apply_preset(c, "fig1c");
  const Experiment f = build_experiment(c);
  CHECK(f.band.band() == std::vector<int>{5, 6, 7, 8, 9});
  CHECK_THROWS_AS(apply_preset(c, "fig9"), DomainError);
}

TEST_CASE("pinning removes the reference node") {
  ExperimentConfig c;
  c.er = ErGraphSpec{8, 0.5, 5.0, 1.0, 5};
  apply_preset(c, "fig1a");
  c.reference_node = 3;
  const Experiment e = build_experiment(c);
  CHECK(e.instance->size() == 7);
  CHECK(e.node_map == std::vector<int>{0, 1, 2, 4, 5, 6, 7});
  Mat full = testutil::laplacian_oracle(e.graph);
  Mat reduced(7, 7);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) reduced(i, j) = full(e.node_map[i], e.node_map[j]);
  CHECK((e.instance->laplacian() - reduced).norm() < 1e-9);
}

TEST_CASE("Monte-Carlo MSE: zero noise and full sampling") {
  Rng rng(82);
  ProblemInstance::Options o;
  o.sigma2 = 1e-12;
  o.mu = 1e-8;
  const auto exact = ProblemInstance::create(testutil::random_graph(10, 0.3, rng), o);
  CHECK(monte_carlo_mse(*exact, exact, SamplingVector::full(10), 200, 1, 1).mean <= 1e-8);

  ProblemInstance::Options p;
  p.regularizer = FilterSpec::tikhonov(0.3).dagger();
  p.measurement = FilterSpec::diffusion(0.2);
  const auto inst = ProblemInstance::create(testutil::random_graph(20, 0.3, rng), p);
  const SamplingVector full = SamplingVector::full(20);
  const MseEstimate m = monte_carlo_mse(*inst, inst, full, 10000, 3, 0);
  const double oracle = EstimatorState::build(inst, full).k().inverse().trace();
  CHECK(testutil::rel(m.mean, oracle) <= 0.03);
}

TEST_CASE("results do not depend on the thread count") {
  ExperimentConfig c = small_config();
  c.threads = 1;
  const auto one = run_experiment(c);
  c.threads = 4;
  const auto four = run_experiment(c);
  REQUIRE(one.size() == four.size());
  CHECK(one.size() == 7);
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(same_outcome(one[i], four[i]));
    CHECK(one[i].selected.size() == 7);
  }
}

TEST_CASE("robustness sweeps") {
  ExperimentConfig c = small_config();
  c.methods = {CostKind::kBmse};
  c.robustness = RobustnessSweep{"delta_l", {0.0}};
  const auto zero = run_experiment(c);
  c.robustness = RobustnessSweep{"none", {}};
  const auto plain = run_experiment(c);
  REQUIRE(zero.size() == 1);
  CHECK(zero[0].selected == plain[0].selected);
  CHECK(zero[0].mse == plain[0].mse);

  c.robustness = RobustnessSweep{"sigma", {1.0, 0.01, 0.0001}};
  c.trials = 500;
  const auto sweep = run_experiment(c);
  REQUIRE(sweep.size() == 3);
  CHECK(sweep[0].method == "bmse[sigma2=1]");
  CHECK(sweep[0].mse > sweep[1].mse);
  CHECK(sweep[1].mse > sweep[2].mse);
}

TEST_CASE("pgd solver covers every method within budget") {
  ExperimentConfig c = small_config();
  c.solver = "pgd";
  c.trials = 20;
  const auto r = run_experiment(c);
  REQUIRE(r.size() == 7);
  for (const auto& rec : r) {
    CHECK(rec.selected.size() <= 7);
    CHECK((rec.infeasible() || rec.mse >= 0.0));
  }
}

TEST_CASE("vector and matrix files") {
  const auto dir = std::filesystem::temp_directory_path();
  {
    std::ofstream v(dir / "gsample_vec.txt");
    v << "# header\n1.5\n-2\n3e-1\n";
    std::ofstream m(dir / "gsample_mat.txt");
    m << "1, 0.5\n0.5;2\n";
  }
  const Vec v = read_vector_file(dir / "gsample_vec.txt");
  REQUIRE(v.size() == 3);
  CHECK(v(2) == 0.3);
  const Mat m = read_matrix_file(dir / "gsample_mat.txt");
  CHECK(m(0, 1) == 0.5);
  CHECK(m(1, 1) == 2.0);
  std::filesystem::remove(dir / "gsample_vec.txt");
  std::filesystem::remove(dir / "gsample_mat.txt");
}
