#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "gsample/errors.hpp"
#include "gsample/harness.hpp"
#include "gsample/properties.hpp"

using namespace gsample;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;

struct Common {
  std::string config_path;
  std::string preset;
  int threads = -1;
  long long seed = -1;
};

ExperimentConfig resolve_config(const Common& c) {
  ExperimentConfig cfg = c.config_path.empty() ? ExperimentConfig{} : load_config(c.config_path);
  if (!c.preset.empty()) apply_preset(cfg, c.preset);
  if (c.threads >= 0) cfg.threads = c.threads;
  if (c.seed >= 0) cfg.seed = static_cast<std::uint64_t>(c.seed);
  return cfg;
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("-c,--config", c.config_path, "Experiment config (JSON)");
  sub->add_option("--preset", c.preset, "Filter preset: fig1a, fig1b or fig1c");
  sub->add_option("--threads", c.threads, "Worker threads (0: all cores)");
  sub->add_option("--seed", c.seed, "Master seed override");
}

std::vector<int> parse_index_list(const std::string& text) {
  std::vector<int> out;
  std::string tok;
  std::istringstream in(text);
  while (std::getline(in, tok, ';')) {
    std::istringstream sub(tok);
    std::string part;
    while (std::getline(sub, part, ',')) {
      if (!part.empty()) out.push_back(std::stoi(part));
    }
  }
  return out;
}

void write_or_print(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw StructuralError("cannot write " + path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph-signal sampling allocation"};
  app.require_subcommand(1);

  Common sample_opts, estimate_opts, evaluate_opts, grad_opts, props_opts;

  auto* sample = app.add_subcommand("sample", "Select a sampling set for one method");
  add_common(sample, sample_opts);
  std::string method = "bmse", solver, out_path;
  double q_pct = 40.0;
  sample->add_option("-m,--method", method, "Cost: bcrb, wc_mse, bmse, wc_bmse, a_design, e_design, lr_design");
  sample->add_option("-q,--q-pct", q_pct, "Percentage of sampled nodes");
  sample->add_option("--solver", solver, "greedy or pgd (overrides the config)");
  sample->add_option("-o,--out", out_path, "Output file (default stdout)");

  auto* estimate = app.add_subcommand("estimate", "Estimate a signal from one measurement");
  add_common(estimate, estimate_opts);
  std::string y_path, selected_text, estimate_out;
  estimate->add_option("-y,--y", y_path, "Measurement vector file (one value per node)")->required();
  estimate->add_option("-s,--selected", selected_text, "Sampled nodes, e.g. 0,4,7 or 0;4;7")->required();
  estimate->add_option("-o,--out", estimate_out, "Output file (default stdout)");

  auto* evaluate = app.add_subcommand("evaluate", "Monte-Carlo sweep to CSV");
  add_common(evaluate, evaluate_opts);
  std::string csv_path;
  int trials = -1;
  evaluate->add_option("-o,--out", csv_path, "CSV output (default stdout)");
  evaluate->add_option("--trials", trials, "Monte-Carlo trials override");

  auto* grad = app.add_subcommand("gradcheck", "Finite-difference audit of the cost gradients");
  add_common(grad, grad_opts);
  int points = 10;
  double step = 1e-5;
  grad->add_option("--points", points, "Random interior points");
  grad->add_option("--step", step, "Finite-difference step");

  auto* props = app.add_subcommand("props", "Submodularity, convexity and asymptotic checks");
  add_common(props, props_opts);
  int samples = 200;
  props->add_option("--samples", samples, "Random triples per check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitError;
  }

  try {
    if (*sample) {
      ExperimentConfig cfg = resolve_config(sample_opts);
      if (!solver.empty()) cfg.solver = solver;
      const CostKind kind = parse_cost_kind(method);
      const Experiment e = build_experiment(cfg);
      const int q = budget_from_percent(q_pct, e.instance->size());
      const SelectionOutcome sel = select_nodes(e.instance, kind, q, cfg, e.band);
      if (sel.infeasible) {
        std::cerr << "infeasible: " << sel.message << '\n';
        return kExitInfeasible;
      }
      std::vector<int> original;
      for (int s : sel.selected) original.push_back(e.node_map[s]);
      nlohmann::json j{{"method", method}, {"q", q}, {"cost", sel.cost}, {"selected", original}};
      write_or_print(j.dump() + "\n", out_path);
    } else if (*estimate) {
      const ExperimentConfig cfg = resolve_config(estimate_opts);
      const Experiment e = build_experiment(cfg);
      const int n = e.instance->size();
      Vec y = read_vector_file(y_path);
      if (y.size() == static_cast<Eigen::Index>(e.node_map.size()) + 1 && cfg.reference_node) {
        Vec r(n);
        for (int i = 0; i < n; ++i) r(i) = y(e.node_map[i]);
        y = r;
      }
      std::vector<int> sel;
      for (int s : parse_index_list(selected_text)) {
        auto it = std::find(e.node_map.begin(), e.node_map.end(), s);
        if (it == e.node_map.end()) throw StructuralError("selected node " + std::to_string(s) + " is not estimable");
        sel.push_back(static_cast<int>(it - e.node_map.begin()));
      }
      std::sort(sel.begin(), sel.end());
      const EstimatorState st = EstimatorState::build(e.instance, SamplingVector::binary(n, sel, n));
      const Vec x_hat = gsample::estimate(st, y);
      std::ostringstream os;
      os.precision(17);
      for (int i = 0; i < n; ++i) os << x_hat(i) << '\n';
      write_or_print(os.str(), estimate_out);
    } else if (*evaluate) {
      ExperimentConfig cfg = resolve_config(evaluate_opts);
      if (trials > 0) cfg.trials = trials;
      const auto records = run_experiment(cfg);
      write_or_print(format_results(records), csv_path);
      for (const auto& r : records) {
        if (r.infeasible()) std::cerr << "note: " << r.method << " at q=" << r.q_pct << "% infeasible\n";
      }
    } else if (*grad) {
      const ExperimentConfig cfg = resolve_config(grad_opts);
      const Experiment e = build_experiment(cfg);
      const auto reports =
          gradcheck(e.instance, {CostKind::kBcrb, CostKind::kWcMse, CostKind::kBmse, CostKind::kWcBmse},
                    points, cfg.seed, step);
      for (const auto& r : reports) {
        std::printf("%-8s max_rel_error=%.3e points=%d%s\n", to_string(r.kind).c_str(),
                    r.max_relative_error, r.points, r.subgradient_seen ? " (subgradient)" : "");
      }
    } else if (*props) {
      const ExperimentConfig cfg = resolve_config(props_opts);
      const Experiment e = build_experiment(cfg);
      bool ok = true;
      for (const auto& r : run_property_suites(e.instance, e.band, cfg.seed, samples)) {
        const char* status = r.passed ? "PASS" : (r.advisory ? "NOTE" : "FAIL");
        std::printf("%s %s: %s\n", status, r.name.c_str(), r.detail.c_str());
        if (!r.passed && !r.advisory) ok = false;
      }
      return ok ? kExitOk : kExitError;
    }
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << " (best cost " << e.best_cost() << ")\n";
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitOk;
}
