// Command-line front end: generate, fit, experiment, bound, baseline.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "bayesrank/bounds.hpp"
#include "bayesrank/errors.hpp"
#include "bayesrank/experiment.hpp"
#include "bayesrank/serialize.hpp"

namespace fs = std::filesystem;
using namespace bayesrank;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> parallelism;
  std::string output;
  bool force = false;
};

ExperimentConfig load_config(const Globals& g) {
  if (g.config.empty()) throw UsageError("--config is required");
  ExperimentConfig config = parse_experiment_config(read_json_file(g.config));
  if (g.seed) config.master_seed = *g.seed;
  if (g.parallelism) {
    if (*g.parallelism < 1) throw UsageError("--parallelism must be >= 1");
    config.parallelism = *g.parallelism;
  }
  if (!g.output.empty()) config.output_dir = g.output;
  return config;
}

int report_failures(const ExperimentReport& report) {
  for (const auto& f : report.failures) std::cerr << "scenario failed: " << f << "\n";
  std::cout << report.results_csv.string() << "\n";
  return report.failures.empty() ? 0 : kExitRuntime;
}

Json parse_inline_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::exception&) {
    // Bare words such as theorem or bayes.
    if (!text.empty() && text.find_first_of("{[\"") == std::string::npos) {
      return Json(text);
    }
    throw UsageError(what + " is not valid JSON: " + text);
  }
}

void print_bound(const BoundBreakdown& b) {
  for (const auto& w : b.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << bound_to_json(b).dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian low-rank matrix estimation and oracle-bound checks"};
  app.require_subcommand(1);

  Globals g;
  app.add_option("--config", g.config, "experiment config (JSON)");
  app.add_option("--seed", g.seed, "master seed (experiment) or sampler seed (fit)");
  app.add_option("--parallelism", g.parallelism, "worker threads for replications");
  app.add_option("--output", g.output, "output directory");
  app.add_flag("--force", g.force, "overwrite an output dir that already has a manifest");

  auto* generate = app.add_subcommand("generate", "write one instance JSON per scenario replication");
  auto* experiment = app.add_subcommand("experiment", "run all scenarios, write results CSV and manifest");
  auto* baseline = app.add_subcommand("baseline", "baseline estimators only, same CSV schema");

  auto* fit = app.add_subcommand("fit", "run the Gibbs sampler on one instance");
  std::string instance_path;
  std::string prior_text = R"({"type":"gamma_hier","a":1,"b":"theorem"})";
  std::string lambda_text = "theorem";
  FitOptions fit_opts;
  std::optional<int> burn_in;
  std::string init = "svd_warmstart";
  fit->add_option("--instance", instance_path, "instance JSON")->required();
  fit->add_option("--prior", prior_text, "prior spec as JSON")->capture_default_str();
  fit->add_option("--lambda", lambda_text, "number, theorem or bayes")->capture_default_str();
  fit->add_option("--iters", fit_opts.iters)->capture_default_str();
  fit->add_option("--burn-in", burn_in);
  fit->add_option("--thin", fit_opts.thin)->capture_default_str();
  fit->add_option("--init", init)->check(CLI::IsMember({"svd_warmstart", "prior_draw"}));
  fit->add_option("--rank-tol", fit_opts.rank_tol)->capture_default_str();

  auto* bound = app.add_subcommand("bound", "evaluate the closed-form risk bound");
  bool remark1 = false;
  Dims dims;
  double s2 = 0.0;
  std::string bound_instance;
  BoundNorms norms;
  int k0 = 0;
  double entry_c = 1.0;
  double factor_c = 1.0;
  bound->add_flag("--remark1", remark1, "bounded-design simplification instead");
  bound->add_option("--ell", dims.ell);
  bound->add_option("--p", dims.p);
  bound->add_option("--m", dims.m);
  bound->add_option("--k", dims.k);
  bound->add_option("--s2", s2)->required();
  bound->add_option("--instance", bound_instance, "instance JSON with truth; oracle point from it");
  bound->add_option("--approx", norms.approx);
  bound->add_option("--m-fro-sq", norms.m_fro_sq);
  bound->add_option("--n-fro-sq", norms.n_fro_sq);
  bound->add_option("--x-fro-sq", norms.x_fro_sq);
  bound->add_option("--support-size", norms.support_size);
  bound->add_option("--k0", k0);
  bound->add_option("--C", entry_c, "design entry bound");
  bound->add_option("--c", factor_c, "factor entry bound");

  for (auto* sub : {generate, experiment, baseline, fit, bound}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    const RunOptions run_opts{g.force};
    if (*generate) {
      const auto files = run_generate(load_config(g), run_opts);
      std::cout << files.size() << " instance files\n";
      return 0;
    }
    if (*experiment) return report_failures(run_experiment(load_config(g), run_opts));
    if (*baseline) return report_failures(run_baseline(load_config(g), run_opts));

    if (*fit) {
      const Instance inst = instance_from_json(read_json_file(instance_path));
      fit_opts.prior = parse_inline_json(prior_text, "--prior");
      fit_opts.lambda = parse_inline_json(lambda_text, "--lambda");
      fit_opts.burn_in = burn_in;
      fit_opts.seed = g.seed.value_or(0);
      fit_opts.init = init == "prior_draw" ? InitKind::kPriorDraw : InitKind::kSvdWarmstart;
      const FitOutput out = fit_instance(inst, fit_opts);
      if (g.output.empty()) {
        std::cout << out.summary.dump(2) << "\n";
        return 0;
      }
      const fs::path dir = g.output;
      fs::create_directories(dir);
      write_text_atomic(dir / "summary.json", out.summary.dump(2) + "\n");
      std::ostringstream trace;
      out.trace.write_csv(trace);
      write_text_atomic(dir / "trace.csv", trace.str());
      std::cout << (dir / "summary.json").string() << "\n";
      return 0;
    }

    if (*bound) {
      if (remark1) {
        if (dims.ell <= 0 || dims.p <= 0 || dims.m <= 0) {
          throw UsageError("--remark1 needs --ell, --p and --m");
        }
        const double v = remark1_bound(k0, dims.m, dims.p, dims.ell, s2, entry_c, factor_c);
        std::cout << Json{{"remark1", v}}.dump(2) << "\n";
        return 0;
      }
      if (!bound_instance.empty()) {
        const Instance inst = instance_from_json(read_json_file(bound_instance));
        const auto* reg = std::get_if<RegressionInstance>(&inst);
        if (reg == nullptr || !reg->truth) {
          throw UsageError("--instance must be a regression instance with truth");
        }
        const double s2_used = s2 > 0.0 ? s2 : reg->noise.s2();
        print_bound(theorem1_bound(oracle_inputs(*reg->truth, reg->X, s2_used, reg->dims())));
        return 0;
      }
      if (dims.ell <= 0 || dims.p <= 0 || dims.m <= 0 || dims.k <= 0) {
        throw UsageError("bound needs --ell, --p, --m and --k, or --instance");
      }
      norms.s2 = s2;
      norms.dims = dims;
      print_bound(theorem1_bound(norms));
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    // Usage, config, dimension and bound-constraint errors.
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
