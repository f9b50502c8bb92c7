#include "bayesrank/experiment.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

#include "bayesrank/baseline.hpp"
#include "bayesrank/errors.hpp"

namespace bayesrank {

namespace fs = std::filesystem;

namespace {

DesignSpec design_from_json(const Json& j) {
  DesignSpec d;
  const std::string kind = j.value("kind", std::string("scaled_bounded"));
  if (kind == "identity") {
    d.kind = DesignKind::kIdentity;
  } else if (kind == "gaussian_iid") {
    d.kind = DesignKind::kGaussianIid;
  } else if (kind == "scaled_bounded") {
    d.kind = DesignKind::kScaledBounded;
    d.scale = j.value("scale", 1.0);
  } else {
    throw ConfigError("unknown design kind \"" + kind + "\"");
  }
  return d;
}

InitKind init_from_string(const std::string& s) {
  if (s == "svd_warmstart") return InitKind::kSvdWarmstart;
  if (s == "prior_draw") return InitKind::kPriorDraw;
  throw ConfigError("unknown init \"" + s + "\"");
}

std::string iso_timestamp(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void prepare_output_dir(const fs::path& dir, const RunOptions& options) {
  if (fs::exists(dir / "manifest.json") && !options.force) {
    throw ConfigError("output dir " + dir.string() +
                      " already holds a manifest; pass --force to overwrite");
  }
  fs::create_directories(dir);
}

void write_csv(const fs::path& path, const std::vector<ResultRow>& rows) {
  std::string text = results_csv_header();
  for (const auto& r : rows) text += format_result_row(r);
  write_text_atomic(path, text);
}

ResultRow base_row(const Scenario& s) {
  ResultRow row;
  row.scenario_id = s.id;
  row.dims = s.dims;
  row.k0 = s.k0;
  row.s2 = s.noise.s2();
  row.lambda = s.sampler.lambda;
  row.reps = s.reps;
  return row;
}

// Baseline risks on one replicate: oracle rank-k0 fit and penalized rank selection.
std::vector<double> baseline_risks(const Scenario& s, const RegressionInstance& inst) {
  const auto& truth = *inst.truth;
  const BaselineFit oracle = reduced_rank_fit(inst.X, inst.Y, s.k0);
  const double pen = default_rank_penalty(inst.X, s.dims.m, s.noise.s2());
  const BaselineFit selected = rank_penalized_select(inst.X, inst.Y, pen);
  return {prediction_risk(oracle.b_hat, truth.B, inst.X),
          prediction_risk(selected.b_hat, truth.B, inst.X)};
}

void fill_baseline_rows(const Scenario& s, const ScenarioFixture& fixture,
                        ScenarioOutcome& out, double thm1_total, double remark1) {
  auto fill = [&](ResultRow& row, const std::string& suffix, double lambda_col,
                  const std::vector<double>& risks) {
    row = base_row(s);
    row.scenario_id = s.id + "/" + suffix;
    row.lambda = lambda_col;
    std::tie(row.mean_risk, row.se_risk) = mean_and_std_error(risks);
    row.bound_thm1 = thm1_total;
    row.bound_remark1 = remark1;
    row.bound_ratio = row.mean_risk / thm1_total;
  };
  fill(out.oracle_rank, "rrr_oracle", 0.0, out.oracle_rank_risks);
  fill(out.rank_penalized, "rank_penalized",
       default_rank_penalty(fixture.X, s.dims.m, s.noise.s2()), out.rank_penalized_risks);
}

Json manifest_json(const ExperimentConfig& config, const std::vector<std::string>& files,
                   const std::vector<std::pair<std::string, std::string>>& statuses,
                   std::chrono::system_clock::time_point started, double wall) {
  Json scen = Json::array();
  for (const auto& [id, status] : statuses) {
    scen.push_back(Json{{"id", id}, {"status", status}});
  }
  return Json{{"schema_version", kSchemaVersion},
              {"software_version", kSoftwareVersion},
              {"config", config.echo},
              {"files", files},
              {"scenarios", scen},
              {"started_at", iso_timestamp(started)},
              {"finished_at", iso_timestamp(std::chrono::system_clock::now())},
              {"wall_time_seconds", wall}};
}

}  // namespace

Scenario parse_scenario(const Json& j) {
  if (!j.is_object()) throw ConfigError("scenario must be an object");
  Scenario s;
  if (!j.contains("id") || !j.at("id").is_string()) {
    throw ConfigError("scenario needs a string \"id\"");
  }
  s.id = j.at("id").get<std::string>();
  try {
    if (!j.contains("dims")) throw ConfigError("missing field \"dims\"");
    s.dims = dims_from_json(j.at("dims"));
    s.k0 = j.value("k0", 1);
    if (j.contains("design")) s.design = design_from_json(j.at("design"));
    s.truth_amplitude = j.value("truth_amplitude", 1.0);
    s.noise = j.contains("noise") ? noise_from_json(j.at("noise")) : NoiseSpec::gaussian(1.0);
    const Json prior_json = j.value(
        "prior", Json{{"type", "gamma_hier"}, {"a", 1.0}, {"b", "theorem"}});
    s.prior = prior_from_json(prior_json, TheoremContext{s.noise.s2(), s.dims});
    const Json sampler = j.value("sampler", Json::object());
    s.sampler.lambda = resolve_lambda(sampler.value("lambda", Json("theorem")), s.noise);
    s.sampler.iters = sampler.value("iters", 500);
    if (sampler.contains("burn_in")) s.sampler.burn_in = sampler.at("burn_in").get<int>();
    s.sampler.thin = sampler.value("thin", 1);
    s.sampler.init = init_from_string(sampler.value("init", std::string("svd_warmstart")));
    const std::string order = sampler.value("order", std::string("m_n"));
    if (order == "m_n") {
      s.sampler.order = ScanOrder::kMThenN;
    } else if (order == "n_m") {
      s.sampler.order = ScanOrder::kNThenM;
    } else {
      throw ConfigError("unknown scan order \"" + order + "\"");
    }
    s.reps = j.value("reps", 20);
    s.validate();
  } catch (const Json::exception& e) {
    throw ConfigError("scenario " + s.id + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError("scenario " + s.id + ": " + e.what());
  } catch (const std::domain_error& e) {
    throw ConfigError("scenario " + s.id + ": " + e.what());
  }
  return s;
}

ExperimentConfig parse_experiment_config(const Json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  if (j.contains("schema_version") && j.at("schema_version") != kSchemaVersion) {
    throw ConfigError("unsupported config schema_version");
  }
  ExperimentConfig config;
  config.echo = j;
  try {
    config.master_seed = j.value("master_seed", std::uint64_t{0});
    config.parallelism = j.value("parallelism", 1);
    config.output_dir = j.value("output_dir", std::string("out"));
  } catch (const Json::exception& e) {
    throw ConfigError(e.what());
  }
  if (config.parallelism < 1) throw ConfigError("parallelism must be >= 1");
  std::set<std::string> ids;
  for (const Json& sj : j.value("scenarios", Json::array())) {
    Scenario s = parse_scenario(sj);
    if (!ids.insert(s.id).second) throw ConfigError("duplicate scenario id \"" + s.id + "\"");
    config.scenarios.push_back(std::move(s));
  }
  return config;
}

std::string results_csv_header() {
  return "scenario_id,ell,p,m,k,k0,s2,lambda,reps,mean_risk,se_risk,bound_thm1,"
         "bound_remark1,bound_ratio\n";
}

std::string format_result_row(const ResultRow& r) {
  std::ostringstream out;
  out << r.scenario_id << ',' << r.dims.ell << ',' << r.dims.p << ',' << r.dims.m << ','
      << r.dims.k << ',' << r.k0 << ',' << fmt_double(r.s2) << ',' << fmt_double(r.lambda)
      << ',' << r.reps << ',' << fmt_double(r.mean_risk) << ',' << fmt_double(r.se_risk)
      << ',' << fmt_double(r.bound_thm1) << ',' << fmt_double(r.bound_remark1) << ','
      << fmt_double(r.bound_ratio) << '\n';
  return out.str();
}

double design_entry_bound(const Scenario& scenario, const Matrix& X) {
  switch (scenario.design.kind) {
    case DesignKind::kIdentity:
      return 1.0;
    case DesignKind::kScaledBounded:
      return scenario.design.scale;
    case DesignKind::kGaussianIid:
      break;
  }
  return X.cwiseAbs().maxCoeff();
}

ScenarioOutcome evaluate_scenario(const Scenario& scenario, std::uint64_t master_seed,
                                  int parallelism) {
  ScenarioOutcome out;
  const ScenarioFixture fixture = make_fixture(scenario, master_seed);

  MonteCarloOptions options;
  options.parallelism = parallelism;
  options.side_metric = [&](const RegressionInstance& inst) {
    return baseline_risks(scenario, inst);
  };
  out.mc = monte_carlo_risk(scenario, master_seed, options);
  for (const auto& side : out.mc.side_metrics) {
    out.oracle_rank_risks.push_back(side[0]);
    out.rank_penalized_risks.push_back(side[1]);
  }

  out.thm1 = theorem1_bound(
      oracle_inputs(fixture.truth, fixture.X, scenario.noise.s2(), scenario.dims));
  const double remark1 =
      remark1_bound(scenario.k0, scenario.dims.m, scenario.dims.p, scenario.dims.ell,
                    scenario.noise.s2(), design_entry_bound(scenario, fixture.X),
                    scenario.truth_amplitude);

  out.bayes = base_row(scenario);
  out.bayes.mean_risk = out.mc.mean;
  out.bayes.se_risk = out.mc.std_error;
  out.bayes.bound_thm1 = out.thm1.total;
  out.bayes.bound_remark1 = remark1;
  out.bayes.bound_ratio = out.mc.mean / out.thm1.total;
  fill_baseline_rows(scenario, fixture, out, out.thm1.total, remark1);
  return out;
}

ExperimentReport run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  const auto started = std::chrono::system_clock::now();
  const auto t0 = std::chrono::steady_clock::now();
  prepare_output_dir(config.output_dir, options);

  ExperimentReport report;
  std::vector<ResultRow> bayes_rows;
  std::vector<ResultRow> baseline_rows;
  std::vector<std::pair<std::string, std::string>> statuses;
  for (const Scenario& s : config.scenarios) {
    try {
      ScenarioOutcome outcome = evaluate_scenario(s, config.master_seed, config.parallelism);
      bayes_rows.push_back(outcome.bayes);
      baseline_rows.push_back(outcome.oracle_rank);
      baseline_rows.push_back(outcome.rank_penalized);
      report.outcomes.push_back(std::move(outcome));
      statuses.emplace_back(s.id, "ok");
    } catch (const std::exception& e) {
      report.failures.push_back(s.id + ": " + e.what());
      statuses.emplace_back(s.id, std::string("failed: ") + e.what());
    }
  }

  report.results_csv = config.output_dir / "results.csv";
  write_csv(report.results_csv, bayes_rows);
  write_csv(config.output_dir / "baseline_results.csv", baseline_rows);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_text_atomic(config.output_dir / "manifest.json",
                    manifest_json(config, {"results.csv", "baseline_results.csv"},
                                  statuses, started, wall)
                            .dump(2) +
                        "\n");
  return report;
}

std::vector<fs::path> run_generate(const ExperimentConfig& config, const RunOptions& options) {
  const auto started = std::chrono::system_clock::now();
  const auto t0 = std::chrono::steady_clock::now();
  prepare_output_dir(config.output_dir, options);
  fs::create_directories(config.output_dir / "instances");

  std::vector<fs::path> written;
  std::vector<std::string> relative;
  std::vector<std::pair<std::string, std::string>> statuses;
  for (const Scenario& s : config.scenarios) {
    const ScenarioFixture fixture = make_fixture(s, config.master_seed);
    for (int rep = 0; rep < s.reps; ++rep) {
      const auto seed =
          stream_seed(config.master_seed, s.id, static_cast<std::uint64_t>(rep) + 1);
      const RegressionInstance inst = make_replicate(s, fixture, seed);
      char name[64];
      std::snprintf(name, sizeof name, "_rep%03d.json", rep);
      const fs::path rel = fs::path("instances") / (s.id + name);
      write_text_atomic(config.output_dir / rel, instance_to_json(inst).dump() + "\n");
      written.push_back(config.output_dir / rel);
      relative.push_back(rel.generic_string());
    }
    statuses.emplace_back(s.id, "ok");
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_text_atomic(config.output_dir / "manifest.json",
                    manifest_json(config, relative, statuses, started, wall).dump(2) + "\n");
  return written;
}

ExperimentReport run_baseline(const ExperimentConfig& config, const RunOptions& options) {
  const auto started = std::chrono::system_clock::now();
  const auto t0 = std::chrono::steady_clock::now();
  prepare_output_dir(config.output_dir, options);

  ExperimentReport report;
  std::vector<ResultRow> rows;
  std::vector<std::pair<std::string, std::string>> statuses;
  for (const Scenario& s : config.scenarios) {
    try {
      const ScenarioFixture fixture = make_fixture(s, config.master_seed);
      ScenarioOutcome out;
      out.oracle_rank_risks.resize(static_cast<std::size_t>(s.reps));
      out.rank_penalized_risks.resize(static_cast<std::size_t>(s.reps));
      parallel_for(s.reps, config.parallelism, [&](int rep) {
        const auto seed =
            stream_seed(config.master_seed, s.id, static_cast<std::uint64_t>(rep) + 1);
        const auto risks = baseline_risks(s, make_replicate(s, fixture, seed));
        out.oracle_rank_risks[static_cast<std::size_t>(rep)] = risks[0];
        out.rank_penalized_risks[static_cast<std::size_t>(rep)] = risks[1];
      });
      out.thm1 = theorem1_bound(oracle_inputs(fixture.truth, fixture.X, s.noise.s2(), s.dims));
      const double remark1 =
          remark1_bound(s.k0, s.dims.m, s.dims.p, s.dims.ell, s.noise.s2(),
                        design_entry_bound(s, fixture.X), s.truth_amplitude);
      fill_baseline_rows(s, fixture, out, out.thm1.total, remark1);
      rows.push_back(out.oracle_rank);
      rows.push_back(out.rank_penalized);
      report.outcomes.push_back(std::move(out));
      statuses.emplace_back(s.id, "ok");
    } catch (const std::exception& e) {
      report.failures.push_back(s.id + ": " + e.what());
      statuses.emplace_back(s.id, std::string("failed: ") + e.what());
    }
  }
  report.results_csv = config.output_dir / "baseline_results.csv";
  write_csv(report.results_csv, rows);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_text_atomic(config.output_dir / "manifest.json",
                    manifest_json(config, {"baseline_results.csv"}, statuses, started, wall)
                            .dump(2) +
                        "\n");
  return report;
}

FitOutput fit_instance(const Instance& instance, const FitOptions& options) {
  return std::visit(
      [&](const auto& inst) {
        const Dims d = inst.dims();
        const PriorSpec prior = prior_from_json(options.prior, TheoremContext{inst.noise.s2(), d});
        SamplerConfig config;
        config.lambda = resolve_lambda(options.lambda, inst.noise);
        config.iters = options.iters;
        config.burn_in = options.burn_in;
        config.thin = options.thin;
        config.seed = options.seed;
        config.init = options.init;
        ChainResult chain = run_chain(inst, prior, config);

        FitOutput out;
        out.summary = summary_to_json(chain.summary);
        out.summary["effective_rank"] = effective_rank(chain.summary.b_hat, options.rank_tol);
        out.summary["effective_rank_tol"] = options.rank_tol;
        out.summary["risk"] = nullptr;
        using T = std::decay_t<decltype(inst)>;
        if constexpr (std::is_same_v<T, RegressionInstance>) {
          out.summary["kind"] = "regression";
          if (inst.truth) {
            out.summary["risk"] = prediction_risk(chain.summary.b_hat, inst.truth->B, inst.X);
            out.summary["signal_energy"] = (inst.X * inst.truth->B).squaredNorm();
          }
        } else {
          out.summary["kind"] = "completion";
          if (inst.truth) {
            out.summary["risk"] = completion_risk(chain.summary.b_hat, *inst.truth);
            out.summary["signal_energy"] = inst.truth->squaredNorm();
          }
        }
        out.trace = std::move(chain.trace);
        return out;
      },
      instance);
}

}  // namespace bayesrank
