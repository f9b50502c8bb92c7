#include "bayesrank/serialize.hpp"

#include <fstream>
#include <sstream>

#include "bayesrank/errors.hpp"

namespace bayesrank {

namespace {

const Json& require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw ConfigError(std::string("missing field \"") + key + "\"");
  }
  return j.at(key);
}

double number(const Json& j, const char* key) {
  const Json& v = require(j, key);
  if (!v.is_number()) throw ConfigError(std::string("field \"") + key + "\" must be a number");
  return v.get<double>();
}

int integer(const Json& j, const char* key) {
  const Json& v = require(j, key);
  if (!v.is_number_integer()) {
    throw ConfigError(std::string("field \"") + key + "\" must be an integer");
  }
  return v.get<int>();
}

}  // namespace

Json matrix_to_json(const Matrix& a) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < a.cols(); ++j) row.push_back(a(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j, const std::string& what) {
  if (!j.is_array()) throw ConfigError(what + " must be a nested array");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = rows > 0 ? static_cast<Eigen::Index>(j[0].size()) : 0;
  Matrix a(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw ConfigError(what + " rows must all have the same length");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      const Json& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) throw ConfigError(what + " entries must be numbers");
      a(i, c) = v.get<double>();
    }
  }
  return a;
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Vector vector_from_json(const Json& j, const std::string& what) {
  if (!j.is_array()) throw ConfigError(what + " must be an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(what + " entries must be numbers");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

Json dims_to_json(const Dims& d) {
  return Json{{"ell", d.ell}, {"p", d.p}, {"m", d.m}, {"k", d.k}};
}

Dims dims_from_json(const Json& j) {
  Dims d{integer(j, "ell"), integer(j, "p"), integer(j, "m"), integer(j, "k")};
  d.validate();
  return d;
}

Json noise_to_json(const NoiseSpec& noise) {
  if (const auto* g = std::get_if<GaussianNoise>(&noise.law())) {
    return Json{{"type", "gaussian"}, {"sigma2", g->sigma2}, {"s2", noise.s2()}};
  }
  return Json{{"type", "bounded_uniform"},
              {"zeta", std::get<BoundedUniformNoise>(noise.law()).zeta},
              {"s2", noise.s2()}};
}

NoiseSpec noise_from_json(const Json& j) {
  const std::string type = require(j, "type").get<std::string>();
  std::optional<double> s2;
  if (j.contains("s2") && !j.at("s2").is_null()) s2 = number(j, "s2");
  if (type == "gaussian") return NoiseSpec::gaussian(number(j, "sigma2"), s2);
  if (type == "bounded_uniform") return NoiseSpec::bounded_uniform(number(j, "zeta"), s2);
  throw ConfigError("unknown noise type \"" + type + "\"");
}

Json prior_to_json(const PriorSpec& prior) {
  if (const auto* f = std::get_if<FixedPrior>(&prior)) {
    return Json{{"type", "fixed"},
                {"var_m", vector_to_json(f->var_m)},
                {"var_n", vector_to_json(f->var_n)}};
  }
  const auto& g = std::get<GammaHierPrior>(prior);
  return Json{{"type", "gamma_hier"}, {"a", g.a}, {"b", g.b}};
}

PriorSpec prior_from_json(const Json& j, const std::optional<TheoremContext>& ctx) {
  const std::string type = require(j, "type").get<std::string>();
  if (type == "fixed") {
    return FixedPrior{vector_from_json(require(j, "var_m"), "var_m"),
                      vector_from_json(require(j, "var_n"), "var_n")};
  }
  if (type != "gamma_hier") throw ConfigError("unknown prior type \"" + type + "\"");
  const Json& b = require(j, "b");
  double a = 1.0;
  if (j.contains("a")) a = number(j, "a");
  if (b.is_string()) {
    if (b.get<std::string>() != "theorem") {
      throw ConfigError("prior b must be a number or \"theorem\"");
    }
    if (!ctx) throw ConfigError("prior b = \"theorem\" needs s2 and dims");
    const auto hp =
        theorem_hyperparams(ctx->s2, ctx->dims.ell, ctx->dims.p, ctx->dims.m, ctx->dims.k);
    return GammaHierPrior{a, hp.b};
  }
  return GammaHierPrior{a, number(j, "b")};
}

double resolve_lambda(const Json& j, const NoiseSpec& noise) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "theorem") return 1.0 / (4.0 * noise.s2());
    if (s == "bayes") {
      if (!noise.is_gaussian()) {
        throw ConfigError("lambda = \"bayes\" requires Gaussian noise");
      }
      return 1.0 / (2.0 * std::get<GaussianNoise>(noise.law()).sigma2);
    }
  }
  throw ConfigError("lambda must be a number, \"theorem\" or \"bayes\"");
}

Json instance_to_json(const RegressionInstance& inst) {
  Json j{{"schema_version", kSchemaVersion},
         {"kind", "regression"},
         {"dims", dims_to_json(inst.dims())},
         {"x", matrix_to_json(inst.X)},
         {"y", matrix_to_json(inst.Y)},
         {"noise", noise_to_json(inst.noise)}};
  if (inst.truth) {
    j["truth"] = Json{{"m0", matrix_to_json(inst.truth->M0)},
                      {"n0", matrix_to_json(inst.truth->N0)},
                      {"b", matrix_to_json(inst.truth->B)}};
  } else {
    j["truth"] = nullptr;
  }
  return j;
}

Json instance_to_json(const CompletionInstance& inst) {
  Json mask = Json::array();
  for (const auto& e : inst.mask) mask.push_back(Json::array({e.row, e.col}));
  Json j{{"schema_version", kSchemaVersion},
         {"kind", "completion"},
         {"dims", dims_to_json(inst.dims())},
         {"mask", std::move(mask)},
         {"y", vector_to_json(inst.observed)},
         {"noise", noise_to_json(inst.noise)}};
  j["truth"] = inst.truth ? Json{{"b", matrix_to_json(*inst.truth)}} : Json(nullptr);
  return j;
}

Instance instance_from_json(const Json& j) {
  if (j.contains("schema_version") && j.at("schema_version") != kSchemaVersion) {
    throw ConfigError("unsupported instance schema_version");
  }
  const std::string kind = j.value("kind", std::string(j.contains("x") ? "regression" : "completion"));
  const Dims d = dims_from_json(require(j, "dims"));
  const NoiseSpec noise = noise_from_json(require(j, "noise"));
  const bool has_truth = j.contains("truth") && !j.at("truth").is_null();

  if (kind == "regression") {
    RegressionInstance inst;
    inst.X = matrix_from_json(require(j, "x"), "x");
    inst.Y = matrix_from_json(require(j, "y"), "y");
    inst.noise = noise;
    inst.k = d.k;
    if (has_truth) {
      const Json& t = j.at("truth");
      LowRankTruth truth;
      truth.M0 = matrix_from_json(require(t, "m0"), "truth.m0");
      truth.N0 = matrix_from_json(require(t, "n0"), "truth.n0");
      truth.B = matrix_from_json(require(t, "b"), "truth.b");
      // k0 = 0 stores p x 0 factors as rows of empty arrays.
      if (truth.M0.rows() == 0) truth.M0.resize(d.p, 0);
      if (truth.N0.rows() == 0) truth.N0.resize(d.m, 0);
      inst.truth = std::move(truth);
    }
    if (inst.dims() != d) throw DimensionError("instance dims do not match x and y");
    inst.validate();
    return inst;
  }
  if (kind != "completion") throw ConfigError("unknown instance kind \"" + kind + "\"");

  CompletionInstance inst;
  inst.ell = d.ell;
  inst.m = d.m;
  inst.k = d.k;
  inst.noise = noise;
  for (const Json& e : require(j, "mask")) {
    if (!e.is_array() || e.size() != 2) throw ConfigError("mask entries must be [i, j]");
    inst.mask.push_back({e[0].get<int>(), e[1].get<int>()});
  }
  inst.observed = vector_from_json(require(j, "y"), "y");
  if (has_truth) inst.truth = matrix_from_json(require(j.at("truth"), "b"), "truth.b");
  inst.validate();
  return inst;
}

Json bound_to_json(const BoundBreakdown& b) {
  return Json{{"approx_term", b.approx_term}, {"rank_term", b.rank_term},
              {"k_term", b.k_term},           {"design_term", b.design_term},
              {"norm_term", b.norm_term},     {"total", b.total},
              {"warnings", b.warnings}};
}

Json summary_to_json(const PosteriorSummary& s) {
  return Json{{"schema_version", kSchemaVersion},
              {"b_hat", matrix_to_json(s.b_hat)},
              {"kept", s.kept},
              {"lambda", s.lambda},
              {"prior", prior_to_json(s.prior)},
              {"iters", s.iters},
              {"burn_in", s.burn_in},
              {"thin", s.thin},
              {"seed", s.seed},
              {"wall_time_seconds", s.wall_time_seconds}};
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace bayesrank
