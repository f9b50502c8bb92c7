#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <variant>

#include "json.hpp"

#include "bayesrank/bounds.hpp"
#include "bayesrank/gibbs.hpp"
#include "bayesrank/matdata.hpp"
#include "bayesrank/priors.hpp"

namespace bayesrank {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// Row-major nested arrays.
Json matrix_to_json(const Matrix& a);
Matrix matrix_from_json(const Json& j, const std::string& what);
Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j, const std::string& what);

Json dims_to_json(const Dims& d);
Dims dims_from_json(const Json& j);

Json noise_to_json(const NoiseSpec& noise);
NoiseSpec noise_from_json(const Json& j);

/// Values needed to resolve the "theorem" sentinels of prior and lambda.
struct TheoremContext {
  double s2;
  Dims dims;
};

Json prior_to_json(const PriorSpec& prior);
// `b: "theorem"` requires a context; anything else is parsed literally.
PriorSpec prior_from_json(const Json& j, const std::optional<TheoremContext>& ctx);

/// lambda as a number, "theorem" (1 / (4 s2)) or "bayes" (1 / (2 sigma2),
/// Gaussian noise only).
double resolve_lambda(const Json& j, const NoiseSpec& noise);

using Instance = std::variant<RegressionInstance, CompletionInstance>;

Json instance_to_json(const RegressionInstance& inst);
Json instance_to_json(const CompletionInstance& inst);
Instance instance_from_json(const Json& j);

Json bound_to_json(const BoundBreakdown& b);

Json summary_to_json(const PosteriorSummary& s);

Json read_json_file(const std::filesystem::path& path);
// Writes through a temporary file and a rename.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace bayesrank
