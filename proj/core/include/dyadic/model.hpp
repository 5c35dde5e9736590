#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dyadic/forest.hpp"
#include "dyadic/matrix.hpp"
#include "dyadic/standardizer.hpp"
#include "dyadic/svm.hpp"

namespace dyadic {

enum class ModelFamily { LinearSvm, RbfSvm, RandomForest };

inline constexpr std::array<ModelFamily, 3> kModelFamilies = {
    ModelFamily::LinearSvm, ModelFamily::RbfSvm, ModelFamily::RandomForest};

std::string_view family_token(ModelFamily family) noexcept;  // "linear_svm", ...
std::optional<ModelFamily> parse_family(std::string_view token) noexcept;

// One grid point. Only the fields of the owning family are meaningful.
struct Hyperparams {
  double c = 1.0;            // SVM families
  double gamma_scale = 1.0;  // RBF: gamma = gamma_scale / (d * var(X_train))
  std::size_t n_trees = 100;
  std::optional<std::size_t> max_depth;
  std::optional<std::size_t> features_per_split;  // ceil(sqrt(d)) when empty

  friend bool operator==(const Hyperparams&, const Hyperparams&) = default;
};

// Compact human-readable form, e.g. "C=10" or "C=1,g=0.1" or "trees=100,depth=8".
std::string describe(ModelFamily family, const Hyperparams& hp);

// gamma = scale / (d * var(all entries of x)); falls back to var = 1 when x has no spread.
double resolve_gamma(const Matrix& standardized, double gamma_scale);

// The d * var(...) denominator above, for callers resolving many scales.
double gamma_denominator(const Matrix& standardized);

struct TrainedModel {
  ModelFamily family = ModelFamily::LinearSvm;
  Hyperparams hyperparams;
  Standardizer standardizer;
  std::variant<SvmModel, ForestModel> parameters;

  std::size_t dim() const noexcept { return standardizer.dim(); }
};

struct FitOptions {
  SvmOptions svm;
  std::uint64_t seed = 0;  // forest randomness
};

// Learns the standardizer on `x`, computes balanced class weights from `y`,
// and trains the requested family on the standardized data.
TrainedModel fit_model(ModelFamily family, const Hyperparams& hp, const Matrix& x,
                       std::span<const int> y, const FitOptions& options = {});

// Raw (unstandardized) rows in, 0/1 labels out. Throws DimensionMismatch.
std::vector<int> predict(const TrainedModel& model, const Matrix& x);
int predict_row(const TrainedModel& model, std::span<const double> x);

// Self-describing JSON document (family, hyperparameters, coefficients,
// standardizer). from_json(to_json(m)) predicts identically to m.
nlohmann::json to_json(const TrainedModel& model);
TrainedModel model_from_json(const nlohmann::json& doc);

nlohmann::json hyperparams_to_json(ModelFamily family, const Hyperparams& hp);
Hyperparams hyperparams_from_json(ModelFamily family, const nlohmann::json& doc);

}  // namespace dyadic
