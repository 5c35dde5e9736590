#include "dyadic/model.hpp"

#include <cmath>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "dyadic/error.hpp"

namespace dyadic {

using nlohmann::json;

std::string_view family_token(ModelFamily family) noexcept {
  switch (family) {
    case ModelFamily::LinearSvm: return "linear_svm";
    case ModelFamily::RbfSvm: return "rbf_svm";
    case ModelFamily::RandomForest: return "random_forest";
  }
  return "linear_svm";
}

std::optional<ModelFamily> parse_family(std::string_view token) noexcept {
  for (ModelFamily f : kModelFamilies) {
    if (family_token(f) == token) return f;
  }
  return std::nullopt;
}

std::string describe(ModelFamily family, const Hyperparams& hp) {
  switch (family) {
    case ModelFamily::LinearSvm: return fmt::format("C={:g}", hp.c);
    case ModelFamily::RbfSvm: return fmt::format("C={:g},g={:g}", hp.c, hp.gamma_scale);
    case ModelFamily::RandomForest: {
      std::string s = fmt::format("trees={},depth=", hp.n_trees);
      s += hp.max_depth ? std::to_string(*hp.max_depth) : "none";
      s += ",mtry=";
      s += hp.features_per_split ? std::to_string(*hp.features_per_split) : "sqrt";
      return s;
    }
  }
  return "";
}

double gamma_denominator(const Matrix& standardized) {
  const auto values = standardized.data();
  if (values.empty()) return 1.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size());
  if (!(var > 0.0)) var = 1.0;
  return static_cast<double>(standardized.cols()) * var;
}

double resolve_gamma(const Matrix& standardized, double gamma_scale) {
  return gamma_scale / gamma_denominator(standardized);
}

TrainedModel fit_model(ModelFamily family, const Hyperparams& hp, const Matrix& x,
                       std::span<const int> y, const FitOptions& options) {
  if (x.rows() != y.size()) {
    throw Error(ErrorCode::DimensionMismatch, "design matrix and labels disagree in length");
  }
  TrainedModel model;
  model.family = family;
  model.hyperparams = hp;
  model.standardizer = Standardizer::fit(x);
  const Matrix xs = model.standardizer.transform(x);
  const ClassWeights weights = compute_class_weights(y);

  switch (family) {
    case ModelFamily::LinearSvm:
      model.parameters = train_svm(xs, y, Kernel::linear(), hp.c, weights, options.svm);
      break;
    case ModelFamily::RbfSvm:
      model.parameters =
          train_svm(xs, y, Kernel::rbf(resolve_gamma(xs, hp.gamma_scale)), hp.c, weights, options.svm);
      break;
    case ModelFamily::RandomForest: {
      ForestParams fp;
      fp.n_trees = hp.n_trees;
      fp.max_depth = hp.max_depth;
      fp.features_per_split = hp.features_per_split;
      fp.seed = options.seed;
      model.parameters = train_forest(xs, y, weights, fp);
      break;
    }
  }
  return model;
}

int predict_row(const TrainedModel& model, std::span<const double> x) {
  std::vector<double> z(model.dim());
  model.standardizer.transform_row(x, z);
  return std::visit([&](const auto& m) { return predict(m, std::span<const double>(z)); },
                    model.parameters);
}

std::vector<int> predict(const TrainedModel& model, const Matrix& x) {
  if (x.cols() != model.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "model expects " + std::to_string(model.dim()) +
                                                  " features, got " + std::to_string(x.cols()));
  }
  std::vector<int> out;
  out.reserve(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out.push_back(predict_row(model, x.row(i)));
  return out;
}

// --- serialization --------------------------------------------------------

namespace {

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(rows)}};
}

Matrix matrix_from_json(const json& doc) {
  const auto rows = doc.at("rows").get<std::size_t>();
  const auto cols = doc.at("cols").get<std::size_t>();
  Matrix m(rows, cols);
  const json& data = doc.at("data");
  if (data.size() != rows) throw Error(ErrorCode::Schema, "matrix row count mismatch");
  for (std::size_t i = 0; i < rows; ++i) {
    const auto r = data[i].get<std::vector<double>>();
    if (r.size() != cols) throw Error(ErrorCode::Schema, "matrix column count mismatch");
    std::copy(r.begin(), r.end(), m.row(i).begin());
  }
  return m;
}

json weights_to_json(const ClassWeights& w) { return json{{"0", w.negative}, {"1", w.positive}}; }
ClassWeights weights_from_json(const json& doc) {
  return ClassWeights{doc.at("0").get<double>(), doc.at("1").get<double>()};
}

json optional_size(const std::optional<std::size_t>& v) { return v ? json(*v) : json(nullptr); }
std::optional<std::size_t> optional_size_from(const json& doc, const char* key) {
  if (!doc.contains(key) || doc.at(key).is_null()) return std::nullopt;
  return doc.at(key).get<std::size_t>();
}

}  // namespace

json hyperparams_to_json(ModelFamily family, const Hyperparams& hp) {
  switch (family) {
    case ModelFamily::LinearSvm: return json{{"C", hp.c}};
    case ModelFamily::RbfSvm: return json{{"C", hp.c}, {"gamma_scale", hp.gamma_scale}};
    case ModelFamily::RandomForest:
      return json{{"n_trees", hp.n_trees},
                  {"max_depth", optional_size(hp.max_depth)},
                  {"features_per_split", optional_size(hp.features_per_split)}};
  }
  return json::object();
}

Hyperparams hyperparams_from_json(ModelFamily family, const json& doc) {
  Hyperparams hp;
  switch (family) {
    case ModelFamily::LinearSvm:
      hp.c = doc.at("C").get<double>();
      break;
    case ModelFamily::RbfSvm:
      hp.c = doc.at("C").get<double>();
      hp.gamma_scale = doc.at("gamma_scale").get<double>();
      break;
    case ModelFamily::RandomForest:
      hp.n_trees = doc.at("n_trees").get<std::size_t>();
      hp.max_depth = optional_size_from(doc, "max_depth");
      hp.features_per_split = optional_size_from(doc, "features_per_split");
      break;
  }
  return hp;
}

json to_json(const TrainedModel& model) {
  json doc;
  doc["format"] = "dyadic-model";
  doc["version"] = 1;
  doc["family"] = family_token(model.family);
  doc["hyperparameters"] = hyperparams_to_json(model.family, model.hyperparams);
  doc["standardizer"] = json{{"mean", model.standardizer.mean}, {"scale", model.standardizer.scale}};

  if (const auto* svm = std::get_if<SvmModel>(&model.parameters)) {
    doc["svm"] = json{{"kernel", svm->kernel.type == KernelType::Linear ? "linear" : "rbf"},
                      {"gamma", svm->kernel.gamma},
                      {"C", svm->c},
                      {"class_weights", weights_to_json(svm->weights)},
                      {"bias", svm->bias},
                      {"coefficients", svm->coefficients},
                      {"support_vectors", matrix_to_json(svm->support_vectors)},
                      {"dual_objective", svm->objective},
                      {"kkt_gap", svm->kkt_gap},
                      {"iterations", svm->iterations}};
  } else {
    const auto& forest = std::get<ForestModel>(model.parameters);
    json trees = json::array();
    for (const DecisionTree& tree : forest.trees) {
      json nodes = json::array();
      for (const TreeNode& n : tree.nodes) {
        nodes.push_back(json::array({n.feature, n.threshold, n.left, n.right, n.mass[0], n.mass[1], n.vote}));
      }
      trees.push_back(std::move(nodes));
    }
    doc["forest"] = json{{"n_trees", forest.params.n_trees},
                         {"max_depth", optional_size(forest.params.max_depth)},
                         {"features_per_split", forest.features_per_split},
                         {"seed", forest.params.seed},
                         {"bootstrap", forest.params.bootstrap},
                         {"n_features", forest.n_features},
                         {"tie_class", forest.tie_class},
                         {"class_weights", weights_to_json(forest.weights)},
                         {"node_layout", {"feature", "threshold", "left", "right", "mass0", "mass1", "vote"}},
                         {"trees", std::move(trees)}};
  }
  return doc;
}

TrainedModel model_from_json(const json& doc) {
  try {
    if (doc.at("format") != "dyadic-model") throw Error(ErrorCode::Schema, "not a dyadic model document");
    const auto family = parse_family(doc.at("family").get<std::string>());
    if (!family) throw Error(ErrorCode::Schema, "unknown model family");
    TrainedModel model;
    model.family = *family;
    model.hyperparams = hyperparams_from_json(*family, doc.at("hyperparameters"));
    model.standardizer.mean = doc.at("standardizer").at("mean").get<std::vector<double>>();
    model.standardizer.scale = doc.at("standardizer").at("scale").get<std::vector<double>>();

    if (*family == ModelFamily::RandomForest) {
      const json& f = doc.at("forest");
      ForestModel forest;
      forest.params.n_trees = f.at("n_trees").get<std::size_t>();
      forest.params.max_depth = optional_size_from(f, "max_depth");
      forest.params.features_per_split = f.at("features_per_split").get<std::size_t>();
      forest.params.seed = f.at("seed").get<std::uint64_t>();
      forest.params.bootstrap = f.at("bootstrap").get<bool>();
      forest.features_per_split = f.at("features_per_split").get<std::size_t>();
      forest.n_features = f.at("n_features").get<std::size_t>();
      forest.tie_class = f.at("tie_class").get<int>();
      forest.weights = weights_from_json(f.at("class_weights"));
      for (const json& t : f.at("trees")) {
        DecisionTree tree;
        for (const json& n : t) {
          TreeNode node;
          node.feature = n.at(0).get<int>();
          node.threshold = n.at(1).get<double>();
          node.left = n.at(2).get<int>();
          node.right = n.at(3).get<int>();
          node.mass[0] = n.at(4).get<double>();
          node.mass[1] = n.at(5).get<double>();
          node.vote = n.at(6).get<int>();
          tree.nodes.push_back(node);
        }
        forest.trees.push_back(std::move(tree));
      }
      model.parameters = std::move(forest);
    } else {
      const json& s = doc.at("svm");
      SvmModel svm;
      svm.kernel = s.at("kernel") == "linear" ? Kernel::linear() : Kernel::rbf(s.at("gamma").get<double>());
      svm.c = s.at("C").get<double>();
      svm.weights = weights_from_json(s.at("class_weights"));
      svm.bias = s.at("bias").get<double>();
      svm.coefficients = s.at("coefficients").get<std::vector<double>>();
      svm.support_vectors = matrix_from_json(s.at("support_vectors"));
      svm.objective = s.at("dual_objective").get<double>();
      svm.kkt_gap = s.at("kkt_gap").get<double>();
      svm.iterations = s.at("iterations").get<std::size_t>();
      model.parameters = std::move(svm);
    }
    return model;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Schema, std::string("malformed model document: ") + e.what());
  }
}

}  // namespace dyadic
