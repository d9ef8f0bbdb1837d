#include <fstream>

#include <nlohmann/json.hpp>

#include "momentrec/core/error.hpp"
#include "momentrec/models/regressor.hpp"

namespace momentrec::models {
namespace {

using nlohmann::json;

json params_to_json(const ModelParams& params) {
  return std::visit(
      [](const auto& p) -> json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, BaselineParams>) {
          return json{{"mean", p.mean}, {"stddev", p.stddev}};
        } else if constexpr (std::is_same_v<T, RidgeParams>) {
          return json{{"weights", p.weights}, {"intercept", p.intercept}, {"lambda", p.lambda}};
        } else {
          json trees = json::array();
          for (const RegressionTree& t : p.trees) {
            json feature = json::array(), threshold = json::array(), left = json::array(), right = json::array(),
                 value = json::array();
            for (const TreeNode& n : t.nodes()) {
              feature.push_back(n.feature);
              threshold.push_back(n.threshold);
              left.push_back(n.left);
              right.push_back(n.right);
              value.push_back(n.value);
            }
            trees.push_back(json{{"feature", feature}, {"threshold", threshold}, {"left", left}, {"right", right},
                                 {"value", value}});
          }
          return json{{"init", p.init},
                      {"learning_rate", p.learning_rate},
                      {"max_depth", p.max_depth},
                      {"train_rmse_history", p.train_rmse_history},
                      {"trees", trees}};
        }
      },
      params);
}

ModelParams params_from_json(ModelKind kind, const json& j) {
  switch (kind) {
    case ModelKind::baseline:
      return BaselineParams{j.at("mean").get<double>(), j.at("stddev").get<double>()};
    case ModelKind::ridge:
      return RidgeParams{j.at("weights").get<std::vector<double>>(), j.at("intercept").get<double>(),
                         j.at("lambda").get<double>()};
    case ModelKind::gbt: {
      GbtParams p;
      p.init = j.at("init").get<double>();
      p.learning_rate = j.at("learning_rate").get<double>();
      p.max_depth = j.at("max_depth").get<int>();
      p.train_rmse_history = j.at("train_rmse_history").get<std::vector<double>>();
      for (const json& t : j.at("trees")) {
        const auto feature = t.at("feature").get<std::vector<int>>();
        const auto threshold = t.at("threshold").get<std::vector<double>>();
        const auto left = t.at("left").get<std::vector<int>>();
        const auto right = t.at("right").get<std::vector<int>>();
        const auto value = t.at("value").get<std::vector<double>>();
        const std::size_t size = feature.size();
        if (threshold.size() != size || left.size() != size || right.size() != size || value.size() != size) {
          throw FormatError("tree arrays have inconsistent lengths");
        }
        std::vector<TreeNode> nodes(size);
        for (std::size_t i = 0; i < size; ++i) nodes[i] = TreeNode{feature[i], threshold[i], left[i], right[i], value[i]};
        p.trees.emplace_back(std::move(nodes));
      }
      return p;
    }
  }
  throw FormatError("unknown model kind");
}

}  // namespace

void save_model(const TrainedRegressor& model, const std::filesystem::path& path) {
  json j{{"format", kModelFormat},
         {"version", kModelFormatVersion},
         {"kind", to_string(model.kind)},
         {"target", feature_name(model.target)},
         {"seed", model.seed},
         {"train_rmse", model.train_rmse},
         {"input_size", model.input_size},
         {"vocabulary", model.vocabulary},
         {"params", params_to_json(model.params)}};
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write model file " + path.string());
  out << j.dump() << '\n';
}

TrainedRegressor load_model(const std::filesystem::path& path, std::optional<ModelKind> expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open model file " + path.string());
  const json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object() || j.value("format", "") != kModelFormat) {
    throw FormatError(path.string() + " is not a model file");
  }
  if (j.value("version", -1) != kModelFormatVersion) {
    throw FormatError("model format version " + std::to_string(j.value("version", -1)) + " is not supported (expected " +
                      std::to_string(kModelFormatVersion) + ")");
  }
  try {
    TrainedRegressor m;
    m.kind = model_kind_from_string(j.at("kind").get<std::string>());
    if (expected && *expected != m.kind) {
      throw FormatError("model kind mismatch: file holds " + std::string(to_string(m.kind)) + ", expected " +
                        std::string(to_string(*expected)));
    }
    const auto target = feature_from_name(j.at("target").get<std::string>());
    if (!target) throw FormatError("unknown target feature in model file");
    m.target = *target;
    m.seed = j.at("seed").get<std::uint64_t>();
    m.train_rmse = j.at("train_rmse").get<double>();
    m.input_size = j.at("input_size").get<std::size_t>();
    m.vocabulary = j.at("vocabulary").get<std::vector<std::string>>();
    m.params = params_from_json(m.kind, j.at("params"));
    return m;
  } catch (const FormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw FormatError(std::string("malformed model file: ") + e.what());
  }
}

}  // namespace momentrec::models
