#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "momentrec/core/audio_features.hpp"
#include "momentrec/core/matrix.hpp"

namespace momentrec::models {

enum class ModelKind { baseline, ridge, gbt };

std::string_view to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view s);

struct BaselineParams {
  double mean = 0.0;
  double stddev = 0.0;
};

struct RidgeParams {
  std::vector<double> weights;
  double intercept = 0.0;
  double lambda = 1.0;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf output (before learning-rate scaling)

  bool is_leaf() const { return feature < 0; }
};

// Binary tree over dense inputs: x[feature] < threshold goes left.
class RegressionTree {
 public:
  RegressionTree() = default;
  explicit RegressionTree(std::vector<TreeNode> nodes);

  double predict(std::span<const double> x) const;
  int depth() const;
  std::size_t leaf_count() const;
  const std::vector<TreeNode>& nodes() const { return nodes_; }

 private:
  std::vector<TreeNode> nodes_;
};

struct GbtParams {
  double init = 0.0;
  double learning_rate = 0.1;
  int max_depth = 4;
  std::vector<RegressionTree> trees;
  // Unclamped train RMSE after init (entry 0) and after each added tree.
  std::vector<double> train_rmse_history;
};

using ModelParams = std::variant<BaselineParams, RidgeParams, GbtParams>;

// A fitted single-target model. Predictions are clamped to the target's
// valid range. The baseline draws from N(mean, stddev) with a generator
// seeded from `seed`, so a batch prediction is a pure function of the batch
// size and the seed.
struct TrainedRegressor {
  ModelKind kind = ModelKind::baseline;
  Feature target = Feature::danceability;
  std::uint64_t seed = 0;
  double train_rmse = 0.0;
  std::vector<std::string> vocabulary;  // input column names; empty = unchecked
  std::size_t input_size = 0;
  ModelParams params;

  double predict(std::span<const double> x) const;
  std::vector<double> predict_batch(const Matrix& x) const;
};

struct GbtOptions {
  int rounds = 200;
  int max_depth = 4;
  double learning_rate = 0.1;
  int max_bins = 32;
  int min_samples_leaf = 1;
};

inline constexpr double kDefaultRidgeLambda = 1.0;

// Throws ValidationError when fewer than two targets are given.
TrainedRegressor train_baseline(std::span<const double> y, std::uint64_t seed,
                                Feature target = Feature::danceability);

// Closed-form L2-regularized least squares with an unpenalized intercept.
// lambda == 0 uses the minimum-norm solution.
TrainedRegressor train_ridge(const Matrix& x, std::span<const double> y, double lambda = kDefaultRidgeLambda,
                             Feature target = Feature::danceability);

// Least-squares gradient boosting of depth-limited regression trees.
TrainedRegressor train_gbt(const Matrix& x, std::span<const double> y, const GbtOptions& options = {},
                           std::uint64_t seed = 0, Feature target = Feature::danceability);

double rmse(std::span<const double> predictions, std::span<const double> targets);
double evaluate_rmse(const TrainedRegressor& model, const Matrix& x, std::span<const double> y);

inline constexpr const char* kModelFormat = "momentrec-model";
inline constexpr int kModelFormatVersion = 1;

void save_model(const TrainedRegressor& model, const std::filesystem::path& path);
// Throws FormatError on a foreign file, version mismatch, or a kind other than `expected`.
TrainedRegressor load_model(const std::filesystem::path& path, std::optional<ModelKind> expected = std::nullopt);

}  // namespace momentrec::models
