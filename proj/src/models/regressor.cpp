#include "momentrec/models/regressor.hpp"

#include <cmath>
#include <random>

#include "momentrec/core/error.hpp"
#include "momentrec/simd/kernels.hpp"

namespace momentrec::models {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::baseline: return "baseline";
    case ModelKind::ridge: return "ridge";
    case ModelKind::gbt: return "gbt";
  }
  return "unknown";
}

ModelKind model_kind_from_string(std::string_view s) {
  if (s == "baseline") return ModelKind::baseline;
  if (s == "ridge") return ModelKind::ridge;
  if (s == "gbt") return ModelKind::gbt;
  throw ValidationError("unknown model kind: " + std::string(s));
}

RegressionTree::RegressionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw ValidationError("regression tree needs at least one node");
  for (const TreeNode& n : nodes_) {
    if (n.is_leaf()) continue;
    const auto size = static_cast<int>(nodes_.size());
    if (n.left <= 0 || n.right <= 0 || n.left >= size || n.right >= size) {
      throw ValidationError("regression tree child index out of range");
    }
  }
}

double RegressionTree::predict(std::span<const double> x) const {
  std::size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const TreeNode& n = nodes_[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] < n.threshold ? n.left : n.right);
  }
  return nodes_[i].value;
}

int RegressionTree::depth() const {
  // Children always come after their parent.
  std::vector<int> d(nodes_.size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    best = std::max(best, d[i]);
    if (!nodes_[i].is_leaf()) {
      d[static_cast<std::size_t>(nodes_[i].left)] = d[i] + 1;
      d[static_cast<std::size_t>(nodes_[i].right)] = d[i] + 1;
    }
  }
  return best;
}

std::size_t RegressionTree::leaf_count() const {
  std::size_t n = 0;
  for (const TreeNode& node : nodes_) n += node.is_leaf() ? 1 : 0;
  return n;
}

namespace {

struct RawPredictor {
  std::span<const double> x;

  double operator()(const BaselineParams&) const { return 0.0; }  // handled by caller
  double operator()(const RidgeParams& p) const { return p.intercept + simd::dot(p.weights, x); }
  double operator()(const GbtParams& p) const {
    double acc = 0.0;
    for (const RegressionTree& t : p.trees) acc += t.predict(x);
    return p.init + p.learning_rate * acc;
  }
};

void check_input(const TrainedRegressor& m, std::size_t size) {
  if (m.input_size != 0 && size != m.input_size) {
    throw ValidationError("vocabulary mismatch: model expects " + std::to_string(m.input_size) +
                          " tag columns, got " + std::to_string(size));
  }
}

}  // namespace

double TrainedRegressor::predict(std::span<const double> x) const {
  check_input(*this, x.size());
  if (const auto* b = std::get_if<BaselineParams>(&params)) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(b->mean, b->stddev);
    return clamp_to_range(target, b->stddev > 0.0 ? dist(rng) : b->mean);
  }
  return clamp_to_range(target, std::visit(RawPredictor{x}, params));
}

std::vector<double> TrainedRegressor::predict_batch(const Matrix& x) const {
  check_input(*this, x.cols());
  std::vector<double> out(x.rows());
  if (const auto* b = std::get_if<BaselineParams>(&params)) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(b->mean, b->stddev);
    for (double& v : out) v = clamp_to_range(target, b->stddev > 0.0 ? dist(rng) : b->mean);
    return out;
  }
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = clamp_to_range(target, std::visit(RawPredictor{x.row(i)}, params));
  return out;
}

double rmse(std::span<const double> predictions, std::span<const double> targets) {
  if (predictions.size() != targets.size() || targets.empty()) {
    throw ValidationError("rmse needs equally sized, non-empty inputs");
  }
  return std::sqrt(simd::squared_error(predictions, targets) / static_cast<double>(targets.size()));
}

double evaluate_rmse(const TrainedRegressor& model, const Matrix& x, std::span<const double> y) {
  if (x.rows() != y.size() || y.empty()) throw ValidationError("evaluate_rmse needs |X| == |y| >= 1");
  return rmse(model.predict_batch(x), y);
}

TrainedRegressor train_baseline(std::span<const double> y, std::uint64_t seed, Feature target) {
  if (y.size() < 2) throw ValidationError("baseline needs at least two targets");
  const double n = static_cast<double>(y.size());
  const double mean = simd::sum(y) / n;
  double var = 0.0;
  for (double v : y) var += (v - mean) * (v - mean);
  var /= n;

  TrainedRegressor m;
  m.kind = ModelKind::baseline;
  m.target = target;
  m.seed = seed;
  m.params = BaselineParams{mean, std::sqrt(var)};
  Matrix probe(y.size(), 0);
  m.train_rmse = rmse(m.predict_batch(probe), y);
  return m;
}

}  // namespace momentrec::models
