#include <algorithm>
#include <cmath>
#include <cstdint>

#include "momentrec/core/error.hpp"
#include "momentrec/models/regressor.hpp"
#include "momentrec/simd/kernels.hpp"

namespace momentrec::models {
namespace {

constexpr double kMinGain = 1e-12;

// Candidate thresholds for one column plus the column stored sparsely:
// only rows whose bin differs from the bin of 0.0 are listed.
struct BinnedColumn {
  std::vector<double> cuts;  // ascending; bin(x) = #cuts <= x
  std::uint8_t zero_bin = 0;
  std::vector<std::uint32_t> rows;
  std::vector<std::uint8_t> bins;
  std::size_t offset = 0;  // into the flat histogram

  std::size_t bin_count() const { return cuts.size() + 1; }
  std::uint8_t bin_of(double v) const {
    return static_cast<std::uint8_t>(std::upper_bound(cuts.begin(), cuts.end(), v) - cuts.begin());
  }
};

// Cuts sit halfway between adjacent distinct observed values. With more
// distinct values than bins, the split points are taken at evenly spaced
// quantiles of the distinct values.
std::vector<double> make_cuts(std::vector<double> values, int max_bins) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  const std::size_t distinct = values.size();
  std::vector<double> cuts;
  if (distinct < 2) return cuts;
  const auto bins = static_cast<std::size_t>(max_bins);
  if (distinct <= bins) {
    for (std::size_t j = 1; j < distinct; ++j) cuts.push_back(0.5 * (values[j - 1] + values[j]));
    return cuts;
  }
  for (std::size_t i = 1; i < bins; ++i) {
    const std::size_t j = i * distinct / bins;
    const double c = 0.5 * (values[j - 1] + values[j]);
    if (cuts.empty() || c > cuts.back()) cuts.push_back(c);
  }
  return cuts;
}

std::vector<BinnedColumn> bin_columns(const Matrix& x, int max_bins) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  std::vector<std::vector<std::uint32_t>> nz_rows(d);
  std::vector<std::vector<double>> nz_vals(d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = x.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      if (row[j] != 0.0) {
        nz_rows[j].push_back(static_cast<std::uint32_t>(i));
        nz_vals[j].push_back(row[j]);
      }
    }
  }
  std::vector<BinnedColumn> cols(d);
  std::size_t offset = 0;
  for (std::size_t j = 0; j < d; ++j) {
    BinnedColumn& c = cols[j];
    std::vector<double> values = nz_vals[j];
    if (nz_rows[j].size() < n) values.push_back(0.0);
    c.cuts = make_cuts(std::move(values), max_bins);
    c.zero_bin = c.bin_of(0.0);
    for (std::size_t k = 0; k < nz_rows[j].size(); ++k) {
      const std::uint8_t b = c.bin_of(nz_vals[j][k]);
      if (b == c.zero_bin) continue;
      c.rows.push_back(nz_rows[j][k]);
      c.bins.push_back(b);
    }
    c.offset = offset;
    offset += c.bin_count();
  }
  return cols;
}

struct Bucket {
  double sum = 0.0;
  std::size_t count = 0;
};

struct SplitChoice {
  bool found = false;
  double gain = 0.0;
  std::size_t feature = 0;
  std::size_t cut = 0;
  Bucket left;
  Bucket right;
};

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, const std::vector<BinnedColumn>& cols, std::size_t total_bins, const GbtOptions& opt)
      : x_(x), cols_(cols), total_bins_(total_bins), opt_(opt), node_of_row_(x.rows()) {}

  // Fits one tree to `residual`; returns node index per row through leaf_of_row().
  RegressionTree fit(std::span<const double> residual) {
    const std::size_t n = residual.size();
    std::fill(node_of_row_.begin(), node_of_row_.end(), 0);
    std::vector<TreeNode> nodes(1);
    std::vector<Bucket> stats(1);
    stats[0].sum = simd::sum(residual);
    stats[0].count = n;

    std::vector<int> frontier{0};
    for (int depth = 0; depth < opt_.max_depth && !frontier.empty(); ++depth) {
      std::vector<int> slot_of_node(nodes.size(), -1);
      std::vector<int> splittable;
      for (int node : frontier) {
        if (stats[static_cast<std::size_t>(node)].count >= 2 * static_cast<std::size_t>(opt_.min_samples_leaf)) {
          slot_of_node[static_cast<std::size_t>(node)] = static_cast<int>(splittable.size());
          splittable.push_back(node);
        }
      }
      if (splittable.empty()) break;

      hist_.assign(splittable.size() * total_bins_, Bucket{});
      for (std::size_t f = 0; f < cols_.size(); ++f) {
        const BinnedColumn& c = cols_[f];
        for (std::size_t k = 0; k < c.rows.size(); ++k) {
          const std::uint32_t r = c.rows[k];
          const int slot = slot_of_node[static_cast<std::size_t>(node_of_row_[r])];
          if (slot < 0) continue;
          Bucket& b = hist_[static_cast<std::size_t>(slot) * total_bins_ + c.offset + c.bins[k]];
          b.sum += residual[r];
          ++b.count;
        }
      }

      std::vector<int> next;
      for (std::size_t s = 0; s < splittable.size(); ++s) {
        const int node = splittable[s];
        const SplitChoice choice = best_split(s, stats[static_cast<std::size_t>(node)]);
        if (!choice.found) continue;
        const BinnedColumn& c = cols_[choice.feature];
        const int left = static_cast<int>(nodes.size());
        const int right = left + 1;
        nodes.push_back(TreeNode{});
        nodes.push_back(TreeNode{});
        stats.push_back(choice.left);
        stats.push_back(choice.right);
        TreeNode& parent = nodes[static_cast<std::size_t>(node)];
        parent.feature = static_cast<int>(choice.feature);
        parent.threshold = c.cuts[choice.cut];
        parent.left = left;
        parent.right = right;
        next.push_back(left);
        next.push_back(right);
        pending_.push_back({node, choice.feature, parent.threshold, left, right});
      }
      route_rows();
      frontier = std::move(next);
    }

    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (nodes[i].is_leaf() && stats[i].count > 0) nodes[i].value = stats[i].sum / static_cast<double>(stats[i].count);
    }
    return RegressionTree(std::move(nodes));
  }

  std::span<const int> leaf_of_row() const { return node_of_row_; }

 private:
  struct PendingSplit {
    int node;
    std::size_t feature;
    double threshold;
    int left;
    int right;
  };

  SplitChoice best_split(std::size_t slot, const Bucket& total) const {
    SplitChoice best;
    const double parent_score = total.sum * total.sum / static_cast<double>(total.count);
    const auto min_leaf = static_cast<std::size_t>(opt_.min_samples_leaf);
    for (std::size_t f = 0; f < cols_.size(); ++f) {
      const BinnedColumn& c = cols_[f];
      if (c.cuts.empty()) continue;
      const Bucket* h = &hist_[slot * total_bins_ + c.offset];
      // The zero bin was never accumulated: it holds whatever the others do not.
      Bucket zero{total.sum, total.count};
      for (std::size_t b = 0; b < c.bin_count(); ++b) {
        if (b == c.zero_bin) continue;
        zero.sum -= h[b].sum;
        zero.count -= h[b].count;
      }
      Bucket left;
      for (std::size_t cut = 0; cut < c.cuts.size(); ++cut) {
        const Bucket& bin = cut == c.zero_bin ? zero : h[cut];
        left.sum += bin.sum;
        left.count += bin.count;
        const std::size_t right_count = total.count - left.count;
        if (left.count < min_leaf || right_count < min_leaf) continue;
        const double right_sum = total.sum - left.sum;
        const double gain = left.sum * left.sum / static_cast<double>(left.count) +
                            right_sum * right_sum / static_cast<double>(right_count) - parent_score;
        if (gain > kMinGain && (!best.found || gain > best.gain)) {
          best = SplitChoice{true, gain, f, cut, left, Bucket{right_sum, right_count}};
        }
      }
    }
    return best;
  }

  void route_rows() {
    if (pending_.empty()) return;
    std::vector<const PendingSplit*> by_node(static_cast<std::size_t>(pending_.back().right) + 1, nullptr);
    for (const PendingSplit& p : pending_) by_node[static_cast<std::size_t>(p.node)] = &p;
    for (std::size_t r = 0; r < node_of_row_.size(); ++r) {
      const auto node = static_cast<std::size_t>(node_of_row_[r]);
      if (node >= by_node.size() || by_node[node] == nullptr) continue;
      const PendingSplit& p = *by_node[node];
      node_of_row_[r] = x_(r, p.feature) < p.threshold ? p.left : p.right;
    }
    pending_.clear();
  }

  const Matrix& x_;
  const std::vector<BinnedColumn>& cols_;
  std::size_t total_bins_;
  const GbtOptions& opt_;
  std::vector<int> node_of_row_;
  std::vector<Bucket> hist_;
  std::vector<PendingSplit> pending_;
};

}  // namespace

TrainedRegressor train_gbt(const Matrix& x, std::span<const double> y, const GbtOptions& opt, std::uint64_t seed,
                           Feature target) {
  const std::size_t n = x.rows();
  if (n == 0 || n != y.size()) throw ValidationError("gbt needs |X| == |y| >= 1");
  if (opt.rounds < 1 || opt.max_depth < 1 || !(opt.learning_rate > 0.0 && opt.learning_rate <= 1.0)) {
    throw ValidationError("gbt needs rounds >= 1, depth >= 1 and 0 < learning_rate <= 1");
  }
  if (opt.max_bins < 2 || opt.max_bins > 256 || opt.min_samples_leaf < 1) {
    throw ValidationError("gbt needs 2 <= max_bins <= 256 and min_samples_leaf >= 1");
  }
  if (n > UINT32_MAX) throw ValidationError("gbt supports at most 2^32 rows");

  const std::vector<BinnedColumn> cols = bin_columns(x, opt.max_bins);
  std::size_t total_bins = 0;
  for (const BinnedColumn& c : cols) total_bins += c.bin_count();

  GbtParams p;
  p.learning_rate = opt.learning_rate;
  p.max_depth = opt.max_depth;
  p.init = simd::sum(y) / static_cast<double>(n);

  std::vector<double> fitted(n, p.init);
  std::vector<double> residual(n);
  const auto current_rmse = [&] { return rmse(fitted, y); };
  p.train_rmse_history.push_back(current_rmse());

  TreeBuilder builder(x, cols, total_bins, opt);
  std::vector<double> step(n);
  for (int round = 0; round < opt.rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) residual[i] = y[i] - fitted[i];
    RegressionTree tree = builder.fit(residual);
    if (tree.nodes().size() == 1) break;  // nothing left to explain
    const auto leaf = builder.leaf_of_row();
    for (std::size_t i = 0; i < n; ++i) step[i] = tree.nodes()[static_cast<std::size_t>(leaf[i])].value;
    simd::axpy(p.learning_rate, step, fitted);
    p.trees.push_back(std::move(tree));
    p.train_rmse_history.push_back(current_rmse());
  }

  TrainedRegressor m;
  m.kind = ModelKind::gbt;
  m.target = target;
  m.seed = seed;
  m.input_size = x.cols();
  m.params = std::move(p);
  m.train_rmse = evaluate_rmse(m, x, y);
  return m;
}

}  // namespace momentrec::models
