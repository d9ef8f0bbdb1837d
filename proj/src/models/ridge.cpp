#include <Eigen/Dense>

#include <cmath>

#include "momentrec/core/error.hpp"
#include "momentrec/models/regressor.hpp"
#include "momentrec/simd/kernels.hpp"

namespace momentrec::models {

TrainedRegressor train_ridge(const Matrix& x, std::span<const double> y, double lambda, Feature target) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  if (n == 0 || n != y.size()) throw ValidationError("ridge needs |X| == |y| >= 1");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ValidationError("ridge lambda must be finite and >= 0");
  for (double v : x.data()) {
    if (!std::isfinite(v)) throw ValidationError("ridge input contains a non-finite value");
  }

  const double inv_n = 1.0 / static_cast<double>(n);
  const double y_mean = simd::sum(y) * inv_n;
  std::vector<double> x_mean(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) simd::axpy(inv_n, x.row(i), x_mean);

  // Gram and cross terms from the non-zeros of each row (tag rows are
  // sparse), then centered: Xc'Xc = X'X - n * mu mu'.
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
  std::vector<std::size_t> nz;
  nz.reserve(d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = x.row(i);
    nz.clear();
    for (std::size_t j = 0; j < d; ++j) {
      if (row[j] != 0.0) nz.push_back(j);
    }
    const double yc = y[i] - y_mean;
    for (std::size_t a = 0; a < nz.size(); ++a) {
      const auto ja = static_cast<Eigen::Index>(nz[a]);
      const double va = row[nz[a]];
      rhs(ja) += va * yc;
      for (std::size_t b = a; b < nz.size(); ++b) gram(ja, static_cast<Eigen::Index>(nz[b])) += va * row[nz[b]];
    }
  }
  const double nn = static_cast<double>(n);
  for (Eigen::Index a = 0; a < static_cast<Eigen::Index>(d); ++a) {
    for (Eigen::Index b = a; b < static_cast<Eigen::Index>(d); ++b) {
      const double v = gram(a, b) - nn * x_mean[static_cast<std::size_t>(a)] * x_mean[static_cast<std::size_t>(b)];
      gram(a, b) = v;
      gram(b, a) = v;
    }
    gram(a, a) += lambda;
  }

  Eigen::VectorXd w;
  bool solved = false;
  if (lambda > 0.0) {
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() == Eigen::Success) {
      w = llt.solve(rhs);
      solved = w.allFinite();
    }
  }
  if (!solved) w = gram.completeOrthogonalDecomposition().solve(rhs);

  RidgeParams p;
  p.lambda = lambda;
  p.weights.assign(w.data(), w.data() + w.size());
  p.intercept = y_mean - simd::dot(x_mean, p.weights);

  TrainedRegressor m;
  m.kind = ModelKind::ridge;
  m.target = target;
  m.input_size = d;
  m.params = std::move(p);
  m.train_rmse = evaluate_rmse(m, x, y);
  return m;
}

}  // namespace momentrec::models
