#include "core/prox.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>
#include <cmath>

namespace lrbsl {

Eigen::MatrixXd soft_threshold(const Eigen::MatrixXd& m, double tau) {
  if (!(tau >= 0.0)) throw ValidationError("soft_threshold: tau must be nonnegative");
  return m.unaryExpr([tau](double v) {
    const double shrunk = std::abs(v) - tau;
    return shrunk > 0.0 ? (v > 0.0 ? shrunk : -shrunk) : 0.0;
  });
}

Eigen::MatrixXd svt(const Eigen::MatrixXd& m, double tau) {
  if (!(tau >= 0.0)) throw ValidationError("svt: tau must be nonnegative");
  if (!m.allFinite()) throw NumericError("svt: non-finite input matrix");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd s = svd.singularValues();
  for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = std::max(s(i) - tau, 0.0);
  return svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
}

SvdTriple truncated_svd(const Eigen::MatrixXd& x, int k) {
  const auto min_dim = std::min(x.rows(), x.cols());
  if (k < 1 || k > min_dim)
    throw ValidationError("truncated_svd: K must be in [1, min(rows, cols)], got " + std::to_string(k));
  if (!x.allFinite()) throw NumericError("truncated_svd: non-finite input matrix");

  Eigen::BDCSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);

  SvdTriple t;
  t.left = svd.matrixU().leftCols(k);
  t.singular = svd.singularValues().head(k);
  t.right = svd.matrixV().leftCols(k);

  // Sign convention: largest-magnitude entry of each left vector is positive.
  for (int j = 0; j < k; ++j) {
    Eigen::Index imax = 0;
    t.left.col(j).cwiseAbs().maxCoeff(&imax);
    if (t.left(imax, j) < 0.0) {
      t.left.col(j) = -t.left.col(j);
      t.right.col(j) = -t.right.col(j);
    }
  }
  return t;
}

Eigen::MatrixXd spd_solve(const Eigen::MatrixXd& gram, const Eigen::MatrixXd& rhs,
                          SolveSide side, const std::string& context) {
  if (gram.rows() != gram.cols())
    throw ValidationError("spd_solve: " + context + " is not square");
  const Eigen::Index conforming = side == SolveSide::Left ? rhs.rows() : rhs.cols();
  if (conforming != gram.rows())
    throw ValidationError("spd_solve: rhs does not conform with " + context);

  const double scale = std::max(1.0, gram.cwiseAbs().maxCoeff());
  if ((gram - gram.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw ValidationError("spd_solve: " + context + " is not symmetric");

  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success)
    throw NumericError("spd_solve: " + context + " is not positive definite");

  if (side == SolveSide::Left) {
    Eigen::MatrixXd y = llt.solve(rhs);
    y += llt.solve(rhs - gram * y);  // one refinement step
    return y;
  }
  Eigen::MatrixXd rhs_t = rhs.transpose();
  Eigen::MatrixXd y = llt.solve(rhs_t);
  y += llt.solve(rhs_t - gram * y);
  return y.transpose();
}

double graph_trace(const Eigen::MatrixXd& s, const Eigen::MatrixXd& laplacian) {
  if (laplacian.rows() != laplacian.cols())
    throw ValidationError("graph_trace: Laplacian is not square");
  if (s.cols() != laplacian.rows())
    throw ValidationError("graph_trace: coefficient columns do not match Laplacian size");
  const double v = (s * laplacian).cwiseProduct(s).sum();
  return v > 0.0 ? v : 0.0;  // PSD quadratic form, clamp roundoff
}

}  // namespace lrbsl
