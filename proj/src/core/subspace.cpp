#include "core/subspace.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <string>

#include "core/prox.hpp"

namespace lrbsl {

namespace {

double nuclear_norm(const Eigen::MatrixXd& m) {
  return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues().sum();
}

void check_finite_iterate(const Eigen::MatrixXd& m, const char* solver, int iteration) {
  if (!m.allFinite())
    throw NumericError(std::string(solver) + ": diverged, non-finite iterate at iteration " +
                       std::to_string(iteration));
}

}  // namespace

Eigen::MatrixXd JointDictionary::assembled() const {
  Eigen::MatrixXd b(background.rows(), background.cols() + 1);
  b.leftCols(background.cols()) = background;
  b.rightCols<1>() = target;
  return b;
}

void JointDictionary::validate(Eigen::Index bands) const {
  if (background.rows() != bands || target.size() != bands)
    throw ValidationError("joint dictionary: band count mismatch");
  if (background.cols() < 1) throw ValidationError("joint dictionary: empty background");
  if (!background.allFinite() || !target.allFinite())
    throw ValidationError("joint dictionary: non-finite entries");
  if (target.cwiseAbs().maxCoeff() == 0.0)
    throw ValidationError("joint dictionary: target spectrum is all-zero");
}

CodingResult sparse_code(const Eigen::MatrixXd& x, const JointDictionary& dict,
                         double lambda1, const AdmmConfig& cfg) {
  cfg.validate();
  dict.validate(x.rows());
  if (!(lambda1 >= 0.0)) throw ValidationError("sparse_code: lambda1 must be nonnegative");

  const Eigen::MatrixXd b = dict.assembled();
  const Eigen::Index m = b.cols();
  const Eigen::Index n = x.cols();

  Eigen::MatrixXd btb = b.transpose() * b;
  btb = ((btb + btb.transpose()) * 0.5).eval();
  const Eigen::MatrixXd btx = b.transpose() * x;

  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(m, n);
  Eigen::MatrixXd z = s;
  Eigen::MatrixXd g = s;

  double mu = cfg.mu0;
  double residual = 0.0;
  int k = 0;
  do {
    z = soft_threshold(s + g / mu, lambda1 / mu);
    Eigen::MatrixXd gram = btb;
    gram.diagonal().array() += mu;
    s = spd_solve(gram, btx + mu * z - g, SolveSide::Left, "B^T B + mu1 I");
    g += mu * (s - z);
    residual = (s - z).norm();
    ++k;
    check_finite_iterate(s, "sparse_code", k);
    mu = std::min(cfg.mu_max, mu * cfg.gamma);
  } while (residual >= cfg.eps && k < cfg.k_max);

  CodingResult out;
  out.coefficients = std::move(s);
  out.diag.iterations = k;
  out.diag.final_residual = residual;
  out.diag.objective =
      0.5 * (x - b * out.coefficients).squaredNorm() + lambda1 * out.coefficients.lpNorm<1>();
  return out;
}

SubspaceResult learn_background(const Eigen::MatrixXd& x, const Eigen::VectorXd& t,
                                const Eigen::MatrixXd& s1, const Eigen::RowVectorXd& s2,
                                double lambda2, const AdmmConfig& cfg,
                                const Eigen::MatrixXd* initial_basis) {
  cfg.validate();
  if (!(lambda2 >= 0.0)) throw ValidationError("learn_background: lambda2 must be nonnegative");
  if (t.size() != x.rows()) throw ValidationError("learn_background: target length mismatch");
  if (s1.cols() != x.cols() || s2.cols() != x.cols())
    throw ValidationError("learn_background: coefficient columns do not match pixel count");

  const Eigen::Index bands = x.rows();
  const Eigen::Index k_dim = s1.rows();

  const Eigen::MatrixXd background_part = x - t * s2;   // L x N
  const Eigen::MatrixXd rhs_fit = background_part * s1.transpose();  // L x K
  Eigen::MatrixXd s1_gram = s1 * s1.transpose();
  s1_gram = ((s1_gram + s1_gram.transpose()) * 0.5).eval();

  Eigen::MatrixXd a = initial_basis ? *initial_basis : Eigen::MatrixXd::Zero(bands, k_dim);
  if (initial_basis && (a.rows() != bands || a.cols() != k_dim))
    throw ValidationError("learn_background: warm-start basis dimensions mismatch");
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(bands, k_dim);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(bands, k_dim);

  double mu = cfg.mu0;
  double residual = 0.0;
  int k = 0;
  do {
    d = svt(a + g / mu, lambda2 / mu);
    Eigen::MatrixXd gram = s1_gram;
    gram.diagonal().array() += mu;
    a = spd_solve(gram, rhs_fit + mu * d - g, SolveSide::Right, "S1 S1^T + mu2 I");
    g += mu * (a - d);
    residual = (a - d).norm();
    ++k;
    check_finite_iterate(a, "learn_background", k);
    mu = std::min(cfg.mu_max, mu * cfg.gamma);
  } while (residual >= cfg.eps && k < cfg.k_max);

  SubspaceResult out;
  out.basis = std::move(a);
  out.diag.iterations = k;
  out.diag.final_residual = residual;
  out.diag.objective =
      0.5 * (x - out.basis * s1 - t * s2).squaredNorm() + lambda2 * nuclear_norm(out.basis);
  return out;
}

LrbslResult run_lrbsl(const Eigen::MatrixXd& x, const Eigen::VectorXd& t, int k,
                      double lambda1, double lambda2, const AdmmConfig& cfg, bool warm_start) {
  const SvdTriple seed = truncated_svd(x, k);
  const JointDictionary dict{seed.left, t};

  CodingResult code = sparse_code(x, dict, lambda1, cfg);
  const Eigen::MatrixXd s1 = code.coefficients.topRows(k);
  const Eigen::RowVectorXd s2 = code.coefficients.row(k);

  SubspaceResult sub =
      learn_background(x, t, s1, s2, lambda2, cfg, warm_start ? &seed.left : nullptr);

  LrbslResult out;
  out.basis = std::move(sub.basis);
  out.coding = code.diag;
  out.subspace = sub.diag;
  return out;
}

}  // namespace lrbsl
