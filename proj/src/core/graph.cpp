#include "core/graph.hpp"

#include <cmath>
#include <string>

#include "core/prox.hpp"

namespace lrbsl {

namespace {

Eigen::MatrixXd gather_cols(const Eigen::MatrixXd& m, const std::vector<int>& idx) {
  Eigen::MatrixXd out(m.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = m.col(idx[j]);
  return out;
}

void scatter_cols(Eigen::MatrixXd& m, const std::vector<int>& idx, const Eigen::MatrixXd& block) {
  for (std::size_t j = 0; j < idx.size(); ++j) m.col(idx[j]) = block.col(static_cast<Eigen::Index>(j));
}

void check_partition(const RegionPartition& part, Eigen::Index n,
                     const std::vector<RegionGraph>* graphs) {
  if (graphs && graphs->size() != part.regions.size())
    throw ValidationError("lrb_glr: graph count does not match region count");
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::size_t total = 0;
  for (std::size_t l = 0; l < part.regions.size(); ++l) {
    const auto& region = part.regions[l];
    if (graphs && (*graphs)[l].laplacian.rows() != static_cast<Eigen::Index>(region.size()))
      throw ValidationError("lrb_glr: Laplacian size does not match region " + std::to_string(l));
    for (int i : region) {
      if (i < 0 || i >= n || seen[static_cast<std::size_t>(i)])
        throw ValidationError("lrb_glr: partition does not cover pixels exactly once");
      seen[static_cast<std::size_t>(i)] = 1;
    }
    total += region.size();
  }
  if (total != static_cast<std::size_t>(n))
    throw ValidationError("lrb_glr: partition does not cover all pixels");
}

}  // namespace

RegionPartition build_partition(int height, int width, int omega) {
  if (height < 1 || width < 1) throw ValidationError("build_partition: dimensions must be positive");
  if (omega < 1) throw ValidationError("build_partition: omega must be >= 1");

  RegionPartition part;
  part.height = height;
  part.width = width;
  part.omega = omega;

  const int cell_rows = (height + omega - 1) / omega;
  const int cell_cols = (width + omega - 1) / omega;
  part.regions.reserve(static_cast<std::size_t>(cell_rows) * cell_cols);

  for (int cr = 0; cr < cell_rows; ++cr) {
    const int r0 = cr * omega;
    const int r1 = std::min(r0 + omega, height);
    for (int cc = 0; cc < cell_cols; ++cc) {
      const int c0 = cc * omega;
      const int c1 = std::min(c0 + omega, width);
      std::vector<int> region;
      region.reserve(static_cast<std::size_t>(r1 - r0) * (c1 - c0));
      for (int r = r0; r < r1; ++r)
        for (int c = c0; c < c1; ++c) region.push_back(r * width + c);
      part.regions.push_back(std::move(region));
    }
  }
  return part;
}

std::vector<RegionGraph> build_graphs(const Eigen::MatrixXd& x, const RegionPartition& part,
                                      double sigma) {
  if (!(sigma > 0.0)) throw ValidationError("build_graphs: sigma must be positive");
  if (x.cols() != static_cast<Eigen::Index>(part.height) * part.width)
    throw ValidationError("build_graphs: pixel matrix does not match partition dimensions");
  check_partition(part, x.cols(), nullptr);

  std::vector<RegionGraph> graphs;
  graphs.reserve(part.regions.size());
  for (const auto& region : part.regions) {
    const Eigen::Index n = static_cast<Eigen::Index>(region.size());
    RegionGraph g;
    g.weights = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double d2 = (x.col(region[static_cast<std::size_t>(i)]) -
                           x.col(region[static_cast<std::size_t>(j)]))
                              .squaredNorm();
        if (d2 < sigma) {
          g.weights(i, j) = 1.0;
          g.weights(j, i) = 1.0;
        }
      }
    }
    g.laplacian = Eigen::MatrixXd(g.weights.rowwise().sum().asDiagonal());
    g.laplacian -= g.weights;
    graphs.push_back(std::move(g));
  }
  return graphs;
}

CodingResult run_lrb_glr(const Eigen::MatrixXd& x, const JointDictionary& dict,
                         const std::vector<RegionGraph>& graphs, const RegionPartition& part,
                         double lambda3, double lambda4, const AdmmConfig& cfg) {
  cfg.validate();
  dict.validate(x.rows());
  if (!(lambda3 >= 0.0) || !(lambda4 >= 0.0))
    throw ValidationError("lrb_glr: lambda3 and lambda4 must be nonnegative");
  if (x.cols() != static_cast<Eigen::Index>(part.height) * part.width)
    throw ValidationError("lrb_glr: pixel matrix does not match partition dimensions");
  check_partition(part, x.cols(), &graphs);

  const Eigen::MatrixXd b = dict.assembled();
  const Eigen::Index m = b.cols();
  const Eigen::Index n = x.cols();

  Eigen::MatrixXd btb = b.transpose() * b;
  btb = ((btb + btb.transpose()) * 0.5).eval();
  const Eigen::MatrixXd btx = b.transpose() * x;

  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(m, n);
  Eigen::MatrixXd v1 = s, v2 = s, h1 = s, h2 = s;

  double mu = cfg.mu0;
  double residual = 0.0;
  int k = 0;
  do {
    Eigen::MatrixXd gram = btb;
    gram.diagonal().array() += 2.0 * mu;
    s = spd_solve(gram, btx + mu * v1 - h1 + mu * v2 - h2, SolveSide::Left, "B^T B + 2 mu3 I");

    for (std::size_t l = 0; l < part.regions.size(); ++l) {
      const auto& region = part.regions[l];
      Eigen::MatrixXd rhs = mu * gather_cols(s, region) + gather_cols(h1, region);
      Eigen::MatrixXd gram_l = 2.0 * lambda3 * graphs[l].laplacian;
      gram_l.diagonal().array() += mu;
      scatter_cols(v1, region,
                   spd_solve(gram_l, rhs, SolveSide::Right, "2 lambda3 L_l + mu3 I"));
    }

    v2 = soft_threshold(s + h2 / mu, lambda4 / mu);
    h1 += mu * (s - v1);
    h2 += mu * (s - v2);
    residual = (s - v1).norm() + (s - v2).norm();
    ++k;
    if (!s.allFinite() || !v1.allFinite())
      throw NumericError("lrb_glr: diverged, non-finite iterate at iteration " + std::to_string(k));
    mu = std::min(cfg.mu_max, mu * cfg.gamma);
  } while (residual >= cfg.eps && k < cfg.k_max);

  CodingResult out;
  out.coefficients = std::move(s);
  out.diag.iterations = k;
  out.diag.final_residual = residual;
  double smoothness = 0.0;
  for (std::size_t l = 0; l < part.regions.size(); ++l)
    smoothness += graph_trace(gather_cols(out.coefficients, part.regions[l]), graphs[l].laplacian);
  out.diag.objective = 0.5 * (x - b * out.coefficients).squaredNorm() + lambda3 * smoothness +
                       lambda4 * out.coefficients.lpNorm<1>();
  return out;
}

}  // namespace lrbsl
