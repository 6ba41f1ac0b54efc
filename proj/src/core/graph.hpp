#pragma once

#include <Eigen/Core>
#include <vector>

#include "core/admm.hpp"
#include "core/subspace.hpp"

namespace lrbsl {

// Disjoint rectangular cells covering the image; pixel indices refer to
// flatten()'s row-major column ordering.
struct RegionPartition {
  int height = 0;
  int width = 0;
  int omega = 0;
  std::vector<std::vector<int>> regions;
};

// omega x omega tiling; edge cells smaller than omega stay separate regions.
RegionPartition build_partition(int height, int width, int omega);

// Binary similarity graph of one region: W_ij = 1 iff i != j and the squared
// spectral distance is below sigma; L = D - W.
struct RegionGraph {
  Eigen::MatrixXd weights;
  Eigen::MatrixXd laplacian;
};

std::vector<RegionGraph> build_graphs(const Eigen::MatrixXd& x, const RegionPartition& part,
                                      double sigma);

// min_S 1/2 ||X - B S||_F^2 + lambda3 sum_l Tr(S_l L_l S_l^T) + lambda4 ||S||_1
// by ADMM with splittings V1 = V2 = S. Per iteration:
//   S  <- (B^T B + 2 mu I)^-1 (B^T X + mu V1 - H1 + mu V2 - H2)
//   V1_l <- (mu S_l + H1_l) (2 lambda3 L_l + mu I)^-1   per region
//   V2 <- soft(S + H2/mu, lambda4/mu)
//   H1 <- H1 + mu (S - V1),  H2 <- H2 + mu (S - V2)
// until ||S - V1||_F + ||S - V2||_F < eps or k_max iterations.
CodingResult run_lrb_glr(const Eigen::MatrixXd& x, const JointDictionary& dict,
                         const std::vector<RegionGraph>& graphs, const RegionPartition& part,
                         double lambda3, double lambda4, const AdmmConfig& cfg);

}  // namespace lrbsl
