#include <Eigen/Eigenvalues>

#include "core/graph.hpp"
#include "core/prox.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace lrbsl;

TEST_CASE("build_partition tiles exactly when omega divides the image") {
  const RegionPartition part = build_partition(100, 100, 10);
  CHECK(part.regions.size() == 100);
  for (const auto& region : part.regions) CHECK(region.size() == 100);
}

TEST_CASE("build_partition keeps remainder cells as smaller regions") {
  const RegionPartition part = build_partition(5, 5, 2);
  REQUIRE(part.regions.size() == 9);
  const std::vector<std::size_t> expected{4, 4, 2, 4, 4, 2, 2, 2, 1};
  for (std::size_t i = 0; i < expected.size(); ++i)
    CHECK(part.regions[i].size() == expected[i]);
}

TEST_CASE("build_partition with omega covering the image yields one region") {
  const RegionPartition part = build_partition(4, 7, 9);
  REQUIRE(part.regions.size() == 1);
  CHECK(part.regions[0].size() == 28);
}

TEST_CASE("build_partition covers every pixel exactly once") {
  for (auto [h, w, omega] : {std::tuple{7, 11, 3}, {12, 5, 4}, {9, 9, 2}}) {
    const RegionPartition part = build_partition(h, w, omega);
    std::vector<int> seen(static_cast<std::size_t>(h) * w, 0);
    for (const auto& region : part.regions) {
      // contiguous rectangular block: row-major inside the region
      for (int idx : region) ++seen[static_cast<std::size_t>(idx)];
    }
    for (int c : seen) CHECK(c == 1);
  }
  CHECK_THROWS_AS(build_partition(5, 5, 0), ValidationError);
}

TEST_CASE("build_graphs links identical pixels and drops distant ones") {
  Eigen::MatrixXd x(3, 2);
  x.col(0) << 0.2, 0.4, 0.6;
  x.col(1) = x.col(0);
  const RegionPartition part = build_partition(1, 2, 2);
  const auto graphs = build_graphs(x, part, 0.3);
  REQUIRE(graphs.size() == 1);
  Eigen::MatrixXd w_expected(2, 2);
  w_expected << 0, 1, 1, 0;
  Eigen::MatrixXd l_expected(2, 2);
  l_expected << 1, -1, -1, 1;
  CHECK(graphs[0].weights == w_expected);
  CHECK(graphs[0].laplacian == l_expected);
}

TEST_CASE("build_graphs yields the zero Laplacian when no pair is close") {
  Eigen::MatrixXd x(2, 4);
  x << 0, 10, 20, 30, 0, 10, 20, 30;
  const RegionPartition part = build_partition(2, 2, 2);
  const auto graphs = build_graphs(x, part, 0.5);
  CHECK(graphs[0].weights.cwiseAbs().maxCoeff() == 0.0);
  CHECK(graphs[0].laplacian.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Laplacian quadratic form matches the half double-sum") {
  const Eigen::MatrixXd x = testutil::random_matrix(5, 6, 131) * 0.3;
  const RegionPartition part = build_partition(2, 3, 3);
  REQUIRE(part.regions.size() == 1);
  const auto graphs = build_graphs(x, part, 0.4);
  const auto& g = graphs[0];

  const Eigen::VectorXd node_vals = testutil::random_vector(6, 137);
  const double quad = node_vals.transpose() * g.laplacian * node_vals;
  double brute = 0.0;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      brute += g.weights(i, j) * (node_vals(i) - node_vals(j)) * (node_vals(i) - node_vals(j));
  brute *= 0.5;
  CHECK(quad == doctest::Approx(brute).epsilon(1e-10));
}

TEST_CASE("every generated Laplacian is symmetric PSD with zero row sums") {
  const Eigen::MatrixXd x = testutil::random_matrix(6, 35, 139) * 0.4;
  const RegionPartition part = build_partition(5, 7, 3);
  for (const auto& g : build_graphs(x, part, 0.35)) {
    CHECK((g.laplacian - g.laplacian.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(g.laplacian.rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(g.laplacian.rows());
    CHECK((g.laplacian * ones).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(g.weights.diagonal().cwiseAbs().maxCoeff() == 0.0);
    if (g.laplacian.rows() > 0) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g.laplacian, Eigen::EigenvaluesOnly);
      CHECK(eig.eigenvalues().minCoeff() >= -1e-10);
    }
  }
}

TEST_CASE("allowing self-loops would leave the Laplacian unchanged") {
  Eigen::MatrixXd x(2, 4);
  x.col(0) << 0.1, 0.2;
  x.col(1) << 0.1, 0.2;  // identical: self-distance 0 < sigma for everything
  x.col(2) << 0.15, 0.22;
  x.col(3) << 0.9, 0.9;
  const RegionPartition part = build_partition(1, 4, 4);
  const auto graphs = build_graphs(x, part, 0.3);
  const auto& g = graphs[0];

  // Independent construction with W'_ii = 1 (every self-distance is 0 < sigma).
  Eigen::MatrixXd w_loops = g.weights;
  w_loops.diagonal().setOnes();
  const Eigen::MatrixXd lap_loops =
      Eigen::MatrixXd(w_loops.rowwise().sum().asDiagonal()) - w_loops;
  CHECK(lap_loops == g.laplacian);
}

TEST_CASE("run_lrb_glr with lambda3 0 and lambda4 lambda1 matches sparse_code") {
  const int bands = 20, n = 64, k = 5;
  const Eigen::MatrixXd x = testutil::random_matrix(bands, n, 149) * 0.5;
  const JointDictionary dict{testutil::random_matrix(bands, k, 151),
                             testutil::random_vector(bands, 157)};
  const double lambda1 = 1e-4;
  const AdmmConfig cfg;

  const RegionPartition part = build_partition(8, 8, 4);
  const auto graphs = build_graphs(x, part, 0.3);

  const CodingResult direct = sparse_code(x, dict, lambda1, cfg);
  const CodingResult reduced = run_lrb_glr(x, dict, graphs, part, 0.0, lambda1, cfg);
  CHECK((direct.coefficients - reduced.coefficients).cwiseAbs().maxCoeff() < 1e-4);

  SUBCASE("all-zero graphs reduce the same way") {
    std::vector<RegionGraph> zero_graphs;
    for (const auto& region : part.regions) {
      const auto m = static_cast<Eigen::Index>(region.size());
      zero_graphs.push_back({Eigen::MatrixXd::Zero(m, m), Eigen::MatrixXd::Zero(m, m)});
    }
    const CodingResult zeroed = run_lrb_glr(x, dict, zero_graphs, part, 1.0, lambda1, cfg);
    CHECK((direct.coefficients - zeroed.coefficients).cwiseAbs().maxCoeff() < 1e-4);
  }
}

TEST_CASE("graph regularization pulls coefficients of neighboring pixels together") {
  // Near-identical pixels: identical columns would get identical coefficients
  // even without the graph term, leaving nothing to compare.
  const int bands = 12, k = 4;
  Eigen::MatrixXd x = testutil::random_matrix(bands, 16, 163) * 0.5;
  x.col(1) = x.col(0) + 0.02 * testutil::random_vector(bands, 164);
  const JointDictionary dict{testutil::random_matrix(bands, k, 167),
                             testutil::random_vector(bands, 173)};
  const RegionPartition part = build_partition(4, 4, 2);
  const auto graphs = build_graphs(x, part, 0.1);
  REQUIRE(graphs[0].weights(0, 1) == 1.0);

  const AdmmConfig cfg;
  const CodingResult smooth = run_lrb_glr(x, dict, graphs, part, 1.0, 1e-4, cfg);
  const CodingResult rough = run_lrb_glr(x, dict, graphs, part, 0.0, 1e-4, cfg);
  const double d_smooth = (smooth.coefficients.col(0) - smooth.coefficients.col(1)).norm();
  const double d_rough = (rough.coefficients.col(0) - rough.coefficients.col(1)).norm();
  CHECK(d_smooth < d_rough);
}

TEST_CASE("run_lrb_glr objective never exceeds the zero-coefficient bound") {
  const Eigen::MatrixXd x = testutil::random_matrix(10, 25, 179) * 0.6;
  const JointDictionary dict{testutil::random_matrix(10, 3, 181),
                             testutil::random_vector(10, 191)};
  const RegionPartition part = build_partition(5, 5, 3);
  const auto graphs = build_graphs(x, part, 0.3);
  const CodingResult res = run_lrb_glr(x, dict, graphs, part, 1.0, 1.0, AdmmConfig{});
  CHECK(res.diag.objective <= 0.5 * x.squaredNorm() + 1e-9);
  const AdmmConfig cfg;
  CHECK((res.diag.final_residual < cfg.eps || res.diag.iterations == cfg.k_max));
}

TEST_CASE("run_lrb_glr is deterministic and validates its partition") {
  const Eigen::MatrixXd x = testutil::random_matrix(8, 9, 193) * 0.5;
  const JointDictionary dict{testutil::random_matrix(8, 3, 197),
                             testutil::random_vector(8, 199)};
  const RegionPartition part = build_partition(3, 3, 2);
  const auto graphs = build_graphs(x, part, 0.3);

  const CodingResult a = run_lrb_glr(x, dict, graphs, part, 1.0, 1.0, AdmmConfig{});
  const CodingResult b = run_lrb_glr(x, dict, graphs, part, 1.0, 1.0, AdmmConfig{});
  CHECK(a.coefficients == b.coefficients);

  SUBCASE("mismatched graph count") {
    auto fewer = graphs;
    fewer.pop_back();
    CHECK_THROWS_AS(run_lrb_glr(x, dict, fewer, part, 1.0, 1.0, AdmmConfig{}), ValidationError);
  }
  SUBCASE("partition missing a pixel") {
    RegionPartition broken = part;
    broken.regions.back().pop_back();
    CHECK_THROWS_AS(run_lrb_glr(x, dict, graphs, broken, 1.0, 1.0, AdmmConfig{}),
                    ValidationError);
  }
}
