#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "helical/assemble.hpp"

using namespace helical;

namespace {
Eigen::VectorXcd random_complex(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) v[i] = Complex(unif(rng), unif(rng));
  return v;
}
}  // namespace

TEST_CASE("assembled matrix reproduces the matrix-free operators") {
  for (int n : {2, 3}) {
    const auto cfg = make_config(n, 1.3, 1.5);
    const Grid g = (n == 2) ? build_grid(cfg, {48, 0, 8})
                            : build_grid(cfg, {20, 16, 8});
    for (int m : {0, 1, 3}) {
      const DiscreteOperator op = assemble_mode_system(m, g, cfg);
      const Eigen::VectorXcd tau0 = Eigen::VectorXcd::Zero(g.boundary_size());
      for (unsigned trial = 0; trial < 20; ++trial) {
        const Eigen::VectorXcd v = random_complex(g.spatial_size(), 77 + trial);
        const Eigen::VectorXcd Av = op.A * v;
        const Eigen::VectorXcd interior = mode_operator_apply({m, v}, g, cfg);
        const Eigen::VectorXcd bres = mode_boundary_residual({m, v}, tau0, g, cfg);
        const double scale = Av.cwiseAbs().maxCoeff() + 1.0;
        for (int i = 0; i < op.size(); ++i) {
          if (op.row_kinds[i] == DiscreteOperator::RowKind::Interior)
            CHECK(std::abs(Av[i] - interior[i]) <= 1e-13 * scale);
        }
        for (int k = 0; k < g.boundary_size(); ++k) {
          const int row = g.sidx(g.J, k);
          if (op.row_kinds[row] == DiscreteOperator::RowKind::Boundary)
            CHECK(std::abs(Av[row] - bres[k]) <= 1e-13 * scale);
        }
      }
    }
  }
}

TEST_CASE("interior stencil bandwidth") {
  for (int n : {2, 3}) {
    const auto cfg = make_config(n, 1.0, 1.0);
    const Grid g = (n == 2) ? build_grid(cfg, {32, 0, 8})
                            : build_grid(cfg, {18, 16, 8});
    const int limit = (n == 2) ? 5 : 9;
    for (int m : {0, 2}) {
      const DiscreteOperator op = assemble_mode_system(m, g, cfg);
      std::vector<int> count(op.size(), 0);
      for (int outer = 0; outer < op.A.outerSize(); ++outer)
        for (Eigen::SparseMatrix<Complex>::InnerIterator it(op.A, outer); it; ++it)
          ++count[it.row()];
      for (int i = 0; i < op.size(); ++i)
        if (op.row_kinds[i] == DiscreteOperator::RowKind::Interior)
          CHECK(count[i] <= limit);
    }
  }
}

TEST_CASE("m=0 homogeneous system annihilates constants") {
  for (int n : {2, 3}) {
    const auto cfg = make_config(n, 1.3, 1.5);
    const Grid g = (n == 2) ? build_grid(cfg, {64, 0, 8})
                            : build_grid(cfg, {24, 16, 8});
    const DiscreteOperator op = assemble_mode_system(0, g, cfg);
    const Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(g.spatial_size());
    double rowscale = 0.0;
    for (int i = 0; i < op.size(); ++i)
      rowscale = std::max(rowscale, std::abs(op.A.coeff(i, i)));
    CHECK((op.A * ones).cwiseAbs().maxCoeff() <= 1e-12 * rowscale);
  }
}

TEST_CASE("right-hand side assembly") {
  const auto cfg = make_config(2, 1.0, 1.0);
  const Grid g = build_grid(cfg, {32, 0, 8});
  const DiscreteOperator op = assemble_mode_system(0, g, cfg);
  Eigen::VectorXcd ft(g.spatial_size());
  for (int j = 0; j <= g.J; ++j) ft[j] = Complex(g.r[j], 0.0);  // f = 1
  Eigen::VectorXcd tau = Eigen::VectorXcd::Constant(1, Complex(0.5, 0.0));
  const Eigen::VectorXcd rhs = op.assemble_rhs(ft, tau);
  for (int j = 1; j < g.J; ++j) CHECK(rhs[j] == ft[j]);
  CHECK(rhs[g.J] == tau[0]);
  // axis row: scaled half-cell source integral
  const double expect = op.axis_row_scale() * (g.hr / 8.0) * (3.0 * 0.0 + g.hr);
  CHECK(std::abs(rhs[0] - Complex(expect, 0.0)) <= 1e-15);
  CHECK_THROWS_AS(op.assemble_rhs(ft, Eigen::VectorXcd::Zero(2)),
                  std::invalid_argument);
}

TEST_CASE("sparse triplet dump format") {
  const auto cfg = make_config(2, 1.0, 1.0);
  const Grid g = build_grid(cfg, {16, 0, 8});
  const DiscreteOperator op = assemble_mode_system(1, g, cfg);
  std::ostringstream os;
  write_sparse_triplets(os, op.A);
  std::istringstream is(os.str());
  std::string header1, header2;
  std::getline(is, header1);
  std::getline(is, header2);
  CHECK(header2 == "# row col re im");
  long row, col;
  double re, im;
  int count = 0;
  Eigen::MatrixXcd rebuilt = Eigen::MatrixXcd::Zero(op.size(), op.size());
  while (is >> row >> col >> re >> im) {
    rebuilt(row, col) = Complex(re, im);
    ++count;
  }
  CHECK(count == static_cast<int>(op.A.nonZeros()));
  CHECK((rebuilt - Eigen::MatrixXcd(op.A)).cwiseAbs().maxCoeff() == 0.0);
}
