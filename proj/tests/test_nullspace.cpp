#include <catch2/catch_amalgamated.hpp>

#include "helical/nullspace.hpp"

using namespace helical;

TEST_CASE("m=0 has exactly the constant near-null vector") {
  const auto cfg = make_config(2, 2.0, 1.0);
  const Grid g = build_grid(cfg, {64, 0, 8});
  const auto rep = null_space_probe(assemble_mode_system(0, g, cfg));
  CHECK(rep.singular_values[0] <= 1e-6 * rep.sigma_max);
  CHECK(rep.singular_values[1] > 1e-6 * rep.sigma_max);
  CHECK(rep.singular_values[1] / std::max(rep.singular_values[0], 1e-300) >= 100.0);
  CHECK(rep.cosine_with_constant(0) >= 0.999);
}

TEST_CASE("m=1 system has no near-null vector") {
  const auto cfg = make_config(2, 2.0, 1.0);
  const Grid g = build_grid(cfg, {64, 0, 8});
  const auto rep = null_space_probe(assemble_mode_system(1, g, cfg));
  CHECK(rep.singular_values[0] > 1e-6 * rep.sigma_max);
}

TEST_CASE("sparse probe agrees with the dense SVD oracle at J=32") {
  const auto cfg = make_config(2, 2.0, 1.0);
  const Grid g = build_grid(cfg, {32, 0, 8});
  for (int m : {0, 1}) {
    const DiscreteOperator op = assemble_mode_system(m, g, cfg);
    NullSpaceOptions sparse_opt;
    sparse_opt.dense_threshold = 0;
    sparse_opt.max_iterations = 400;
    const auto sp = null_space_probe(op, sparse_opt);
    NullSpaceOptions dense_opt;
    dense_opt.dense_threshold = 1 << 20;
    const auto dn = null_space_probe(op, dense_opt);
    REQUIRE(dn.used_dense);
    REQUIRE_FALSE(sp.used_dense);
    CHECK(std::abs(sp.sigma_max - dn.sigma_max) <= 0.05 * dn.sigma_max);
    for (int i = 0; i < 3; ++i) {
      if (dn.singular_values[i] <= 1e-10 * dn.sigma_max)
        // the sparse path reports the near-null value up to its shift bias
        CHECK(sp.singular_values[i] <= 1e-7 * dn.sigma_max);
      else
        CHECK(std::abs(sp.singular_values[i] - dn.singular_values[i]) <=
              1e-3 * dn.singular_values[i]);
    }
  }
}

TEST_CASE("pinning a node removes the near-null vector") {
  const auto cfg = make_config(2, 2.0, 1.0);
  const Grid g = build_grid(cfg, {64, 0, 8});
  const DiscreteOperator op = assemble_mode_system(0, g, cfg);
  double rowscale = 0.0;
  for (int i = 0; i < op.size(); ++i)
    rowscale = std::max(rowscale, std::abs(op.A.coeff(i, i)));
  const auto pinned = pin_node(op.A, 5, rowscale);
  const auto rep = null_space_probe(pinned);
  CHECK(rep.singular_values[0] > 1e-6 * rep.sigma_max);
}

TEST_CASE("n=3 m=0 probe through the dense path") {
  const auto cfg = make_config(3, 2.0, 1.0);
  const Grid g = build_grid(cfg, {16, 16, 8});
  const auto rep = null_space_probe(assemble_mode_system(0, g, cfg));
  REQUIRE(rep.used_dense);
  CHECK(rep.singular_values[0] <= 1e-6 * rep.sigma_max);
  CHECK(rep.singular_values[1] > 1e-6 * rep.sigma_max);
  CHECK(rep.cosine_with_constant(0) >= 0.999);
}

TEST_CASE("n=3 sparse probe matches its dense oracle") {
  const auto cfg = make_config(3, 2.0, 1.0);
  const Grid g = build_grid(cfg, {16, 16, 8});
  const DiscreteOperator op = assemble_mode_system(1, g, cfg);
  NullSpaceOptions sparse_opt;
  sparse_opt.dense_threshold = 0;
  sparse_opt.max_iterations = 500;
  const auto sp = null_space_probe(op, sparse_opt);
  const auto dn = null_space_probe(op);
  REQUIRE(dn.used_dense);
  CHECK(std::abs(sp.singular_values[0] - dn.singular_values[0]) <=
        1e-3 * dn.singular_values[0]);
}
