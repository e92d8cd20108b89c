#include <doctest.h>

#include <Eigen/Dense>

#include "admm/block_problem.hpp"
#include "admm/instance_gen.hpp"
#include "admm/stationarity.hpp"
#include "admm/theory_constants.hpp"
#include "test_helpers.hpp"

using namespace admm;
using namespace admm::testing;

namespace {

BlockVector scalar_point(double v) { return BlockVector({1}, Eigen::VectorXd::Constant(1, v)); }

}  // namespace

TEST_CASE("block vector arithmetic matches flat arithmetic") {
  Rng rng(11);
  BlockVector a({2, 3, 1}, rng.normal_vector(6));
  BlockVector b({2, 3, 1}, rng.normal_vector(6));
  const BlockVector sum = a + b;
  CHECK(sum.flat() == a.flat() + b.flat());
  double blockwise_dot = 0.0;
  for (int t = 0; t < a.blocks(); ++t) blockwise_dot += a.block(t).dot(b.block(t));
  CHECK(a.dot(b) == doctest::Approx(blockwise_dot).epsilon(1e-15));
  CHECK(a.block(1).size() == 3);
  CHECK(a.block_offset(2) == 5);
  CHECK_THROWS_AS(BlockVector({2, 2}, Eigen::VectorXd::Zero(3)), std::invalid_argument);
}

TEST_CASE("augmented Lagrangian hand values") {
  const BlockProblem problem = scalar_problem(2.0, 0.0, 1.0);
  const Eigen::VectorXd p3 = Eigen::VectorXd::Constant(1, 3.0);
  const Eigen::VectorXd p0 = Eigen::VectorXd::Zero(1);
  // <p, Ay-b> + (c/2)||Ay-b||^2 = 3*1 + 2*1 = 5 at y=0.5, A=2, c=4.
  CHECK(eval_al(problem, scalar_point(0.5), p3, 4.0) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(eval_al(problem, scalar_point(0.5), p0, 4.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK_THROWS_AS(eval_al(problem, scalar_point(1.5), p0, 4.0), std::domain_error);
  CHECK_THROWS_AS(eval_al(problem, scalar_point(0.5), p0, 0.0), std::invalid_argument);
}

TEST_CASE("augmented Lagrangian vanishes on feasible points") {
  Rng rng(3);
  const GeneratedInstance inst = gen_dqp({Family::Dqp, 42, 2, 4, 3, 10.0});
  // x_b is feasible by construction, so both penalty terms vanish.
  const Eigen::VectorXd p = rng.normal_vector(3);
  const double f = inst.problem.smooth().value(inst.x_b);
  CHECK(eval_al(inst.problem, inst.x_b, p, 7.0) == doctest::Approx(f).epsilon(1e-12));
}

TEST_CASE("augmented Lagrangian decomposition identity") {
  const GeneratedInstance inst = gen_dqp({Family::Dqp, 9, 2, 5, 4, 5.0});
  Rng rng(17);
  const BlockVector y = random_interior_point(inst.problem, rng);
  const Eigen::VectorXd p = rng.normal_vector(4);
  const double c = 3.5;
  // Same term-by-term expressions as the implementation, so the identity is
  // exact in floating point.
  const Eigen::VectorXd w = inst.problem.residual(y);
  const double expected = inst.problem.smooth().value(y) + p.dot(w) + 0.5 * c * w.squaredNorm();
  CHECK(eval_al(inst.problem, y, p, c) == expected);
}

TEST_CASE("smooth AL gradient hand value and errors") {
  const BlockProblem problem = scalar_problem(2.0, 0.0, 1.0);
  const Eigen::VectorXd p3 = Eigen::VectorXd::Constant(1, 3.0);
  const auto [value, grad] = eval_smooth_al_grad(problem, 0, scalar_point(0.5), p3, 4.0);
  // A^T (p + c A y) = 2 (3 + 4) = 14.
  CHECK(grad[0] == doctest::Approx(14.0).epsilon(1e-15));
  CHECK(value == doctest::Approx(5.0).epsilon(1e-15));
  CHECK_THROWS_AS(eval_smooth_al_grad(problem, 1, scalar_point(0.5), p3, 4.0), std::invalid_argument);

  // Feasible point, zero multiplier, zero objective.
  const BlockProblem zero = scalar_problem(1.0, 0.0, 2.0);
  const auto [v0, g0] = eval_smooth_al_grad(zero, 0, scalar_point(0.0), Eigen::VectorXd::Zero(1), 2.0);
  CHECK(v0 == 0.0);
  CHECK(g0[0] == 0.0);
}

TEST_CASE("smooth AL gradient matches central finite differences") {
  const std::vector<GeneratedInstance> instances = {
      gen_dqp({Family::Dqp, 5, 2, 4, 3, 8.0}),
      gen_cauchy({Family::Cauchy, 6, 3, 4, 2, 8.0}),
      gen_qpbc({Family::Qpbc, 7, 6, 1, 3, 8.0}),
  };
  Rng rng(99);
  for (const auto& inst : instances) {
    for (int trial = 0; trial < 100; ++trial) {
      const BlockVector y = random_interior_point(inst.problem, rng);
      const Eigen::VectorXd p = rng.normal_vector(inst.problem.constraint_rows());
      const double c = rng.uniform(0.1, 5.0);
      const int t = static_cast<int>(rng.next_u64() % inst.problem.blocks());
      const auto [value, grad] = eval_smooth_al_grad(inst.problem, t, y, p, c);
      (void)value;
      for (int j = 0; j < grad.size(); ++j) {
        const double fd = smooth_al_fd(inst.problem, t, j, y, p, c);
        CHECK(grad[j] == doctest::Approx(fd).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("box prox clamps and ignores the step") {
  const BoxIndicator box = BoxIndicator::centered(1, 1.0);
  CHECK(box.prox(Eigen::VectorXd::Constant(1, 0.3))[0] == 0.3);
  CHECK(box.prox(Eigen::VectorXd::Constant(1, 5.0))[0] == 1.0);
  CHECK(box.prox(Eigen::VectorXd::Constant(1, 5.0), 0.1) == box.prox(Eigen::VectorXd::Constant(1, 5.0), 100.0));
  CHECK_THROWS_AS(BoxIndicator(Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, -1.0)),
                  std::invalid_argument);
}

TEST_CASE("eps-subdifferential gap closed forms") {
  const BoxIndicator box = BoxIndicator::centered(1, 1.0);
  CHECK(eps_subdiff_gap(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Constant(1, 0.5), box) == 0.0);
  CHECK(eps_subdiff_gap(Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, 0.5), box) ==
        doctest::Approx(0.5).epsilon(1e-15));
  // Normal cone at the lower bound: g = -2 at x = -1 has zero gap.
  CHECK(eps_subdiff_gap(Eigen::VectorXd::Constant(1, -2.0), Eigen::VectorXd::Constant(1, -1.0), box) == 0.0);
  CHECK_THROWS_AS(eps_subdiff_gap(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Constant(1, 2.0), box),
                  std::domain_error);
}

TEST_CASE("zero gap iff negated vector lies in the normal cone") {
  Rng rng(21);
  const BoxIndicator box(Eigen::VectorXd::Constant(4, -2.0), Eigen::VectorXd::Constant(4, 3.0));
  for (int trial = 0; trial < 500; ++trial) {
    Eigen::VectorXd x(4), g(4);
    for (int j = 0; j < 4; ++j) {
      const int mode = static_cast<int>(rng.next_u64() % 3);
      x[j] = mode == 0 ? box.lo[j] : (mode == 1 ? box.hi[j] : rng.uniform(box.lo[j], box.hi[j]));
      g[j] = rng.normal();
    }
    // Componentwise normal-cone membership of -(-g) = g at x.
    bool in_cone = true;
    for (int j = 0; j < 4; ++j) {
      const bool ok = (g[j] == 0.0) || (g[j] > 0 && x[j] == box.hi[j]) || (g[j] < 0 && x[j] == box.lo[j]);
      in_cone = in_cone && ok;
    }
    CHECK((eps_subdiff_gap(g, x, box) == 0.0) == in_cone);
  }
}

TEST_CASE("stationarity checks in both modes") {
  const BlockProblem problem = scalar_problem(1.0, 0.0, 1.0);
  BlockVector x = scalar_point(0.0);  // feasible: A x = 0 = b
  const Eigen::VectorXd p = Eigen::VectorXd::Zero(1);

  auto cert = StationaryCertificate::make(problem, x, p, scalar_point(0.0), 0.0);
  CHECK(check_stationarity(cert, 1e-12, 1e-12, ToleranceMode::Absolute));

  // Boundary inclusive: ||v|| = 0.1 with rho = 0.1 passes.
  auto boundary = StationaryCertificate::make(problem, x, p, scalar_point(0.1), 0.0);
  CHECK(check_stationarity(boundary, 0.1, 1.0, ToleranceMode::Absolute));
  CHECK_FALSE(check_stationarity(boundary, 0.09, 1.0, ToleranceMode::Absolute));

  // Relative feasibility clause: 1e-3 / 101 < 1e-5.
  auto feas = StationaryCertificate::make(problem, scalar_point(1e-3), p, scalar_point(0.0), 0.0);
  REQUIRE(feas.feas_norm == doctest::Approx(1e-3).epsilon(1e-12));
  CHECK(check_stationarity(feas, 1e-5, 1e-5, ToleranceMode::Relative, {1.0, 101.0}));
  CHECK_FALSE(check_stationarity(feas, 1e-5, 1e-5, ToleranceMode::Absolute));

  CHECK_THROWS_AS(check_stationarity(cert, 0.0, 1.0, ToleranceMode::Absolute), std::invalid_argument);
  CHECK_THROWS_AS(StationaryCertificate::make(problem, x, p, scalar_point(0.0), -1.0), std::invalid_argument);
}

TEST_CASE("theory constants closed forms") {
  SUBCASE("single block: zeta2 = 0, scalar operator norm") {
    const BlockProblem problem = scalar_problem(2.0, 0.0, 1.0);
    const TheoryConstants tc = compute_theory_constants(problem);
    CHECK(tc.zeta2 == 0.0);
    CHECK(tc.a_dagger_norm == doctest::Approx(2.0).epsilon(1e-12));
    // m = 0, L = 0: zeta1 = 100 max{1, 0} + 0 + 1.
    CHECK(tc.zeta1 == doctest::Approx(101.0).epsilon(1e-12));
  }
  SUBCASE("missing weak-convexity metadata is an error") {
    auto oracle = std::make_shared<BlockSeparableQuadraticOracle>(
        std::vector<Eigen::MatrixXd>{Eigen::MatrixXd::Zero(1, 1)},
        std::vector<Eigen::VectorXd>{Eigen::VectorXd::Zero(1)});
    BlockProblem problem({1}, oracle, {Eigen::MatrixXd::Constant(1, 1, 1.0)}, Eigen::VectorXd::Zero(1),
                         {BoxIndicator::centered(1, 1.0)});
    CHECK_THROWS_AS(compute_theory_constants(problem), std::invalid_argument);
  }
  SUBCASE("upsilon requires Slater data") {
    const BlockProblem problem = scalar_problem(2.0, 0.0, 1.0);
    CHECK_THROWS_AS(compute_theory_constants(problem, std::nullopt, 1.0), std::invalid_argument);
  }
  SUBCASE("upsilon and objective range on a small instance") {
    const GeneratedInstance inst = gen_dqp({Family::Dqp, 4, 2, 3, 2, 4.0});
    const TheoryConstants tc =
        compute_theory_constants(inst.problem, SlaterData{inst.x_b, inst.slater_distance}, 2.0, 20, true);
    REQUIRE(tc.upsilon_C.has_value());
    CHECK(*tc.upsilon_C > 0.0);
    CHECK(*tc.nu_plus_A > 0.0);
    CHECK(*tc.D_h > 0.0);
    REQUIRE(tc.phi_sup.has_value());
    REQUIRE(tc.phi_inf.has_value());
    CHECK(*tc.phi_inf <= *tc.phi_sup);
    // Corner enumeration brackets every vertex value by construction.
    BlockVector corner(inst.problem.dims());
    for (int t = 0; t < inst.problem.blocks(); ++t) corner.block(t) = inst.problem.box(t).hi;
    const double v = inst.problem.smooth().value(corner);
    CHECK(*tc.phi_inf <= v);
    CHECK(*tc.phi_sup >= v);
  }
}

TEST_CASE("zeta1 is monotone in the weak-convexity constants") {
  Rng rng(31);
  const GeneratedInstance base = gen_dqp({Family::Dqp, 12, 3, 4, 3, 5.0});
  const BlockProblem& pb = base.problem;
  const TheoryConstants tc0 = compute_theory_constants(pb);
  auto oracle = std::shared_ptr<const SmoothOracle>(&pb.smooth(), [](const SmoothOracle*) {});
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd bumped = *pb.weak_convexity();
    bumped[static_cast<int>(rng.next_u64() % bumped.size())] += rng.uniform(0.0, 5.0);
    BlockProblem problem(pb.dims(), oracle,
                         {pb.constraint_block(0), pb.constraint_block(1), pb.constraint_block(2)}, pb.rhs(),
                         pb.boxes(), bumped);
    CHECK(compute_theory_constants(problem).zeta1 >= tc0.zeta1);
  }
}

TEST_CASE("spectral norm by power iteration matches dense SVD") {
  Rng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const int rows = 1 + static_cast<int>(rng.next_u64() % 8);
    const int cols = 1 + static_cast<int>(rng.next_u64() % 8);
    const Eigen::MatrixXd m = rng.normal_matrix(rows, cols);
    const double reference = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()[0];
    CHECK(spectral_norm(m) == doctest::Approx(reference).epsilon(1e-8));
  }
  CHECK(spectral_norm(Eigen::MatrixXd::Zero(3, 3)) == 0.0);
}
