#include <gtest/gtest.h>

#include "fpwalk/barrier.hpp"
#include "fpwalk/cylinder.hpp"
#include "fpwalk/errors.hpp"
#include "fpwalk/monte_carlo.hpp"
#include "fpwalk/presets.hpp"

using namespace fpwalk;

namespace {

Word w(const char* s) { return parse_word(s, 2); }

}  // namespace

TEST(Cylinder, SingleEquation) {
  for (double p : {0.0, 0.1, 1.0 / 3, 0.9}) {
    std::vector<double> pv{p};
    CylinderSystem sys = assemble_power_system(pv);
    ASSERT_EQ(sys.matrix.rows(), 1u);
    EXPECT_DOUBLE_EQ(sys.matrix(0, 0), 1.0 + p);
    EXPECT_DOUBLE_EQ(sys.rhs[0], p);
    CylinderSolution s = solve_cylinders(sys);
    EXPECT_NEAR(s.nu[0], p / (1 + p), 1e-15);
    EXPECT_LT(s.residual, 1e-14);
  }
}

TEST(Cylinder, ZeroPVector) {
  std::vector<double> pv{0.0, 0.0, 0.0};
  CylinderSolution s = solve_cylinders(assemble_power_system(pv));
  for (double v : s.nu) EXPECT_EQ(v, 0.0);
  EXPECT_FALSE(s.ordering_verified);
  EXPECT_THROW(assemble_power_system(std::vector<double>{}), PreconditionError);
}

TEST(Cylinder, TwoStepSystemCoefficients) {
  std::vector<double> pv{0.2, 0.15};
  CylinderSystem sys = assemble_power_system(pv);
  // k=1: nu1 + p1 nu1 + p2 nu2 = p1 + p2;  k=2: nu2 - p1 nu1 + p2 nu1 = p2.
  EXPECT_DOUBLE_EQ(sys.matrix(0, 0), 1.2);
  EXPECT_DOUBLE_EQ(sys.matrix(0, 1), 0.15);
  EXPECT_DOUBLE_EQ(sys.matrix(1, 0), -0.2 + 0.15);
  EXPECT_DOUBLE_EQ(sys.matrix(1, 1), 1.0);
  EXPECT_DOUBLE_EQ(sys.rhs[0], 0.35);
  EXPECT_DOUBLE_EQ(sys.rhs[1], 0.15);
  CylinderSolution s = solve_cylinders(sys);
  EXPECT_LT(cylinder_residual(pv, s.nu), 1e-14);
}

TEST(Cylinder, NearestNeighbourQuarter) {
  FirstPassageEngine eng(preset("nn-uniform-f2"));
  CylinderSolution s = solve_cylinders(assemble_power_system(compute_p_vector(eng, 1)));
  EXPECT_NEAR(s.nu[0], 0.25, 1e-9);
  EXPECT_TRUE(s.ordering_verified);
}

TEST(Cylinder, PowersWalkPartition) {
  FirstPassageEngine eng(preset("powers-n2-f2"));
  CylinderSolution a = solve_cylinders(assemble_power_system(compute_p_vector(eng, 1)));
  CylinderSolution b = solve_cylinders(assemble_power_system(compute_p_vector(eng, 2)));
  EXPECT_TRUE(a.ordering_verified);
  EXPECT_GT(a.nu[0], a.nu[1]);
  EXPECT_GT(a.nu[1], 0.0);
  EXPECT_LT(a.nu[0], 0.5);
  EXPECT_NEAR(2 * (a.nu[0] + b.nu[0]), 1.0, 1e-8);
}

TEST(Cylinder, MatrixIdentity) {
  Matrix p(1, 1, 1.0 / 3);
  auto nu = nu_from_matrix_identity(p);
  ASSERT_EQ(nu.size(), 1u);
  EXPECT_NEAR(nu[0], 0.25, 1e-15);

  FirstPassageEngine eng(preset("nn-uniform-f2"));
  std::vector<Word> B{w("a1")};
  EXPECT_NEAR(nu_from_matrix_identity(compute_P_B(eng, 1, B).mid())[0], 0.25, 1e-9);
  EXPECT_THROW(nu_from_matrix_identity(Matrix(1, 2)), PreconditionError);
}

TEST(Cylinder, SingletonIdentityOnNearestNeighbour) {
  FirstPassageEngine eng(preset("nn-uniform-f2"));
  std::vector<Word> B{w("a1")};
  std::map<Word, double> nu{{w("a1"), 0.25}, {w("a1^-1"), 0.25}};
  PropResidual r = prop_residual_check(eng, B, w("a1"), w("a1"), Word(), nu);
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.rhs, 0.25, 1e-9);
  EXPECT_THROW(prop_residual_check(eng, B, w("a1"), w("a1"), Word(), {}), PreconditionError);
  EXPECT_THROW(prop_residual_check(eng, B, w("a1"), w("a2"), Word(), nu), PreconditionError);
}

TEST(Cylinder, StrongVariantOnPowersWalk) {
  FirstPassageEngine eng(preset("powers-n2-f2"));
  CylinderSolution s = solve_cylinders(assemble_power_system(compute_p_vector(eng, 1)));
  std::map<Word, double> nu{{w("a1"), s.nu[0]}, {w("a1^-1"), s.nu[0]},
                            {w("a1^2"), s.nu[1]}, {w("a1^-2"), s.nu[1]}};
  std::vector<Word> B{w("a1"), w("a1^2")};
  PropResidual r = prop_residual_check(eng, B, w("a1"), w("a1"), w("a1^-1"), nu);
  EXPECT_TRUE(r.pass) << r.residual;
  EXPECT_LT(r.residual, 1e-6);
}

TEST(Cylinder, BarrierIdentityAgainstMonteCarlo) {
  StepMeasure mu = preset("example-2.8");
  FirstPassageEngine eng(mu);
  std::vector<Word> roots{w("a1"), w("a1^-1"), w("a2^-1 a1^-1")};
  McOptions mc;
  mc.samples = 200'000;
  mc.seed = 11;
  auto est = estimate_cylinders(mu, roots, default_cylinder_threshold(mu, roots), mc);
  std::map<Word, double> nu, se;
  for (const auto& e : est) {
    nu[e.root] = e.at_double.mean;
    se[e.root] = e.at_double.std_err;
  }
  std::vector<Word> B{w("a1"), w("a1 a2")};
  PropResidual r = prop_residual_check(eng, B, w("a1"), w("a1"), Word(), nu, se);
  EXPECT_TRUE(r.pass) << r.residual << " > " << r.tolerance;
}

TEST(Cylinder, ReturnSeries) {
  FirstPassageEngine eng(preset("nn-uniform-f2"));
  ReturnSeries r = nu_via_returns(eng, w("a1"), 10);
  ASSERT_EQ(r.terms.size(), 11u);
  for (std::size_t k = 1; k < r.partial_lower.size(); ++k) EXPECT_GE(r.partial_lower[k], r.partial_lower[k - 1]);
  EXPECT_LE(r.total.lower, 0.25 + 1e-9);
  EXPECT_NEAR(r.total.lower, 0.25, 1e-3);
  ReturnSeries first = nu_via_returns(eng, w("a1"), 0);
  EXPECT_LE(first.total.lower, 0.25);
  EXPECT_THROW(nu_via_returns(eng, w("a1"), -1), PreconditionError);
}
