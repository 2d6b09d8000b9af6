#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "gyro/errors.hpp"
#include "gyro/models.hpp"

using namespace gyro;

namespace {

ReducedTopState random_state(std::mt19937_64& rng, double a) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec3 u(n(rng), n(rng), n(rng));
  Vec3 v(n(rng), n(rng), n(rng));
  return project_to_constraints(u, v, a);
}

}  // namespace

TEST(ReducedHamiltonian, HandValues) {
  EXPECT_DOUBLE_EQ(reduced_hamiltonian({Vec3(0, 0, 1), Vec3(0, 0, 2)}, {1.0, 0.0, 2.0}), 3.0);
  EXPECT_DOUBLE_EQ(reduced_hamiltonian({Vec3(0, 0, 1), Vec3::Zero()}, {2.7, 0.0, 0.0}), 2.7);
  EXPECT_DOUBLE_EQ(reduced_hamiltonian({Vec3(1, 0, 0), Vec3(0.5, 0, 0)}, {1.0, 2.0, 0.5}), 0.625);
}

TEST(ReducedHamiltonian, RejectsOffManifoldStates) {
  EXPECT_THROW(reduced_hamiltonian({Vec3(0, 0, 1.1), Vec3::Zero()}, {1.0, 0.0, 0.0}),
               InvalidStateError);
  EXPECT_THROW(reduced_hamiltonian({Vec3(0, 0, 1), Vec3(0, 0, 1)}, {1.0, 0.0, 0.0}),
               InvalidStateError);
  EXPECT_THROW(TopParams({-1.0, 0.0, 0.0}).validate(), ConfigError);
}

TEST(ReducedVectorField, EquilibriumIsExactlyStationary) {
  for (double a : {-3.0, 0.0, 0.5, 2.0, 7.25})
    for (double c : {0.1, 1.0, 9.0}) {
      const TopTangent t = reduced_vector_field(vertical_equilibrium(a), {c, 0.0, a});
      EXPECT_EQ(t.du, Vec3::Zero());
      EXPECT_EQ(t.dv, Vec3::Zero());
    }
}

TEST(ReducedVectorField, HandValue) {
  const double a = 0.7;
  const TopTangent t = reduced_vector_field({Vec3(1, 0, 0), Vec3(a, 0, 0)}, {1.0, 0.0, a});
  EXPECT_EQ(t.du, Vec3::Zero());
  EXPECT_EQ(t.dv, Vec3(0, -1, 0));
}

TEST(ReducedVectorField, ParallelVerticalStateIsStationary) {
  const TopTangent t = reduced_vector_field({Vec3(0, 0, 1), Vec3(0, 0, 1.5)}, {2.0, 0.0, 1.5});
  EXPECT_EQ(t.du.norm() + t.dv.norm(), 0.0);
}

TEST(ReducedVectorField, ConservesAllFirstIntegrals) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ua(-3.0, 3.0), uc(0.1, 5.0);
  for (int i = 0; i < 10000; ++i) {
    const TopParams p{uc(rng), 0.3, ua(rng)};
    const ReducedTopState s = random_state(rng, p.a);
    const TopTangent t = reduced_vector_field(s, p);
    const double scale = 1.0 + s.v.squaredNorm() + p.c;
    EXPECT_LT(std::abs(2.0 * s.u.dot(t.du)), 1e-13 * scale);
    EXPECT_LT(std::abs(t.du.dot(s.v) + s.u.dot(t.dv)), 1e-13 * scale);
    EXPECT_LT(std::abs(s.v.dot(t.dv) + p.c * t.du.z()), 1e-13 * scale * scale);
  }
}

TEST(ProjectToConstraints, IdentityOnValidStates) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    const ReducedTopState s = random_state(rng, 1.3);
    const ReducedTopState t = project_to_constraints(s.u, s.v, 1.3);
    EXPECT_EQ(s.u, t.u);
    EXPECT_EQ(s.v, t.v);
  }
}

TEST(ProjectToConstraints, NormalizesAndShifts) {
  const ReducedTopState s = project_to_constraints(Vec3(0, 0, 2), Vec3(0, 0, 2), 1.0);
  EXPECT_DOUBLE_EQ(s.u.dot(s.u), 1.0);
  EXPECT_DOUBLE_EQ(s.u.dot(s.v), 1.0);
  const double a = 2.5;
  const ReducedTopState t = project_to_constraints(Vec3(0, 0, 1 + 1e-12), Vec3(0, 0, a), a);
  EXPECT_LT(std::abs(t.u.dot(t.u) - 1.0), 1e-15);
  EXPECT_LT(std::abs(t.u.dot(t.v) - a), 1e-15);
  EXPECT_THROW(project_to_constraints(Vec3::Zero(), Vec3(1, 0, 0), 1.0), DegenerateInputError);
}

TEST(CoupledHamiltonian, DecoupledLimitIsBitwiseSum) {
  std::mt19937_64 rng(5);
  CoupledConfig cc;
  cc.omega_osc = Eigen::Vector2d(0.7, 1.9);
  cc.epsilon = 0.0;
  const TopParams p{1.0, 0.1, 2.0};
  for (int i = 0; i < 100; ++i) {
    CoupledState s;
    s.top = random_state(rng, p.a);
    s.x = Eigen::Vector2d(0.3 * i, 1.0);
    s.y = Eigen::Vector2d(0.01 * i, -0.5);
    EXPECT_EQ(coupled_hamiltonian(s, p, cc), reduced_hamiltonian(s.top, p) + cc.omega_osc.dot(s.y));
    const CoupledTangent t = coupled_vector_field(s, p, cc);
    const TopTangent t0 = reduced_vector_field(s.top, p);
    EXPECT_EQ(t.top.du, t0.du);
    EXPECT_EQ(t.top.dv, t0.dv);
    EXPECT_EQ(t.dx, cc.omega_osc);
    EXPECT_EQ(t.dy, VecX::Zero(2));
  }
}

TEST(CoupledHamiltonian, CatalogCouplingValues) {
  const TopParams p{1.0, 0.0, 1.0};
  CoupledConfig cc;
  cc.omega_osc = VecX::Ones(1);
  cc.epsilon = 0.1;
  CoupledState s;
  s.top = vertical_equilibrium(1.0);
  s.x = VecX::Zero(1);
  s.y = VecX::Zero(1);
  EXPECT_NEAR(coupled_hamiltonian(s, p, cc) - reduced_hamiltonian(s.top, p), 0.1, 1e-15);

  s.x[0] = std::numbers::pi / 2.0;
  const CoupledTangent t = coupled_vector_field(s, p, cc);
  EXPECT_NEAR(t.dy[0], 0.1, 1e-15);

  cc.coupling.id = "no_such_coupling";
  EXPECT_THROW(coupled_hamiltonian(s, p, cc), ConfigError);
}

TEST(CoupledHamiltonian, PerturbationBoundedBySupF) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
  const TopParams p{1.0, 0.0, 2.0};
  CoupledConfig cc;
  cc.omega_osc = Eigen::Vector3d(1.0, 2.0, 3.0);
  cc.epsilon = 1e-3;
  CoupledConfig c0 = cc;
  c0.epsilon = 0.0;
  const CouplingFunction F(cc.coupling, 3);
  for (int i = 0; i < 1000; ++i) {
    CoupledState s;
    s.top = random_state(rng, p.a);
    s.x = Eigen::Vector3d(ang(rng), ang(rng), ang(rng));
    s.y = Eigen::Vector3d(0.1, 0.2, 0.3);
    EXPECT_LE(std::abs(coupled_hamiltonian(s, p, cc) - coupled_hamiltonian(s, p, c0)),
              1e-3 * F.sup_abs() * (1 + 1e-12));
  }
}

TEST(CoupledVectorField, ActionRateIsMinusEpsilonGradX) {
  const TopParams p{1.3, 0.0, 0.4};
  CoupledConfig cc;
  cc.omega_osc = Eigen::Vector2d(1.0, 0.5);
  cc.epsilon = 0.05;
  cc.coupling.id = "tilt_cos";
  cc.coupling.params = {1.0, -2.0};
  std::mt19937_64 rng(2);
  const CouplingFunction F(cc.coupling, 2);
  for (int i = 0; i < 50; ++i) {
    CoupledState s;
    s.top = random_state(rng, p.a);
    s.x = Eigen::Vector2d(0.1 * i, 2.0 - 0.05 * i);
    s.y = Eigen::Vector2d::Zero();
    const CoupledTangent t = coupled_vector_field(s, p, cc);
    const VecX expect = -cc.epsilon * F.grad_x(s.top.u, s.x);
    EXPECT_LT((t.dy - expect).norm(), 1e-15);
    // finite-difference check of grad_x
    const double h = 1e-6;
    for (int k = 0; k < 2; ++k) {
      VecX xp = s.x, xm = s.x;
      xp[k] += h;
      xm[k] -= h;
      const double fd = (F.value(s.top.u, xp) - F.value(s.top.u, xm)) / (2 * h);
      EXPECT_NEAR(fd, F.grad_x(s.top.u, s.x)[k], 1e-8);
    }
  }
}

TEST(CoupledVectorField, ConservesCoupledEnergy) {
  const TopParams p{1.0, 0.0, 2.5};
  CoupledConfig cc;
  cc.omega_osc = Eigen::Vector2d(0.9, 1.7);
  cc.epsilon = 0.2;
  cc.coupling.id = "tilt_cos";
  std::mt19937_64 rng(4);
  for (int i = 0; i < 200; ++i) {
    CoupledState s;
    s.top = random_state(rng, p.a);
    s.x = Eigen::Vector2d(0.3 * i, 1.1);
    s.y = Eigen::Vector2d(0.2, -0.1);
    const CoupledTangent t = coupled_vector_field(s, p, cc);
    // dH/dt = grad H . X
    const CouplingFunction F(cc.coupling, 2);
    const Vec3 gu = Vec3(0, 0, p.c) + cc.epsilon * F.grad_u(s.top.u, s.x);
    const double dH = gu.dot(t.top.du) + s.top.v.dot(t.top.dv) + cc.omega_osc.dot(t.dy) +
                      cc.epsilon * F.grad_x(s.top.u, s.x).dot(t.dx);
    EXPECT_LT(std::abs(dH), 1e-12);
  }
}

TEST(WrapAngles, IntoHalfOpenInterval) {
  const VecX w = wrap_angles(Eigen::Vector3d(-0.5, 7.0, 2.0 * std::numbers::pi));
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    EXPECT_GE(w[i], 0.0);
    EXPECT_LT(w[i], 2.0 * std::numbers::pi);
  }
}
