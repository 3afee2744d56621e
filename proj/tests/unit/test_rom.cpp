#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "acrom/diag.hpp"
#include "acrom/error.hpp"
#include "acrom/rom.hpp"
#include "support.hpp"

using namespace acrom;

namespace {

struct Fixture {
  const fem::Discretization& d = testing::cylinder_disc(0.1);
  PodBasis ub, pb;
  Fixture(int R, int M) {
    const auto& s = testing::small_snapshots();
    ub = compute_pod(s, d, Field::Velocity, R);
    pb = compute_pod(s, d, Field::Pressure, M);
  }
};

RomState random_state(int R, int M, std::mt19937_64& rng) {
  return {testing::random_vector(R, rng), testing::random_vector(M, rng)};
}

// Mass-orthonormal random bases, for models whose size exceeds the snapshot rank.
std::pair<PodBasis, PodBasis> random_bases(const fem::Discretization& d, int R, int M, std::mt19937_64& rng) {
  Eigen::MatrixXd U(d.dofs.n_u, R), P(d.dofs.n_p, M);
  for (int j = 0; j < R; ++j) U.col(j) = testing::random_velocity(d.dofs, rng);
  for (int j = 0; j < M; ++j) P.col(j) = testing::random_vector(d.dofs.n_p, rng);
  return {compute_pod(U, d.mass, Field::Velocity, R), compute_pod(P, d.pressure_mass, Field::Pressure, M)};
}

double step_seconds(const ReducedModel& m, double dt, std::mt19937_64& rng) {
  RomStepper stepper(m, dt);
  RomState s = random_state(m.R, m.M, rng);
  s.a_u *= 1e-3;
  s.a_p *= 1e-3;
  double best = INFINITY;
  for (int batch = 0; batch < 7; ++batch) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int k = 0; k < 400; ++k) s = stepper.step(s);
    const std::chrono::duration<double> el = std::chrono::steady_clock::now() - t0;
    best = std::min(best, el.count() / 400);
  }
  return best;
}

}  // namespace

TEST_CASE("reduced operators match the oracle integrals") {
  Fixture f(3, 3);
  const ReducedModel m = build_reduced_model(f.ub, f.pb, f.d, 0.01, 1e-6);
  REQUIRE(m.R == 3);
  REQUIRE(m.M == 3);
  const auto phi = [&](int i) { return fem::Vector(f.ub.modes.col(i)); };
  const auto psi = [&](int i) { return fem::Vector(f.pb.modes.col(i)); };
  const double scale_k = m.K_r.cwiseAbs().maxCoeff();
  // |(psi, div phi)| <= sqrt(2) |psi| |grad phi| with unit |psi|.
  const double scale_d = std::sqrt(scale_k);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      CHECK(std::abs(m.K_r(i, j) - testing::oracle_stiffness(f.d, phi(i), phi(j))) <= 1e-10 * scale_k);
      CHECK(std::abs(m.D_r(i, j) - testing::oracle_divergence(f.d, psi(i), phi(j))) <= 1e-10 * scale_d);
      CHECK(std::abs(testing::oracle_mass(f.d, phi(i), phi(j)) - (i == j ? 1.0 : 0.0)) <= 1e-10);
    }
    CHECK(m.f_r[i] == doctest::Approx(testing::oracle_load(f.d, fem::rotating_body_force, 0.0, phi(i))).epsilon(1e-10));
  }
  double scale_t = 0.0;
  for (double v : m.T) scale_t = std::max(scale_t, std::abs(v));
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const double ref = testing::oracle_convection(f.d, phi(k), phi(j), phi(i));
        CHECK(std::abs(m.slice(k)[i * 3 + j] - ref) <= 1e-10 * scale_t);
      }
}

TEST_CASE("reduced convection is the projected full-order convection") {
  Fixture f(5, 5);
  const ReducedModel m = build_reduced_model(f.ub, f.pb, f.d, 0.01, 1e-6);
  std::mt19937_64 rng(41);
  const Eigen::VectorXd a = testing::random_vector(5, rng);
  const fem::SparseOperator N = fem::assemble_convection_skew(f.d.mesh, f.d.dofs, f.ub.modes * a);
  const Eigen::MatrixXd ref = f.ub.modes.transpose() * (N * f.ub.modes);
  CHECK((m.convection(a) - ref).cwiseAbs().maxCoeff() <= 1e-10 * ref.cwiseAbs().maxCoeff());
}

TEST_CASE("reduced convection is skew-symmetric") {
  Fixture f(8, 5);
  const ReducedModel m = build_reduced_model(f.ub, f.pb, f.d, 0.01, 1e-6);
  std::mt19937_64 rng(42);
  for (int k = 0; k < 100; ++k) {
    const Eigen::VectorXd w = testing::random_vector(m.R, rng), v = testing::random_vector(m.R, rng);
    const Eigen::MatrixXd N = m.convection(w);
    CHECK(std::abs(v.dot(N * v)) <= 1e-12 * N.norm() * v.squaredNorm());
  }
}

TEST_CASE("eliminated and monolithic reduced steps agree") {
  Fixture f(6, 6);
  const ReducedModel m = build_reduced_model(f.ub, f.pb, f.d, 0.01, 1e-6);
  std::mt19937_64 rng(43);
  for (double dt : {1e-1, 1e-2, 2.5e-4}) {
    const RomState s = random_state(6, 6, rng);
    const RomState a = ac_rom_step(s, m, dt, RomSolvePath::Eliminated);
    const RomState b = ac_rom_step(s, m, dt, RomSolvePath::Monolithic);
    CHECK((a.a_u - b.a_u).norm() <= 1e-11 * b.a_u.norm());
    CHECK((a.a_p - b.a_p).norm() <= 1e-11 * b.a_p.norm());
    const auto r = rom_step_residual(s, a, m, dt);
    CHECK(r.momentum <= 1e-12);
    CHECK(r.continuity <= 1e-12);
  }
}

TEST_CASE("single-mode model has a closed-form step") {
  Fixture f(1, 1);
  const ReducedModel m = build_reduced_model(f.ub, f.pb, f.d, 0.01, 1e-6);
  const double dt = 1e-2, K = m.K_r(0, 0), D = m.D_r(0, 0), F = m.f_r[0];
  CHECK(m.T[0] == 0.0);
  RomState s{Eigen::VectorXd::Constant(1, 0.7), Eigen::VectorXd::Constant(1, -0.3)};
  const RomState out = ac_rom_step(s, m, dt);
  const double a1 = (F + 0.7 / dt + D * -0.3) / (1.0 / dt + m.nu * K + dt * D * D / m.eps);
  const double b1 = -0.3 - dt / m.eps * D * a1;
  CHECK(out.a_u[0] == doctest::Approx(a1).epsilon(1e-13));
  CHECK(out.a_p[0] == doctest::Approx(b1).epsilon(1e-10));
}

TEST_CASE("rest is a fixed point without forcing") {
  Fixture f(5, 5);
  RomBuildOptions opt;
  opt.forcing = ForcingKind::None;
  const ReducedModel m = build_reduced_model(f.ub, f.pb, f.d, 0.01, 1e-6, opt);
  const RomTrajectory t = run_rom(m, {Eigen::VectorXd::Zero(5), Eigen::VectorXd::Zero(5)}, 0.0, 1e-2, 20);
  CHECK(t.a_u.cwiseAbs().maxCoeff() == 0.0);
  CHECK(t.a_p.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("reduced trajectory satisfies the energy equality") {
  Fixture f(7, 7);
  const ReducedModel m = build_reduced_model(f.ub, f.pb, f.d, 0.01, 1e-6);
  const auto& s = testing::small_snapshots();
  const RomState a0 = project_state(f.ub, f.pb, f.d, s.U.col(0), s.P.col(0));
  const RomTrajectory t = run_rom(m, a0, 0.0, 5e-3, 200);
  REQUIRE(t.count() == 201);
  CHECK(t.times.back() == doctest::Approx(1.0));
  CHECK(t.energy_residual[0] == 0.0);
  const fem::Vector F = forcing_vector(f.d, ForcingKind::Rotating, 0.0);
  for (int k = 1; k < t.count(); ++k) {
    CHECK(t.energy_residual[k] <= 1e-10);
    // Independent evaluation with the mass-weighted reconstructions.
    const fem::Vector u0 = reconstruct(f.ub, t.a_u.col(k - 1)), u1 = reconstruct(f.ub, t.a_u.col(k));
    const fem::Vector p0 = reconstruct(f.pb, t.a_p.col(k - 1)), p1 = reconstruct(f.pb, t.a_p.col(k));
    const fem::Vector du = u1 - u0, dp = p1 - p0;
    EnergyTerms e;
    e.energy_new = u1.dot(f.d.mass * u1) + m.eps * p1.dot(f.d.pressure_mass * p1);
    e.energy_old = u0.dot(f.d.mass * u0) + m.eps * p0.dot(f.d.pressure_mass * p0);
    e.increment = du.dot(f.d.mass * du) + m.eps * dp.dot(f.d.pressure_mass * dp);
    e.dissipation = 2.0 * 5e-3 * m.nu * u1.dot(f.d.stiffness * u1);
    e.work = 2.0 * 5e-3 * F.dot(u1);
    if (k % 20 == 0) CHECK(e.relative_residual() <= 1e-9);
    CHECK(t.kinetic_energy[k] == doctest::Approx(0.5 * u1.dot(f.d.mass * u1)).epsilon(1e-9));
  }
}

TEST_CASE("unforced reduced energy never increases") {
  Fixture f(7, 7);
  RomBuildOptions opt;
  opt.forcing = ForcingKind::None;
  const ReducedModel m = build_reduced_model(f.ub, f.pb, f.d, 0.01, 1e-6, opt);
  std::mt19937_64 rng(44);
  for (double dt : {1e-1, 1e-2, 1e-3}) {
    CAPTURE(dt);
    const RomTrajectory t = run_rom(m, random_state(7, 7, rng), 0.0, dt, 100);
    for (int k = 1; k < t.count(); ++k) {
      const double e0 = t.a_u.col(k - 1).squaredNorm() + m.eps * t.a_p.col(k - 1).squaredNorm();
      const double e1 = t.a_u.col(k).squaredNorm() + m.eps * t.a_p.col(k).squaredNorm();
      CHECK(e1 <= e0 * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("drag and lift traces are linear in the coordinates") {
  Fixture f(4, 4);
  const ReducedModel m = build_reduced_model(f.ub, f.pb, f.d, 0.01, 1e-6);
  const auto& s = testing::small_snapshots();
  const RomState a0 = project_state(f.ub, f.pb, f.d, s.U.col(3), s.P.col(3));
  const RomTrajectory t = run_rom(m, a0, 0.0, 1e-2, 1);
  const auto full = diag::drag_lift(f.d, reconstruct(f.ub, a0.a_u), reconstruct(f.pb, a0.a_p));
  CHECK(t.drag[0] == doctest::Approx(full.drag).epsilon(1e-10));
  CHECK(t.lift[0] == doctest::Approx(full.lift).epsilon(1e-10));
}

TEST_CASE("step cost does not depend on the mesh size") {
  std::mt19937_64 rng(45);
  const auto& coarse = testing::cylinder_disc(0.1);
  const auto& fine = testing::cylinder_disc(0.05);
  REQUIRE(fine.mesh.triangles.size() > 3 * coarse.mesh.triangles.size());
  const auto [uc, pc] = random_bases(coarse, 20, 20, rng);
  const auto [uf, pf] = random_bases(fine, 20, 20, rng);
  const ReducedModel mc = build_reduced_model(uc, pc, coarse, 0.01, 1e-6);
  const ReducedModel mf = build_reduced_model(uf, pf, fine, 0.01, 1e-6);
  const double tc = step_seconds(mc, 1e-3, rng);
  const double tf = step_seconds(mf, 1e-3, rng);
  MESSAGE("step time coarse " << tc << " s, fine " << tf << " s");
  CHECK(tf <= 1.2 * tc);
  CHECK(tf >= 0.8 * tc);
}

TEST_CASE("dimension and configuration errors") {
  Fixture f(3, 2);
  const ReducedModel m = build_reduced_model(f.ub, f.pb, f.d, 0.01, 1e-6);
  CHECK_THROWS_AS(ac_rom_step({Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(2)}, m, 1e-2), DimensionError);
  CHECK_THROWS_AS(RomStepper(m, 0.0), ConfigError);
  CHECK_THROWS_AS(run_rom(m, {Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(2)}, 0.0, 1e-2, -1), ConfigError);
  CHECK_THROWS_AS(reconstruct(f.ub, Eigen::VectorXd::Zero(5)), DimensionError);
  CHECK_THROWS_AS(build_reduced_model(f.pb, f.ub, f.d, 0.01, 1e-6), DimensionError);
  const auto& other = testing::cylinder_disc(0.05);
  CHECK_THROWS_AS(build_reduced_model(f.ub, f.pb, other, 0.01, 1e-6), DimensionError);
}
