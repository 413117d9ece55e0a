#include "floquet/propagator.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <numbers>

using namespace floquet;
namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("zero protocol stays at the identity") {
  const auto g = centered_torus(4, 4, 2);
  const auto traj = evolve(five_step_drive(g, 0, 0, 1.0));
  const Matrix id = Matrix::Identity(g.dim(), g.dim());
  for (double t : traj.times()) CHECK((traj.unitary(t) - id).norm() == 0.0);
  CHECK(traj.times().size() == 5 * 32 + 1);
}

TEST_CASE("static evolution matches the exponential oracle") {
  const auto g = build_geometry(4, 4, 2);
  const Matrix h = oracle::random_hermitian(int(g.dim()), 2);
  const auto traj = evolve(static_drive({g, h}, 1.0));
  CHECK((traj.final_unitary() - oracle::expm_hermitian(h, 1.0)).norm() < 1e-12);
  CHECK((traj.unitary(0.37) - oracle::expm_hermitian(h, 0.37)).norm() < 1e-12);
}

TEST_CASE("samples are unitary and compose") {
  const auto g = centered_torus(6, 6, 2);
  const auto p = add_onsite_disorder(five_step_drive(g, full_coupling(1.0), 0.3, 1.0), {0.5, 4});
  const auto traj = evolve(p);
  CHECK((traj.unitary(0) - Matrix::Identity(g.dim(), g.dim())).norm() == 0.0);
  for (double t : traj.times()) CHECK(unitarity_defect(traj.unitary(t)) < 1e-10);
  CHECK(unitarity_defect(propagator_at(traj, 1.0 / 3).m) < 1e-12);
  CHECK(composition_defect(traj, 1.0, 0.5) < 1e-11);
  CHECK(composition_defect(traj, 0.7, 0.0) < 1e-11);
  CHECK(composition_defect(traj, 0.7, 0.7) < 1e-12);
  // inside a segment U(t) = E_j(t) U(t_j)
  const double tj = traj.breakpoints()[2];
  CHECK((traj.unitary(tj + 0.05) -
         oracle::expm_hermitian(p.segments[2].generator.m, 0.05) * traj.boundary_unitary(2))
            .norm() < 1e-11);
  // grid point returns the stored boundary value
  CHECK((propagator_at(traj, tj).m - traj.boundary_unitary(2)).norm() == 0.0);
}

TEST_CASE("log derivative is the generator seen from U") {
  const auto g = centered_torus(4, 4, 2);
  const auto p = five_step_drive(g, 2.0, 0.6, 1.0);
  const auto traj = evolve(p);
  const double t = 0.45, h = 1e-5;
  const auto s = traj.sample(t, traj.piece_of(t));
  const Matrix du = (traj.unitary(t + h) - traj.unitary(t - h)) / (2 * h);
  CHECK((s.log_derivative - s.unitary.adjoint() * du).norm() < 1e-7);
  CHECK(hermiticity_defect(cplx(0, 1) * s.log_derivative) < 1e-12);
}

TEST_CASE("product path") {
  const auto g = centered_torus(4, 4, 2);
  auto u = std::make_shared<PropagatorTrajectory>(evolve(five_step_drive(g, 2.0, 0.6, 1.0)));
  auto v = std::make_shared<PropagatorTrajectory>(evolve(static_drive(chern_insulator(-1), g, 1.0)));
  ProductPath uv(u, v);
  CHECK(uv.breakpoints().size() == 6);
  const double t = 0.33;
  const auto s = uv.sample(t, 1);
  CHECK((s.unitary - u->unitary(t) * v->unitary(t)).norm() < 1e-12);
  const double h = 1e-5;
  const Matrix du = (u->unitary(t + h) * v->unitary(t + h) - u->unitary(t - h) * v->unitary(t - h)) / (2 * h);
  CHECK((s.log_derivative - s.unitary.adjoint() * du).norm() < 1e-7);
}

TEST_CASE("edge bulk difference") {
  const auto g = centered_torus(8, 8, 2);
  const auto map = half_plane_map(g, 0, 4);
  const auto p = five_step_drive(g, 2 * pi, 1.0, 1.0);
  CHECK(edge_bulk_difference(p, map, 0.0).difference.m.norm() == 0.0);
  const auto onsite = static_drive(disorder_potential(g, {1.0, 3}), 1.0);
  CHECK(edge_bulk_difference(onsite, map, 1.0).difference.m.norm() == 0.0);
  const auto d = edge_bulk_difference(p, map, 1.0);
  CHECK(d.difference.m.norm() > 0.1);
  CHECK(d.profile.exponent > 0);
  CHECK(std::isfinite(d.profile.prefactor));
}

TEST_CASE("evolution config validation") {
  const auto g = centered_torus(4, 4, 2);
  EvolutionConfig cfg;
  cfg.samples_per_segment = 3;
  CHECK_THROWS(evolve(five_step_drive(g, 1, 0, 1), cfg));
  DriveProtocol bad = five_step_drive(g, 1, 0, 1);
  bad.segments[1].generator.m(0, 1) += 1.0;
  CHECK_THROWS(evolve(bad));
  bad = five_step_drive(g, 1, 0, 1);
  bad.segments[0].duration = 0.5;
  CHECK_THROWS(evolve(bad));
}
