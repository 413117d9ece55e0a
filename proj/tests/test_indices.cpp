#include "floquet/indices.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <numbers>

using namespace floquet;
namespace {
constexpr double pi = std::numbers::pi;

LatticeOperator lower_band(const HoppingModel& h, const LatticeGeometry& g) {
  const auto e = hermitian_eigen(h.on(g).m);
  std::vector<Index> keep;
  for (Index i = 0; i < e.values.size(); ++i)
    if (e.values(i) < 0) keep.push_back(i);
  const Matrix v = e.vectors(Eigen::all, keep);
  return {g, v * v.adjoint()};
}

RelativeConfig fast_config() {
  RelativeConfig cfg;
  cfg.quadrature.samples_per_segment = 16;
  return cfg;
}
}  // namespace

TEST_CASE("report quantization semantics") {
  const auto r = make_report("bulk", cplx(0.97, 1e-9));
  CHECK(r.integer == 1);
  CHECK(r.residual == doctest::Approx(0.03));
  CHECK(r.quantized);
  CHECK_FALSE(make_report("bulk", cplx(0.5, 0)).quantized);
  CHECK_FALSE(make_report("bulk", cplx(1.0, 1e-3)).quantized);
  Tolerances strict;
  strict.quant = 1e-6;
  CHECK_FALSE(make_report("bulk", cplx(0.97, 0), strict).quantized);
}

TEST_CASE("edge index oracles") {
  const auto g = build_geometry(4, 12, 1, 0, -6, false, true);
  const auto s2 = switch_function(g, 2, 0);
  const auto w = edge_window(g, 2, 0, 3);
  CHECK(edge_index(LatticeOperator::identity(g), s2, w).raw == cplx(0, 0));
  // cyclic shift n2 -> n2 + 1 on the column n1 = 0
  Matrix u = Matrix::Identity(g.dim(), g.dim());
  for (int n2 = -6; n2 < 6; ++n2) {
    const int to = n2 == 5 ? -6 : n2 + 1;
    u(g.index(0, n2, 0), g.index(0, n2, 0)) = 0;
    u(g.index(0, to, 0), g.index(0, n2, 0)) = 1;
  }
  const auto r = edge_index({g, u}, s2, w);
  CHECK(std::abs(r.raw - cplx(1, 0)) < 1e-10);
  const auto back = edge_index({g, Matrix(u.adjoint())}, s2, w);
  CHECK(std::abs(back.raw - cplx(-1, 0)) < 1e-10);
  CHECK(edge_pair_index({g, u}, s2, w) == 1);
  const auto smooth = switch_function(g, 2, 0, SwitchKind::smooth, 4);
  CHECK_THROWS(edge_index({g, u}, smooth, w));
}

TEST_CASE("pair of projections") {
  const Matrix p = oracle::random_unitary(6, 2).leftCols(2) * oracle::random_unitary(6, 2).leftCols(2).adjoint();
  CHECK(pair_projection_index(p, p) == 0);
  Matrix r1 = Matrix::Zero(3, 3), r2 = Matrix::Zero(3, 3);
  r1(0, 0) = 1;
  r2(1, 1) = 1;
  CHECK(pair_projection_index(r1, Matrix::Zero(3, 3)) == 1);
  CHECK(pair_projection_index(r1, r2) == 0);
  CHECK(pair_projection_index(Matrix::Zero(3, 3), r2) == -1);
}

TEST_CASE("bulk index basics") {
  const auto g = centered_torus(8, 8, 2);
  const auto sw = bulk_switches(g);
  const auto zero = evolve(five_step_drive(g, 0, 0, 1.0));
  CHECK(bulk_index(zero, sw.s1, sw.s2, sw.window).raw == cplx(0, 0));
  CHECK_THROWS_WITH(bulk_index(evolve(five_step_drive(g, 1.0, 0.3, 1.0)), sw.s1, sw.s2, sw.window),
                    doctest::Contains("relative_gap_indices"));
}

TEST_CASE("projection loops") {
  const auto g = centered_torus(8, 8, 2);
  const auto sw = bulk_switches(g);
  const double T = 1.0;
  for (const auto& p : {LatticeOperator::zero(g), LatticeOperator::identity(g)}) {
    const auto traj = evolve(projection_loop(p, T));
    CHECK((traj.final_unitary() - Matrix::Identity(g.dim(), g.dim())).norm() < 1e-10);
    CHECK(std::abs(bulk_index(traj, sw.s1, sw.s2, sw.window).raw) < 1e-12);
  }
  const auto P = lower_band(chern_insulator(-1), g);
  const auto traj = evolve(projection_loop(P, T));
  CHECK((traj.final_unitary() - Matrix::Identity(g.dim(), g.dim())).norm() < 1e-10);
  const auto c = chern_number(P, sw.s1.diag, sw.s2.diag, sw.window);
  const auto b = bulk_index(traj, sw.s1, sw.s2, sw.window);
  CHECK(std::abs(b.raw - c.raw) < 1e-8);
  CHECK(b.integer == 1);
  CHECK_THROWS(projection_loop({g, 0.5 * Matrix::Identity(g.dim(), g.dim())}, T));
}

TEST_CASE("relative gap indices") {
  const auto g = centered_torus(8, 8, 2);
  const auto map = half_plane_map(g, 0, 4);
  const double T = 1.0;
  const auto cfg = fast_config();
  SUBCASE("zero protocol") {
    const auto r = relative_gap_indices(five_step_drive(g, 0, 0, T), 0.7 * pi / T, map, cfg);
    CHECK(std::abs(r.bulk.raw) < 1e-12);
    CHECK(std::abs(r.edge.raw) < 1e-12);
  }
  SUBCASE("five-step at full coupling") {
    const auto r = relative_gap_indices(five_step_drive(g, full_coupling(T), 0.3, T), pi / T, map, cfg);
    CHECK(r.bulk.integer == 1);
    CHECK(r.edge.integer == 1);
    CHECK(r.edge_two_term.integer == 1);
    CHECK(std::abs(r.edge.raw - r.edge_two_term.raw) < 1e-8);
    CHECK(r.bulk.residual < 0.05);
    CHECK(r.loop_defect < 1e-10);
  }
  SUBCASE("static Chern insulator in the gap at infinity") {
    const auto r = relative_gap_indices(static_drive(chern_insulator(-1), g, T), pi / T, map, cfg);
    CHECK(r.bulk.integer == 0);
    CHECK(r.edge.integer == 0);
    CHECK(r.bulk.residual < 0.05);
  }
  SUBCASE("quasi-energy on a band") {
    const auto p = static_drive(chern_insulator(-1), g, T);
    const auto s = eigendecompose_unitary(evolve(p).final_unitary());
    const double eps = -s.phases(0) / T;
    CHECK_THROWS_WITH(relative_gap_indices(p, eps, map, cfg), doctest::Contains("gap validation failed"));
  }
}

TEST_CASE("interface index") {
  const auto g = centered_torus(8, 8, 2);
  const double T = 1.0;
  const auto sw = bulk_switches(g);
  const auto w = interface_window(g);
  const auto p = five_step_drive(g, full_coupling(T), 0.0, T);
  const auto ub = evolve(p).final_unitary();
  InterfaceSpec joined{p, p, std::nullopt, 0};
  double cross = 0;
  for (std::size_t j = 0; j < p.segments.size(); ++j)
    cross += (p.segments[j].generator.m - interface_hamiltonian(joined).segments[j].generator.m).norm();
  CHECK(cross > 0);
  // restoring every cross-cut hopping gives back the bulk propagator
  std::vector<Segment> restore;
  for (std::size_t j = 0; j < p.segments.size(); ++j) {
    const Matrix full = p.segments[j].generator.m;
    const Matrix part = interface_hamiltonian(joined).segments[j].generator.m;
    restore.push_back({p.segments[j].duration, {g, full - part}, std::nullopt});
  }
  joined.coupling = DriveProtocol{T, restore};
  const auto ui = evolve(interface_hamiltonian(joined)).final_unitary();
  CHECK(std::abs(interface_index({g, ui}, {g, ub}, sw.s2, w).raw) < 1e-10);

  InterfaceSpec cut{p, static_drive(LatticeOperator::zero(g), T), std::nullopt, 0};
  const auto u_cut = evolve(interface_hamiltonian(cut)).final_unitary();
  const auto r = interface_index({g, u_cut}, LatticeOperator::identity(g), sw.s2, w);
  CHECK(r.integer == 1);
  CHECK(r.residual < 1e-8);
}

TEST_CASE("Bloch winding numbers") {
  const double T = 1.0;
  const auto g = centered_torus(4, 4, 2);
  SUBCASE("identity map") {
    const auto grid = bloch_grid(five_step_drive(g, 0, 0, T), 8, 8, 10);
    CHECK(std::abs(winding_3d(grid).raw) < 1e-14);
  }
  SUBCASE("five-step relative loop") {
    const auto grid = bloch_relative_grid(five_step_drive(g, full_coupling(T), 0.3, T), pi / T, 24, 24, 40);
    const auto w = winding_3d(grid);
    CHECK(w.integer == 1);
    CHECK(w.residual < 0.05);
  }
  SUBCASE("static model relative loop in the gap at infinity") {
    const auto grid = bloch_relative_grid(static_drive(chern_insulator(-1), g, T), pi / T, 16, 16, 16);
    CHECK(std::abs(winding_3d(grid).raw) < 1e-6);
  }
  SUBCASE("non-loop rejected") {
    const auto grid = bloch_grid(five_step_drive(g, 1.0, 0.3, T), 8, 8, 10);
    CHECK_THROWS(winding_3d(grid));
  }
}

TEST_CASE("edge winding in k2") {
  const double T = 1.0;
  CHECK(std::abs(winding_k2([](double) { return Matrix(Matrix::Identity(6, 6)); }, 32, 2, 2).raw) < 1e-14);
  // with H(k) = sum_d e^{ikd} H_{0,d}, a forward shift along the edge is e^{-ik}
  auto inserter = [](double sign) {
    return [sign](double k) {
      Matrix u = Matrix::Identity(6, 6);
      u(0, 0) = std::exp(cplx(0, sign * k));
      return u;
    };
  };
  CHECK(std::abs(winding_k2(inserter(-1), 64, 1, 2).raw - cplx(1, 0)) < 0.01);
  CHECK(std::abs(winding_k2(inserter(1), 64, 1, 2).raw - cplx(-1, 0)) < 0.01);
  const auto p = five_step_drive(centered_torus(4, 4, 2), full_coupling(T), 0.0, T);
  const auto w = winding_k2([&](double k) { return strip_propagator(p, 8, k); }, 64, 4, 2);
  CHECK(w.integer == 1);
  CHECK(w.residual < 0.05);
}

TEST_CASE("edge index agrees with strip winding") {
  const double T = 1.0;
  const auto g = centered_torus(8, 8, 2);
  const auto map = half_plane_map(g, 0, 4);
  const auto p = five_step_drive(g, full_coupling(T), 0.0, T);
  const auto es = edge_switches(map.target);
  const auto ue = evolve(restrict_protocol(p, map)).final_unitary();
  const auto e = edge_index({map.target, ue}, es.s2, es.window);
  const auto w = winding_k2([&](double k) { return strip_propagator(p, 4, k); }, 64, 2, 2);
  CHECK(e.integer == w.integer);
}

TEST_CASE("additivity") {
  const auto g = centered_torus(8, 8, 2);
  const auto sw = bulk_switches(g);
  const double T = 1.0;
  auto u = std::make_shared<PropagatorTrajectory>(evolve(projection_loop(lower_band(chern_insulator(-1), g), T)));
  auto id = std::make_shared<PropagatorTrajectory>(evolve(static_drive(LatticeOperator::zero(g), T)));
  CHECK(additivity_check(u, id, sw).defect < 1e-10);
  const auto two = additivity_check(u, u, sw);
  CHECK(two.product.integer == 2);
  CHECK(two.defect < 0.05);
}

TEST_CASE("quasi-energy shift") {
  const auto g = centered_torus(8, 8, 2);
  const auto map = half_plane_map(g, 0, 4);
  const double T = 1.0;
  auto cfg = fast_config();
  cfg.compute_edge = false;
  const auto p = static_drive(chern_insulator(-1), g, T);
  SUBCASE("same gap") {
    const auto r = epsilon_shift_check(p, pi / T - 0.1, pi / T + 0.1, map, cfg);
    CHECK(std::abs(r.delta_bulk) < 1e-8);
    CHECK(std::abs(r.chern.raw) < 1e-12);
  }
  SUBCASE("full turn") {
    const auto r = epsilon_shift_check(p, pi / T, 3 * pi / T, map, cfg);
    CHECK(std::abs(r.delta_bulk) < 1e-6);
    CHECK(std::abs(r.chern.raw) < 1e-12);
  }
  SUBCASE("across the upper band") {
    const auto r = epsilon_shift_check(p, 0.0, pi / T, map, cfg);
    CHECK(r.defect < 0.1);
    CHECK(r.chern.integer == -1);
  }
  SUBCASE("five-step at partial coupling across one band") {
    const auto drive = five_step_drive(g, 2 * pi / T, 1.0, T);
    const auto r = epsilon_shift_check(drive, 0.0, pi / T, map, cfg);
    CHECK(r.defect < 0.1);
  }
}

TEST_CASE("algebraic identities") {
  const double T = 1.0;
  SUBCASE("trivial loop") {
    const auto g = centered_torus(4, 4, 1);
    const auto id = evolve(static_drive(LatticeOperator::zero(g), T));
    const auto s = switch_function(g, 1, 0), t = switch_function(g, 2, 0);
    const std::vector<double> times{0.1, 0.5};
    CHECK(additivity_identity_defect(id, id, s.diag, t.diag, times) == 0.0);
    CHECK(bulk_edge_identity_defect(id, t.diag, s.diag, times) == 0.0);
  }
  SUBCASE("random two-site pair") {
    const auto g = build_geometry(2, 1, 1);
    const Matrix a = oracle::random_hermitian(2, 31), b = oracle::random_hermitian(2, 32);
    const auto u = evolve(static_drive({g, a}, T));
    const auto v = evolve(static_drive({g, b}, T));
    RealVector l1(2), l2(2), p(2);
    l1 << 0, 1;
    l2 << 0.3, 1;
    p << 1, 0;
    const std::vector<double> times{0.2, 0.7};
    CHECK(additivity_identity_defect(u, v, l1, l2, times) < 1e-10);
    CHECK(bulk_edge_identity_defect(u, l2, p, times) < 1e-10);
    CHECK(chern_identity_defect(Matrix(0.5 * Matrix::Ones(2, 2)), l1, l2, {0.4, 2.0}) < 1e-10);
  }
  SUBCASE("five-step drive") {
    const auto g = centered_torus(6, 6, 2);
    auto u = std::make_shared<PropagatorTrajectory>(evolve(five_step_drive(g, 2.0, 0.4, T)));
    auto v = std::make_shared<PropagatorTrajectory>(
        evolve(add_onsite_disorder(static_drive(chern_insulator(-1), g, T), {0.5, 3})));
    const auto sw = bulk_switches(g, {0, 0, SwitchKind::smooth, 3});
    RealVector p1 = RealVector::Zero(g.dim());
    for (Index i = 0; i < g.dim(); ++i) p1(i) = g.coord1(i / 2) >= 0 ? 1 : 0;
    const auto table = algebraic_identity_suite(*u, *v, sw.s1.diag, sw.s2.diag, p1,
                                                lower_band(chern_insulator(-1), g).m, {0.3 * T, 0.55 * T}, 5);
    CHECK(table.size() == 4);
    for (const auto& row : table) {
      INFO(row.name);
      CHECK(row.defect < 1e-8);
    }
  }
}

TEST_CASE("indices are constant along a disorder ramp") {
  const auto g = centered_torus(8, 8, 2);
  const auto map = half_plane_map(g, 0, 4);
  const double T = 1.0, J = full_coupling(T);
  for (int step = 0; step <= 4; ++step) {
    const double w = 0.1 * J * step / 4;
    const auto r = relative_gap_indices(add_onsite_disorder(five_step_drive(g, J, 0.3, T), {w, 3}), pi / T, map,
                                        fast_config());
    CAPTURE(w);
    CHECK(r.bulk.integer == 1);
    CHECK(r.edge.integer == 1);
  }
}
