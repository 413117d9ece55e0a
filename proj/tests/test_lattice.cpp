#include "floquet/lattice.hpp"
#include "floquet/models.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace floquet;

TEST_CASE("geometry dimensions and basis ordering") {
  CHECK(build_geometry(1, 1, 1).dim() == 1);
  CHECK(build_geometry(16, 16, 2).dim() == 512);
  const auto g = build_geometry(3, 4, 2, -1, 5);
  for (int n1 = -1; n1 < 2; ++n1)
    for (int n2 = 5; n2 < 9; ++n2)
      for (int o = 0; o < 2; ++o) {
        const Index i = g.index(n1, n2, o);
        CHECK(i == ((n1 + 1) * 4 + (n2 - 5)) * 2 + o);
        CHECK(g.coord1(i / 2) == n1);
        CHECK(g.coord2(i / 2) == n2);
      }
  CHECK_THROWS(build_geometry(0, 4, 1));
}

TEST_CASE("edge half geometry of a bulk rectangle") {
  const auto bulk = build_geometry(16, 16, 2);
  const auto map = half_plane_map(bulk, 8, 8);
  CHECK(map.target.L1 == 8);
  CHECK(map.target.L2 == 16);
  CHECK(map.target.origin1 == 8);
  CHECK(map.target.dim() == 256);
}

TEST_CASE("minimum image separation on a torus") {
  const auto g = centered_torus(8, 8, 1);
  CHECK(g.separation(1, -4, 3) == 1);
  CHECK(g.separation(2, 0, 3) == 3);
  CHECK(g.distance(g.site_index(-4, -4), g.site_index(3, 3)) == 2);
  const auto open = build_geometry(8, 8, 1, -4, -4);
  CHECK(open.separation(1, -4, 3) == 7);
}

TEST_CASE("sharp switch is a step projection") {
  const auto g = build_geometry(16, 3, 2, -8, 0);
  const auto s = switch_function(g, 1, 0);
  for (int n1 = -8; n1 < 8; ++n1)
    for (int o = 0; o < 2; ++o) CHECK(s.diag(g.index(n1, 1, o)) == (n1 >= 0 ? 1.0 : 0.0));
  const Matrix l = s.as_operator().m;
  CHECK((l * l - l).norm() == 0.0);
}

TEST_CASE("displaced sharp switches differ on a compact strip") {
  const int L = 10;
  const auto g = build_geometry(L, L, 2, -5, -5);
  const auto a = switch_function(g, 1, 0), b = switch_function(g, 1, 2);
  const RealVector d = a.diag - b.diag;
  CHECK(long((d.array() != 0).count()) == 2 * L * 2);
}

TEST_CASE("smooth switch interpolates monotonically") {
  const auto g = build_geometry(20, 1, 1, -10, 0);
  const auto s = switch_function(g, 1, 0, SwitchKind::smooth, 4);
  CHECK(s.diag(0) == 0.0);
  CHECK(s.diag(19) == 1.0);
  for (int i = 1; i < 20; ++i) CHECK(s.diag(i) >= s.diag(i - 1));
  CHECK(s.diag(g.index(-1, 0, 0)) + s.diag(g.index(0, 0, 0)) == doctest::Approx(1.0));
  CHECK_THROWS(switch_function(g, 1, 30));
}

TEST_CASE("periodic switch jumps back half a period away") {
  const auto g = centered_torus(8, 4, 1);
  const auto s = switch_function(g, 1, 0);
  for (int n1 = -4; n1 < 4; ++n1) CHECK(s.diag(g.index(n1, 0, 0)) == (n1 >= 0 ? 1.0 : 0.0));
  const auto t = switch_function(g, 1, 2);
  for (int n1 = -4; n1 < 4; ++n1) {
    const int off = ((n1 - 2) % 8 + 8) % 8;
    CHECK(t.diag(g.index(n1, 0, 0)) == (off < 4 ? 1.0 : 0.0));
  }
}

TEST_CASE("restriction and embedding") {
  const auto bulk = build_geometry(6, 4, 2);
  const auto map = half_plane_map(bulk, 2, 3);
  const auto id = LatticeOperator::identity(bulk);
  CHECK((restrict_op(id, map).m - Matrix::Identity(map.target.dim(), map.target.dim())).norm() == 0.0);

  const Matrix h = oracle::random_hermitian(int(bulk.dim()), 3);
  const LatticeOperator a{bulk, h};
  const auto e = restrict_op(a, map);
  CHECK((restrict_op(embed(e, map), map).m - e.m).norm() == 0.0);
  CHECK(std::abs(embed(e, map).m.trace() - e.m.trace()) < 1e-12);

  RealVector p(bulk.dim());
  for (Index i = 0; i < bulk.dim(); ++i) {
    const int n1 = bulk.coord1(i / 2);
    p(i) = (n1 >= 2 && n1 < 5) ? 1 : 0;
  }
  const Matrix P = p.cast<cplx>().asDiagonal();
  CHECK((embed(e, map).m - P * h * P).norm() < 1e-13);
  CHECK((embed(restrict_op(id, map), map).m - P).norm() == 0.0);

  Matrix diag = Matrix::Zero(bulk.dim(), bulk.dim());
  for (Index i = 0; i < bulk.dim(); ++i) diag(i, i) = double(i);
  const auto rd = restrict_op({bulk, diag}, map);
  for (Index i = 0; i < rd.dim(); ++i) CHECK(rd.m(i, i).real() == double(map.source_index[i]));
}

TEST_CASE("kernel blocks") {
  const auto g = build_geometry(3, 3, 2);
  const Matrix h = oracle::random_hermitian(int(g.dim()), 5);
  const LatticeOperator a{g, h};
  CHECK((a.block(4, 7) - h.block(8, 14, 2, 2)).norm() == 0.0);
}

TEST_CASE("locality norm bounds") {
  const auto g = build_geometry(6, 6, 2);
  CHECK(locality_norm(LatticeOperator::identity(g), 1.0).prefactor == doctest::Approx(1.0));
  HoppingModel hop;
  hop.n_orb = 2;
  const double J = 0.7;
  hop.add_hermitian(1, 0, J * Matrix::Identity(2, 2));
  const auto p = locality_norm(hop.on(g), 1.0);
  CHECK(p.prefactor == doctest::Approx(J * std::exp(1.0)));
  CHECK(p.local());
}

TEST_CASE("decay fit recovers an exact exponential") {
  const auto g = build_geometry(10, 10, 1);
  Matrix a(g.dim(), g.dim());
  for (Index i = 0; i < g.dim(); ++i)
    for (Index j = 0; j < g.dim(); ++j) a(i, j) = std::exp(-double(g.distance(i, j)));
  const auto p = decay_rate_fit({g, a});
  CHECK(p.exponent == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(p.residual < 1e-8);
  const auto z = decay_rate_fit(LatticeOperator::zero(g));
  CHECK(z.effectively_zero);
}

TEST_CASE("operator diagnostics") {
  const auto g = build_geometry(4, 4, 2);
  const auto d = operator_diagnostics(Matrix::Identity(g.dim(), g.dim()));
  CHECK(d.hermiticity_defect == 0.0);
  CHECK(d.unitarity_defect == 0.0);
  CHECK(d.trace.real() == double(g.dim()));
  const Matrix h = oracle::random_hermitian(32, 9);
  CHECK(hermiticity_defect(h) == 0.0);
  CHECK(unitarity_defect(oracle::expm_hermitian(h, 1.0)) < 1e-12);
}

TEST_CASE("trace windows") {
  const auto g = centered_torus(8, 8, 2);
  const auto w = centered_window(g, 0, 0, 2, 2);
  CHECK(w.indices.size() == 4 * 4 * 2);
  const auto wrap = centered_window(g, -4, 0, 2, 1);
  CHECK(wrap.indices.size() == 4 * 2 * 2);
  for (Index i : wrap.indices) {
    const int n1 = g.coord1(i / 2);
    CHECK((n1 <= -3 || n1 >= 2));
  }
  const auto edge = build_geometry(4, 8, 2, 0, -4, false, true);
  const auto ew = edge_window(edge, 2, 0, 2);
  CHECK(ew.indices.size() == 2 * 4 * 2);
}
