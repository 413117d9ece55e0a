#include "floquet/indices.hpp"

#include "floquet/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace floquet {

namespace {

constexpr double pi = std::numbers::pi;
const cplx I(0, 1);

Matrix comm(const Matrix& a, const Matrix& b) { return a * b - b * a; }

// Sum over window indices i of (V^* L V - L)_ii.
cplx windowed_pump(const Matrix& v, const RealVector& lam, const TraceWindow& window) {
  cplx total = 0;
  for (Index i : window.indices) total += v.col(i).cwiseAbs2().dot(lam) - lam(i);
  return total;
}

// Square-rooted switch rows sqrt(l) U restricted to the support of l.
struct SwitchRows {
  Matrix rows;                 // |S| x n
  std::vector<Index> support;
};

SwitchRows switch_rows(const Matrix& u, const RealVector& lam) {
  SwitchRows out;
  for (Index i = 0; i < lam.size(); ++i)
    if (lam(i) != 0) out.support.push_back(i);
  RealVector root(out.support.size());
  for (std::size_t k = 0; k < out.support.size(); ++k) root(Index(k)) = std::sqrt(lam(out.support[k]));
  out.rows = root.cast<cplx>().asDiagonal() * u(out.support, Eigen::all);
  return out;
}

double simpson(const std::vector<cplx>& f, double h, int stride, cplx* out_sum) {
  const std::size_t m = (f.size() - 1) / stride;
  cplx s = f.front() + f.back();
  for (std::size_t k = 1; k < m; ++k) s += (k % 2 ? 4.0 : 2.0) * f[k * stride];
  *out_sum = s * (h * stride / 3.0);
  return 0;
}

std::size_t piece_at(const std::vector<double>& b, double t) {
  std::size_t j = 0;
  while (j + 2 < b.size() && b[j + 1] <= t) ++j;
  return j;
}

void describe(IndexReport& r, const TraceWindow& w, std::vector<int> jumps, int L) {
  r.window_r1 = w.radius1;
  r.window_r2 = w.radius2;
  r.switch_jumps = std::move(jumps);
  r.L = L;
}

}  // namespace

BulkSwitches bulk_switches(const LatticeGeometry& g, const SwitchPlacement& p) {
  BulkSwitches out;
  out.s1 = switch_function(g, 1, p.c1, p.kind, p.width);
  out.s2 = switch_function(g, 2, p.c2, p.kind, p.width);
  out.window = interface_window(g, p);
  return out;
}

TraceWindow interface_window(const LatticeGeometry& g, const SwitchPlacement& p) {
  const int r1 = p.bulk_radius1 > 0 ? p.bulk_radius1 : std::max(1, g.L1 / 4);
  const int r2 = p.bulk_radius2 > 0 ? p.bulk_radius2 : std::max(1, g.L2 / 4);
  return centered_window(g, p.c1, p.c2, r1, r2);
}

EdgeSwitches edge_switches(const LatticeGeometry& edge, const SwitchPlacement& p) {
  EdgeSwitches out;
  out.s2 = switch_function(edge, 2, p.c2, p.kind, p.width);
  const int r = p.edge_radius > 0 ? p.edge_radius : std::max(1, edge.L1 / 2);
  const int r2 = p.bulk_radius2 > 0 ? p.bulk_radius2 : std::max(1, edge.L2 / 4);
  out.window = edge_window(edge, r, p.c2, r2);
  return out;
}

IndexReport edge_index(const LatticeOperator& u_edge, const SwitchFunction& s2, const TraceWindow& window,
                       const Tolerances& tol) {
  if (!(s2.geometry == u_edge.geometry)) throw std::invalid_argument("edge_index: geometry mismatch");
  if (window.radius1 <= s2.width - 1)
    throw std::invalid_argument("edge_index: window radius does not exceed the switch smoothing width");
  IndexReport r = make_report("edge", windowed_pump(u_edge.m, s2.diag, window), tol);
  describe(r, window, {s2.jump}, u_edge.geometry.L2);
  return r;
}

IndexReport two_term_edge_index(const Matrix& u1, const Matrix& u2, const SwitchFunction& s2,
                                const TraceWindow& window, const Tolerances& tol) {
  cplx total = 0;
  for (Index i : window.indices)
    total += u2.row(i).cwiseAbs2().dot(s2.diag) - u1.row(i).cwiseAbs2().dot(s2.diag);
  IndexReport r = make_report("edge_two_term", total, tol);
  describe(r, window, {s2.jump}, s2.geometry.L2);
  return r;
}

long pair_projection_index(const Matrix& p, const Matrix& q, double tolerance) {
  Matrix d = p - q;
  d = (0.5 * (d + d.adjoint())).eval();
  const auto e = hermitian_eigen(d);
  long count = 0;
  for (Index i = 0; i < e.values.size(); ++i) {
    const double x = e.values(i);
    const double near = std::min(std::abs(x - 1), std::abs(x + 1));
    if (near < tolerance)
      count += x > 0 ? 1 : -1;
    else if (near < 2 * tolerance) {
      std::ostringstream msg;
      msg << "pair_projection_index: eigenvalue " << x
          << " in the ambiguous band; use a larger system or review the tolerance";
      throw std::runtime_error(msg.str());
    }
  }
  return count;
}

long edge_pair_index(const LatticeOperator& u_edge, const SwitchFunction& s2, const TraceWindow& window,
                     double tolerance) {
  const auto& w = window.indices;
  const Matrix b = u_edge.m(Eigen::all, w);
  const Matrix p = b.adjoint() * s2.diag.cast<cplx>().asDiagonal() * b;
  const Matrix q = s2.diag(w).cast<cplx>().asDiagonal();
  return pair_projection_index(p, q, tolerance);
}

cplx bulk_integrand(const PathSample& s, const RealVector& l1, const RealVector& l2, const TraceWindow& window) {
  // With A_j = U^* L_j U - L_j = B_j^* B_j - L_j, only the window rows of G A_j
  // and the window columns of A_j are needed.
  const auto& w = window.indices;
  const Matrix gw = s.log_derivative(w, Eigen::all);
  const auto b1 = switch_rows(s.unitary, l1);
  const auto b2 = switch_rows(s.unitary, l2);
  auto left = [&](const SwitchRows& b, const RealVector& lam) {
    Matrix x = (gw * b.rows.adjoint()) * b.rows;
    x -= gw * lam.cast<cplx>().asDiagonal();
    return x;
  };
  auto right = [&](const SwitchRows& b, const RealVector& lam) {
    Matrix x = b.rows.adjoint() * b.rows(Eigen::all, w);
    for (std::size_t k = 0; k < w.size(); ++k) x(w[k], Index(k)) -= lam(w[k]);
    return x;
  };
  const Matrix g1 = left(b1, l1), g2 = left(b2, l2);
  const Matrix a1 = right(b1, l1), a2 = right(b2, l2);
  return g1.cwiseProduct(a2.transpose()).sum() - g2.cwiseProduct(a1.transpose()).sum();
}

IndexReport bulk_index(const LoopPath& path, const SwitchFunction& s1, const SwitchFunction& s2,
                       const TraceWindow& window, const QuadratureConfig& q, const Tolerances& tol) {
  const Matrix u_T = path.final_unitary();
  const double loop = (u_T - Matrix::Identity(u_T.rows(), u_T.cols())).norm();
  if (loop > tol.loop) {
    std::ostringstream msg;
    msg << "bulk_index: loop condition violated, ||U(T) - I|| = " << loop
        << "; use relative_gap_indices for a propagator that is not periodic";
    throw std::invalid_argument(msg.str());
  }
  if (q.samples_per_segment < 2 || q.samples_per_segment % 2)
    throw std::invalid_argument("bulk_index: samples_per_segment must be even and >= 2");
  const int m = q.samples_per_segment;
  const int fine = q.check_refinement ? 2 * m : m;
  const auto b = path.breakpoints();
  cplx coarse_total = 0, fine_total = 0;
  for (std::size_t j = 0; j + 1 < b.size(); ++j) {
    const double t0 = b[j], t1 = b[j + 1];
    if (t1 <= t0) continue;
    const double h = (t1 - t0) / fine;
    std::vector<cplx> f(fine + 1);
    for (int k = 0; k <= fine; ++k)
      f[k] = bulk_integrand(path.sample(k == fine ? t1 : t0 + k * h, j), s1.diag, s2.diag, window);
    cplx part;
    simpson(f, h, 1, &part);
    fine_total += part;
    if (q.check_refinement) {
      simpson(f, h, 2, &part);
      coarse_total += part;
    }
  }
  IndexReport r = make_report("bulk", 0.5 * fine_total, tol);
  describe(r, window, {s1.jump, s2.jump}, path.geometry().L1);
  r.quadrature = fine;
  if (q.check_refinement && std::abs(0.5 * (fine_total - coarse_total)) > tol.refinement)
    r.flags.push_back("quadrature_unconverged");
  return r;
}

DriveProtocol projection_loop(const LatticeOperator& p, double T) {
  const double d = projection_defect(p.m);
  if (d > 1e-8)
    throw std::invalid_argument("projection_loop: input is not a projection (defect " + std::to_string(d) + ")");
  DriveProtocol out;
  out.period = T;
  out.segments.push_back({T / 2, LatticeOperator::zero(p.geometry), std::nullopt});
  Matrix h = (-4 * pi / T) * p.m;
  h = (0.5 * (h + h.adjoint())).eval();
  out.segments.push_back({T / 2, {p.geometry, std::move(h)}, std::nullopt});
  out.validate();
  return out;
}

RelativeGapResult relative_gap_indices(const DriveProtocol& protocol, double eps, const RestrictionMap& edge_map,
                                       const RelativeConfig& cfg) {
  const double T = protocol.period;
  const auto& g = protocol.geometry();
  RelativeGapResult out;
  {
    const auto traj = evolve(protocol, cfg.evolution);
    out.one_period = traj.final_unitary();
  }
  const auto spectrum = eigendecompose_unitary(out.one_period);
  out.gap = validate_gap(spectrum, eps, T, cfg.min_width);
  out.effective_hamiltonian = effective_hamiltonian(spectrum, g, eps, T, cfg.min_width);
  const auto vacuum = effective_vacuum_protocol(out.effective_hamiltonian, T);
  const auto rel = relative_protocol(protocol, vacuum);
  const auto traj = evolve(rel, cfg.evolution);
  const Matrix u_rel = traj.final_unitary();
  out.loop_defect = (u_rel - Matrix::Identity(u_rel.rows(), u_rel.cols())).norm();
  if (out.loop_defect > cfg.tol.loop) {
    std::ostringstream msg;
    msg << "relative loop fails U_rel(T) = I: defect " << out.loop_defect;
    throw std::runtime_error(msg.str());
  }
  const auto sw = bulk_switches(g, cfg.placement);
  out.bulk = bulk_index(traj, sw.s1, sw.s2, sw.window, cfg.quadrature, cfg.tol);
  out.bulk.kind = "bulk_rel";
  if (cfg.compute_edge) {
    const auto es = edge_switches(edge_map.target, cfg.placement);
    const auto edge_rel = evolve(restrict_protocol(rel, edge_map), cfg.evolution);
    out.edge = edge_index({edge_map.target, edge_rel.final_unitary()}, es.s2, es.window, cfg.tol);
    out.edge.kind = "edge_rel";
    const auto edge_drive = evolve(restrict_protocol(protocol, edge_map), cfg.evolution);
    const Matrix u2 = exp_hermitian(restrict_op(out.effective_hamiltonian, edge_map).m, T);
    out.edge_two_term = two_term_edge_index(edge_drive.final_unitary(), u2, es.s2, es.window, cfg.tol);
  }
  return out;
}

IndexReport interface_index(const LatticeOperator& u_interface, const LatticeOperator& u_bulk,
                            const SwitchFunction& s2, const TraceWindow& window, const Tolerances& tol) {
  const Matrix v = u_bulk.m.adjoint() * u_interface.m;
  IndexReport r = make_report("interface", windowed_pump(v, s2.diag, window), tol);
  describe(r, window, {s2.jump}, u_interface.geometry.L1);
  return r;
}

BlochGrid bloch_grid(const std::vector<BlochPiece>& pieces, int n_orb, double T, int n_k1, int n_k2, int n_t) {
  if (n_k1 < 3 || n_k2 < 3 || n_t < 1) throw std::invalid_argument("bloch_grid: grid too small");
  BlochGrid grid;
  grid.n_k1 = n_k1;
  grid.n_k2 = n_k2;
  grid.n_orb = n_orb;
  grid.period = T;
  std::vector<int> counts;
  for (const auto& p : pieces) {
    const int c = p.duration > 0 ? std::max(1, int(std::lround(n_t * p.duration / T))) : 0;
    counts.push_back(c);
    for (int k = 0; k < c; ++k) {
      grid.times.push_back(0);  // filled below
      grid.weights.push_back(p.duration / c);
    }
  }
  grid.n_t = int(grid.times.size());
  const std::size_t nk = std::size_t(n_k1) * n_k2;
  grid.unitary.resize(grid.n_t * nk);
  grid.log_derivative.resize(grid.n_t * nk);
  grid.final_unitary.resize(nk);
  {
    int it = 0;
    double start = 0;
    for (std::size_t j = 0; j < pieces.size(); ++j) {
      for (int k = 0; k < counts[j]; ++k) grid.times[it++] = start + (k + 0.5) * pieces[j].duration / counts[j];
      start += pieces[j].duration;
    }
  }
  for (int i1 = 0; i1 < n_k1; ++i1)
    for (int i2 = 0; i2 < n_k2; ++i2) {
      Matrix u = Matrix::Identity(n_orb, n_orb);
      int it = 0;
      for (std::size_t j = 0; j < pieces.size(); ++j) {
        if (pieces[j].duration <= 0) continue;
        const Matrix h = pieces[j].generator(i1, i2);
        Eigen::SelfAdjointEigenSolver<Matrix> es(h);
        const Matrix& v = es.eigenvectors();
        const RealVector& e = es.eigenvalues();
        auto step = [&](double tau) {
          Vector ph = (e * (-tau)).unaryExpr([](double x) { return std::exp(cplx(0, x)); });
          return Matrix(v * ph.asDiagonal() * v.adjoint() * u);
        };
        for (int k = 0; k < counts[j]; ++k, ++it) {
          const double tau = (k + 0.5) * pieces[j].duration / counts[j];
          const std::size_t idx = (std::size_t(it) * n_k1 + i1) * n_k2 + i2;
          grid.unitary[idx] = step(tau);
          grid.log_derivative[idx] = -I * grid.unitary[idx].adjoint() * h * grid.unitary[idx];
        }
        u = step(pieces[j].duration);
      }
      grid.final_unitary[std::size_t(i1) * n_k2 + i2] = u;
    }
  return grid;
}

BlochGrid bloch_grid(const DriveProtocol& p, int n_k1, int n_k2, int n_t) {
  if (!p.translation_invariant()) throw std::invalid_argument("bloch_grid: protocol has no Bloch form");
  std::vector<BlochPiece> pieces;
  for (const auto& s : p.segments) {
    const HoppingModel h = *s.bloch;
    pieces.push_back({s.duration, [h, n_k1, n_k2](int i1, int i2) {
                        return h.bloch(2 * pi * i1 / n_k1, 2 * pi * i2 / n_k2);
                      }});
  }
  return bloch_grid(pieces, p.segments.front().bloch->n_orb, p.period, n_k1, n_k2, n_t);
}

BlochGrid bloch_relative_grid(const DriveProtocol& p, double eps, int n_k1, int n_k2, int n_t) {
  if (!p.translation_invariant()) throw std::invalid_argument("bloch_relative_grid: protocol has no Bloch form");
  const double T = p.period;
  const int n_orb = p.segments.front().bloch->n_orb;
  const double alpha = -T * eps;
  // effective Hamiltonian k by k, same branch convention as the real-space route
  auto heff = std::make_shared<std::vector<Matrix>>(std::size_t(n_k1) * n_k2);
  for (int i1 = 0; i1 < n_k1; ++i1)
    for (int i2 = 0; i2 < n_k2; ++i2) {
      const double k1 = 2 * pi * i1 / n_k1, k2 = 2 * pi * i2 / n_k2;
      Matrix u = Matrix::Identity(n_orb, n_orb);
      for (const auto& s : p.segments) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(s.bloch->bloch(k1, k2));
        Vector ph = (es.eigenvalues() * (-s.duration)).unaryExpr([](double x) { return std::exp(cplx(0, x)); });
        u = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint() * u;
      }
      Eigen::ComplexSchur<Matrix> cs(u);
      const Matrix& z = cs.matrixU();
      RealVector energy(n_orb);
      for (int a = 0; a < n_orb; ++a) {
        const double theta = std::arg(cs.matrixT()(a, a));
        const double off = std::fmod(std::fmod(theta - alpha, 2 * pi) + 2 * pi, 2 * pi);
        if (std::min(off, 2 * pi - off) < 1e-6)
          throw std::invalid_argument("bloch_relative_grid: quasi-energy not in a gap of U(T, k)");
        energy(a) = -(alpha - 2 * pi + off) / T;
      }
      Matrix h = z * energy.cast<cplx>().asDiagonal() * z.adjoint();
      (*heff)[std::size_t(i1) * n_k2 + i2] = 0.5 * (h + h.adjoint());
    }
  std::vector<BlochPiece> pieces;
  for (const auto& s : p.segments) {
    const HoppingModel h = s.bloch->scaled(2.0);
    pieces.push_back({s.duration / 2, [h, n_k1, n_k2](int i1, int i2) {
                        return h.bloch(2 * pi * i1 / n_k1, 2 * pi * i2 / n_k2);
                      }});
  }
  pieces.push_back({T / 2, [heff, n_k2](int i1, int i2) -> Matrix {
                      return -2.0 * (*heff)[std::size_t(i1) * n_k2 + i2];
                    }});
  return bloch_grid(pieces, n_orb, T, n_k1, n_k2, n_t);
}

IndexReport winding_3d(const BlochGrid& grid, const Tolerances& tol) {
  double loop = 0;
  for (const auto& u : grid.final_unitary)
    loop = std::max(loop, (u - Matrix::Identity(u.rows(), u.cols())).norm());
  if (loop > tol.loop) {
    std::ostringstream msg;
    msg << "winding_3d: loop condition violated, max_k ||U(T,k) - I|| = " << loop;
    throw std::invalid_argument(msg.str());
  }
  const double dk1 = 2 * pi / grid.n_k1, dk2 = 2 * pi / grid.n_k2;
  cplx total = 0;
  for (int it = 0; it < grid.n_t; ++it) {
    cplx slice = 0;
    for (int i1 = 0; i1 < grid.n_k1; ++i1)
      for (int i2 = 0; i2 < grid.n_k2; ++i2) {
        const Matrix& u = grid.u(it, i1, i2);
        const Matrix d1 = (grid.u(it, (i1 + 1) % grid.n_k1, i2) - grid.u(it, (i1 + grid.n_k1 - 1) % grid.n_k1, i2)) / (2 * dk1);
        const Matrix d2 = (grid.u(it, i1, (i2 + 1) % grid.n_k2) - grid.u(it, i1, (i2 + grid.n_k2 - 1) % grid.n_k2)) / (2 * dk2);
        const Matrix a1 = u.adjoint() * d1, a2 = u.adjoint() * d2;
        const Matrix& g = grid.log_derivative[(std::size_t(it) * grid.n_k1 + i1) * grid.n_k2 + i2];
        slice += (g * comm(a1, a2)).trace();
      }
    total += grid.weights[it] * slice;
  }
  IndexReport r = make_report("winding_3d", -total * dk1 * dk2 / (8 * pi * pi), tol);
  r.quadrature = grid.n_t;
  r.L = grid.n_k1;
  return r;
}

Matrix strip_propagator(const DriveProtocol& p, int L1, double k2) {
  if (!p.translation_invariant()) throw std::invalid_argument("strip_propagator: protocol has no Bloch form");
  const int n = L1 * p.segments.front().bloch->n_orb;
  Matrix u = Matrix::Identity(n, n);
  for (const auto& s : p.segments) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(s.bloch->strip(L1, k2));
    Vector ph = (es.eigenvalues() * (-s.duration)).unaryExpr([](double x) { return std::exp(cplx(0, x)); });
    u = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint() * u;
  }
  return u;
}

IndexReport winding_k2(const std::function<Matrix(double)>& u_of_k, int n_k, int r, int n_orb,
                       const Tolerances& tol) {
  if (n_k < 3) throw std::invalid_argument("winding_k2: need at least 3 k-points");
  auto sum = [&](int n) {
    std::vector<Matrix> u(n);
    for (int i = 0; i < n; ++i) u[i] = u_of_k(2 * pi * i / n);
    const double dk = 2 * pi / n;
    const Index q = Index(r) * n_orb;
    cplx total = 0;
    for (int i = 0; i < n; ++i) {
      const Matrix d = (u[(i + 1) % n] - u[(i + n - 1) % n]) / (2 * dk);
      const Index dim = std::min<Index>(q, u[i].rows());
      total += (u[i].adjoint() * d).topLeftCorner(dim, dim).trace() * dk;
    }
    return I * total / (2 * pi);
  };
  const cplx coarse = sum(n_k);
  const cplx fine = sum(2 * n_k);
  if (std::abs(fine - coarse) > 0.1) {
    std::ostringstream msg;
    msg << "winding_k2: grid too coarse, value moves by " << std::abs(fine - coarse) << " under doubling";
    throw std::runtime_error(msg.str());
  }
  IndexReport rep = make_report("winding_k2", coarse, tol);
  rep.window_r1 = r;
  rep.quadrature = n_k;
  return rep;
}

AdditivityResult additivity_check(std::shared_ptr<const LoopPath> u, std::shared_ptr<const LoopPath> v,
                                  const BulkSwitches& sw, const QuadratureConfig& q, const Tolerances& tol) {
  AdditivityResult out;
  out.first = bulk_index(*u, sw.s1, sw.s2, sw.window, q, tol);
  out.second = bulk_index(*v, sw.s1, sw.s2, sw.window, q, tol);
  ProductPath uv(u, v);
  out.product = bulk_index(uv, sw.s1, sw.s2, sw.window, q, tol);
  out.product.kind = "bulk_product";
  out.lhs = out.product.raw.real();
  out.rhs = out.first.raw.real() + out.second.raw.real();
  out.defect = std::abs(out.lhs - out.rhs);
  return out;
}

EpsilonShiftResult epsilon_shift_check(const DriveProtocol& protocol, double eps, double eps_prime,
                                       const RestrictionMap& edge_map, RelativeConfig cfg) {
  const double T = protocol.period;
  if (eps_prime < eps || T * (eps_prime - eps) > 2 * pi * (1 + 1e-12))
    throw std::invalid_argument("epsilon_shift_check: need 0 <= eps' - eps <= 2pi/T");
  EpsilonShiftResult out;
  out.at_eps = relative_gap_indices(protocol, eps, edge_map, cfg);
  out.at_eps_prime = relative_gap_indices(protocol, eps_prime, edge_map, cfg);
  const auto& g = protocol.geometry();
  const auto spectrum = eigendecompose_unitary(out.at_eps.one_period);
  const auto p = arc_projection(spectrum, g, eps, eps_prime, T, cfg.min_width);
  const auto sw = bulk_switches(g, cfg.placement);
  out.chern = chern_number(p, sw.s1.diag, sw.s2.diag, sw.window, cfg.tol);
  out.chern.switch_jumps = {sw.s1.jump, sw.s2.jump};
  out.chern.L = g.L1;
  out.delta_bulk = out.at_eps_prime.bulk.raw.real() - out.at_eps.bulk.raw.real();
  out.defect = std::abs(out.delta_bulk - out.chern.raw.real());
  return out;
}

double additivity_identity_defect(const LoopPath& u, const LoopPath& v, const RealVector& l1,
                                  const RealVector& l2, const std::vector<double>& times) {
  const auto bu = u.breakpoints(), bv = v.breakpoints();
  const Matrix L1 = l1.cast<cplx>().asDiagonal(), L2 = l2.cast<cplx>().asDiagonal();
  double worst = 0;
  for (double t : times) {
    const auto su = u.sample(t, piece_at(bu, t));
    const auto sv = v.sample(t, piece_at(bv, t));
    const Matrix& U = su.unitary;
    const Matrix& V = sv.unitary;
    const Matrix& gu = su.log_derivative;
    const Matrix& gv = sv.log_derivative;
    const Matrix Z = U * V;
    const Matrix gz = V.adjoint() * gu * V + gv;
    auto x = [](const Matrix& w, const Matrix& l) { return Matrix(w.adjoint() * comm(l, w)); };
    const cplx lhs = (gz * comm(x(Z, L1), x(Z, L2))).trace();
    const Matrix x1 = x(U, L1), x2 = x(U, L2);
    const Matrix y1 = comm(L1, V) * V.adjoint(), y2 = comm(L2, V) * V.adjoint();
    const Matrix w = V * gv * V.adjoint();
    const cplx tu = (gu * comm(x1, x2)).trace();
    const cplx tv = (gv * comm(x(V, L1), x(V, L2))).trace();
    const cplx rest = (gu * comm(y1, x2)).trace() + (gu * comm(x1, y2)).trace() + (gu * comm(y1, y2)).trace() +
                      (w * comm(x1, x2)).trace() + (w * comm(y1, x2)).trace() + (w * comm(x1, y2)).trace();
    // d/dt Tr(X1 Y2 - X2 Y1) with dX = [U^* L U, G_U], dY = -V [G_V, L] V^*
    auto dx = [&](const Matrix& l) { return comm(U.adjoint() * l * U, gu); };
    auto dy = [&](const Matrix& l) { return Matrix(-V * comm(gv, l) * V.adjoint()); };
    const cplx dF = (dx(L1) * y2 + x1 * dy(L2) - dx(L2) * y1 - x2 * dy(L1)).trace();
    worst = std::max({worst, std::abs(lhs - (tu + tv + rest)), std::abs(rest + dF)});
  }
  return worst;
}

double bulk_edge_identity_defect(const LoopPath& u, const RealVector& l2, const RealVector& p1r,
                                 const std::vector<double>& times) {
  const auto b = u.breakpoints();
  const Matrix L2 = l2.cast<cplx>().asDiagonal(), P = p1r.cast<cplx>().asDiagonal();
  double worst = 0;
  for (double t : times) {
    const auto s = u.sample(t, piece_at(b, t));
    const Matrix& U = s.unitary;
    const Matrix dU = U * s.log_derivative;
    const Matrix Ud = U.adjoint();
    const cplx lhs = (comm(L2, U) * Ud * comm(dU * Ud, P)).trace();
    const cplx rhs = 0.5 * (dU * Ud * comm(comm(P, U) * Ud, comm(L2, U) * Ud)).trace() +
                     0.5 * (comm(comm(L2, dU), P) * Ud + comm(comm(L2, U), P) * dU.adjoint()).trace();
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

double chern_identity_defect(const Matrix& p, const RealVector& l1, const RealVector& l2,
                             const std::vector<double>& phases) {
  const Index n = p.rows();
  const Matrix L1 = l1.cast<cplx>().asDiagonal(), L2 = l2.cast<cplx>().asDiagonal();
  const Matrix id = Matrix::Identity(n, n);
  const cplx base = (p * comm(comm(L1, p), comm(L2, p)) * p).trace();
  double worst = 0;
  for (double a : phases) {
    const Matrix e = id + (std::exp(-I * a) - 1.0) * p;
    const Matrix ed = id + (std::exp(I * a) - 1.0) * p;
    const cplx lhs = (p * comm(ed * comm(L1, e), ed * comm(L2, e))).trace();
    worst = std::max(worst, std::abs(lhs - 2.0 * (std::cos(a) - 1.0) * base));
  }
  return worst;
}

double periodic_trace_defect(int n_orb, int range, std::uint64_t seed) {
  SplitMix64 rng(seed);
  auto random_block = [&] {
    Matrix b(n_orb, n_orb);
    for (int i = 0; i < n_orb; ++i)
      for (int j = 0; j < n_orb; ++j) b(i, j) = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
    return b;
  };
  std::vector<Matrix> a(2 * range + 1), bb(2 * range + 1);  // a[d + range] = A_{0,d}
  for (auto& x : a) x = random_block();
  for (auto& x : bb) x = random_block();
  const int sites = 8 * range + 8;
  const Index n = Index(sites) * n_orb;
  Matrix A = Matrix::Zero(n, n), B = Matrix::Zero(n, n);
  for (int p = 0; p < sites; ++p)
    for (int d = -range; d <= range; ++d) {
      const int q = p + d;
      if (q < 0 || q >= sites) continue;
      A.block(Index(p) * n_orb, Index(q) * n_orb, n_orb, n_orb) = a[d + range];
      B.block(Index(p) * n_orb, Index(q) * n_orb, n_orb, n_orb) = bb[d + range];
    }
  RealVector lam(n);
  for (int p = 0; p < sites; ++p)
    for (int o = 0; o < n_orb; ++o) lam(Index(p) * n_orb + o) = p >= sites / 2 ? 1.0 : 0.0;
  const Matrix L = lam.cast<cplx>().asDiagonal();
  const cplx v1 = (A * comm(L, B)).trace();
  cplx v2 = 0;
  for (int d = -range; d <= range; ++d) v2 += double(d) * (a[d + range] * bb[-d + range]).trace();
  const int nk = 4 * range + 4;
  cplx v3 = 0;
  for (int i = 0; i < nk; ++i) {
    const double k = 2 * pi * i / nk;
    Matrix ah = Matrix::Zero(n_orb, n_orb), dbh = Matrix::Zero(n_orb, n_orb);
    for (int d = -range; d <= range; ++d) {
      ah += std::exp(I * (k * d)) * a[d + range];
      dbh += (I * double(d)) * std::exp(I * (k * d)) * bb[d + range];
    }
    v3 += (ah * dbh).trace();
  }
  v3 *= I / double(nk);
  return std::max(std::abs(v1 - v2), std::abs(v1 - v3));
}

std::vector<IdentityDefect> algebraic_identity_suite(const LoopPath& u, const LoopPath& v, const RealVector& l1,
                                                     const RealVector& l2, const RealVector& p1r,
                                                     const Matrix& projection, const std::vector<double>& times,
                                                     std::uint64_t seed) {
  std::vector<double> phases;
  for (double t : times) phases.push_back(2 * pi * t / u.period());
  return {
      {"additivity_decomposition", additivity_identity_defect(u, v, l1, l2, times)},
      {"bulk_edge_algebraic", bulk_edge_identity_defect(u, l2, p1r, times)},
      {"chern_identity", chern_identity_defect(projection, l1, l2, phases)},
      {"periodic_trace", periodic_trace_defect(2, 2, seed)},
  };
}

}  // namespace floquet
