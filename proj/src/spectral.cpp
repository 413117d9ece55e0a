#include "floquet/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace floquet {

namespace {
constexpr double two_pi = 2 * std::numbers::pi;

double mod_two_pi(double x) {
  double r = std::fmod(x, two_pi);
  if (r < 0) r += two_pi;
  return r;
}
}  // namespace

IndexReport make_report(std::string kind, cplx raw, const Tolerances& tol) {
  IndexReport r;
  r.kind = std::move(kind);
  r.raw = raw;
  r.integer = std::lround(raw.real());
  r.residual = std::abs(raw.real() - double(r.integer));
  r.imag = std::abs(raw.imag());
  r.quantized = r.residual < tol.quant && r.imag < tol.imag;
  return r;
}

double wrap_phase(double x) {
  double r = std::remainder(x, two_pi);  // [-pi, pi]
  if (r <= -std::numbers::pi) r += two_pi;
  return r;
}

UnitarySpectrum eigendecompose_unitary(const Matrix& u) {
  if (u.rows() != u.cols()) throw std::invalid_argument("eigendecompose_unitary: non-square input");
  const double defect = unitarity_defect(u);
  if (defect > 1e-8)
    throw std::invalid_argument("eigendecompose_unitary: input not unitary (defect " +
                                std::to_string(defect) + ")");
  const auto sf = schur(u);
  UnitarySpectrum s;
  s.dim = u.rows();
  s.vectors = sf.vectors;
  s.phases.resize(s.dim);
  Vector unit(s.dim);
  for (Index i = 0; i < s.dim; ++i) {
    s.phases(i) = wrap_phase(std::arg(sf.diagonal(i)));
    unit(i) = std::polar(1.0, s.phases(i));
  }
  s.reconstruction_error = (s.vectors * unit.asDiagonal() * s.vectors.adjoint() - u).norm();
  if (s.reconstruction_error > 1e-9)
    throw std::runtime_error("eigendecompose_unitary: reconstruction error " +
                             std::to_string(s.reconstruction_error));
  return s;
}

std::vector<GapDescriptor> find_gaps(const UnitarySpectrum& s, double min_width, double T) {
  if (!(min_width > 0)) throw std::invalid_argument("find_gaps: min_width must be positive");
  std::vector<double> ph(s.phases.data(), s.phases.data() + s.phases.size());
  std::sort(ph.begin(), ph.end());
  std::vector<GapDescriptor> out;
  if (ph.empty()) return out;
  for (std::size_t i = 0; i < ph.size(); ++i) {
    const double a = ph[i];
    const double b = i + 1 < ph.size() ? ph[i + 1] : ph[0] + two_pi;
    const double w = b - a;
    if (w <= min_width) continue;
    GapDescriptor g;
    g.phase_begin = a;
    g.phase_end = wrap_phase(b);
    g.width = w;
    g.epsilon = mod_two_pi(-(a + 0.5 * w)) / T;
    out.push_back(g);
  }
  return out;
}

GapDescriptor validate_gap(const UnitarySpectrum& s, double eps, double T, double min_width) {
  const double alpha = wrap_phase(-T * eps);
  const double sep = std::max(1e-6, 3 * s.reconstruction_error);
  double nearest = two_pi;
  for (Index i = 0; i < s.phases.size(); ++i)
    nearest = std::min(nearest, std::abs(wrap_phase(s.phases(i) - alpha)));
  if (nearest < sep) {
    std::ostringstream msg;
    msg << "gap validation failed: quasi-energy " << eps << " lies on the spectrum (phase distance "
        << nearest << ")";
    throw std::invalid_argument(msg.str());
  }
  for (auto g : find_gaps(s, min_width, T)) {
    const double offset = mod_two_pi(alpha - g.phase_begin);
    if (offset > 0 && offset < g.width) {
      g.midpoint = std::abs(offset - 0.5 * g.width) < 1e-9;
      g.epsilon = eps;
      return g;
    }
  }
  if (s.dim == 0) return GapDescriptor{eps, 0, 0, two_pi, true};
  std::ostringstream msg;
  msg << "gap validation failed: quasi-energy " << eps << " is not inside a gap wider than "
      << min_width;
  throw std::invalid_argument(msg.str());
}

LatticeOperator effective_hamiltonian(const UnitarySpectrum& s, const LatticeGeometry& g, double eps,
                                      double T, double min_width) {
  validate_gap(s, eps, T, min_width);
  const double alpha = -T * eps;
  RealVector energy(s.dim);
  for (Index i = 0; i < s.dim; ++i) {
    const double phi = alpha - two_pi + mod_two_pi(s.phases(i) - alpha);  // in (alpha - 2pi, alpha)
    energy(i) = -phi / T;
  }
  Matrix h = s.vectors * energy.cast<cplx>().asDiagonal() * s.vectors.adjoint();
  h = (0.5 * (h + h.adjoint())).eval();
  return {g, std::move(h)};
}

LatticeOperator effective_hamiltonian(const LatticeOperator& u_T, double eps, double T, double min_width) {
  return effective_hamiltonian(eigendecompose_unitary(u_T.m), u_T.geometry, eps, T, min_width);
}

LatticeOperator arc_projection(const UnitarySpectrum& s, const LatticeGeometry& g, double eps,
                               double eps_prime, double T, double min_width) {
  const double span = T * (eps_prime - eps);
  if (span < 0 || span > two_pi * (1 + 1e-12))
    throw std::invalid_argument("arc_projection: need 0 <= eps' - eps <= 2pi/T");
  validate_gap(s, eps, T, min_width);
  if (span >= two_pi * (1 - 1e-12)) return LatticeOperator::identity(g);
  validate_gap(s, eps_prime, T, min_width);
  const double alpha = -T * eps;
  std::vector<Index> keep;
  for (Index i = 0; i < s.dim; ++i) {
    const double back = mod_two_pi(alpha - s.phases(i));
    if (back > 0 && back < span) keep.push_back(i);
  }
  Matrix v = s.vectors(Eigen::all, keep);
  return {g, v * v.adjoint()};
}

double projection_defect(const Matrix& p) {
  return std::max((p * p - p).norm(), hermiticity_defect(p));
}

IndexReport chern_number(const LatticeOperator& p, const RealVector& switch1, const RealVector& switch2,
                         const TraceWindow& window, const Tolerances& tol) {
  const double defect = projection_defect(p.m);
  if (defect > 1e-8)
    throw std::invalid_argument("chern_number: input is not a projection (defect " +
                                std::to_string(defect) + ")");
  const Index n = p.dim();
  auto commutator = [&](const RealVector& lam) {
    Matrix b(n, n);
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i) b(i, j) = (lam(i) - lam(j)) * p.m(i, j);
    return b;
  };
  const Matrix b1 = commutator(switch1), b2 = commutator(switch2);
  const auto& w = window.indices;
  const Matrix m = b1 * b2(Eigen::all, w) - b2 * b1(Eigen::all, w);
  cplx tr = 0;
  for (std::size_t k = 0; k < w.size(); ++k) tr += (p.m.row(w[k]) * m.col(Index(k))).value();
  IndexReport r = make_report("chern", cplx(0, -two_pi) * tr, tol);
  r.window_r1 = window.radius1;
  r.window_r2 = window.radius2;
  return r;
}

}  // namespace floquet
