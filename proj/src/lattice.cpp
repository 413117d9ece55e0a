#include "floquet/lattice.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>

namespace floquet {

int LatticeGeometry::separation(int direction, int a, int b) const {
  int d = std::abs(a - b);
  const bool wrap = direction == 1 ? periodic1 : periodic2;
  const int len = direction == 1 ? L1 : L2;
  if (wrap) d = std::min(d, len - d);
  return d;
}

int LatticeGeometry::distance(Index site_m, Index site_n) const {
  return separation(1, coord1(site_m), coord1(site_n)) +
         separation(2, coord2(site_m), coord2(site_n));
}

LatticeGeometry build_geometry(int L1, int L2, int n_orb, int origin1, int origin2,
                               bool periodic1, bool periodic2) {
  if (L1 < 1 || L2 < 1 || n_orb < 1)
    throw std::invalid_argument("build_geometry: L1, L2 and n_orb must be positive");
  return LatticeGeometry{L1, L2, n_orb, origin1, origin2, periodic1, periodic2};
}

LatticeGeometry centered_torus(int L1, int L2, int n_orb) {
  return build_geometry(L1, L2, n_orb, -(L1 / 2), -(L2 / 2), true, true);
}

LatticeOperator::LatticeOperator(LatticeGeometry g, Matrix mat) : geometry(g), m(std::move(mat)) {
  if (m.rows() != g.dim() || m.cols() != g.dim())
    throw std::invalid_argument("LatticeOperator: matrix size " + std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()) + " does not match geometry dimension " +
                                std::to_string(g.dim()));
}

LatticeOperator LatticeOperator::zero(const LatticeGeometry& g) {
  return {g, Matrix::Zero(g.dim(), g.dim())};
}

LatticeOperator LatticeOperator::identity(const LatticeGeometry& g) {
  return {g, Matrix::Identity(g.dim(), g.dim())};
}

Matrix LatticeOperator::block(Index site_m, Index site_n) const {
  const int n = geometry.n_orb;
  return m.block(site_m * n, site_n * n, n, n);
}

namespace {

int wrapped_offset(int x, int len) {
  int r = x % len;
  if (r < -len / 2) r += len;
  if (r >= len - len / 2) r -= len;
  return r;
}

double ramp(double y, double width) { return std::clamp(0.5 + y / width, 0.0, 1.0); }

}  // namespace

LatticeOperator SwitchFunction::as_operator() const {
  return {geometry, diag.cast<cplx>().asDiagonal().toDenseMatrix()};
}

SwitchFunction switch_function(const LatticeGeometry& g, int direction, int jump_position,
                               SwitchKind kind, double width) {
  if (direction != 1 && direction != 2)
    throw std::invalid_argument("switch_function: direction must be 1 or 2");
  const int lo = direction == 1 ? g.origin1 : g.origin2;
  const int len = direction == 1 ? g.L1 : g.L2;
  const bool wrap = direction == 1 ? g.periodic1 : g.periodic2;
  if (jump_position <= lo || jump_position >= lo + len)
    throw std::invalid_argument("switch_function: jump " + std::to_string(jump_position) +
                                " outside the open coordinate range (" + std::to_string(lo) + ", " +
                                std::to_string(lo + len) + ")");
  SwitchFunction s;
  s.geometry = g;
  s.direction = direction;
  s.jump = jump_position;
  s.width = kind == SwitchKind::sharp ? 1.0 : width;
  if (s.width < 1.0) throw std::invalid_argument("switch_function: width must be >= 1");

  std::vector<double> profile(len);
  for (int i = 0; i < len; ++i) {
    const int n = lo + i;
    if (!wrap) {
      profile[i] = ramp(n - jump_position + 0.5, s.width);
      continue;
    }
    // y measured from the upward jump midpoint; the downward one sits at |y| = len/2
    const double y = wrapped_offset(n - jump_position, len) + 0.5;
    const double half = 0.5 * len;
    if (y > 0)
      profile[i] = std::min(ramp(y, s.width), ramp(half - y, s.width));
    else
      profile[i] = std::max(ramp(y, s.width), 1.0 - ramp(half + y, s.width));
  }
  s.diag.resize(g.dim());
  for (int site = 0; site < g.sites(); ++site) {
    const int n = direction == 1 ? g.coord1(site) : g.coord2(site);
    for (int o = 0; o < g.n_orb; ++o) s.diag(Index(site) * g.n_orb + o) = profile[n - lo];
  }
  return s;
}

TraceWindow TraceWindow::full(const LatticeGeometry& g) {
  TraceWindow w;
  w.indices.resize(g.dim());
  for (Index i = 0; i < g.dim(); ++i) w.indices[i] = i;
  w.radius1 = g.L1;
  w.radius2 = g.L2;
  return w;
}

TraceWindow TraceWindow::from_sites(const LatticeGeometry& g,
                                    const std::function<bool(int, int)>& keep_site) {
  TraceWindow w;
  for (int site = 0; site < g.sites(); ++site) {
    if (!keep_site(g.coord1(site), g.coord2(site))) continue;
    for (int o = 0; o < g.n_orb; ++o) w.indices.push_back(Index(site) * g.n_orb + o);
  }
  return w;
}

RealVector TraceWindow::mask(Index dim) const {
  RealVector v = RealVector::Zero(dim);
  for (Index i : indices) v(i) = 1.0;
  return v;
}

TraceWindow centered_window(const LatticeGeometry& g, int c1, int c2, int r1, int r2) {
  auto inside = [](int x, int c, int r, int len, bool wrap) {
    int off = x - c;
    if (wrap) off = wrapped_offset(off, len);
    return off >= -r && off < r;
  };
  TraceWindow w = TraceWindow::from_sites(g, [&](int n1, int n2) {
    return inside(n1, c1, r1, g.L1, g.periodic1) && inside(n2, c2, r2, g.L2, g.periodic2);
  });
  w.radius1 = r1;
  w.radius2 = r2;
  return w;
}

TraceWindow edge_window(const LatticeGeometry& g, int r, int c2, int r2) {
  TraceWindow w = TraceWindow::from_sites(g, [&](int n1, int n2) {
    int off = n2 - c2;
    if (g.periodic2) off = wrapped_offset(off, g.L2);
    return n1 - g.origin1 < r && off >= -r2 && off < r2;
  });
  w.radius1 = r;
  w.radius2 = r2;
  return w;
}

RestrictionMap sub_rectangle_map(const LatticeGeometry& source, int n1_begin, int width1,
                                 int n2_begin, int width2) {
  if (width1 < 1 || width2 < 1 || !source.contains(n1_begin, n2_begin) ||
      !source.contains(n1_begin + width1 - 1, n2_begin + width2 - 1))
    throw std::invalid_argument("sub_rectangle_map: rectangle not inside the source geometry");
  RestrictionMap map;
  map.source = source;
  map.target = build_geometry(width1, width2, source.n_orb, n1_begin, n2_begin, false,
                              source.periodic2 && width2 == source.L2);
  map.target.periodic1 = source.periodic1 && width1 == source.L1;
  map.source_index.reserve(map.target.dim());
  for (int site = 0; site < map.target.sites(); ++site) {
    const int n1 = map.target.coord1(site), n2 = map.target.coord2(site);
    for (int o = 0; o < source.n_orb; ++o) map.source_index.push_back(source.index(n1, n2, o));
  }
  return map;
}

RestrictionMap half_plane_map(const LatticeGeometry& source, int n1_begin, int width) {
  return sub_rectangle_map(source, n1_begin, width, source.origin2, source.L2);
}

LatticeOperator restrict_op(const LatticeOperator& a, const RestrictionMap& map) {
  if (!(a.geometry == map.source))
    throw std::invalid_argument("restrict: operator does not live on the source geometry");
  const auto& idx = map.source_index;
  return {map.target, a.m(idx, idx)};
}

LatticeOperator embed(const LatticeOperator& a_edge, const RestrictionMap& map) {
  if (!(a_edge.geometry == map.target))
    throw std::invalid_argument("embed: operator does not live on the target geometry");
  LatticeOperator out = LatticeOperator::zero(map.source);
  const auto& idx = map.source_index;
  out.m(idx, idx) = a_edge.m;
  return out;
}

double block_norm(const Matrix& b) {
  if (b.size() == 1) return std::abs(b(0, 0));
  Eigen::JacobiSVD<Matrix> svd(b);
  return svd.singularValues()(0);
}

namespace {

// Block norms for every site pair, row-major over (site_m, site_n).
std::vector<double> all_block_norms(const LatticeOperator& a) {
  const auto& g = a.geometry;
  const int s = g.sites();
  std::vector<double> out(std::size_t(s) * s);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) out[std::size_t(i) * s + j] = block_norm(a.block(i, j));
  return out;
}

}  // namespace

LocalityProfile locality_norm(const LatticeOperator& a, double mu) {
  if (!(mu > 0)) throw std::invalid_argument("locality_norm: mu must be positive");
  const auto& g = a.geometry;
  const int s = g.sites();
  const auto norms = all_block_norms(a);
  double c = 0;
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j)
      c = std::max(c, norms[std::size_t(i) * s + j] * std::exp(mu * g.distance(i, j)));
  LocalityProfile p;
  p.exponent = mu;
  p.prefactor = c;
  p.points = s * s;
  return p;
}

LocalityProfile decay_rate_fit(const LatticeOperator& a, const DecayFitOptions& opt) {
  const auto& g = a.geometry;
  const int s = g.sites();
  std::map<int, double> envelope;
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < s; ++j) {
      if (opt.keep && !opt.keep(i, j)) continue;
      const double nb = block_norm(a.block(i, j));
      if (!(nb >= opt.floor)) continue;
      int x = 0;
      const int from_cut = std::abs(g.coord1(j) - opt.cut);
      switch (opt.profile) {
        case DecayProfile::distance: x = g.distance(i, j); break;
        case DecayProfile::coordinate: x = from_cut; break;
        case DecayProfile::mixed: x = from_cut + g.separation(2, g.coord2(i), g.coord2(j)); break;
      }
      auto [it, fresh] = envelope.emplace(x, nb);
      if (!fresh) it->second = std::max(it->second, nb);
    }
  }
  LocalityProfile p;
  p.points = int(envelope.size());
  if (envelope.empty()) {
    p.effectively_zero = true;
    p.exponent = std::numeric_limits<double>::infinity();
    return p;
  }
  if (envelope.size() == 1) {
    // support at a single profile value: faster than any exponential
    p.exponent = std::numeric_limits<double>::infinity();
    p.prefactor = envelope.begin()->second;
    return p;
  }
  const double n = double(envelope.size());
  double sx = 0, sy = 0;
  for (auto [x, v] : envelope) {
    sx += x;
    sy += std::log(v);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (auto [x, v] : envelope) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (std::log(v) - my);
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss = 0;
  for (auto [x, v] : envelope) {
    const double r = std::log(v) - intercept - slope * x;
    ss += r * r;
  }
  p.exponent = -slope;
  p.prefactor = std::exp(intercept);
  p.residual = n > 2 ? std::sqrt(ss / (n - 2) / sxx) : 0.0;
  return p;
}

double hermiticity_defect(const Matrix& a) { return (a - a.adjoint()).norm(); }

double unitarity_defect(const Matrix& a) {
  return (a.adjoint() * a - Matrix::Identity(a.rows(), a.cols())).norm();
}

OperatorDiagnostics operator_diagnostics(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("operator_diagnostics: non-square operator");
  return {hermiticity_defect(a), unitarity_defect(a), a.trace()};
}

}  // namespace floquet
