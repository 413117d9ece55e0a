#include "floquet/models.hpp"

#include "floquet/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace floquet {

void HoppingModel::add(int d1, int d2, const Matrix& block) {
  if (block.rows() != n_orb || block.cols() != n_orb)
    throw std::invalid_argument("HoppingModel::add: block size does not match n_orb");
  for (auto& t : terms)
    if (t.d1 == d1 && t.d2 == d2) {
      t.block += block;
      return;
    }
  terms.push_back({d1, d2, block});
}

void HoppingModel::add_hermitian(int d1, int d2, const Matrix& block) {
  if (d1 == 0 && d2 == 0) {
    add(0, 0, 0.5 * (block + block.adjoint()));
    return;
  }
  add(d1, d2, block);
  add(-d1, -d2, block.adjoint());
}

Matrix HoppingModel::bloch(double k1, double k2) const {
  Matrix h = Matrix::Zero(n_orb, n_orb);
  for (const auto& t : terms) h += std::exp(cplx(0, k1 * t.d1 + k2 * t.d2)) * t.block;
  return h;
}

Matrix HoppingModel::strip(int L1, double k2) const {
  Matrix h = Matrix::Zero(Index(L1) * n_orb, Index(L1) * n_orb);
  for (int m1 = 0; m1 < L1; ++m1)
    for (const auto& t : terms) {
      const int n1 = m1 + t.d1;
      if (n1 < 0 || n1 >= L1) continue;
      h.block(Index(m1) * n_orb, Index(n1) * n_orb, n_orb, n_orb) +=
          std::exp(cplx(0, k2 * t.d2)) * t.block;
    }
  return h;
}

LatticeOperator HoppingModel::on(const LatticeGeometry& g) const {
  if (g.n_orb != n_orb) throw std::invalid_argument("HoppingModel::on: n_orb mismatch");
  auto wrap = [](int x, int lo, int len) { return lo + ((x - lo) % len + len) % len; };
  LatticeOperator h = LatticeOperator::zero(g);
  for (int site = 0; site < g.sites(); ++site) {
    const int m1 = g.coord1(site), m2 = g.coord2(site);
    for (const auto& t : terms) {
      int n1 = m1 + t.d1, n2 = m2 + t.d2;
      if (g.periodic1) n1 = wrap(n1, g.origin1, g.L1);
      if (g.periodic2) n2 = wrap(n2, g.origin2, g.L2);
      if (!g.contains(n1, n2)) continue;
      h.m.block(Index(site) * n_orb, g.site_index(n1, n2) * n_orb, n_orb, n_orb) += t.block;
    }
  }
  return h;
}

HoppingModel HoppingModel::scaled(double s) const {
  HoppingModel out = *this;
  for (auto& t : out.terms) t.block *= s;
  return out;
}

bool DriveProtocol::translation_invariant() const {
  return !segments.empty() &&
         std::all_of(segments.begin(), segments.end(), [](const Segment& s) { return s.bloch.has_value(); });
}

std::vector<double> DriveProtocol::breakpoints() const {
  std::vector<double> b{0.0};
  double t = 0;
  for (const auto& s : segments) {
    t += s.duration;
    b.push_back(t);
  }
  b.back() = period;
  return b;
}

double hermiticity_tolerance(const Matrix& h) { return 1e-12 * std::max(1.0, h.norm()); }

void DriveProtocol::validate() const {
  if (segments.empty()) throw std::invalid_argument("DriveProtocol: no segments");
  if (!(period > 0)) throw std::invalid_argument("DriveProtocol: period must be positive");
  double total = 0;
  for (std::size_t j = 0; j < segments.size(); ++j) {
    const auto& s = segments[j];
    if (s.duration < 0) throw std::invalid_argument("DriveProtocol: negative segment duration");
    if (!(s.generator.geometry == geometry()))
      throw std::invalid_argument("DriveProtocol: segments on different geometries");
    const double d = hermiticity_defect(s.generator.m);
    if (d > hermiticity_tolerance(s.generator.m))
      throw std::invalid_argument("DriveProtocol: segment " + std::to_string(j) +
                                  " generator not Hermitian (defect " + std::to_string(d) + ")");
    total += s.duration;
  }
  if (std::abs(total - period) > 1e-12 * period)
    throw std::invalid_argument("DriveProtocol: durations do not sum to the period");
}

double full_coupling(double T) { return 5.0 * std::numbers::pi / (2.0 * T); }

DriveProtocol five_step_drive(const LatticeGeometry& g, double J, double delta, double T) {
  if (g.n_orb != 2) throw std::invalid_argument("five_step_drive: needs n_orb = 2 (A/B sublattices)");
  if (g.L1 % 2 != 0 || g.L2 % 2 != 0)
    throw std::invalid_argument("five_step_drive: L1 and L2 must be even");
  if (!(T > 0)) throw std::invalid_argument("five_step_drive: period must be positive");
  // A at n couples to B at n - d, d cycling through these four bonds.
  const int bonds[4][2] = {{0, 0}, {0, 1}, {1, 1}, {1, 0}};
  Matrix ab = Matrix::Zero(2, 2);
  ab(0, 1) = J;
  DriveProtocol p;
  p.period = T;
  for (const auto& d : bonds) {
    HoppingModel h{2, {}};
    if (d[0] == 0 && d[1] == 0)
      h.add(0, 0, ab + ab.adjoint());
    else
      h.add_hermitian(-d[0], -d[1], ab);
    p.segments.push_back({T / 5, h.on(g), h});
  }
  HoppingModel onsite{2, {}};
  Matrix z = Matrix::Zero(2, 2);
  z(0, 0) = delta / 2;
  z(1, 1) = -delta / 2;
  onsite.add(0, 0, z);
  p.segments.push_back({T / 5, onsite.on(g), onsite});
  p.validate();
  return p;
}

HoppingModel chern_insulator(double mass) {
  Matrix sx(2, 2), sy(2, 2), sz(2, 2);
  sx << 0, 1, 1, 0;
  sy << 0, cplx(0, -1), cplx(0, 1), 0;
  sz << 1, 0, 0, -1;
  const cplx half_i = 1.0 / cplx(0, 2);
  HoppingModel h{2, {}};
  h.add(0, 0, mass * sz);
  h.add_hermitian(1, 0, half_i * sx + 0.5 * sz);
  h.add_hermitian(0, 1, half_i * sy + 0.5 * sz);
  return h;
}

DriveProtocol static_drive(const LatticeOperator& h0, double T) {
  if (hermiticity_defect(h0.m) > hermiticity_tolerance(h0.m))
    throw std::invalid_argument("static_drive: generator is not Hermitian");
  DriveProtocol p;
  p.period = T;
  p.segments.push_back({T, h0, std::nullopt});
  p.validate();
  return p;
}

DriveProtocol static_drive(const HoppingModel& h0, const LatticeGeometry& g, double T) {
  DriveProtocol p = static_drive(h0.on(g), T);
  p.segments.front().bloch = h0;
  return p;
}

DriveProtocol effective_vacuum_protocol(const LatticeOperator& h_eff, double T) {
  return static_drive(h_eff, T);
}

double disorder_value(const DisorderSpec& spec, int n1, int n2, int orbital) {
  std::uint64_t key = SplitMix64(spec.seed).next();
  key = SplitMix64(key ^ std::uint64_t(std::int64_t(n1))).next();
  key = SplitMix64(key ^ std::uint64_t(std::int64_t(n2))).next();
  SplitMix64 rng(key ^ std::uint64_t(orbital));
  return rng.uniform(-spec.amplitude, spec.amplitude);
}

LatticeOperator disorder_potential(const LatticeGeometry& g, const DisorderSpec& spec) {
  if (spec.amplitude < 0) throw std::invalid_argument("disorder amplitude must be non-negative");
  LatticeOperator v = LatticeOperator::zero(g);
  if (spec.amplitude == 0) return v;
  for (int site = 0; site < g.sites(); ++site)
    for (int o = 0; o < g.n_orb; ++o) {
      const Index i = Index(site) * g.n_orb + o;
      v.m(i, i) = disorder_value(spec, g.coord1(site), g.coord2(site), o);
    }
  return v;
}

DriveProtocol add_static_term(const DriveProtocol& p, const LatticeOperator& v) {
  if (!(v.geometry == p.geometry())) throw std::invalid_argument("add_static_term: geometry mismatch");
  DriveProtocol out = p;
  for (auto& s : out.segments) {
    s.generator.m += v.m;
    s.bloch.reset();
  }
  return out;
}

DriveProtocol add_onsite_disorder(const DriveProtocol& p, const DisorderSpec& spec) {
  if (spec.amplitude == 0) return p;
  return add_static_term(p, disorder_potential(p.geometry(), spec));
}

DriveProtocol relative_protocol(const DriveProtocol& p1, const DriveProtocol& p2) {
  if (std::abs(p1.period - p2.period) > 1e-12 * p1.period)
    throw std::invalid_argument("relative_protocol: period mismatch");
  if (!(p1.geometry() == p2.geometry()))
    throw std::invalid_argument("relative_protocol: geometry mismatch");
  DriveProtocol out;
  out.period = p1.period;
  for (const auto& s : p1.segments) {
    Segment r{s.duration / 2, {s.generator.geometry, 2.0 * s.generator.m}, std::nullopt};
    if (s.bloch) r.bloch = s.bloch->scaled(2.0);
    out.segments.push_back(std::move(r));
  }
  for (auto it = p2.segments.rbegin(); it != p2.segments.rend(); ++it) {
    Segment r{it->duration / 2, {it->generator.geometry, -2.0 * it->generator.m}, std::nullopt};
    if (it->bloch) r.bloch = it->bloch->scaled(-2.0);
    out.segments.push_back(std::move(r));
  }
  return out;
}

DriveProtocol restrict_protocol(const DriveProtocol& p, const RestrictionMap& map) {
  DriveProtocol out;
  out.period = p.period;
  for (const auto& s : p.segments) out.segments.push_back({s.duration, restrict_op(s.generator, map), std::nullopt});
  return out;
}

std::vector<DriveProtocol> common_refinement(const std::vector<DriveProtocol>& ps) {
  if (ps.empty()) return {};
  const double T = ps.front().period;
  std::vector<double> cuts;
  for (const auto& p : ps) {
    if (std::abs(p.period - T) > 1e-12 * T)
      throw std::invalid_argument("common_refinement: period mismatch");
    for (double b : p.breakpoints()) cuts.push_back(b);
  }
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> merged;
  for (double c : cuts)
    if (merged.empty() || c - merged.back() > 1e-12 * T) merged.push_back(c);
  merged.back() = T;

  std::vector<DriveProtocol> out;
  for (const auto& p : ps) {
    const auto b = p.breakpoints();
    DriveProtocol r;
    r.period = T;
    for (std::size_t k = 0; k + 1 < merged.size(); ++k) {
      const double mid = 0.5 * (merged[k] + merged[k + 1]);
      std::size_t j = 0;
      while (j + 1 < p.segments.size() && b[j + 1] <= mid) ++j;
      Segment s = p.segments[j];
      s.duration = merged[k + 1] - merged[k];
      r.segments.push_back(std::move(s));
    }
    out.push_back(std::move(r));
  }
  return out;
}

DriveProtocol interface_hamiltonian(const InterfaceSpec& spec) {
  std::vector<DriveProtocol> ps{spec.upper, spec.lower};
  if (spec.coupling) ps.push_back(*spec.coupling);
  const auto& g = spec.upper.geometry();
  for (const auto& p : ps)
    if (!(p.geometry() == g)) throw std::invalid_argument("interface_hamiltonian: geometry mismatch");
  const auto refined = common_refinement(ps);

  const RealVector p1 = switch_function(g, 1, spec.cut).diag;
  const RealVector q1 = RealVector::Ones(g.dim()) - p1;
  const Eigen::ArrayXXd upper_mask = (p1 * p1.transpose()).array();
  const Eigen::ArrayXXd lower_mask = (q1 * q1.transpose()).array();

  DriveProtocol out;
  out.period = spec.upper.period;
  for (std::size_t k = 0; k < refined[0].segments.size(); ++k) {
    Matrix h = (refined[0].segments[k].generator.m.array() * upper_mask.cast<cplx>()).matrix() +
               (refined[1].segments[k].generator.m.array() * lower_mask.cast<cplx>()).matrix();
    if (spec.coupling) h += refined[2].segments[k].generator.m;
    out.segments.push_back({refined[0].segments[k].duration, {g, std::move(h)}, std::nullopt});
  }
  out.validate();
  return out;
}

namespace {

cplx random_unit_disk(SplitMix64& rng) {
  return cplx(rng.uniform(-1, 1), rng.uniform(-1, 1)) / std::sqrt(2.0);
}

}  // namespace

LatticeOperator confined_perturbation(const LatticeGeometry& g, double amplitude, double mu,
                                      std::uint64_t seed, int cut) {
  if (!(mu > 0)) throw std::invalid_argument("confined_perturbation: mu must be positive");
  LatticeOperator v = LatticeOperator::zero(g);
  if (amplitude == 0) return v;
  SplitMix64 rng(seed);
  const int n = g.n_orb;
  for (int i = 0; i < g.sites(); ++i) {
    for (int j = i; j < g.sites(); ++j) {
      const int from_cut = std::max(g.separation(1, g.coord1(i), cut), g.separation(1, g.coord1(j), cut));
      const double env =
          amplitude * std::exp(-mu * (from_cut + g.separation(2, g.coord2(i), g.coord2(j)))) / n;
      Matrix b(n, n);
      for (int a = 0; a < n; ++a)
        for (int c = 0; c < n; ++c) b(a, c) = env * random_unit_disk(rng);
      if (i == j) b = 0.5 * (b + b.adjoint()).eval();
      v.m.block(Index(i) * n, Index(j) * n, n, n) = b;
      if (i != j) v.m.block(Index(j) * n, Index(i) * n, n, n) = b.adjoint();
    }
  }
  return v;
}

LatticeOperator random_local_hermitian(const LatticeGeometry& g, double amplitude, int range,
                                       std::uint64_t seed) {
  LatticeOperator v = LatticeOperator::zero(g);
  SplitMix64 rng(seed);
  const int n = g.n_orb;
  for (int i = 0; i < g.sites(); ++i)
    for (int j = i; j < g.sites(); ++j) {
      if (g.distance(i, j) > range) continue;
      Matrix b(n, n);
      for (int a = 0; a < n; ++a)
        for (int c = 0; c < n; ++c) b(a, c) = amplitude * random_unit_disk(rng);
      if (i == j) b = 0.5 * (b + b.adjoint()).eval();
      v.m.block(Index(i) * n, Index(j) * n, n, n) += b;
      if (i != j) v.m.block(Index(j) * n, Index(i) * n, n, n) += b.adjoint();
    }
  return v;
}

}  // namespace floquet
