#include "floquet/propagator.hpp"

#include <algorithm>
#include <stdexcept>

namespace floquet {

PropagatorTrajectory::PropagatorTrajectory(DriveProtocol protocol, EvolutionConfig config)
    : protocol_(std::move(protocol)), config_(config) {
  protocol_.validate();
  if (config_.samples_per_segment < 2 || config_.samples_per_segment % 2 != 0)
    throw std::invalid_argument("EvolutionConfig: samples_per_segment must be even and >= 2");
  boundaries_ = protocol_.breakpoints();
  const Index n = protocol_.geometry().dim();
  Matrix u = Matrix::Identity(n, n);
  starts_.push_back(u);
  for (std::size_t j = 0; j < protocol_.segments.size(); ++j) {
    eig_.push_back(hermitian_eigen(protocol_.segments[j].generator.m));
    const auto& e = eig_.back();
    Matrix rot = e.vectors.adjoint() * u;
    log_deriv_.push_back(cplx(0, -1) * (rot.adjoint() * (e.values.cast<cplx>().asDiagonal() * rot)));
    const double dt = boundaries_[j + 1] - boundaries_[j];
    Vector phase = (e.values * (-dt)).unaryExpr([](double x) { return std::exp(cplx(0, x)); });
    u.noalias() = e.vectors * (phase.asDiagonal() * rot);
    if (config_.reunitarize && unitarity_defect(u) > config_.reunitarize_threshold) {
      u = nearest_unitary(u);
      ++reunitarizations_;
    }
    rotated_.push_back(std::move(rot));
    starts_.push_back(u);
  }
}

std::vector<double> PropagatorTrajectory::times() const {
  std::vector<double> out{0.0};
  const int m = config_.samples_per_segment;
  for (std::size_t j = 0; j + 1 < boundaries_.size(); ++j) {
    const double a = boundaries_[j], b = boundaries_[j + 1];
    for (int k = 1; k <= m; ++k) out.push_back(k == m ? b : a + (b - a) * k / m);
  }
  return out;
}

std::size_t PropagatorTrajectory::piece_of(double t) const {
  if (t < 0 || t > period() * (1 + 1e-14))
    throw std::out_of_range("propagator time outside [0, T]");
  const auto it = std::upper_bound(boundaries_.begin(), boundaries_.end(), t);
  const std::size_t j = std::size_t(it - boundaries_.begin());
  return std::min(j == 0 ? 0 : j - 1, protocol_.segments.size() - 1);
}

Matrix PropagatorTrajectory::unitary_in_piece(double t, std::size_t j) const {
  const double dt = t - boundaries_[j];
  if (dt == 0) return starts_[j];
  const auto& e = eig_[j];
  Vector phase = (e.values * (-dt)).unaryExpr([](double x) { return std::exp(cplx(0, x)); });
  return e.vectors * (phase.asDiagonal() * rotated_[j]);
}

Matrix PropagatorTrajectory::unitary(double t) const {
  const std::size_t j = piece_of(t);
  if (t == boundaries_[j + 1]) return starts_[j + 1];
  return unitary_in_piece(t, j);
}

PathSample PropagatorTrajectory::sample(double t, std::size_t piece) const {
  return {unitary_in_piece(t, piece), log_deriv_[piece]};
}

Matrix PropagatorTrajectory::segment_exponential(std::size_t j, double dt) const {
  const auto& e = eig_[j];
  return spectral_function(e, [dt](double x) { return std::exp(cplx(0, -dt * x)); });
}

Matrix PropagatorTrajectory::transfer(double t, double r) const {
  if (r > t) throw std::invalid_argument("transfer: need r <= t");
  const Index n = geometry().dim();
  Matrix out = Matrix::Identity(n, n);
  for (std::size_t j = 0; j + 1 < boundaries_.size(); ++j) {
    const double a = std::max(r, boundaries_[j]);
    const double b = std::min(t, boundaries_[j + 1]);
    if (b <= a) continue;
    out = segment_exponential(j, b - a) * out;
  }
  return out;
}

PropagatorTrajectory evolve(const DriveProtocol& protocol, const EvolutionConfig& config) {
  return PropagatorTrajectory(protocol, config);
}

LatticeOperator propagator_at(const PropagatorTrajectory& traj, double t) {
  return {traj.geometry(), traj.unitary(t)};
}

double composition_defect(const PropagatorTrajectory& traj, double t, double r) {
  if (r < 0 || r > t || t > traj.period())
    throw std::invalid_argument("composition_defect: need 0 <= r <= t <= T");
  return (traj.unitary(t) - traj.transfer(t, r) * traj.unitary(r)).norm();
}

ProductPath::ProductPath(std::shared_ptr<const LoopPath> u, std::shared_ptr<const LoopPath> v)
    : u_(std::move(u)), v_(std::move(v)) {
  const double T = u_->period();
  if (std::abs(v_->period() - T) > 1e-12 * T)
    throw std::invalid_argument("ProductPath: period mismatch");
  if (!(u_->geometry() == v_->geometry())) throw std::invalid_argument("ProductPath: geometry mismatch");
  auto bu = u_->breakpoints(), bv = v_->breakpoints();
  std::vector<double> all(bu);
  all.insert(all.end(), bv.begin(), bv.end());
  std::sort(all.begin(), all.end());
  for (double c : all)
    if (cuts_.empty() || c - cuts_.back() > 1e-12 * T) cuts_.push_back(c);
  cuts_.back() = T;
  auto locate = [](const std::vector<double>& b, double mid) {
    std::size_t j = 0;
    while (j + 2 < b.size() && b[j + 1] <= mid) ++j;
    return j;
  };
  for (std::size_t k = 0; k + 1 < cuts_.size(); ++k) {
    const double mid = 0.5 * (cuts_[k] + cuts_[k + 1]);
    u_piece_.push_back(locate(bu, mid));
    v_piece_.push_back(locate(bv, mid));
  }
}

PathSample ProductPath::sample(double t, std::size_t piece) const {
  auto su = u_->sample(t, u_piece_[piece]);
  auto sv = v_->sample(t, v_piece_[piece]);
  PathSample out;
  out.unitary = su.unitary * sv.unitary;
  // (UV)^* d(UV) = V^* (U^* dU) V + V^* dV
  out.log_derivative = sv.unitary.adjoint() * su.log_derivative * sv.unitary + sv.log_derivative;
  return out;
}

EdgeBulkDifference edge_bulk_difference(const DriveProtocol& bulk, const RestrictionMap& edge_map,
                                        double t, const EvolutionConfig& config) {
  if (!(bulk.geometry() == edge_map.source))
    throw std::invalid_argument("edge_bulk_difference: protocol not on the map's source geometry");
  const auto ub = evolve(bulk, config);
  const auto ue = evolve(restrict_protocol(bulk, edge_map), config);
  EdgeBulkDifference out;
  out.difference = LatticeOperator(edge_map.target, ue.unitary(t) - restrict_op(propagator_at(ub, t), edge_map).m);
  const auto& g = edge_map.target;
  DecayFitOptions opt;
  opt.profile = DecayProfile::mixed;
  opt.cut = g.origin1;
  // the far side of the truncated half-plane is a second, unphysical edge
  opt.keep = [&g](Index, Index n) { return g.coord1(n) - g.origin1 < (g.L1 + 1) / 2; };
  out.profile = decay_rate_fit(out.difference, opt);
  return out;
}

}  // namespace floquet
