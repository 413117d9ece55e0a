#pragma once

#include "floquet/linalg.hpp"
#include "floquet/models.hpp"

#include <memory>
#include <vector>

namespace floquet {

struct EvolutionConfig {
  int samples_per_segment = 32;  // sample intervals per segment (even, for Simpson)
  bool reunitarize = true;
  double reunitarize_threshold = 1e-12;  // Frobenius unitarity defect
};

struct PathSample {
  Matrix unitary;
  Matrix log_derivative;  // U^* dU/dt, anti-Hermitian
};

/// A unitary family on [0, T], smooth between consecutive breakpoints.
class LoopPath {
 public:
  virtual ~LoopPath() = default;
  virtual double period() const = 0;
  virtual const LatticeGeometry& geometry() const = 0;
  virtual std::vector<double> breakpoints() const = 0;
  // piece selects the smooth piece containing t (one-sided at breakpoints).
  virtual PathSample sample(double t, std::size_t piece) const = 0;
  virtual Matrix final_unitary() const = 0;
};

/// Exact evolution of a piecewise-constant protocol.
///
/// Stores the propagator at segment boundaries and the eigensystem of each
/// segment generator; samples inside a segment are produced on demand with one
/// matrix product, U(t) = V diag(e^{-i(t-t_j)E}) V^* U(t_j).
class PropagatorTrajectory : public LoopPath {
 public:
  PropagatorTrajectory(DriveProtocol protocol, EvolutionConfig config);

  double period() const override { return protocol_.period; }
  const LatticeGeometry& geometry() const override { return protocol_.geometry(); }
  std::vector<double> breakpoints() const override { return boundaries_; }
  PathSample sample(double t, std::size_t piece) const override;
  Matrix final_unitary() const override { return starts_.back(); }

  const DriveProtocol& protocol() const { return protocol_; }
  const EvolutionConfig& config() const { return config_; }
  // Sample grid: samples_per_segment + 1 equispaced points per segment, boundaries shared.
  std::vector<double> times() const;
  Matrix unitary(double t) const;
  Matrix unitary_in_piece(double t, std::size_t piece) const;
  const Matrix& boundary_unitary(std::size_t j) const { return starts_[j]; }
  std::size_t piece_of(double t) const;
  // Propagator from r to t, computed afresh from the segment eigensystems.
  Matrix transfer(double t, double r) const;
  int reunitarizations() const { return reunitarizations_; }

 private:
  DriveProtocol protocol_;
  EvolutionConfig config_;
  std::vector<double> boundaries_;
  std::vector<Matrix> starts_;       // U(t_j), j = 0..S
  std::vector<HermitianEigen> eig_;  // per segment
  std::vector<Matrix> rotated_;      // V_j^* U(t_j)
  std::vector<Matrix> log_deriv_;    // -i U(t_j)^* H_j U(t_j), constant inside segment j
  int reunitarizations_ = 0;

  Matrix segment_exponential(std::size_t j, double dt) const;
};

PropagatorTrajectory evolve(const DriveProtocol& protocol, const EvolutionConfig& config = {});

LatticeOperator propagator_at(const PropagatorTrajectory& traj, double t);

double composition_defect(const PropagatorTrajectory& traj, double t, double r);

/// Pointwise product U(t) V(t) of two paths on the union of their breakpoints.
class ProductPath : public LoopPath {
 public:
  ProductPath(std::shared_ptr<const LoopPath> u, std::shared_ptr<const LoopPath> v);
  double period() const override { return u_->period(); }
  const LatticeGeometry& geometry() const override { return u_->geometry(); }
  std::vector<double> breakpoints() const override { return cuts_; }
  PathSample sample(double t, std::size_t piece) const override;
  Matrix final_unitary() const override { return u_->final_unitary() * v_->final_unitary(); }

 private:
  std::shared_ptr<const LoopPath> u_, v_;
  std::vector<double> cuts_;
  std::vector<std::size_t> u_piece_, v_piece_;
};

struct EdgeBulkDifference {
  LatticeOperator difference;  // U_E(t) - iota^* U_B(t) iota
  LocalityProfile profile;     // mixed-profile fit, columns in the half next to the physical edge
};

EdgeBulkDifference edge_bulk_difference(const DriveProtocol& bulk, const RestrictionMap& edge_map,
                                        double t, const EvolutionConfig& config = {});

}  // namespace floquet
