#pragma once

#include "floquet/propagator.hpp"
#include "floquet/report.hpp"
#include "floquet/spectral.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace floquet {

/// Switch functions and trace windows used for one index evaluation.
///
/// On a torus every switch also jumps back down half a period away, so traces
/// are restricted to a window around the intersection of the upward jumps.
struct SwitchPlacement {
  int c1 = 0;  // jump of the direction-1 switch
  int c2 = 0;  // jump of the direction-2 switch
  SwitchKind kind = SwitchKind::sharp;
  double width = 4;
  int bulk_radius1 = 0;  // 0 selects L1/4
  int bulk_radius2 = 0;  // 0 selects L2/4
  int edge_radius = 0;   // 0 selects L1_edge/2
};

struct BulkSwitches {
  SwitchFunction s1, s2;
  TraceWindow window;
};

struct EdgeSwitches {
  SwitchFunction s2;
  TraceWindow window;
};

BulkSwitches bulk_switches(const LatticeGeometry& g, const SwitchPlacement& p = {});
EdgeSwitches edge_switches(const LatticeGeometry& edge, const SwitchPlacement& p = {});
// Window around the cut at n1 = c1 for interface traces; same radii as the bulk window.
TraceWindow interface_window(const LatticeGeometry& g, const SwitchPlacement& p = {});

// Tr_Q(U^* [L2, U]); only diagonal entries in the window are formed.
IndexReport edge_index(const LatticeOperator& u_edge, const SwitchFunction& s2, const TraceWindow& window,
                       const Tolerances& tol = {});

// Tr_Q(U2 L2 U2^* - U1 L2 U1^*), the two-term form of the relative edge index.
IndexReport two_term_edge_index(const Matrix& u1, const Matrix& u2, const SwitchFunction& s2,
                                const TraceWindow& window, const Tolerances& tol = {});

// #{eig(P - Q) near +1} - #{near -1}; throws if an eigenvalue sits in the ambiguous band.
long pair_projection_index(const Matrix& p, const Matrix& q, double tolerance = 1e-6);
// Pair index of (U^* L2 U, L2) compressed to the window.
long edge_pair_index(const LatticeOperator& u_edge, const SwitchFunction& s2, const TraceWindow& window,
                     double tolerance = 1e-6);

struct QuadratureConfig {
  int samples_per_segment = 32;  // even
  bool check_refinement = false;
};

// Time integrand Tr_W(U^* dU [U^*[L1,U], U^*[L2,U]]) at one instant.
cplx bulk_integrand(const PathSample& s, const RealVector& l1, const RealVector& l2,
                    const TraceWindow& window);

IndexReport bulk_index(const LoopPath& path, const SwitchFunction& s1, const SwitchFunction& s2,
                       const TraceWindow& window, const QuadratureConfig& q = {},
                       const Tolerances& tol = {});

// Propagator I on [0, T/2], exp(-i 2 (T - t) (2 pi / T) P) on [T/2, T].
DriveProtocol projection_loop(const LatticeOperator& p, double T);

struct RelativeConfig {
  double min_width = 0.1;  // mandatory in configs, no physical default
  EvolutionConfig evolution;
  QuadratureConfig quadrature;
  Tolerances tol;
  SwitchPlacement placement;
  bool compute_edge = true;
};

struct RelativeGapResult {
  IndexReport bulk;
  IndexReport edge;
  IndexReport edge_two_term;
  GapDescriptor gap;
  double loop_defect = 0;  // ||U_rel(T) - I||_F
  LatticeOperator effective_hamiltonian;
  Matrix one_period;  // U_B(T)
};

RelativeGapResult relative_gap_indices(const DriveProtocol& protocol, double eps, const RestrictionMap& edge_map,
                                       const RelativeConfig& cfg);

IndexReport interface_index(const LatticeOperator& u_interface, const LatticeOperator& u_bulk,
                            const SwitchFunction& s2, const TraceWindow& window, const Tolerances& tol = {});

/// Û(t, k1, k2) for a translation-invariant loop, sampled at midpoints of each
/// piece (a Riemann sum in time) on a periodic k-grid.
struct BlochGrid {
  int n_k1 = 0, n_k2 = 0, n_t = 0;
  int n_orb = 0;
  double period = 0;
  std::vector<double> times;
  std::vector<double> weights;  // time quadrature weights
  std::vector<Matrix> unitary;          // index (t * n_k1 + i1) * n_k2 + i2
  std::vector<Matrix> log_derivative;   // U^* dU/dt, exact from the generator
  std::vector<Matrix> final_unitary;    // Û(T, k), index i1 * n_k2 + i2

  const Matrix& u(int it, int i1, int i2) const { return unitary[(std::size_t(it) * n_k1 + i1) * n_k2 + i2]; }
};

// One piece of a Bloch loop: duration and generator as a function of the k-grid point.
struct BlochPiece {
  double duration = 0;
  std::function<Matrix(int, int)> generator;
};

BlochGrid bloch_grid(const std::vector<BlochPiece>& pieces, int n_orb, double T, int n_k1, int n_k2, int n_t);
BlochGrid bloch_grid(const DriveProtocol& p, int n_k1, int n_k2, int n_t);
// Relative loop of p against its effective vacuum at eps, built k by k.
BlochGrid bloch_relative_grid(const DriveProtocol& p, double eps, int n_k1, int n_k2, int n_t);

IndexReport winding_3d(const BlochGrid& grid, const Tolerances& tol = {});

// Propagator over one period of the strip (open, L1 sites in direction 1) at momentum k2.
Matrix strip_propagator(const DriveProtocol& p, int L1, double k2);

// (i / 2pi) sum_k tr(U^* dU/dk Q_r) dk with centered differences.
IndexReport winding_k2(const std::function<Matrix(double)>& u_of_k, int n_k, int r, int n_orb,
                       const Tolerances& tol = {});

struct AdditivityResult {
  IndexReport product;
  IndexReport first;
  IndexReport second;
  double lhs = 0, rhs = 0, defect = 0;
};

AdditivityResult additivity_check(std::shared_ptr<const LoopPath> u, std::shared_ptr<const LoopPath> v,
                                  const BulkSwitches& sw, const QuadratureConfig& q = {},
                                  const Tolerances& tol = {});

struct EpsilonShiftResult {
  RelativeGapResult at_eps, at_eps_prime;
  IndexReport chern;
  double delta_bulk = 0;
  double defect = 0;
};

EpsilonShiftResult epsilon_shift_check(const DriveProtocol& protocol, double eps, double eps_prime,
                                       const RestrictionMap& edge_map, RelativeConfig cfg);

struct IdentityDefect {
  std::string name;
  double defect = 0;
};

// Pointwise full-trace identities; exact at finite dimension up to roundoff.
double additivity_identity_defect(const LoopPath& u, const LoopPath& v, const RealVector& l1,
                                  const RealVector& l2, const std::vector<double>& times);
double bulk_edge_identity_defect(const LoopPath& u, const RealVector& l2, const RealVector& p1r,
                                 const std::vector<double>& times);
double chern_identity_defect(const Matrix& p, const RealVector& l1, const RealVector& l2,
                             const std::vector<double>& phases);
// Translation-invariant pair on a chain: Tr(A[L,B]) vs (A X B)_00 vs i int dk/2pi Â dB̂.
double periodic_trace_defect(int n_orb, int range, std::uint64_t seed);

std::vector<IdentityDefect> algebraic_identity_suite(const LoopPath& u, const LoopPath& v, const RealVector& l1,
                                                     const RealVector& l2, const RealVector& p1r,
                                                     const Matrix& projection, const std::vector<double>& times,
                                                     std::uint64_t seed = 1);

}  // namespace floquet
