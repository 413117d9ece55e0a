#pragma once

#include "floquet/linalg.hpp"
#include "floquet/report.hpp"

#include <optional>
#include <vector>

namespace floquet {

/// Eigen-system of a one-period unitary, phases theta in (-pi, pi].
/// Quasi-energy E and phase are related by e^{-iTE} = e^{i theta}.
struct UnitarySpectrum {
  RealVector phases;
  Matrix vectors;
  Index dim = 0;
  double reconstruction_error = 0;  // Frobenius
};

// Route: complex Schur form (LAPACK zgees); for a normal matrix the triangular
// factor is diagonal up to roundoff and the Schur vectors are eigenvectors.
UnitarySpectrum eigendecompose_unitary(const Matrix& u);

struct GapDescriptor {
  double epsilon = 0;  // quasi-energy of the arc midpoint, in [0, 2pi/T)
  double phase_begin = 0;  // arc runs counterclockwise from phase_begin to phase_end
  double phase_end = 0;
  double width = 0;
  bool midpoint = true;
};

std::vector<GapDescriptor> find_gaps(const UnitarySpectrum& s, double min_width, double T);

// Wraps an angle into (-pi, pi].
double wrap_phase(double x);

// Throws unless e^{-iT eps} lies in a gap of width >= min_width, at least
// max(1e-6, 3 x reconstruction error) away from every eigenphase.
GapDescriptor validate_gap(const UnitarySpectrum& s, double eps, double T, double min_width);

/// (i/T) log with branch cut at -T eps: eigenvalues in (eps, eps + 2pi/T).
LatticeOperator effective_hamiltonian(const UnitarySpectrum& s, const LatticeGeometry& g, double eps,
                                      double T, double min_width);
LatticeOperator effective_hamiltonian(const LatticeOperator& u_T, double eps, double T, double min_width);

/// Spectral projection on quasi-energies in (eps, eps'), i.e. phases on the
/// clockwise arc from e^{-iT eps} to e^{-iT eps'}. eps' - eps = 2pi/T gives I.
LatticeOperator arc_projection(const UnitarySpectrum& s, const LatticeGeometry& g, double eps,
                               double eps_prime, double T, double min_width);

/// c(P) = -2 pi i Tr_W(P [[L1, P], [L2, P]]).
IndexReport chern_number(const LatticeOperator& p, const RealVector& switch1, const RealVector& switch2,
                         const TraceWindow& window, const Tolerances& tol = {});

double projection_defect(const Matrix& p);

}  // namespace floquet
