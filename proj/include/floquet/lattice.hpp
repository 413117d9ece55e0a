#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <vector>

namespace floquet {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Rectangular lattice with n_orb internal states per site.
///
/// Site coordinates run over origin1..origin1+L1-1 and origin2..origin2+L2-1.
/// Basis index of (n1, n2, orbital) is ((n1-origin1)*L2 + (n2-origin2))*n_orb + orbital,
/// i.e. site-major with n2 fastest, orbital-minor.
/// A periodic direction wraps around (torus / cylinder); distances along it use
/// the minimum-image convention.
struct LatticeGeometry {
  int L1 = 1;
  int L2 = 1;
  int n_orb = 1;
  int origin1 = 0;
  int origin2 = 0;
  bool periodic1 = false;
  bool periodic2 = false;

  Index dim() const { return Index(L1) * L2 * n_orb; }
  int sites() const { return L1 * L2; }
  Index site_index(int n1, int n2) const { return Index(n1 - origin1) * L2 + (n2 - origin2); }
  Index index(int n1, int n2, int orb) const { return site_index(n1, n2) * n_orb + orb; }
  int coord1(Index site) const { return origin1 + int(site / L2); }
  int coord2(Index site) const { return origin2 + int(site % L2); }
  bool contains(int n1, int n2) const {
    return n1 >= origin1 && n1 < origin1 + L1 && n2 >= origin2 && n2 < origin2 + L2;
  }
  // Separation along one direction, minimum image if periodic.
  int separation(int direction, int a, int b) const;
  int distance(Index site_m, Index site_n) const;

  bool operator==(const LatticeGeometry&) const = default;
};

LatticeGeometry build_geometry(int L1, int L2, int n_orb, int origin1 = 0, int origin2 = 0,
                               bool periodic1 = false, bool periodic2 = false);

// Torus centered on the origin: coordinates -L/2 .. L/2-1 in both directions.
LatticeGeometry centered_torus(int L1, int L2, int n_orb);

/// Dense operator tagged with its geometry.
struct LatticeOperator {
  LatticeGeometry geometry;
  Matrix m;

  LatticeOperator() = default;
  LatticeOperator(LatticeGeometry g, Matrix mat);
  static LatticeOperator zero(const LatticeGeometry& g);
  static LatticeOperator identity(const LatticeGeometry& g);

  Index dim() const { return m.rows(); }
  // n_orb x n_orb kernel block between two sites (site indices, not coordinates).
  Matrix block(Index site_m, Index site_n) const;
};

enum class SwitchKind { sharp, smooth };

/// Diagonal switch profile along one direction, 0 below the jump and 1 above.
///
/// On a periodic direction a second (downward) jump is unavoidable; it is
/// placed diametrically opposite, L/2 sites away, so that displacing the jump
/// is a pure translation.
struct SwitchFunction {
  LatticeGeometry geometry;
  int direction = 1;
  int jump = 0;
  double width = 1.0;
  RealVector diag;  // one value per basis index

  bool sharp() const { return width <= 1.0; }
  LatticeOperator as_operator() const;
};

SwitchFunction switch_function(const LatticeGeometry& g, int direction, int jump_position,
                               SwitchKind kind = SwitchKind::sharp, double width = 4.0);

/// Set of basis indices over which a finite-volume trace is taken.
struct TraceWindow {
  std::vector<Index> indices;
  double radius1 = 0;
  double radius2 = 0;

  static TraceWindow full(const LatticeGeometry& g);
  static TraceWindow from_sites(const LatticeGeometry& g,
                                const std::function<bool(int, int)>& keep_site);
  RealVector mask(Index dim) const;
};

// Sites whose offsets from (c1, c2) lie in [-r1, r1) x [-r2, r2), wrapped on periodic directions.
TraceWindow centered_window(const LatticeGeometry& g, int c1, int c2, int r1, int r2);
// Sites with n1 - origin1 < r and n2 offset from c2 in [-r2, r2).
TraceWindow edge_window(const LatticeGeometry& g, int r, int c2, int r2);

/// Sub-rectangle inclusion iota: target -> source.
struct RestrictionMap {
  LatticeGeometry source;
  LatticeGeometry target;
  std::vector<Index> source_index;  // source basis index of each target basis index
};

// Restrict to n1 in [n1_begin, n1_begin + width) keeping every n2.
RestrictionMap half_plane_map(const LatticeGeometry& source, int n1_begin, int width);
RestrictionMap sub_rectangle_map(const LatticeGeometry& source, int n1_begin, int width1,
                                 int n2_begin, int width2);

LatticeOperator restrict_op(const LatticeOperator& a, const RestrictionMap& map);
LatticeOperator embed(const LatticeOperator& a_edge, const RestrictionMap& map);

struct LocalityProfile {
  double exponent = 0;
  double prefactor = 0;
  double residual = 0;  // standard error of the fitted exponent
  bool effectively_zero = false;
  int points = 0;
  bool local() const { return exponent > 0 && std::isfinite(prefactor); }
};

// Spectral norm of a small block (exact via singular values).
double block_norm(const Matrix& b);

LocalityProfile locality_norm(const LatticeOperator& a, double mu);

enum class DecayProfile { distance, coordinate, mixed };

struct DecayFitOptions {
  DecayProfile profile = DecayProfile::distance;
  int cut = 0;        // n1 of the cut for coordinate / mixed profiles
  double floor = 1e-14;
  // Optional filter on (site_m, site_n); pairs failing it are ignored.
  std::function<bool(Index, Index)> keep;
};

/// Fits log of the distance envelope (largest block norm at each profile
/// value) to a straight line. The exponent is minus the slope.
LocalityProfile decay_rate_fit(const LatticeOperator& a, const DecayFitOptions& opt = {});

struct OperatorDiagnostics {
  double hermiticity_defect = 0;  // Frobenius norm of A - A^*
  double unitarity_defect = 0;    // Frobenius norm of A^* A - I
  cplx trace{0, 0};
};

OperatorDiagnostics operator_diagnostics(const Matrix& a);
double hermiticity_defect(const Matrix& a);
double unitarity_defect(const Matrix& a);

}  // namespace floquet
