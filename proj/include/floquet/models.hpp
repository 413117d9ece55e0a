#pragma once

#include "floquet/lattice.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace floquet {

/// Translation-invariant generator given as hopping terms: H_{m, m+d} += block.
///
/// Bloch convention: H(k) = sum_d e^{+i k.d} block_d, i.e. H(k) = sum_n e^{i k.n} H_{0,n}.
struct Hopping {
  int d1 = 0;
  int d2 = 0;
  Matrix block;
};

struct HoppingModel {
  int n_orb = 1;
  std::vector<Hopping> terms;

  void add(int d1, int d2, const Matrix& block);
  // Adds the term and its Hermitian partner (or the Hermitian part for d = 0).
  void add_hermitian(int d1, int d2, const Matrix& block);

  Matrix bloch(double k1, double k2) const;
  // Open in direction 1 (L1 sites, n1 = 0..L1-1), Fourier transformed along direction 2.
  Matrix strip(int L1, double k2) const;
  LatticeOperator on(const LatticeGeometry& g) const;
  HoppingModel scaled(double s) const;
};

struct Segment {
  double duration = 0;
  LatticeOperator generator;
  std::optional<HoppingModel> bloch;  // present for translation-invariant segments
};

struct DriveProtocol {
  double period = 0;
  std::vector<Segment> segments;

  const LatticeGeometry& geometry() const { return segments.front().generator.geometry; }
  bool translation_invariant() const;
  std::vector<double> breakpoints() const;
  // Durations sum to the period; every generator Hermitian.
  void validate() const;
};

double hermiticity_tolerance(const Matrix& h);

DriveProtocol five_step_drive(const LatticeGeometry& g, double J, double delta, double T);
// Coupling J such that each hopping step is a full swap: J * T / 5 = pi / 2.
double full_coupling(double T);

// Two-band Chern insulator: sin k1 sx + sin k2 sy + (mass + cos k1 + cos k2) sz.
HoppingModel chern_insulator(double mass);

DriveProtocol static_drive(const LatticeOperator& h0, double T);
DriveProtocol static_drive(const HoppingModel& h0, const LatticeGeometry& g, double T);
DriveProtocol effective_vacuum_protocol(const LatticeOperator& h_eff, double T);

struct DisorderSpec {
  double amplitude = 0;  // uniform on [-W, W] per site and orbital
  std::uint64_t seed = 0;
};

// Value depends only on (seed, n1, n2, orbital), so disorder commutes with restriction.
double disorder_value(const DisorderSpec& spec, int n1, int n2, int orbital);
LatticeOperator disorder_potential(const LatticeGeometry& g, const DisorderSpec& spec);
DriveProtocol add_onsite_disorder(const DriveProtocol& p, const DisorderSpec& spec);

DriveProtocol relative_protocol(const DriveProtocol& p1, const DriveProtocol& p2);

// Restriction of every generator, iota^* H iota.
DriveProtocol restrict_protocol(const DriveProtocol& p, const RestrictionMap& map);

// Adds a static operator to every segment generator.
DriveProtocol add_static_term(const DriveProtocol& p, const LatticeOperator& v);

// Protocols rewritten on the least common partition of their segment boundaries.
std::vector<DriveProtocol> common_refinement(const std::vector<DriveProtocol>& ps);

struct InterfaceSpec {
  DriveProtocol upper;  // acts on n1 >= cut
  DriveProtocol lower;  // acts on n1 < cut
  std::optional<DriveProtocol> coupling;
  int cut = 0;
};

DriveProtocol interface_hamiltonian(const InterfaceSpec& spec);

// Random Hermitian operator with |block(m,n)| <= amplitude e^{-mu |n1 - cut|} e^{-mu |m2 - n2|}.
LatticeOperator confined_perturbation(const LatticeGeometry& g, double amplitude, double mu,
                                      std::uint64_t seed, int cut = 0);

// Random Hermitian nearest-neighbour-range operator, used for generic local drives in tests.
LatticeOperator random_local_hermitian(const LatticeGeometry& g, double amplitude, int range,
                                       std::uint64_t seed);

}  // namespace floquet
