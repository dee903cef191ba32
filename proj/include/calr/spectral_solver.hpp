#pragma once

#include <Eigen/Core>
#include <complex>
#include <memory>
#include <optional>
#include <vector>

#include "calr/basis.hpp"
#include "calr/medium.hpp"

namespace calr {

using cplx = std::complex<double>;

/// Angular mode. 2D: k = +1 / -1 for e^{+-i l theta} (k = 0 when l = 0).
/// 3D: spherical harmonic Y_l^k, |k| <= l.
struct ModeIndex {
  int l = 0;
  int k = 0;
  auto operator<=>(const ModeIndex&) const = default;
};

/// Angular normalization: integral of |Y|^2 over the unit circle/sphere.
double angular_weight(int dim);

cplx angular_harmonic(int dim, ModeIndex m, const Eigen::VectorXd& direction);

/// Flux-jump source on the circle/sphere r = radius:
/// [s a du/dr] = sum g_m Y_m.
struct ModeSpectrum {
  int dim = 2;
  double radius = 1.0;
  int cutoff = 0;
  std::vector<std::pair<ModeIndex, cplx>> coefficients;  // sorted by mode, nonzero
  /// True when the table truncates an infinite geometric series.
  bool infinite_tail = false;

  static ModeSpectrum geometric(int dim, double radius, double t, int max_mode);
  static ModeSpectrum single(int dim, double radius, ModeIndex m, cplx g, int cutoff = -1);

  void validate() const;
  ModeSpectrum scaled(cplx factor) const;
  cplx coefficient(ModeIndex m) const;
  /// |g_L| times the largest per-mode growth ratio observed near the cutoff.
  double tail_estimate() const;
};

ModeSpectrum linear_combination(cplx alpha, const ModeSpectrum& a, cplx beta, const ModeSpectrum& b);

struct Segment {
  double ra, rb;
  std::size_t layer;
  RadialProfile profile;
  bool plasmonic;
};

/// Medium split into segments (at the source radius when present) with
/// fundamental pairs tabulated for every order up to `max_order`.
class Discretization {
 public:
  Discretization(LayeredMedium medium, std::optional<double> source_radius, int max_order);

  const LayeredMedium& medium() const { return medium_; }
  const std::vector<Segment>& segments() const { return segments_; }
  std::optional<double> source_radius() const { return source_radius_; }
  /// Interface index i (between segments i and i+1) carrying the source.
  std::optional<std::size_t> source_interface() const { return source_interface_; }
  int max_order() const { return max_order_; }
  int dim() const { return medium_.dim; }

  const RadialBasis& basis(int ell, std::size_t segment) const;
  std::size_t unknowns() const { return 2 * segments_.size() - 1; }
  /// Column of the growing (decaying) coefficient of a segment, -1 if absent.
  static int column(std::size_t segment, bool decaying);
  /// Segment containing r; at an interface, `outer_side` picks the outer one.
  std::size_t segment_at(double r, bool outer_side = false) const;

 private:
  LayeredMedium medium_;
  std::optional<double> source_radius_;
  std::optional<std::size_t> source_interface_;
  int max_order_;
  std::vector<Segment> segments_;
  std::vector<std::vector<BasisPtr>> bases_;  // [ell][segment]
};

/// Per-mode linear system: value and s*flux continuity at every interface,
/// the flux jump at the source radius, and the outer Dirichlet value.
struct ModeSystem {
  int ell = 0;
  double delta = 0;
  Eigen::MatrixXcd matrix;
  Eigen::VectorXcd rhs;
  double rcond = 0;  // reciprocal 2-norm condition of the equilibrated matrix
  bool resonant = false;  // delta == 0 with a plasmonic segment
};

ModeSystem assemble_mode_system(const Discretization& disc, int ell, double delta, cplx jump,
                                cplx outer_value = 0.0);
ModeSystem assemble_mode_system(const Discretization& disc, const ModeSpectrum& src, ModeIndex m,
                                double delta);
/// Solves the assembled system; throws ResonanceSingular / SolverError.
Eigen::VectorXcd solve_mode_system(const ModeSystem& sys);

/// Values of a radial coefficient vector: (u, p) with p = a r^{d-1} u'.
std::pair<cplx, cplx> radial_value(const Discretization& disc, int ell,
                                   const Eigen::VectorXcd& coeffs, double r,
                                   bool outer_side = false);

struct Field {
  std::shared_ptr<const Discretization> disc;
  double delta = 0;
  std::vector<ModeIndex> modes;
  std::vector<Eigen::VectorXcd> coefficients;  // per mode, layout of Discretization::column

  int dim() const { return disc->dim(); }
  std::pair<cplx, cplx> radial(std::size_t mode, double r, bool outer_side = false) const;
  /// (growing, decaying) coefficients of a segment.
  std::pair<cplx, cplx> segment_coefficients(std::size_t mode, std::size_t segment) const;
  Field scaled(cplx factor) const;
};

Field linear_combination(cplx alpha, const Field& a, cplx beta, const Field& b);

Field solve_field(std::shared_ptr<const Discretization> disc, const ModeSpectrum& src, double delta);
Field solve_field(const LayeredMedium& m, const ModeSpectrum& src, double delta, int cutoff);

cplx evaluate(const Field& f, const Eigen::VectorXd& x);

/// int_{a<|x|<b} |grad u|^2 (unweighted by the coefficient).
double gradient_energy(const Field& f, double a, double b);
double l2_energy(const Field& f, double a, double b);
double h1_norm(const Field& f, double a, double b);
/// int_{a<|x|<b} s a |grad u|^2 from boundary terms.
cplx weighted_energy(const Field& f, double a, double b);

/// Trace norm (N_d R^{d-1} sum (1+l^2)^s |g|^2)^{1/2} of a coefficient table.
double trace_norm(const std::vector<std::pair<ModeIndex, cplx>>& g, double R, double s, int dim);
/// Trace norm of u (flux = false) or of the flux density a du/dr (flux = true).
double trace_norm(const Field& f, double R, double s, bool flux = false);

struct ResidualReport {
  double value = 0;  // max value mismatch across interfaces, relative
  double flux = 0;   // max s*flux mismatch (net of the source jump), relative
  double outer = 0;  // |u(R_Omega)| relative
};
ResidualReport interface_residual(const Field& f, const ModeSpectrum& src);

}  // namespace calr
