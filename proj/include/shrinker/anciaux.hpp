#pragma once
#include <complex>
#include <vector>

#include "shrinker/fields.hpp"
#include "shrinker/grid.hpp"
#include "shrinker/tolerances.hpp"

namespace shrinker {

// Complex structure on C^n = R^{2n}, coordinates ordered (x_1..x_n, y_1..y_n).
Vec complex_structure(const Vec& v);
Vec complex_scale(std::complex<double> c, const Vec& v);
// omega(a, b) = <J a, b>.
double symplectic_form(const Vec& a, const Vec& b);

// Profile-curve state: radius, delta = theta - phi, polar angle phi.
struct ProfileState {
  double r = 0.0;
  double delta = 0.0;
  double phi = 0.0;
};

struct ProfileRates {
  double r = 0.0;
  double delta = 0.0;
  double phi = 0.0;
  double theta() const { return delta + phi; }
};

ProfileRates ode_rhs(const ProfileState& state, int n);
double conserved_quantity(double r, double delta, int n);
double max_energy(int n);
double circle_radius(int n);

struct ProfileSample {
  double s = 0.0;
  double r = 0.0;
  double theta = 0.0;
  double phi = 0.0;
  double delta() const { return theta - phi; }
  ProfileState state() const { return {r, theta - phi, phi}; }
};

struct IntegratorOptions {
  double rtol = 1e-12;
  double atol = 1e-12;
  double min_radius = 1e-6;
};

// Uniform arclength samples of gamma = r e^{i phi}. Closed curves store [0, length) and the
// end-point mismatch in closure_gap; open integrations store [0, length] inclusive.
struct ProfileCurve {
  int n = 2;
  double energy = 0.0;
  int rotation_index = 0;
  int pieces = 1;
  bool closed = false;
  double closure_gap = 0.0;
  double length = 0.0;
  double conservation_drift = 0.0;
  std::vector<ProfileSample> samples;
  IntegratorOptions integrator;

  double spacing() const;
  // Re-integrates from the nearest sample; closed curves wrap s into [0, length).
  ProfileSample at(double s) const;
};

// Integrates by ds (either sign).
ProfileState advance(const ProfileState& state, int n, double ds, const IntegratorOptions& options = {});
ProfileCurve integrate(const ProfileState& initial, int n, double length, int intervals,
                       const IntegratorOptions& options = {});

// One curvature period, from an r-maximum to the next.
struct CurvaturePeriod {
  double energy = 0.0;
  double max_radius = 0.0;
  double min_radius = 0.0;
  double length = 0.0;
  double angle_advance = 0.0;
};

double max_radius_at_energy(int n, double energy);
CurvaturePeriod curvature_period(int n, double energy, const IntegratorOptions& options = {});
// Angle advance per period in the small-amplitude limit around the circle.
double limit_angle_advance(int n);

struct ShootOptions {
  double lo_ratio = 1e-3;  // bracket as fractions of the maximal energy
  double hi_ratio = 1.0 - 1e-9;
  int samples_per_piece = 96;
  IntegratorOptions integrator;
};

ProfileCurve shoot_closed(int n, int index, int pieces, const ShootOptions& options = {});
ProfileCurve circle_profile(int n, int pieces, int samples_per_piece);
// Closure gap measured by integrating the full loop again from the last sample.
double reintegrated_closure_gap(const ProfileCurve& curve);

struct CurveIntegrals {
  double radial_balance = 0.0;    // int (r^2/2 - n) r^{n-1} e^{-r^2/4} ds
  double weighted_balance = 0.0;  // int (1/(2r^2) - n/r^4) r^{n-1} e ds + int 4 cos^2 r^{n-5} e ds
  double rotation_sum = 0.0;      // |int gamma e^{-r^2/4} r^{n-1} ds|
};
CurveIntegrals curve_integrals(const ProfileCurve& curve);

// n - 3 + 4 sin^2(delta) - 4 cos^2(delta) at every sample.
struct SignCheck {
  double min_value = 0.0;
  double max_value = 0.0;
  bool passes = false;
};
SignCheck lagrangian_sign_check(const ProfileCurve& curve);

struct LegendrianCheck {
  double max_norm_error = 0.0;   // ||psi| - 1|
  double max_contact = 0.0;      // |omega(psi, d psi)|
  double max_mean_curvature = 0.0;  // |H^{M,S}|
};
LegendrianCheck check_legendrian(const Grid& legendrian);

struct LagrangianShrinker {
  ProfileCurve curve;
  Grid legendrian;
  Grid grid;
  double max_omega = 0.0;
  double max_metric_block_error = 0.0;
  double max_residual = 0.0;
  double max_mean_curvature_alignment = 0.0;  // |H - <H, J u_s> J u_s|
};

// Grid shape is {curve samples} followed by legendrian_shape.
LagrangianShrinker assemble(const ProfileCurve& curve, const Chart& legendrian, const std::vector<int>& legendrian_shape,
                            const Tolerances& tolerances = {}, GridOptions options = {});

// Tangent field on the legendrian, sampled on its grid (2n x N_M), with its ambient partial
// derivatives along each legendrian axis.
struct TangentFieldOnM {
  Mat values;
  std::vector<Mat> derivative;
  bool symmetric = false;
  double symmetry_defect = 0.0;
  int source = -1;  // basis index beta of the selected projection, -1 otherwise
  double functional = 0.0;  // int |grad w|^2 - |<A, J w>|^2
  double mass = 0.0;        // int |w|^2
  Vec functionals;          // per beta, select_w0 only
  Vec masses;
};

struct TangentFunctional {
  double gradient = 0.0;
  double form = 0.0;
  double mass = 0.0;
  double symmetry_defect = 0.0;
  double value() const { return gradient - form; }
};
TangentFunctional tangent_functional(const Grid& legendrian, const Mat& w, const std::vector<Mat>& dw);

// Tangential projection of the constant vector e_beta, differentiated through the 2-jet.
TangentFieldOnM projected_basis_field(const Grid& legendrian, int beta);

TangentFieldOnM select_w0(const Grid& legendrian, double symmetry_tol = 1e-6);
TangentFieldOnM unit_tangent_field(const Grid& legendrian);

enum class VariationFamily { N0, N1 };
// V = J(gamma w) (N0) or r^{-2} J(gamma w) (N1), with covariant derivatives from the curve
// rates and the derivative of w.
NormalField variation_field(const LagrangianShrinker& shrinker, const TangentFieldOnM& w, VariationFamily family);

// Pairings P_ab = <grad_a V, J u_b> between the curve direction s and the legendrian directions.
struct LagrangianVariationCheck {
  double max_asymmetry = 0.0;        // max |P_ab - P_ba| over all pairs
  double max_sj_mismatch = 0.0;      // |P_sj - predicted| for the family
  double max_js_mismatch = 0.0;      // |P_js - predicted|
  double max_defect_mismatch = 0.0;  // |(P_sj - P_js) - predicted defect|
  double max_defect = 0.0;
  double scale = 0.0;                // max |<w, e_j>| used for relative reporting
  bool lagrangian = false;
};
LagrangianVariationCheck lagrangian_variation_check(const LagrangianShrinker& shrinker, const TangentFieldOnM& w,
                                                    const NormalField& field, VariationFamily family,
                                                    double tolerance = 1e-6);

}  // namespace shrinker
