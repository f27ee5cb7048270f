#pragma once
#include <map>
#include <string>
#include <vector>

#include "shrinker/anciaux.hpp"
#include "shrinker/catalog.hpp"
#include "shrinker/fields.hpp"
#include "shrinker/tolerances.hpp"

namespace shrinker {

// int (|grad^perp V|^2 - |<A, V>|^2 - |V|^2/2) exp(-|X|^2/4) dmu.
double quadratic_form_Q(const Grid& grid, const NormalField& field);
// Symmetric bilinear form whose diagonal is quadratic_form_Q.
double bilinear_Q(const Grid& grid, const NormalField& v, const NormalField& w);

struct ConstraintResiduals {
  double h_pairing = 0.0;    // <V, H>_e
  Vec translation_pairing;   // int V exp(-|X|^2/4) dmu
  double tolerance = 0.0;    // eps_c times the weighted area, plus the tail bound
  bool admissible() const;
  bool operator==(const ConstraintResiduals&) const = default;
};

ConstraintResiduals constraint_residuals(const Grid& grid, const NormalField& field, const Tolerances& tolerances = {});

// V = a H + z^perp + V0 with V0 orthogonal to H and every E_beta^perp.
struct Decomposition {
  double a = 0.0;
  Vec z;
  Mat remainder;
  double gram_condition = 0.0;
  bool singular_gram = false;
};

Decomposition decompose(const Grid& grid, const NormalField& field, const Tolerances& tolerances = {});

enum class Verdict { unstable_certificate, stable_on_trial_space, inconclusive };
const char* to_string(Verdict verdict);
Verdict verdict_from_string(const std::string& name);

struct StabilityReport {
  std::string mode;
  double Q = 0.0;
  ConstraintResiduals residuals;
  Verdict verdict = Verdict::inconclusive;
  std::string certificate_field;
  int trial_space_dim = -1;                 // -1 for direct certificates
  std::map<std::string, double> values;     // auxiliary numbers (closed forms, integrals)
  std::vector<std::string> flags;
  bool operator==(const StabilityReport&) const = default;
};

// V = (a H1, b H2) on the product with a I1 J2 + b J1 I2 = 0.
StabilityReport certify_product_instability(const BuiltShrinker& first, const BuiltShrinker& second,
                                            const Tolerances& tolerances = {});

enum class CertificateMode { general, lagrangian };
const char* to_string(CertificateMode mode);
CertificateMode certificate_mode(const std::string& name);

// Throws CaseNotCovered when (n, E, mode) lies outside the proven range.
void require_covered_case(int n, double energy, CertificateMode mode);

// Closed-form Q for V = J(gamma w) (general) or r^{-2} J(gamma w) (lagrangian).
double anciaux_closed_form_Q(const ProfileCurve& curve, const TangentFieldOnM& w, CertificateMode mode);

// Certificate field for the mode: w0 from select_w0 (n >= 3) or the unit tangent (n = 2).
TangentFieldOnM certificate_tangent_field(const LagrangianShrinker& shrinker);

StabilityReport certify_anciaux_instability(const LagrangianShrinker& shrinker, CertificateMode mode,
                                            const Tolerances& tolerances = {});

// Minimum Rayleigh quotient Q(V)/<V,V>_e over the admissible part of span(basis).
StabilityReport stability_verdict_on_trial_space(const Grid& grid, const std::vector<NormalField>& basis,
                                                 const Tolerances& tolerances = {});

// Normal projections of monomials in X/scale times each coordinate vector, up to total degree.
std::vector<NormalField> polynomial_trial_basis(const Grid& grid, int degree, double scale);

}  // namespace shrinker
