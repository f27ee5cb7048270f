#pragma once

namespace shrinker {

// Every threshold used by a check or verdict. Reports embed the full set.
struct Tolerances {
  double rank = 1e-8;               // smallest/largest singular value of the Jacobian
  double residual_analytic = 1e-10; // self-shrinker residual, analytic jets
  double residual_numeric = 1e-6;   // self-shrinker residual, integrated or differenced jets
  double eps_Q = 1e-6;              // Q < -eps_Q certifies instability
  double eps_c = 1e-7;              // constraint tolerance per unit weighted area
  double gram_cutoff = 1e-12;       // relative singular value cutoff, translation Gram
  double gram_condition = 1e12;     // condition number above which the Gram is flagged
  double basis_cutoff = 1e-12;      // relative eigenvalue cutoff, trial-basis mass matrix
  double constraint_cutoff = 1e-8;  // singular value cutoff, normalized constraint rows
  double closure = 1e-6;            // profile-curve closure gap
  double lagrangian = 1e-8;         // |omega(u_a, u_b)| and metric-block errors
  double oracle_rel = 1e-4;         // closed-form vs generic quadratic form
  double identity = 1e-6;           // integral identities on closed grids
  double differential = 1e-4;       // nodewise differential identities at default resolution
};

}  // namespace shrinker
