#include "shrinker/stability.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "shrinker/errors.hpp"
#include "shrinker/functional.hpp"

namespace shrinker {

namespace {

double constraint_tolerance(const Grid& grid, const Tolerances& tolerances) {
  return tolerances.eps_c * grid.weighted_area() + (grid.truncated() ? grid.tail_bound(1) : 0.0);
}

// Rows: <B_k, H>_e, then int B_k e per ambient coordinate.
Mat constraint_matrix(const Grid& grid, const std::vector<NormalField>& basis) {
  const int m = grid.ambient();
  const Mat h = grid.mean_curvature();
  Mat out(1 + m, static_cast<Eigen::Index>(basis.size()));
  for (size_t k = 0; k < basis.size(); ++k) {
    const auto col = static_cast<Eigen::Index>(k);
    out(0, col) = weighted_inner(grid, basis[k].values, h);
    out.block(1, col, m, 1) = basis[k].values * grid.gaussian_measure();
  }
  return out;
}

// Norms of the constraint functionals V -> <V, H>_e and V -> <V, E_beta^perp>_e.
Vec constraint_norms(const Grid& grid) {
  const int m = grid.ambient();
  const Mat h = grid.mean_curvature();
  Vec out(1 + m);
  out(0) = std::sqrt(weighted_inner(grid, h, h));
  for (int b = 0; b < m; ++b) {
    const Mat e = normal_projection(grid, Vec::Unit(m, b).replicate(1, grid.size()));
    out(1 + b) = std::sqrt(weighted_inner(grid, e, e));
  }
  return out;
}

Vec curve_weights(const ProfileCurve& curve, CertificateMode mode, double shift) {
  const double h = curve.spacing();
  const int power = curve.n - 1 + (mode == CertificateMode::lagrangian ? -4 : 0);
  Vec out(static_cast<Eigen::Index>(curve.samples.size()));
  for (size_t k = 0; k < curve.samples.size(); ++k) {
    const auto& s = curve.samples[k];
    const double sn = std::sin(s.delta());
    const double factor = shift == 0.0 ? 1.0 : (0.5 * s.r * s.r - 2.0 + 4.0 * sn * sn);
    out(static_cast<Eigen::Index>(k)) = h * factor * std::exp(-s.r * s.r / 4.0) * std::pow(s.r, power);
  }
  return out;
}

}  // namespace

double bilinear_Q(const Grid& grid, const NormalField& v, const NormalField& w) {
  const Vec density = gradient_pairing(grid, v, w) - second_form_pairing(grid, v.values, w.values) -
                      0.5 * column_dot(v.values, w.values);
  return grid.integrate_gaussian(density);
}

double quadratic_form_Q(const Grid& grid, const NormalField& field) { return grid.integrate_gaussian(stability_density(grid, field)); }

bool ConstraintResiduals::admissible() const {
  return std::abs(h_pairing) <= tolerance && translation_pairing.norm() <= tolerance;
}

ConstraintResiduals constraint_residuals(const Grid& grid, const NormalField& field, const Tolerances& tolerances) {
  const Mat c = constraint_matrix(grid, {field});
  ConstraintResiduals res;
  res.h_pairing = c(0, 0);
  res.translation_pairing = c.col(0).tail(grid.ambient());
  res.tolerance = constraint_tolerance(grid, tolerances);
  return res;
}

Decomposition decompose(const Grid& grid, const NormalField& field, const Tolerances& tolerances) {
  const int m = grid.ambient();
  const Mat h = grid.mean_curvature();
  const double h_norm2 = weighted_inner(grid, h, h);
  if (!(h_norm2 > 0.0)) throw Error(ErrorCode::ZeroMeanCurvature, "||H||_e vanishes; a is undefined");
  Decomposition out;
  out.a = weighted_inner(grid, field.values, h) / h_norm2;
  const Mat rest = field.values - out.a * h;
  std::vector<Mat> translations;
  for (int beta = 0; beta < m; ++beta) translations.push_back(normal_projection(grid, Vec::Unit(m, beta).replicate(1, grid.size())));
  Mat gram(m, m);
  Vec rhs(m);
  for (int b = 0; b < m; ++b) {
    rhs(b) = weighted_inner(grid, rest, translations[static_cast<size_t>(b)]);
    for (int d = 0; d < m; ++d) gram(b, d) = weighted_inner(grid, translations[static_cast<size_t>(b)], translations[static_cast<size_t>(d)]);
  }
  Eigen::JacobiSVD<Mat> svd(gram, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec& sv = svd.singularValues();
  const double smax = sv(0);
  out.gram_condition = sv(m - 1) > 0.0 ? smax / sv(m - 1) : std::numeric_limits<double>::infinity();
  out.singular_gram = !(out.gram_condition <= tolerances.gram_condition);
  Vec inv = Vec::Zero(m);
  for (int k = 0; k < m; ++k)
    if (sv(k) > tolerances.gram_cutoff * smax) inv(k) = 1.0 / sv(k);
  out.z = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose() * rhs;
  out.remainder = rest;
  for (int b = 0; b < m; ++b) out.remainder -= out.z(b) * translations[static_cast<size_t>(b)];
  return out;
}

const char* to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::unstable_certificate: return "unstable_certificate";
    case Verdict::stable_on_trial_space: return "stable_on_trial_space";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

Verdict verdict_from_string(const std::string& name) {
  for (Verdict v : {Verdict::unstable_certificate, Verdict::stable_on_trial_space, Verdict::inconclusive})
    if (name == to_string(v)) return v;
  throw Error(ErrorCode::UnknownName, "unknown verdict '" + name + "'");
}

const char* to_string(CertificateMode mode) { return mode == CertificateMode::general ? "general" : "lagrangian"; }

CertificateMode certificate_mode(const std::string& name) {
  if (name == "general") return CertificateMode::general;
  if (name == "lagrangian") return CertificateMode::lagrangian;
  throw Error(ErrorCode::UnknownName, "unknown certificate mode '" + name + "'");
}

StabilityReport certify_product_instability(const BuiltShrinker& first, const BuiltShrinker& second, const Tolerances& tolerances) {
  const auto factor_integrals = [](const Grid& g) {
    const Mat h = g.mean_curvature();
    return std::pair{g.integrate_gaussian(column_dot(h, h)), g.weighted_area()};
  };
  const auto [i1, j1] = factor_integrals(first.grid);
  const auto [i2, j2] = factor_integrals(second.grid);
  const double floor = tolerances.eps_c;
  if (!(i1 > floor * j1) || !(i2 > floor * j2)) {
    throw Error(ErrorCode::ZeroMeanCurvature, "a product factor has vanishing mean curvature");
  }
  const double a = 1.0;
  const double b = -i1 * j2 / (j1 * i2);
  const BuiltShrinker product = product_shrinker(first, second);
  const Grid& grid = product.grid;
  const int m1 = first.grid.ambient();
  const int m2 = second.grid.ambient();
  const Mat h = grid.mean_curvature();
  Mat values(grid.ambient(), grid.size());
  values.topRows(m1) = a * h.topRows(m1);
  values.bottomRows(m2) = b * h.bottomRows(m2);
  const NormalField field = normal_covariant_derivative(grid, values);

  StabilityReport report;
  report.mode = "product";
  report.certificate_field = "product (a H1, b H2)";
  report.Q = quadratic_form_Q(grid, field);
  report.residuals = constraint_residuals(grid, field, tolerances);
  const double closed = -a * a * i1 * j2 - b * b * j1 * i2;
  report.values = {{"a", a}, {"b", b}, {"I1", i1}, {"J1", j1}, {"I2", i2}, {"J2", j2}, {"Q_closed_form", closed},
                   {"Q_generic", report.Q}};
  const bool agree = std::abs(report.Q - closed) <= tolerances.identity * std::abs(closed);
  if (!agree) report.flags.push_back("closed form and generic Q disagree");
  if (!report.residuals.admissible()) report.flags.push_back("constraints not satisfied");
  report.verdict = (agree && report.residuals.admissible() && report.Q < -tolerances.eps_Q) ? Verdict::unstable_certificate
                                                                                           : Verdict::inconclusive;
  return report;
}

void require_covered_case(int n, double energy, CertificateMode mode) {
  if (mode != CertificateMode::lagrangian) return;
  if (n > 2 && n < 7 && energy < max_energy(n) / std::sqrt(2.0) * (1.0 - 1e-12)) {
    throw Error(ErrorCode::CaseNotCovered, "Lagrangian certificate needs n = 2, n >= 7 or E >= E_max/sqrt(2) (n = " +
                                               std::to_string(n) + ", E/E_max = " + std::to_string(energy / max_energy(n)) + ")");
  }
}

double anciaux_closed_form_Q(const ProfileCurve& curve, const TangentFieldOnM& w, CertificateMode mode) {
  const double shifted = curve_weights(curve, mode, 1.0).sum();
  const double plain = curve_weights(curve, mode, 0.0).sum();
  return -shifted * w.mass + plain * w.functional;
}

TangentFieldOnM certificate_tangent_field(const LagrangianShrinker& shrinker) {
  if (shrinker.curve.n == 2) return unit_tangent_field(shrinker.legendrian);
  return select_w0(shrinker.legendrian);
}

StabilityReport certify_anciaux_instability(const LagrangianShrinker& shrinker, CertificateMode mode, const Tolerances& tolerances) {
  const ProfileCurve& curve = shrinker.curve;
  require_covered_case(curve.n, curve.energy, mode);
  StabilityReport report;
  report.mode = to_string(mode);
  if (mode == CertificateMode::lagrangian && curve.n >= 7) {
    const SignCheck sign = lagrangian_sign_check(curve);
    report.values["sign_min"] = sign.min_value;
    report.values["sign_max"] = sign.max_value;
    if (!sign.passes) throw Error(ErrorCode::CertificateFailed, "sign condition fails on the profile curve");
  }
  const TangentFieldOnM w = certificate_tangent_field(shrinker);
  const VariationFamily family = mode == CertificateMode::general ? VariationFamily::N0 : VariationFamily::N1;
  const NormalField field = variation_field(shrinker, w, family);
  const Grid& grid = shrinker.grid;
  report.certificate_field = std::string(family == VariationFamily::N0 ? "N0: J(gamma w)" : "N1: r^-2 J(gamma w)") +
                             (curve.n == 2 ? ", w = unit tangent" : ", w = projected E_" + std::to_string(w.source));
  report.Q = quadratic_form_Q(grid, field);
  report.residuals = constraint_residuals(grid, field, tolerances);
  const double closed = anciaux_closed_form_Q(curve, w, mode);
  const CurveIntegrals integrals = curve_integrals(curve);
  report.values.insert({{"Q_closed_form", closed}, {"Q_generic", report.Q}, {"energy", curve.energy},
                        {"energy_ratio", curve.energy / max_energy(curve.n)}, {"w_functional", w.functional},
                        {"w_mass", w.mass}, {"rotation_sum", integrals.rotation_sum},
                        {"radial_balance", integrals.radial_balance}, {"weighted_balance", integrals.weighted_balance},
                        {"closure_gap", curve.closure_gap}});
  const bool agree = std::abs(report.Q - closed) <= tolerances.oracle_rel * std::abs(closed);
  if (!agree) report.flags.push_back("closed form and generic Q disagree");
  if (!report.residuals.admissible()) report.flags.push_back("constraints not satisfied");
  if (!(report.Q < -tolerances.eps_Q)) {
    throw Error(ErrorCode::CertificateFailed, "Q = " + std::to_string(report.Q) + " is not below -eps_Q");
  }
  report.verdict = agree && report.residuals.admissible() ? Verdict::unstable_certificate : Verdict::inconclusive;
  return report;
}

StabilityReport stability_verdict_on_trial_space(const Grid& grid, const std::vector<NormalField>& basis, const Tolerances& tolerances) {
  StabilityReport report;
  report.mode = "trial_space";
  report.certificate_field = "trial-space minimizer";
  const auto count = static_cast<Eigen::Index>(basis.size());
  if (count == 0) {
    report.trial_space_dim = 0;
    report.verdict = Verdict::stable_on_trial_space;
    return report;
  }
  Mat mass(count, count), form(count, count);
  for (Eigen::Index k = 0; k < count; ++k) {
    for (Eigen::Index l = k; l < count; ++l) {
      mass(k, l) = mass(l, k) = weighted_inner(grid, basis[static_cast<size_t>(k)], basis[static_cast<size_t>(l)]);
      form(k, l) = form(l, k) = bilinear_Q(grid, basis[static_cast<size_t>(k)], basis[static_cast<size_t>(l)]);
    }
  }
  // Mass-orthonormal coordinates on the numerically independent span.
  Eigen::SelfAdjointEigenSolver<Mat> mass_eig(mass);
  const Vec& mu = mass_eig.eigenvalues();
  const double mu_max = mu.maxCoeff();
  std::vector<Eigen::Index> kept;
  for (Eigen::Index k = 0; k < count; ++k)
    if (mu(k) > tolerances.basis_cutoff * mu_max) kept.push_back(k);
  if (static_cast<Eigen::Index>(kept.size()) < count) report.flags.push_back("RankDeficientBasis");
  Mat coords(count, static_cast<Eigen::Index>(kept.size()));
  for (size_t k = 0; k < kept.size(); ++k) coords.col(static_cast<Eigen::Index>(k)) = mass_eig.eigenvectors().col(kept[k]) / std::sqrt(mu(kept[k]));

  // Admissible subspace: null space of the constraint rows scaled by their functional norms, so
  // entries are cosines and rows the span already satisfies fall below the cutoff.
  Mat constraints = constraint_matrix(grid, basis) * coords;
  const Vec norms = constraint_norms(grid);
  for (Eigen::Index r = 0; r < constraints.rows(); ++r) {
    if (norms(r) > 0.0) constraints.row(r) /= norms(r);
  }
  Eigen::JacobiSVD<Mat> svd(constraints, Eigen::ComputeFullV);
  const Vec& sv = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k)
    if (sv(k) > tolerances.constraint_cutoff) ++rank;
  const Eigen::Index dim = coords.cols() - rank;
  report.trial_space_dim = static_cast<int>(dim);
  report.values["basis_size"] = static_cast<double>(count);
  report.values["independent_span"] = static_cast<double>(coords.cols());
  if (dim == 0) {
    report.verdict = Verdict::stable_on_trial_space;
    return report;
  }
  const Mat admissible = coords * svd.matrixV().rightCols(dim);
  const Mat restricted = admissible.transpose() * form * admissible;
  Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (restricted + restricted.transpose()));
  const double lambda = eig.eigenvalues()(0);
  report.values["min_rayleigh"] = lambda;
  report.values["max_rayleigh"] = eig.eigenvalues()(dim - 1);
  if (lambda >= -tolerances.eps_Q) {
    report.Q = lambda;
    report.verdict = Verdict::stable_on_trial_space;
    return report;
  }
  // Materialize the minimizer and re-verify it directly.
  const Vec c = admissible * eig.eigenvectors().col(0);
  NormalField field = scaled(basis[0], c(0));
  for (Eigen::Index k = 1; k < count; ++k) field = combine(field, 1.0, basis[static_cast<size_t>(k)], c(k));
  report.Q = quadratic_form_Q(grid, field);
  report.residuals = constraint_residuals(grid, field, tolerances);
  report.values["minimizer_norm2"] = weighted_inner(grid, field, field);
  report.verdict = report.Q < -tolerances.eps_Q && report.residuals.admissible() ? Verdict::unstable_certificate
                                                                                 : Verdict::inconclusive;
  return report;
}

std::vector<NormalField> polynomial_trial_basis(const Grid& grid, int degree, double scale) {
  const int m = grid.ambient();
  const Mat x = grid.positions() / scale;
  // Exponent vectors with total degree <= degree, lexicographic.
  std::vector<std::vector<int>> exponents{std::vector<int>(static_cast<size_t>(m), 0)};
  for (int d = 1; d <= degree; ++d) {
    std::vector<std::vector<int>> next;
    for (const auto& e : exponents) {
      int total = 0;
      for (int v : e) total += v;
      if (total != d - 1) continue;
      int last = 0;
      for (int a = 0; a < m; ++a)
        if (e[static_cast<size_t>(a)] > 0) last = a;
      for (int a = last; a < m; ++a) {
        auto f = e;
        ++f[static_cast<size_t>(a)];
        next.push_back(f);
      }
    }
    exponents.insert(exponents.end(), next.begin(), next.end());
  }
  std::vector<NormalField> basis;
  for (const auto& e : exponents) {
    Vec mono = Vec::Ones(grid.size());
    for (int a = 0; a < m; ++a)
      if (e[static_cast<size_t>(a)] > 0) mono = mono.cwiseProduct(x.row(a).transpose().array().pow(e[static_cast<size_t>(a)]).matrix());
    for (int beta = 0; beta < m; ++beta) {
      Mat ambient = Mat::Zero(m, grid.size());
      ambient.row(beta) = mono.transpose();
      basis.push_back(make_normal_field(grid, ambient));
    }
  }
  return basis;
}

}  // namespace shrinker
