#include <doctest.h>

#include "oracles.hpp"
#include "shrinker/catalog.hpp"
#include "shrinker/errors.hpp"
#include "shrinker/functional.hpp"
#include "shrinker/stability.hpp"

using namespace shrinker;

namespace {

ShrinkerSpec shoot_spec() {
  ShrinkerSpec spec = named_spec("anciaux", 2);
  spec.profile = "shoot";
  spec.index = 2;
  spec.pieces = 5;
  return spec;
}

// Periodic trapezoid rule over the profile samples.
double curve_integral(const ProfileCurve& curve, const std::function<double(const ProfileSample&)>& f) {
  double total = 0.0;
  for (const auto& s : curve.samples) total += f(s);
  return total * curve.length / static_cast<double>(curve.samples.size());
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidSpec;
}

}  // namespace

TEST_CASE("quadratic form on eigenfields") {
  const Grid s1 = build(named_spec("sphere", 1)).grid;
  const NormalField h = mean_curvature_field(s1);
  CHECK(quadratic_form_Q(s1, h) == doctest::Approx(-oracle::circle_H_norm2()).epsilon(1e-10));
  CHECK(quadratic_form_Q(s1, zero_field(s1)) == 0.0);

  Vec y(3);
  y << 0.4, 0.1, -0.9;
  double errors[2];
  int k = 0;
  for (const auto& res : {std::vector<int>{24, 48}, std::vector<int>{48, 96}}) {
    const Grid grid = build(named_spec("sphere", 2), res).grid;
    const NormalField yperp = translation_field(grid, y);
    errors[k++] = std::abs(quadratic_form_Q(grid, yperp) + 0.5 * weighted_inner(grid, yperp, yperp));
  }
  CHECK(errors[1] <= 1e-4);
  CHECK(oracle::observed_order(errors[0], errors[1]) >= 1.9);

  const Grid s2 = build(named_spec("sphere", 2)).grid;
  CHECK(quadratic_form_Q(s2, mean_curvature_field(s2)) ==
        doctest::Approx(-weighted_inner(s2, mean_curvature_field(s2), mean_curvature_field(s2))).epsilon(1e-10));
}

TEST_CASE("bilinear form is symmetric with Q on the diagonal") {
  const Grid grid = build(named_spec("sphere", 2)).grid;
  std::mt19937_64 rng(21);
  const NormalField v = make_normal_field(grid, oracle::AmbientField::random(rng, 3).sample(grid));
  const NormalField w = make_normal_field(grid, oracle::AmbientField::random(rng, 3).sample(grid));
  CHECK(bilinear_Q(grid, v, w) == doctest::Approx(bilinear_Q(grid, w, v)).epsilon(1e-12));
  CHECK(bilinear_Q(grid, v, v) == doctest::Approx(quadratic_form_Q(grid, v)).epsilon(1e-12));
  const double polar = 0.25 * (quadratic_form_Q(grid, combine(v, 1.0, w, 1.0)) - quadratic_form_Q(grid, combine(v, 1.0, w, -1.0)));
  CHECK(polar == doctest::Approx(bilinear_Q(grid, v, w)).epsilon(1e-10));
}

TEST_CASE("constraint residuals") {
  const Grid grid = build(named_spec("sphere", 1)).grid;
  const NormalField h = mean_curvature_field(grid);
  const ConstraintResiduals rh = constraint_residuals(grid, h);
  CHECK(rh.h_pairing == doctest::Approx(weighted_inner(grid, h, h)));
  CHECK(rh.translation_pairing.norm() <= 1e-7);
  CHECK_FALSE(rh.admissible());

  Vec y(2);
  y << 1.0, 2.0;
  const ConstraintResiduals ry = constraint_residuals(grid, translation_field(grid, y));
  CHECK(std::abs(ry.h_pairing) <= 1e-7);
  CHECK_FALSE(ry.admissible());

  const ConstraintResiduals r0 = constraint_residuals(grid, zero_field(grid));
  CHECK(r0.h_pairing == 0.0);
  CHECK(r0.translation_pairing.norm() == 0.0);
  CHECK(r0.admissible());
}

TEST_CASE("decomposition into H, translations and remainder") {
  const Grid grid = build(named_spec("sphere", 1)).grid;
  const NormalField h = mean_curvature_field(grid);
  SUBCASE("V = H") {
    const Decomposition d = decompose(grid, h);
    CHECK(d.a == doctest::Approx(1.0));
    CHECK(d.z.norm() <= 1e-8);
    CHECK(d.remainder.colwise().norm().maxCoeff() <= 1e-8);
  }
  SUBCASE("V = y^perp") {
    Vec y(2);
    y << -0.6, 1.4;
    const Decomposition d = decompose(grid, translation_field(grid, y));
    CHECK(std::abs(d.a) <= 1e-8);
    CHECK((d.z - y).norm() <= 1e-8);
    CHECK(d.remainder.colwise().norm().maxCoeff() <= 1e-8);
    CHECK_FALSE(d.singular_gram);
  }
  SUBCASE("manufactured admissible remainder is recovered") {
    std::mt19937_64 rng(22);
    const NormalField w = make_normal_field(grid, oracle::AmbientField::random(rng, 2).sample(grid));
    // Project w off H and both translations with a hand-assembled Gram solve.
    std::vector<NormalField> span{h, translation_field(grid, Vec::Unit(2, 0)), translation_field(grid, Vec::Unit(2, 1))};
    Mat gram(3, 3);
    Vec rhs(3);
    for (int i = 0; i < 3; ++i) {
      rhs(i) = weighted_inner(grid, span[static_cast<size_t>(i)], w);
      for (int j = 0; j < 3; ++j) gram(i, j) = weighted_inner(grid, span[static_cast<size_t>(i)], span[static_cast<size_t>(j)]);
    }
    const Vec coeff = gram.ldlt().solve(rhs);
    Mat v0 = w.values;
    for (int i = 0; i < 3; ++i) v0 -= coeff(i) * span[static_cast<size_t>(i)].values;
    Vec y(2);
    y << 0.3, -0.8;
    const Mat v = 0.7 * h.values + translation_field(grid, y).values + v0;
    const Decomposition d = decompose(grid, normal_covariant_derivative(grid, v));
    CHECK(d.a == doctest::Approx(0.7).epsilon(1e-8));
    CHECK((d.z - y).norm() <= 1e-8);
    CHECK((d.remainder - v0).colwise().norm().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("product of circles certificate") {
  const BuiltShrinker circle = build(named_spec("sphere", 1));
  const StabilityReport report = certify_product_instability(circle, circle);
  CHECK(report.verdict == Verdict::unstable_certificate);
  CHECK(report.Q == doctest::Approx(oracle::product_certificate_Q()).epsilon(1e-6));
  CHECK(std::abs(report.Q - (-29.046596)) <= 1e-4);
  CHECK(report.values.at("b") == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(report.values.at("Q_generic") == doctest::Approx(report.values.at("Q_closed_form")).epsilon(1e-6));
  CHECK(std::abs(report.residuals.h_pairing) <= 1e-8);
  CHECK(report.residuals.admissible());
}

TEST_CASE("product certificate needs nonzero mean curvature") {
  const BuiltShrinker line = build(named_spec("plane", 1));
  const BuiltShrinker circle = build(named_spec("sphere", 1));
  CHECK(code_of([&] { certify_product_instability(circle, line); }) == ErrorCode::ZeroMeanCurvature);
}

TEST_CASE("anciaux n = 2 certificates against curve closed forms") {
  for (const auto& spec : {named_spec("anciaux", 2), shoot_spec()}) {
    CAPTURE(spec.profile);
    const BuiltShrinker built = build(spec);
    const ProfileCurve& curve = built.lagrangian->curve;
    const double two_pi = 2.0 * oracle::kPi;
    const double general = two_pi * curve_integral(curve, [](const ProfileSample& s) {
      return -4.0 * std::pow(std::sin(s.delta()), 2) * std::exp(-s.r * s.r / 4.0) * s.r;
    });
    const double lagrangian = -two_pi * curve_integral(curve, [](const ProfileSample& s) {
      return s.r * s.r * std::exp(-s.r * s.r / 4.0) / std::pow(s.r, 3);
    });
    const StabilityReport g = certify_anciaux_instability(*built.lagrangian, CertificateMode::general);
    const StabilityReport l = certify_anciaux_instability(*built.lagrangian, CertificateMode::lagrangian);
    CHECK(g.Q == doctest::Approx(general).epsilon(1e-4));
    CHECK(l.Q == doctest::Approx(lagrangian).epsilon(1e-4));
    for (const auto* r : {&g, &l}) {
      CHECK(r->verdict == Verdict::unstable_certificate);
      CHECK(r->Q < -1e-6);
      CHECK(r->residuals.admissible());
      CHECK(r->flags.empty());
    }
  }
}

TEST_CASE("anciaux n = 3 certificates from the circle profile") {
  const BuiltShrinker built = build(named_spec("anciaux", 3));
  for (auto mode : {CertificateMode::general, CertificateMode::lagrangian}) {
    const StabilityReport r = certify_anciaux_instability(*built.lagrangian, mode);
    CHECK(r.verdict == Verdict::unstable_certificate);
    CHECK(r.values.at("Q_generic") == doctest::Approx(r.values.at("Q_closed_form")).epsilon(1e-4));
  }
}

TEST_CASE("covered cases for the Lagrangian certificate") {
  const double e4 = max_energy(4);
  CHECK(code_of([&] { require_covered_case(4, 0.5 * e4, CertificateMode::lagrangian); }) == ErrorCode::CaseNotCovered);
  CHECK_NOTHROW(require_covered_case(4, 0.5 * e4, CertificateMode::general));
  CHECK_NOTHROW(require_covered_case(4, 0.8 * e4, CertificateMode::lagrangian));
  CHECK_NOTHROW(require_covered_case(2, 0.1 * max_energy(2), CertificateMode::lagrangian));
  CHECK_NOTHROW(require_covered_case(7, 0.1 * max_energy(7), CertificateMode::lagrangian));
}

TEST_CASE("trial-space verdicts") {
  SUBCASE("spheres are stable on polynomial trial spaces") {
    for (const auto& [n, degree] : {std::pair{1, 10}, std::pair{2, 3}}) {
      const Grid grid = build(named_spec("sphere", n)).grid;
      const StabilityReport r = stability_verdict_on_trial_space(grid, polynomial_trial_basis(grid, degree, std::sqrt(2.0 * n)));
      CHECK(r.verdict == Verdict::stable_on_trial_space);
      CHECK(r.trial_space_dim >= 20);
      CHECK(r.values.at("min_rayleigh") >= -1e-6);
      // The first admissible modes on S^n(sqrt(2n)) have Rayleigh quotient 1/n.
      CHECK(r.values.at("min_rayleigh") == doctest::Approx(1.0 / n).epsilon(1e-3));
    }
  }
  SUBCASE("product basis (H1, 0), (0, H2) finds the certificate direction") {
    const BuiltShrinker circle = build(named_spec("sphere", 1));
    const BuiltShrinker product = product_shrinker(circle, circle);
    const Grid& grid = product.grid;
    const Mat h = grid.mean_curvature();
    Mat first = Mat::Zero(4, grid.size()), second = Mat::Zero(4, grid.size());
    first.topRows(2) = h.topRows(2);
    second.bottomRows(2) = h.bottomRows(2);
    const std::vector<NormalField> basis{normal_covariant_derivative(grid, first), normal_covariant_derivative(grid, second)};
    const StabilityReport trial = stability_verdict_on_trial_space(grid, basis);
    const StabilityReport cert = certify_product_instability(circle, circle);
    Mat cert_values = first - second;
    const NormalField cert_field = normal_covariant_derivative(grid, cert_values);
    const double rayleigh = cert.Q / weighted_inner(grid, cert_field, cert_field);
    CHECK(trial.verdict == Verdict::unstable_certificate);
    CHECK(trial.trial_space_dim == 1);
    CHECK(trial.values.at("min_rayleigh") == doctest::Approx(rayleigh).epsilon(1e-6));
  }
  SUBCASE("span of H and translations leaves nothing admissible") {
    const Grid grid = build(named_spec("sphere", 1)).grid;
    const std::vector<NormalField> basis{mean_curvature_field(grid), translation_field(grid, Vec::Unit(2, 0)),
                                         translation_field(grid, Vec::Unit(2, 1))};
    const StabilityReport r = stability_verdict_on_trial_space(grid, basis);
    CHECK(r.verdict == Verdict::stable_on_trial_space);
    CHECK(r.trial_space_dim == 0);
  }
}

TEST_CASE("verdict and mode names") {
  for (Verdict v : {Verdict::unstable_certificate, Verdict::stable_on_trial_space, Verdict::inconclusive})
    CHECK(verdict_from_string(to_string(v)) == v);
  CHECK(certificate_mode("general") == CertificateMode::general);
  CHECK(certificate_mode("lagrangian") == CertificateMode::lagrangian);
  CHECK(code_of([] { certificate_mode("other"); }) == ErrorCode::UnknownName);
  CHECK(code_of([] { verdict_from_string("other"); }) == ErrorCode::UnknownName);
}
