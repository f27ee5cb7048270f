#include <doctest.h>

#include "oracles.hpp"
#include "shrinker/catalog.hpp"
#include "shrinker/errors.hpp"
#include "shrinker/fields.hpp"
#include "shrinker/geometry.hpp"

using namespace shrinker;

namespace {

Vec point(std::initializer_list<double> values) {
  Vec v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index k = 0;
  for (double x : values) v(k++) = x;
  return v;
}

double max_column_norm(const Mat& m) { return m.colwise().norm().maxCoeff(); }

// Nodewise error of grad^perp y^perp against -<y, u_j> g^jk A_ik assembled from node geometry.
double translation_derivative_error(const Grid& grid, const Vec& y) {
  const NormalField field = translation_field(grid, y);
  double worst = 0.0;
  for (int node = 0; node < grid.size(); ++node) {
    const auto& geo = grid.geometry(node);
    const Vec c = geo.inv_metric * (geo.tangent.transpose() * y);
    for (int i = 0; i < grid.dim(); ++i) {
      Vec expected = Vec::Zero(grid.ambient());
      for (int k = 0; k < grid.dim(); ++k) expected -= c(k) * geo.A(i, k);
      worst = std::max(worst, (field.derivative[static_cast<size_t>(i)].col(node) - expected).norm());
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("round sphere S^2(2): |H| = 1 and H = -X/2") {
  const Chart chart = sphere_chart(2, 2.0);
  for (const Vec& u : {point({0.3, 1.1}), point({1.7, 4.0}), point({2.9, 0.2})}) {
    const auto geo = point_geometry(chart, u);
    CHECK(geo.mean_curvature.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((geo.mean_curvature + geo.x / 2.0).norm() < 1e-12);
  }
}

TEST_CASE("flat plane is totally geodesic") {
  const Chart chart = plane_chart(2, 3, 12.0);
  const auto geo = point_geometry(chart, point({0.4, -2.5}));
  for (const auto& a : geo.second_form) CHECK(a.norm() < 1e-14);
  CHECK(geo.mean_curvature.norm() < 1e-14);
}

TEST_CASE("circle S^1(sqrt 2): metric 2, |H| = 1/sqrt 2, H = -X/2") {
  const Chart chart = sphere_chart(1, std::sqrt(2.0));
  const auto geo = point_geometry(chart, point({0.8}));
  CHECK(geo.metric(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(geo.mean_curvature.norm() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK((geo.mean_curvature + geo.x / 2.0).norm() < 1e-12);
}

TEST_CASE("shrinker residual on S^n(sqrt(2n)) with analytic jets") {
  for (int n = 1; n <= 4; ++n) {
    const Chart chart = sphere_chart(n, std::sqrt(2.0 * n));
    Vec u = Vec::Constant(n, 0.7);
    u(n - 1) = 2.1;
    CHECK(shrinker_residual(chart, u).norm() <= 1e-10);
  }
}

TEST_CASE("unit circle residual is X/2 in norm 1/2") {
  const Chart chart = circle_chart(1.0);
  for (double s : {0.0, 1.3, 4.4}) {
    const Vec r = shrinker_residual(chart, point({s}));
    CHECK(r.norm() == doctest::Approx(0.5).epsilon(1e-6));
    CHECK((r + chart.position(point({s})) / 2.0).norm() < 1e-6);
  }
}

TEST_CASE("integrated anciaux chart satisfies the shrinker equation") {
  ShrinkerSpec spec = named_spec("anciaux", 2);
  spec.profile = "shoot";
  spec.index = 2;
  spec.pieces = 5;
  const BuiltShrinker built = build(spec);
  CHECK(built.grid.max_residual() <= 1e-6);
}

TEST_CASE("degenerate Jacobian is rejected") {
  Jet<double> jet = Jet<double>::zero(2, 3);
  jet.d1(0, 0) = 1.0;
  jet.d1(0, 1) = 1.0;
  CHECK_THROWS_AS(point_geometry(jet), Error);
  try {
    point_geometry(jet);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateMetric);
  }
}

TEST_CASE("sphere quadrature: total area and nested error estimate") {
  const BuiltShrinker s2 = build(named_spec("sphere", 2));
  CHECK(s2.grid.area() == doctest::Approx(16.0 * oracle::kPi).epsilon(1e-12));
  const BuiltShrinker s3 = build(named_spec("sphere", 3));
  CHECK(s3.grid.area() == doctest::Approx(2.0 * oracle::kPi * oracle::kPi * std::pow(6.0, 1.5)).epsilon(1e-10));
  CHECK(s2.grid.has_error_estimate());
  CHECK(s2.grid.quadrature_error(Vec::Ones(s2.grid.size())) < 1e-10);
}

TEST_CASE("covariant derivative of y^perp converges under refinement") {
  const Vec y = point({0.3, -0.5, 0.8});
  double coarse = 0.0, fine = 0.0;
  for (const auto& [res, out] : {std::pair{std::vector<int>{16, 32}, &coarse}, std::pair{std::vector<int>{32, 64}, &fine}}) {
    *out = translation_derivative_error(build(named_spec("sphere", 2), res).grid, y);
  }
  CHECK(fine < 1e-4);
  CHECK(oracle::observed_order(coarse, fine) >= 1.9);
}

TEST_CASE("zero field and H on spheres have vanishing covariant derivative") {
  const Grid grid = build(named_spec("sphere", 2)).grid;
  const NormalField zero = zero_field(grid);
  for (const auto& d : zero.derivative) CHECK(d.norm() == 0.0);
  const NormalField h = mean_curvature_field(grid);
  // On a round sphere X^T = 0, so grad^perp H = <X, e_j> A_ij / 2 vanishes.
  for (const auto& d : h.derivative) CHECK(max_column_norm(d) < 1e-8);
}

TEST_CASE("script L of |X|^2 and of coordinates") {
  SUBCASE("|X|^2 on S^n is constant") {
    for (int n : {1, 2}) {
      const Grid grid = build(named_spec("sphere", n)).grid;
      Vec f(grid.size());
      for (int node = 0; node < grid.size(); ++node) f(node) = grid.geometry(node).x.squaredNorm();
      CHECK(scalar_script_L(grid, f).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
  SUBCASE("coordinates on S^1(sqrt 2) are eigenfunctions with eigenvalue -1/2") {
    double errors[2];
    int k = 0;
    for (int res : {64, 128}) {
      const Grid grid = build(named_spec("sphere", 1), {res}).grid;
      Vec f(grid.size()), expected(grid.size());
      for (int node = 0; node < grid.size(); ++node) {
        f(node) = grid.geometry(node).x(0);
        expected(node) = -f(node) / 2.0;
      }
      errors[k++] = (scalar_script_L(grid, f) - expected).cwiseAbs().maxCoeff();
    }
    CHECK(errors[1] < 1e-5);
    CHECK(oracle::observed_order(errors[0], errors[1]) >= 1.9);
  }
  SUBCASE("|X|^2 on an anciaux shrinker satisfies L|X|^2 = 2n - |X|^2") {
    const ShrinkerSpec spec = named_spec("anciaux", 2);
    double errors[2];
    int k = 0;
    for (int scale : {1, 2}) {
      std::vector<int> res = default_resolution(spec);
      for (int& r : res) r *= scale;
      const Grid grid = build(spec, res).grid;
      Vec f(grid.size()), expected(grid.size());
      for (int node = 0; node < grid.size(); ++node) {
        f(node) = grid.geometry(node).x.squaredNorm();
        expected(node) = 4.0 - f(node);
      }
      errors[k++] = (scalar_script_L(grid, f) - expected).cwiseAbs().maxCoeff();
    }
    CHECK(errors[1] < 1e-6);
  }
}

TEST_CASE("second-order stencils lose nodewise accuracy at the poles") {
  const Vec y = point({0.6, 0.0, 0.8});
  const auto eigen_error = [&](const Grid& grid) {
    const NormalField v = translation_field(grid, y);
    Mat lv = connection_laplacian(grid, v) + second_form_action(grid, v.values) + 0.5 * v.values -
             0.5 * derivative_along_position(grid, v);
    return max_column_norm(lv - 0.5 * v.values);
  };
  GridOptions second;
  second.fd_order = 2;
  const double order2 = eigen_error(build(named_spec("sphere", 2), {48, 96}, second).grid);
  const double order4 = eigen_error(build(named_spec("sphere", 2), {48, 96}).grid);
  CHECK(order4 < order2);
  CHECK(order4 < 1e-4);
}

TEST_CASE("normal projection removes tangential parts") {
  const Grid grid = build(named_spec("sphere", 2)).grid;
  std::mt19937_64 rng(1);
  const Mat ambient = oracle::AmbientField::random(rng, 3).sample(grid);
  CHECK(max_tangential_defect(grid, normal_projection(grid, ambient)) < 1e-12);
}
