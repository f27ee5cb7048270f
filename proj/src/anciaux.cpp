#include "shrinker/anciaux.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include "shrinker/errors.hpp"

namespace shrinker {

namespace {

constexpr double kPi = std::numbers::pi;
using State = std::array<double, 3>;
namespace odeint = boost::numeric::odeint;

struct ProfileSystem {
  int n;
  double min_radius;
  void operator()(const State& x, State& dx, double /*s*/) const {
    if (!(x[0] > min_radius)) {
      throw Error(ErrorCode::NonpositiveRadius, "profile radius fell to " + std::to_string(x[0]));
    }
    const ProfileRates rates = ode_rhs({x[0], x[1], x[2]}, n);
    dx = {rates.r, rates.delta, rates.phi};
  }
};

auto controlled_stepper(const IntegratorOptions& options) {
  return odeint::make_controlled(options.atol, options.rtol, odeint::runge_kutta_dopri5<State>());
}

State to_array(const ProfileState& s) { return {s.r, s.delta, s.phi}; }
ProfileState to_state(const State& x) { return {x[0], x[1], x[2]}; }

ProfileSample to_sample(double s, const State& x) { return {s, x[0], x[1] + x[2], x[2]}; }

double wrap_angle(double a) { return std::remainder(a, 2.0 * kPi); }

double state_gap(const ProfileSample& a, const ProfileSample& b) {
  const double dr = a.r - b.r;
  const double dt = wrap_angle(a.theta - b.theta);
  const double dp = wrap_angle(a.phi - b.phi);
  return std::sqrt(dr * dr + dt * dt + dp * dp);
}

double drift(const std::vector<ProfileSample>& samples, int n, double energy) {
  double worst = 0.0;
  for (const auto& s : samples) worst = std::max(worst, std::abs(conserved_quantity(s.r, s.delta(), n) - energy));
  return worst;
}

// Integrates a full loop of m pieces and closes it: samples on [0, L), gap from the endpoint.
ProfileCurve close_loop(const ProfileState& start, int n, double length, int intervals, int index, int pieces,
                        const IntegratorOptions& options) {
  ProfileCurve curve = integrate(start, n, length, intervals, options);
  curve.closure_gap = state_gap(curve.samples.back(), curve.samples.front());
  curve.samples.pop_back();
  curve.closed = curve.closure_gap <= 1e-6;
  curve.rotation_index = index;
  curve.pieces = pieces;
  return curve;
}

// Ambient derivatives of the unit tangent direction of a curve (one legendrian axis).
void unit_tangent_at(const Jet<double>& jet, Vec& w, Vec& dw) {
  const Vec t = jet.d1.col(0);
  const Vec a = jet.second(0, 0);
  const double len = t.norm();
  w = t / len;
  dw = a / len - t * (t.dot(a)) / (len * len * len);
}

}  // namespace

Vec complex_structure(const Vec& v) {
  const Eigen::Index n = v.size() / 2;
  Vec out(v.size());
  out.head(n) = -v.tail(n);
  out.tail(n) = v.head(n);
  return out;
}

Vec complex_scale(std::complex<double> c, const Vec& v) {
  const Eigen::Index n = v.size() / 2;
  Vec out(v.size());
  out.head(n) = c.real() * v.head(n) - c.imag() * v.tail(n);
  out.tail(n) = c.imag() * v.head(n) + c.real() * v.tail(n);
  return out;
}

double symplectic_form(const Vec& a, const Vec& b) { return complex_structure(a).dot(b); }

ProfileRates ode_rhs(const ProfileState& state, int n) {
  if (!(state.r > 0.0)) throw Error(ErrorCode::NonpositiveRadius, "profile radius must be positive");
  ProfileRates rates;
  rates.r = std::cos(state.delta);
  rates.delta = (state.r / 2.0 - n / state.r) * std::sin(state.delta);
  rates.phi = std::sin(state.delta) / state.r;
  return rates;
}

double conserved_quantity(double r, double delta, int n) { return std::pow(r, n) * std::exp(-r * r / 4.0) * std::sin(delta); }

double max_energy(int n) { return std::pow(2.0 * n / std::numbers::e, n / 2.0); }

double circle_radius(int n) { return std::sqrt(2.0 * n); }

double limit_angle_advance(int n) { return 2.0 * kPi / circle_radius(n); }

double ProfileCurve::spacing() const {
  if (samples.size() < 2) return length;
  return closed ? length / static_cast<double>(samples.size()) : length / static_cast<double>(samples.size() - 1);
}

ProfileSample ProfileCurve::at(double s) const {
  const double h = spacing();
  const auto count = static_cast<long>(samples.size());
  double target = s;
  if (closed) {
    target = std::fmod(s, length);
    if (target < 0) target += length;
  }
  long k = std::lround(target / h);
  if (closed) {
    k = std::clamp(k, 0L, count);
  } else {
    k = std::clamp(k, 0L, count - 1);
  }
  const double ds = target - static_cast<double>(k) * h;
  const ProfileSample& base = samples[static_cast<size_t>(closed ? k % count : k)];
  if (std::abs(ds) <= 1e-14 * std::max(1.0, length)) {
    ProfileSample out = base;
    out.s = s;
    return out;
  }
  const ProfileState st = advance(base.state(), n, ds, integrator);
  return {s, st.r, st.delta + st.phi, st.phi};
}

ProfileState advance(const ProfileState& state, int n, double ds, const IntegratorOptions& options) {
  State x = to_array(state);
  if (ds == 0.0) return state;
  auto stepper = controlled_stepper(options);
  const double dt = std::copysign(std::min(std::abs(ds), 1e-2), ds);
  odeint::integrate_adaptive(stepper, ProfileSystem{n, options.min_radius}, x, 0.0, ds, dt);
  return to_state(x);
}

ProfileCurve integrate(const ProfileState& initial, int n, double length, int intervals, const IntegratorOptions& options) {
  if (intervals < 1 || !(length > 0)) throw Error(ErrorCode::InvalidSpec, "integration needs a positive length and intervals");
  ProfileCurve curve;
  curve.n = n;
  curve.length = length;
  curve.integrator = options;
  curve.energy = conserved_quantity(initial.r, initial.delta, n);
  std::vector<double> times(static_cast<size_t>(intervals) + 1);
  const double h = length / intervals;
  for (int k = 0; k <= intervals; ++k) times[static_cast<size_t>(k)] = k * h;
  times.back() = length;
  State x = to_array(initial);
  auto stepper = controlled_stepper(options);
  curve.samples.reserve(times.size());
  odeint::integrate_times(stepper, ProfileSystem{n, options.min_radius}, x, times.begin(), times.end(), std::min(h, 1e-2),
                          [&curve](const State& state, double s) { curve.samples.push_back(to_sample(s, state)); });
  curve.conservation_drift = drift(curve.samples, n, curve.energy);
  return curve;
}

double max_radius_at_energy(int n, double energy) {
  const double emax = max_energy(n);
  if (!(energy > 0.0) || energy > emax * (1.0 + 1e-14)) {
    throw Error(ErrorCode::InvalidSpec, "energy must lie in (0, E_max]");
  }
  const double r0 = circle_radius(n);
  const double log_e = std::log(energy);
  auto g = [n, log_e](double r) { return n * std::log(r) - r * r / 4.0 - log_e; };
  if (g(r0) <= 0.0) return r0;
  double hi = r0 + 1.0;
  while (g(hi) > 0.0) hi = r0 + 2.0 * (hi - r0);
  std::uintmax_t iterations = 200;
  const auto root = boost::math::tools::toms748_solve(g, r0, hi, boost::math::tools::eps_tolerance<double>(52), iterations);
  return 0.5 * (root.first + root.second);
}

CurvaturePeriod curvature_period(int n, double energy, const IntegratorOptions& options) {
  CurvaturePeriod period;
  period.energy = energy;
  period.max_radius = max_radius_at_energy(n, energy);
  if (period.max_radius - circle_radius(n) < 1e-12) {
    period.min_radius = period.max_radius;
    period.length = 2.0 * kPi;
    period.angle_advance = limit_angle_advance(n);
    return period;
  }
  const ProfileSystem system{n, options.min_radius};
  auto dense = odeint::make_dense_output(options.atol, options.rtol, odeint::runge_kutta_dopri5<State>());
  dense.initialize(State{period.max_radius, kPi / 2.0, 0.0}, 0.0, 1e-3);
  // Phase 0 waits for the r-minimum (cos delta from - to +), phase 1 for the next r-maximum.
  int phase = 0;
  double g_prev = std::cos(kPi / 2.0);
  while (true) {
    const auto [t0, t1] = dense.do_step(system);
    const double g = std::cos(dense.current_state()[1]);
    if (t1 > 1e4) throw Error(ErrorCode::NoRoot, "no curvature period within s <= 1e4");
    const bool rising = g_prev < 0.0 && g >= 0.0;
    const bool falling = g_prev > 0.0 && g <= 0.0;
    g_prev = g;
    if (phase == 0 && rising) {
      period.min_radius = dense.current_state()[0];
      phase = 1;
      continue;
    }
    if (phase != 1 || !falling) continue;
    // Bisection on the dense output, then Newton on re-integrated states.
    double lo = t0, hi = t1;
    State x{};
    for (int it = 0; it < 80 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      dense.calc_state(mid, x);
      if (std::cos(x[1]) > 0.0) lo = mid;
      else hi = mid;
    }
    const ProfileState base = to_state(dense.previous_state());
    double t = 0.5 * (lo + hi);
    ProfileState st{};
    for (int it = 0; it < 4; ++it) {
      st = advance(base, n, t - t0, options);
      const ProfileRates rates = ode_rhs(st, n);
      const double value = std::cos(st.delta);
      const double slope = -std::sin(st.delta) * rates.delta;
      if (slope == 0.0) break;
      t -= value / slope;
    }
    st = advance(base, n, t - t0, options);
    period.length = t;
    period.angle_advance = st.phi;
    return period;
  }
}

ProfileCurve shoot_closed(int n, int index, int pieces, const ShootOptions& options) {
  if (n < 2) throw Error(ErrorCode::InvalidDimension, "profile curves need n >= 2");
  if (pieces < 2 || index < 1) throw Error(ErrorCode::InvalidSpec, "shooting needs index >= 1 and pieces >= 2");
  if (!(options.lo_ratio > 0.0 && options.lo_ratio < options.hi_ratio && options.hi_ratio < 1.0)) {
    throw Error(ErrorCode::InvalidSpec, "bracket must satisfy 0 < lo < hi < 1");
  }
  if (options.samples_per_piece < 4) throw Error(ErrorCode::ResolutionTooLow, "too few samples per piece");
  const double emax = max_energy(n);
  const double target = 2.0 * kPi * index / pieces;
  auto advance_error = [&](double ratio) { return curvature_period(n, ratio * emax, options.integrator).angle_advance - target; };
  const double f_lo = advance_error(options.lo_ratio);
  const double f_hi = advance_error(options.hi_ratio);
  if (f_lo * f_hi > 0.0) {
    std::ostringstream msg;
    msg.precision(10);
    msg << "angle advance minus target " << target << " is " << f_lo << " at E/E_max=" << options.lo_ratio << " and "
        << f_hi << " at E/E_max=" << options.hi_ratio;
    throw Error(ErrorCode::NoRoot, msg.str());
  }
  std::uintmax_t iterations = 200;
  const auto root = boost::math::tools::toms748_solve(advance_error, options.lo_ratio, options.hi_ratio, f_lo, f_hi,
                                                      boost::math::tools::eps_tolerance<double>(50), iterations);
  const double ratio = 0.5 * (root.first + root.second);
  const CurvaturePeriod period = curvature_period(n, ratio * emax, options.integrator);
  const ProfileState start{period.max_radius, kPi / 2.0, 0.0};
  return close_loop(start, n, pieces * period.length, pieces * options.samples_per_piece, index, pieces, options.integrator);
}

ProfileCurve circle_profile(int n, int pieces, int samples_per_piece) {
  if (n < 2) throw Error(ErrorCode::InvalidDimension, "profile curves need n >= 2");
  if (pieces < 1 || samples_per_piece < 4) throw Error(ErrorCode::InvalidSpec, "circle needs pieces >= 1 and samples");
  const double r0 = circle_radius(n);
  return close_loop({r0, kPi / 2.0, 0.0}, n, 2.0 * kPi * r0, pieces * samples_per_piece, 1, pieces, {});
}

double reintegrated_closure_gap(const ProfileCurve& curve) {
  const ProfileSample& last = curve.samples.back();
  const ProfileState end = advance(last.state(), curve.n, curve.length - last.s, curve.integrator);
  const ProfileState again = advance(end, curve.n, curve.length, curve.integrator);
  const ProfileSample a{0.0, end.r, end.delta + end.phi, end.phi};
  const ProfileSample b{0.0, again.r, again.delta + again.phi, again.phi};
  return std::max(state_gap(a, curve.samples.front()), state_gap(b, a));
}

CurveIntegrals curve_integrals(const ProfileCurve& curve) {
  const int n = curve.n;
  const double h = curve.spacing();
  double radial = 0.0, weighted = 0.0, gx = 0.0, gy = 0.0;
  for (size_t k = 0; k < curve.samples.size(); ++k) {
    const auto& s = curve.samples[k];
    double w = h;
    if (!curve.closed && (k == 0 || k + 1 == curve.samples.size())) w = 0.5 * h;
    const double gauss = std::exp(-s.r * s.r / 4.0);
    const double c = std::cos(s.delta());
    radial += w * (s.r * s.r / 2.0 - n) * std::pow(s.r, n - 1) * gauss;
    weighted += w * ((1.0 / (2.0 * s.r * s.r) - n / std::pow(s.r, 4)) * std::pow(s.r, n - 1) + 4.0 * c * c * std::pow(s.r, n - 5)) * gauss;
    gx += w * s.r * std::cos(s.phi) * gauss * std::pow(s.r, n - 1);
    gy += w * s.r * std::sin(s.phi) * gauss * std::pow(s.r, n - 1);
  }
  return {radial, weighted, std::hypot(gx, gy)};
}

SignCheck lagrangian_sign_check(const ProfileCurve& curve) {
  SignCheck check;
  check.min_value = std::numeric_limits<double>::infinity();
  check.max_value = -std::numeric_limits<double>::infinity();
  for (const auto& s : curve.samples) {
    const double sn = std::sin(s.delta()), cs = std::cos(s.delta());
    const double f = curve.n - 3.0 + 4.0 * sn * sn - 4.0 * cs * cs;
    check.min_value = std::min(check.min_value, f);
    check.max_value = std::max(check.max_value, f);
  }
  check.passes = !curve.samples.empty() && check.min_value >= 0.0 && check.max_value > 0.0;
  return check;
}

LegendrianCheck check_legendrian(const Grid& legendrian) {
  LegendrianCheck check;
  const int d = legendrian.dim();
  for (int node = 0; node < legendrian.size(); ++node) {
    const auto& geo = legendrian.geometry(node);
    check.max_norm_error = std::max(check.max_norm_error, std::abs(geo.x.norm() - 1.0));
    for (int a = 0; a < d; ++a) {
      check.max_contact = std::max(check.max_contact, std::abs(symplectic_form(geo.x, geo.tangent.col(a))));
    }
    const Vec h_sphere = geo.mean_curvature + static_cast<double>(d) * geo.x;
    check.max_mean_curvature = std::max(check.max_mean_curvature, h_sphere.norm());
  }
  return check;
}

LagrangianShrinker assemble(const ProfileCurve& curve, const Chart& legendrian, const std::vector<int>& legendrian_shape,
                            const Tolerances& tolerances, GridOptions options) {
  if (!curve.closed) throw Error(ErrorCode::NotClosed, "profile curve is not closed");
  const int n = curve.n;
  if (legendrian.ambient() != 2 * n || legendrian.dim() != n - 1) {
    throw Error(ErrorCode::InvalidDimension, "legendrian must map M^{n-1} into C^n");
  }
  Grid m_grid(legendrian, legendrian_shape, options);
  const LegendrianCheck lc = check_legendrian(m_grid);
  if (lc.max_norm_error > tolerances.lagrangian || lc.max_contact > tolerances.lagrangian ||
      lc.max_mean_curvature > tolerances.lagrangian) {
    throw Error(ErrorCode::NotLegendrian, "legendrian check failed");
  }
  const int d = n - 1;
  auto jet = [curve, legendrian, n, d](const Vec& u) {
    const ProfileSample p = curve.at(u(0));
    const ProfileRates rates = ode_rhs(p.state(), n);
    const std::complex<double> gamma = std::polar(p.r, p.phi);
    const std::complex<double> velocity = std::polar(1.0, p.theta);
    const std::complex<double> accel = std::complex<double>(0.0, rates.theta()) * velocity;
    const Jet<double> psi = legendrian.jet(u.tail(d));
    Jet<double> out = Jet<double>::zero(n, 2 * n);
    out.x = complex_scale(gamma, psi.x);
    out.d1.col(0) = complex_scale(velocity, psi.x);
    out.second(0, 0) = complex_scale(accel, psi.x);
    for (int a = 0; a < d; ++a) {
      out.d1.col(1 + a) = complex_scale(gamma, psi.d1.col(a));
      out.second(0, 1 + a) = complex_scale(velocity, psi.d1.col(a));
      out.second(1 + a, 0) = out.second(0, 1 + a);
      for (int b = 0; b < d; ++b) out.second(1 + a, 1 + b) = complex_scale(gamma, psi.second(a, b));
    }
    return out;
  };
  auto map = [jet](const Vec& u) { return jet(u).x; };
  std::vector<Axis> axes{Axis{AxisKind::periodic, 0.0, curve.length}};
  axes.insert(axes.end(), legendrian.axes().begin(), legendrian.axes().end());
  std::vector<int> shape{static_cast<int>(curve.samples.size())};
  shape.insert(shape.end(), legendrian_shape.begin(), legendrian_shape.end());
  Grid grid(Chart(2 * n, std::move(axes), map, jet), shape, options);

  LagrangianShrinker out{curve, m_grid, grid};
  const int nm = m_grid.size();
  for (int node = 0; node < grid.size(); ++node) {
    const auto& geo = grid.geometry(node);
    const auto& mgeo = m_grid.geometry(node % nm);
    const double r = curve.samples[static_cast<size_t>(node / nm)].r;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        out.max_omega = std::max(out.max_omega, std::abs(symplectic_form(geo.tangent.col(a), geo.tangent.col(b))));
    Mat expected = Mat::Zero(n, n);
    expected(0, 0) = 1.0;
    expected.bottomRightCorner(d, d) = r * r * mgeo.metric;
    out.max_metric_block_error = std::max(out.max_metric_block_error, (geo.metric - expected).cwiseAbs().maxCoeff());
    out.max_residual = std::max(out.max_residual, shrinker_residual(geo).norm());
    const Vec normal_s = complex_structure(geo.tangent.col(0));
    const Vec h = geo.mean_curvature;
    out.max_mean_curvature_alignment = std::max(out.max_mean_curvature_alignment, (h - h.dot(normal_s) * normal_s).norm());
  }
  return out;
}

TangentFunctional tangent_functional(const Grid& legendrian, const Mat& w, const std::vector<Mat>& dw) {
  const int d = legendrian.dim();
  TangentFunctional tf;
  Vec gradient(legendrian.size()), mass(legendrian.size());
  Mat jw(w.rows(), w.cols());
  for (int node = 0; node < legendrian.size(); ++node) {
    const auto& geo = legendrian.geometry(node);
    Mat proj(w.rows(), d);
    Mat pairing(d, d);
    for (int a = 0; a < d; ++a) {
      const Vec da = dw[static_cast<size_t>(a)].col(node);
      proj.col(a) = geo.tangent_part(da);
      for (int b = 0; b < d; ++b) pairing(a, b) = da.dot(geo.tangent.col(b));
    }
    gradient(node) = (geo.inv_metric * proj.transpose() * proj).trace();
    mass(node) = w.col(node).squaredNorm();
    jw.col(node) = complex_structure(w.col(node));
    tf.symmetry_defect = std::max(tf.symmetry_defect, (pairing - pairing.transpose()).cwiseAbs().maxCoeff());
  }
  tf.gradient = legendrian.integrate(gradient);
  tf.form = legendrian.integrate(second_form_pairing(legendrian, jw, jw));
  tf.mass = legendrian.integrate(mass);
  return tf;
}

TangentFieldOnM projected_basis_field(const Grid& legendrian, int beta) {
  const int d = legendrian.dim();
  const int m = legendrian.ambient();
  TangentFieldOnM field;
  field.values = Mat::Zero(m, legendrian.size());
  field.derivative.assign(static_cast<size_t>(d), Mat::Zero(m, legendrian.size()));
  field.source = beta;
  const Vec e = Vec::Unit(m, beta);
  for (int node = 0; node < legendrian.size(); ++node) {
    const Jet<double> jet = legendrian.chart().jet(legendrian.coordinates(node));
    const Mat& u = jet.d1;
    const Mat h = u.transpose() * u;
    const Mat hinv = h.inverse();
    const Vec coeff = hinv * (u.transpose() * e);
    field.values.col(node) = u * coeff;
    for (int j = 0; j < d; ++j) {
      Mat du(m, d);
      for (int a = 0; a < d; ++a) du.col(a) = jet.second(j, a);
      const Mat dh = du.transpose() * u + u.transpose() * du;
      const Vec dcoeff = -hinv * dh * coeff + hinv * (du.transpose() * e);
      field.derivative[static_cast<size_t>(j)].col(node) = du * coeff + u * dcoeff;
    }
  }
  const TangentFunctional tf = tangent_functional(legendrian, field.values, field.derivative);
  field.functional = tf.value();
  field.mass = tf.mass;
  field.symmetry_defect = tf.symmetry_defect;
  field.symmetric = tf.symmetry_defect <= 1e-6;
  return field;
}

TangentFieldOnM select_w0(const Grid& legendrian, double symmetry_tol) {
  const int m = legendrian.ambient();
  TangentFieldOnM best;
  Vec functionals(m), masses(m);
  std::vector<TangentFieldOnM> candidates;
  for (int beta = 0; beta < m; ++beta) {
    candidates.push_back(projected_basis_field(legendrian, beta));
    functionals(beta) = candidates.back().functional;
    masses(beta) = candidates.back().mass;
  }
  const double floor = 1e-12 * std::max(masses.maxCoeff(), 1e-300);
  int chosen = -1;
  double best_ratio = std::numeric_limits<double>::infinity();
  for (int beta = 0; beta < m; ++beta) {
    if (masses(beta) <= floor) continue;
    const double ratio = functionals(beta) / masses(beta);
    if (ratio < best_ratio) {
      best_ratio = ratio;
      chosen = beta;
    }
  }
  if (chosen < 0) throw Error(ErrorCode::AllProjectionsZero, "every basis vector projects to zero on the legendrian");
  best = candidates[static_cast<size_t>(chosen)];
  best.symmetric = best.symmetry_defect <= symmetry_tol;
  best.functionals = functionals;
  best.masses = masses;
  return best;
}

TangentFieldOnM unit_tangent_field(const Grid& legendrian) {
  if (legendrian.dim() != 1) throw Error(ErrorCode::InvalidDimension, "unit tangent field needs a curve");
  TangentFieldOnM field;
  field.values = Mat::Zero(legendrian.ambient(), legendrian.size());
  field.derivative.assign(1, Mat::Zero(legendrian.ambient(), legendrian.size()));
  for (int node = 0; node < legendrian.size(); ++node) {
    Vec w, dw;
    unit_tangent_at(legendrian.chart().jet(legendrian.coordinates(node)), w, dw);
    field.values.col(node) = w;
    field.derivative[0].col(node) = dw;
  }
  const TangentFunctional tf = tangent_functional(legendrian, field.values, field.derivative);
  field.functional = tf.value();
  field.mass = tf.mass;
  field.symmetry_defect = tf.symmetry_defect;
  field.symmetric = true;
  return field;
}

NormalField variation_field(const LagrangianShrinker& shrinker, const TangentFieldOnM& w, VariationFamily family) {
  if (family == VariationFamily::N1 && !w.symmetric) {
    throw Error(ErrorCode::SymmetryRequired, "N1 fields need a symmetric tangent field");
  }
  const Grid& grid = shrinker.grid;
  const int n = shrinker.curve.n;
  const int d = n - 1;
  const int nm = shrinker.legendrian.size();
  if (w.values.cols() != nm) throw Error(ErrorCode::GridMismatch, "tangent field is not on the legendrian grid");
  NormalField field;
  field.values = Mat::Zero(grid.ambient(), grid.size());
  field.derivative.assign(static_cast<size_t>(n), Mat::Zero(grid.ambient(), grid.size()));
  const std::complex<double> i(0.0, 1.0);
  for (int node = 0; node < grid.size(); ++node) {
    const ProfileSample& p = shrinker.curve.samples[static_cast<size_t>(node / nm)];
    const int j = node % nm;
    const std::complex<double> gamma = std::polar(p.r, p.phi);
    const std::complex<double> velocity = std::polar(1.0, p.theta);
    std::complex<double> c = i * gamma;
    std::complex<double> dc = i * velocity;
    if (family == VariationFamily::N1) {
      const double r = p.r;
      c = i * gamma / (r * r);
      dc = i * (velocity / (r * r) - 2.0 * std::cos(p.delta()) * gamma / (r * r * r));
    }
    const auto& geo = grid.geometry(node);
    field.values.col(node) = geo.normal_part(complex_scale(c, w.values.col(j)));
    field.derivative[0].col(node) = geo.normal_part(complex_scale(dc, w.values.col(j)));
    for (int a = 0; a < d; ++a) {
      field.derivative[static_cast<size_t>(1 + a)].col(node) =
          geo.normal_part(complex_scale(c, w.derivative[static_cast<size_t>(a)].col(j)));
    }
  }
  return field;
}

LagrangianVariationCheck lagrangian_variation_check(const LagrangianShrinker& shrinker, const TangentFieldOnM& w,
                                                    const NormalField& field, VariationFamily family, double tolerance) {
  const Grid& grid = shrinker.grid;
  const int n = shrinker.curve.n;
  const int d = n - 1;
  const int nm = shrinker.legendrian.size();
  LagrangianVariationCheck check;
  for (int node = 0; node < grid.size(); ++node) {
    const auto& geo = grid.geometry(node);
    const ProfileSample& p = shrinker.curve.samples[static_cast<size_t>(node / nm)];
    const auto& mgeo = shrinker.legendrian.geometry(node % nm);
    Mat pairing(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        pairing(a, b) = field.derivative[static_cast<size_t>(a)].col(node).dot(complex_structure(geo.tangent.col(b)));
    check.max_asymmetry = std::max(check.max_asymmetry, (pairing - pairing.transpose()).cwiseAbs().maxCoeff());
    const double cs = std::cos(p.delta());
    for (int j = 0; j < d; ++j) {
      const double wj = w.values.col(node % nm).dot(mgeo.tangent.col(j));
      check.scale = std::max(check.scale, std::abs(wj));
      double sj = 0.0, js = 0.0;
      if (family == VariationFamily::N1) {
        sj = js = -cs / p.r * wj;
      } else {
        sj = p.r * cs * wj;
        js = -p.r * cs * wj;
      }
      const double defect = pairing(0, 1 + j) - pairing(1 + j, 0);
      check.max_sj_mismatch = std::max(check.max_sj_mismatch, std::abs(pairing(0, 1 + j) - sj));
      check.max_js_mismatch = std::max(check.max_js_mismatch, std::abs(pairing(1 + j, 0) - js));
      check.max_defect_mismatch = std::max(check.max_defect_mismatch, std::abs(defect - (sj - js)));
      check.max_defect = std::max(check.max_defect, std::abs(defect));
    }
  }
  check.lagrangian = check.max_asymmetry <= tolerance;
  return check;
}

}  // namespace shrinker
