#include "shrinker/catalog.hpp"

#include <cmath>
#include <numbers>

#include "shrinker/errors.hpp"

namespace shrinker {

namespace {

constexpr double kPi = std::numbers::pi;

// Each lat-long coordinate is R times a product of per-axis factors 1, sin or cos.
enum class Factor { one, sine, cosine };

double factor_value(Factor f, double u, int order) {
  if (f == Factor::one) return order == 0 ? 1.0 : 0.0;
  // d^k sin = sin(u + k pi/2), d^k cos = cos(u + k pi/2)
  const double shifted = u + order * kPi / 2.0;
  return f == Factor::sine ? std::sin(shifted) : std::cos(shifted);
}

std::vector<std::vector<Factor>> sphere_factors(int n) {
  std::vector<std::vector<Factor>> table(static_cast<size_t>(n + 1), std::vector<Factor>(static_cast<size_t>(n), Factor::one));
  for (int j = 0; j <= n; ++j) {
    for (int k = 0; k < std::min(j, n); ++k) table[static_cast<size_t>(j)][static_cast<size_t>(k)] = Factor::sine;
    if (j < n) table[static_cast<size_t>(j)][static_cast<size_t>(j)] = Factor::cosine;
  }
  return table;
}

TailModel compact_tail(const Grid& grid) {
  TailModel tail;
  tail.compact_mass = grid.weighted_area();
  for (int node = 0; node < grid.size(); ++node) tail.compact_radius = std::max(tail.compact_radius, grid.geometry(node).x.norm());
  return tail;
}

TailModel combine_tails(const TailModel& a, const TailModel& b) {
  TailModel out;
  out.truncated_axes = a.truncated_axes + b.truncated_axes;
  if (a.truncated_axes > 0 && b.truncated_axes > 0) {
    out.radius = std::min(a.radius, b.radius);
  } else {
    out.radius = a.truncated_axes > 0 ? a.radius : b.radius;
  }
  out.compact_mass = a.compact_mass * b.compact_mass;
  out.compact_radius = a.compact_radius + b.compact_radius;
  return out;
}

void require_resolution(const std::vector<int>& resolution, size_t expected) {
  if (resolution.size() != expected) throw Error(ErrorCode::InvalidSpec, "resolution has the wrong number of axes");
  for (int r : resolution) {
    if (r < 8) throw Error(ErrorCode::ResolutionTooLow, "resolution must be at least 8 per axis");
  }
}

std::vector<int> tail_of(const std::vector<int>& v, size_t from, size_t count) {
  return {v.begin() + static_cast<std::ptrdiff_t>(from), v.begin() + static_cast<std::ptrdiff_t>(from + count)};
}

int axis_count(const ShrinkerSpec& spec) {
  switch (spec.kind) {
    case ShrinkerKind::product: {
      int total = 0;
      for (const auto& f : spec.factors) total += axis_count(f);
      return total;
    }
    default:
      return spec.dim();
  }
}

BuiltShrinker build_plane(const ShrinkerSpec& spec, const std::vector<int>& resolution, GridOptions options) {
  Grid grid(plane_chart(spec.n, spec.ambient_dim(), spec.truncation), resolution, options);
  TailModel tail;
  tail.truncated_axes = spec.n;
  tail.radius = spec.truncation;
  tail.compact_mass = 1.0;
  grid.set_tail(tail);
  return BuiltShrinker{spec, std::move(grid), {}, nullptr};
}

}  // namespace

const char* to_string(ShrinkerKind kind) {
  switch (kind) {
    case ShrinkerKind::sphere: return "sphere";
    case ShrinkerKind::circle: return "circle";
    case ShrinkerKind::cylinder: return "cylinder";
    case ShrinkerKind::plane: return "plane";
    case ShrinkerKind::product: return "product";
    case ShrinkerKind::anciaux: return "anciaux";
  }
  return "unknown";
}

int ShrinkerSpec::dim() const {
  switch (kind) {
    case ShrinkerKind::circle: return 1;
    case ShrinkerKind::product: {
      int total = 0;
      for (const auto& f : factors) total += f.dim();
      return total;
    }
    default: return n;
  }
}

int ShrinkerSpec::ambient_dim() const {
  switch (kind) {
    case ShrinkerKind::sphere: return n + 1;
    case ShrinkerKind::circle: return 2;
    case ShrinkerKind::cylinder: return n + 1;
    case ShrinkerKind::plane: return ambient > 0 ? ambient : n + 1;
    case ShrinkerKind::product: {
      int total = 0;
      for (const auto& f : factors) total += f.ambient_dim();
      return total;
    }
    case ShrinkerKind::anciaux: return 2 * n;
  }
  return 0;
}

bool ShrinkerSpec::compact() const {
  switch (kind) {
    case ShrinkerKind::cylinder:
    case ShrinkerKind::plane: return false;
    case ShrinkerKind::product:
      for (const auto& f : factors)
        if (!f.compact()) return false;
      return true;
    default: return true;
  }
}

void to_json(nlohmann::json& j, const ShrinkerSpec& spec) {
  j = nlohmann::json{{"kind", to_string(spec.kind)}};
  switch (spec.kind) {
    case ShrinkerKind::sphere:
      j["n"] = spec.n;
      j["radius"] = spec.radius > 0 ? spec.radius : std::sqrt(2.0 * spec.n);
      break;
    case ShrinkerKind::circle:
      j["radius"] = spec.radius > 0 ? spec.radius : 1.0;
      break;
    case ShrinkerKind::cylinder:
      j["k"] = spec.k;
      j["n"] = spec.n;
      j["truncation"] = spec.truncation;
      break;
    case ShrinkerKind::plane:
      j["n"] = spec.n;
      j["truncation"] = spec.truncation;
      break;
    case ShrinkerKind::product:
      j["factors"] = spec.factors;
      break;
    case ShrinkerKind::anciaux:
      j["n"] = spec.n;
      j["profile"] = spec.profile;
      j["index"] = spec.index;
      j["pieces"] = spec.pieces;
      j["bracket"] = {spec.bracket_lo, spec.bracket_hi};
      j["legendrian"] = spec.legendrian;
      break;
  }
  j["m"] = spec.ambient_dim();
  if (!spec.resolution.empty()) j["resolution"] = spec.resolution;
}

void from_json(const nlohmann::json& j, ShrinkerSpec& spec) {
  spec = ShrinkerSpec{};
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "sphere") spec.kind = ShrinkerKind::sphere;
  else if (kind == "circle") spec.kind = ShrinkerKind::circle;
  else if (kind == "cylinder") spec.kind = ShrinkerKind::cylinder;
  else if (kind == "plane") spec.kind = ShrinkerKind::plane;
  else if (kind == "product") spec.kind = ShrinkerKind::product;
  else if (kind == "anciaux") spec.kind = ShrinkerKind::anciaux;
  else throw Error(ErrorCode::UnknownName, "unknown shrinker kind '" + kind + "'");
  spec.n = j.value("n", spec.kind == ShrinkerKind::anciaux ? 2 : 1);
  spec.k = j.value("k", 1);
  spec.radius = j.value("radius", 0.0);
  spec.truncation = j.value("truncation", 12.0);
  spec.profile = j.value("profile", std::string("circle"));
  spec.index = j.value("index", 1);
  spec.pieces = j.value("pieces", 2);
  spec.legendrian = j.value("legendrian", std::string("standard"));
  if (j.contains("bracket")) {
    const auto b = j.at("bracket").get<std::vector<double>>();
    if (b.size() != 2) throw Error(ErrorCode::InvalidSpec, "bracket needs two values");
    spec.bracket_lo = b[0];
    spec.bracket_hi = b[1];
  }
  if (j.contains("factors")) spec.factors = j.at("factors").get<std::vector<ShrinkerSpec>>();
  if (j.contains("resolution")) spec.resolution = j.at("resolution").get<std::vector<int>>();
  if (spec.kind == ShrinkerKind::plane) {
    const int m = j.value("m", spec.n + 1);
    spec.ambient = m == spec.n + 1 ? 0 : m;
  }
  if (spec.kind == ShrinkerKind::sphere && spec.radius > 0 && std::abs(spec.radius - std::sqrt(2.0 * spec.n)) < 1e-15) {
    spec.radius = 0.0;
  }
  if (j.contains("m") && j.at("m").get<int>() != spec.ambient_dim()) {
    throw Error(ErrorCode::InvalidSpec, "ambient dimension m does not match the spec");
  }
}

Chart sphere_chart(int n, double radius) {
  if (n < 1) throw Error(ErrorCode::InvalidDimension, "sphere dimension must be positive");
  if (!(radius > 0)) throw Error(ErrorCode::InvalidSpec, "sphere radius must be positive");
  std::vector<Axis> axes;
  for (int k = 0; k < n - 1; ++k) {
    Axis axis{AxisKind::polar, 0.0, kPi};
    axis.sin_power = n - 1 - k;
    axis.group = 0;
    axes.push_back(axis);
  }
  Axis longitude{AxisKind::periodic, 0.0, 2.0 * kPi};
  longitude.group = n > 1 ? 0 : -1;
  axes.push_back(longitude);
  const auto table = sphere_factors(n);
  auto coordinate = [table, radius, n](const Vec& u, int j, int di, int dj) {
    double value = radius;
    for (int k = 0; k < n; ++k) {
      const int order = (k == di) + (k == dj);
      value *= factor_value(table[static_cast<size_t>(j)][static_cast<size_t>(k)], u(k), order);
    }
    return value;
  };
  auto map = [coordinate, n](const Vec& u) {
    Vec x(n + 1);
    for (int j = 0; j <= n; ++j) x(j) = coordinate(u, j, -1, -1);
    return x;
  };
  auto jet = [coordinate, n](const Vec& u) {
    Jet<double> out = Jet<double>::zero(n, n + 1);
    for (int j = 0; j <= n; ++j) {
      out.x(j) = coordinate(u, j, -1, -1);
      for (int a = 0; a < n; ++a) {
        out.d1(j, a) = coordinate(u, j, a, -1);
        for (int b = 0; b < n; ++b) out.second(a, b)(j) = coordinate(u, j, a, b);
      }
    }
    return out;
  };
  return Chart(n + 1, std::move(axes), map, jet);
}

Chart circle_chart(double radius) {
  if (!(radius > 0)) throw Error(ErrorCode::InvalidSpec, "circle radius must be positive");
  auto map = [radius](const Vec& u) {
    Vec x(2);
    x << radius * std::cos(u(0)), radius * std::sin(u(0));
    return x;
  };
  return Chart(2, {Axis{AxisKind::periodic, 0.0, 2.0 * kPi}}, map);
}

Chart plane_chart(int n, int ambient, double truncation) {
  if (n < 1 || ambient < n) throw Error(ErrorCode::InvalidDimension, "plane needs 1 <= n <= m");
  if (!(truncation > 0)) throw Error(ErrorCode::InvalidSpec, "truncation radius must be positive");
  std::vector<Axis> axes;
  for (int k = 0; k < n; ++k) {
    Axis axis{AxisKind::bounded, -truncation, truncation};
    axis.truncated = true;
    axes.push_back(axis);
  }
  auto map = [n, ambient](const Vec& u) {
    Vec x = Vec::Zero(ambient);
    x.head(n) = u;
    return x;
  };
  auto jet = [n, ambient](const Vec& u) {
    Jet<double> out = Jet<double>::zero(n, ambient);
    out.x.head(n) = u;
    out.d1.topRows(n).setIdentity();
    return out;
  };
  return Chart(ambient, std::move(axes), map, jet);
}

Chart minimal_legendrian(int n) {
  if (n < 2) throw Error(ErrorCode::InvalidDimension, "minimal legendrian needs n >= 2");
  const int d = n - 1;
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  // psi = (e^{i s_1}, ..., e^{i s_d}, e^{-i sum s}) / sqrt(n); for n = 2 this is the great circle
  // (e^{i s}, e^{-i s}) / sqrt 2, with s an arclength parameter.
  auto phases = [n, d](const Vec& u) {
    Vec ph(n);
    ph.head(d) = u;
    ph(d) = -u.sum();
    return ph;
  };
  // Derivative of phase c along axis a.
  auto rate = [d](int c, int a) { return c < d ? (c == a ? 1.0 : 0.0) : -1.0; };
  auto map = [phases, n, scale](const Vec& u) {
    const Vec ph = phases(u);
    Vec x(2 * n);
    for (int c = 0; c < n; ++c) {
      x(c) = scale * std::cos(ph(c));
      x(n + c) = scale * std::sin(ph(c));
    }
    return x;
  };
  auto jet = [phases, rate, n, d, scale](const Vec& u) {
    const Vec ph = phases(u);
    Jet<double> out = Jet<double>::zero(d, 2 * n);
    for (int c = 0; c < n; ++c) {
      const double co = scale * std::cos(ph(c)), si = scale * std::sin(ph(c));
      out.x(c) = co;
      out.x(n + c) = si;
      for (int a = 0; a < d; ++a) {
        const double ra = rate(c, a);
        out.d1(c, a) = -si * ra;
        out.d1(n + c, a) = co * ra;
        for (int b = 0; b < d; ++b) {
          const double rab = ra * rate(c, b);
          out.second(a, b)(c) = -co * rab;
          out.second(a, b)(n + c) = -si * rab;
        }
      }
    }
    return out;
  };
  std::vector<Axis> axes(static_cast<size_t>(d), Axis{AxisKind::periodic, 0.0, 2.0 * kPi});
  return Chart(2 * n, std::move(axes), map, jet);
}

std::vector<int> default_resolution(const ShrinkerSpec& spec) {
  if (!spec.resolution.empty()) return spec.resolution;
  switch (spec.kind) {
    case ShrinkerKind::sphere:
      if (spec.n == 1) return {128};
      if (spec.n == 2) return {48, 96};
      {
        std::vector<int> r(static_cast<size_t>(spec.n - 1), 24);
        r.push_back(48);
        return r;
      }
    case ShrinkerKind::circle: return {128};
    case ShrinkerKind::cylinder: {
      ShrinkerSpec sphere;
      sphere.kind = ShrinkerKind::sphere;
      sphere.n = spec.k;
      auto r = default_resolution(sphere);
      if (spec.k == 1) r = {64};
      for (int i = spec.k; i < spec.n; ++i) r.push_back(spec.n - spec.k == 1 ? 97 : 65);
      return r;
    }
    case ShrinkerKind::plane: return std::vector<int>(static_cast<size_t>(spec.n), spec.n == 1 ? 193 : 97);
    case ShrinkerKind::product: {
      std::vector<int> r;
      for (const auto& f : spec.factors) {
        auto fr = default_resolution(f);
        if (f.kind == ShrinkerKind::sphere && f.n == 1) fr = {64};
        r.insert(r.end(), fr.begin(), fr.end());
      }
      return r;
    }
    case ShrinkerKind::anciaux: {
      std::vector<int> r{spec.profile == "circle" ? 32 : 96};
      const int per_axis = spec.n == 2 ? 64 : (spec.n == 3 ? 16 : 8);
      for (int i = 0; i < spec.n - 1; ++i) r.push_back(per_axis);
      return r;
    }
  }
  return {};
}

ProfileCurve anciaux_profile(const ShrinkerSpec& spec, int samples_per_piece) {
  if (spec.n < 2) throw Error(ErrorCode::InvalidDimension, "anciaux shrinkers need n >= 2");
  if (spec.legendrian != "standard") throw Error(ErrorCode::UnknownName, "unknown legendrian '" + spec.legendrian + "'");
  if (spec.profile == "circle") return circle_profile(spec.n, spec.pieces, samples_per_piece);
  if (spec.profile == "shoot") {
    ShootOptions options;
    options.lo_ratio = spec.bracket_lo;
    options.hi_ratio = spec.bracket_hi;
    options.samples_per_piece = samples_per_piece;
    return shoot_closed(spec.n, spec.index, spec.pieces, options);
  }
  throw Error(ErrorCode::UnknownName, "unknown profile '" + spec.profile + "'");
}

BuiltShrinker build(const ShrinkerSpec& spec, std::vector<int> resolution, GridOptions options) {
  if (resolution.empty()) resolution = default_resolution(spec);
  switch (spec.kind) {
    case ShrinkerKind::sphere: {
      require_resolution(resolution, static_cast<size_t>(spec.n));
      const double radius = spec.radius > 0 ? spec.radius : std::sqrt(2.0 * spec.n);
      Grid grid(sphere_chart(spec.n, radius), resolution, options);
      grid.set_tail(compact_tail(grid));
      return BuiltShrinker{spec, std::move(grid), {}, nullptr};
    }
    case ShrinkerKind::circle: {
      require_resolution(resolution, 1);
      Grid grid(circle_chart(spec.radius > 0 ? spec.radius : 1.0), resolution, options);
      grid.set_tail(compact_tail(grid));
      return BuiltShrinker{spec, std::move(grid), {}, nullptr};
    }
    case ShrinkerKind::plane: {
      require_resolution(resolution, static_cast<size_t>(spec.n));
      if (spec.ambient_dim() <= spec.n) throw Error(ErrorCode::InvalidSpec, "plane needs ambient dimension above n");
      return build_plane(spec, resolution, options);
    }
    case ShrinkerKind::cylinder: {
      if (spec.k < 1 || spec.k >= spec.n) throw Error(ErrorCode::InvalidSpec, "cylinder needs 1 <= k < n");
      require_resolution(resolution, static_cast<size_t>(spec.n));
      ShrinkerSpec sphere;
      sphere.kind = ShrinkerKind::sphere;
      sphere.n = spec.k;
      ShrinkerSpec line;
      line.kind = ShrinkerKind::plane;
      line.n = spec.n - spec.k;
      line.ambient = spec.n - spec.k;
      line.truncation = spec.truncation;
      BuiltShrinker first = build(sphere, tail_of(resolution, 0, static_cast<size_t>(spec.k)), options);
      BuiltShrinker second = build_plane(line, tail_of(resolution, static_cast<size_t>(spec.k), static_cast<size_t>(line.n)), options);
      BuiltShrinker out = product_shrinker(first, second, options);
      out.spec = spec;
      return out;
    }
    case ShrinkerKind::product: {
      if (spec.factors.size() < 2) throw Error(ErrorCode::InvalidSpec, "product needs at least two factors");
      require_resolution(resolution, static_cast<size_t>(axis_count(spec)));
      std::vector<BuiltShrinker> parts;
      size_t offset = 0;
      for (const auto& f : spec.factors) {
        const auto count = static_cast<size_t>(axis_count(f));
        parts.push_back(build(f, tail_of(resolution, offset, count), options));
        offset += count;
      }
      BuiltShrinker out = product_shrinker(parts[0], parts[1], options);
      for (size_t i = 2; i < parts.size(); ++i) {
        out = product_shrinker(out, parts[i], options);
      }
      out.spec = spec;
      out.factors = parts;
      return out;
    }
    case ShrinkerKind::anciaux: {
      require_resolution(resolution, static_cast<size_t>(spec.n));
      const ProfileCurve curve = anciaux_profile(spec, resolution[0]);
      auto lagrangian = std::make_shared<const LagrangianShrinker>(
          assemble(curve, minimal_legendrian(spec.n), tail_of(resolution, 1, static_cast<size_t>(spec.n - 1)), {}, options));
      Grid grid = lagrangian->grid;
      grid.set_tail(compact_tail(grid));
      return BuiltShrinker{spec, std::move(grid), {}, lagrangian};
    }
  }
  throw Error(ErrorCode::InvalidSpec, "unhandled shrinker kind");
}

BuiltShrinker product_shrinker(const BuiltShrinker& first, const BuiltShrinker& second, GridOptions options) {
  std::vector<int> shape = first.grid.shape();
  shape.insert(shape.end(), second.grid.shape().begin(), second.grid.shape().end());
  Grid grid(product(first.grid.chart(), second.grid.chart()), shape, options);
  TailModel a = first.grid.tail(), b = second.grid.tail();
  grid.set_tail(combine_tails(a, b));
  ShrinkerSpec spec;
  spec.kind = ShrinkerKind::product;
  spec.factors = {first.spec, second.spec};
  return BuiltShrinker{spec, std::move(grid), {first, second}, nullptr};
}

std::vector<CatalogEntry> catalog_entries() {
  return {
      {"sphere", "round sphere S^n(sqrt(2n)) in R^{n+1}"},
      {"cylinder", "S^k(sqrt(2k)) x R^{n-k} in R^{n+1}, truncated"},
      {"plane", "flat R^n through the origin in R^{n+1}, truncated"},
      {"product", "product of two circles S^1(sqrt 2) x S^1(sqrt 2) in R^4"},
      {"anciaux", "Lagrangian shrinker gamma * psi in C^n from a closed profile curve"},
      {"circle", "circle of radius 1 through a difference-jet chart (not a shrinker)"},
  };
}

ShrinkerSpec named_spec(const std::string& name, int n) {
  ShrinkerSpec spec;
  if (name == "sphere") {
    spec.kind = ShrinkerKind::sphere;
    spec.n = n > 0 ? n : 2;
  } else if (name == "cylinder") {
    spec.kind = ShrinkerKind::cylinder;
    spec.n = n > 0 ? n : 2;
    spec.k = 1;
  } else if (name == "plane") {
    spec.kind = ShrinkerKind::plane;
    spec.n = n > 0 ? n : 2;
  } else if (name == "product") {
    spec.kind = ShrinkerKind::product;
    ShrinkerSpec circle;
    circle.kind = ShrinkerKind::sphere;
    circle.n = 1;
    spec.factors = {circle, circle};
  } else if (name == "anciaux") {
    spec.kind = ShrinkerKind::anciaux;
    spec.n = n > 0 ? n : 2;
  } else if (name == "circle") {
    spec.kind = ShrinkerKind::circle;
    spec.radius = 1.0;
  } else {
    throw Error(ErrorCode::UnknownName, "no catalog entry named '" + name + "'");
  }
  return spec;
}

}  // namespace shrinker
