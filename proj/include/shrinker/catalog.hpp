#pragma once
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "shrinker/anciaux.hpp"
#include "shrinker/grid.hpp"

namespace shrinker {

enum class ShrinkerKind { sphere, circle, cylinder, plane, product, anciaux };

const char* to_string(ShrinkerKind kind);

struct ShrinkerSpec {
  ShrinkerKind kind = ShrinkerKind::sphere;
  int n = 1;             // dimension of the shrinker
  int k = 1;             // cylinder: dimension of the sphere factor
  int ambient = 0;       // plane: ambient dimension (0 means n + 1)
  double radius = 0.0;   // sphere/circle: radius (0 means the shrinker radius, circle defaults to 1)
  double truncation = 12.0;
  std::vector<ShrinkerSpec> factors;
  // anciaux
  std::string profile = "circle";  // circle | shoot
  int index = 1;
  int pieces = 2;
  double bracket_lo = 1e-3;
  double bracket_hi = 1.0 - 1e-9;
  std::string legendrian = "standard";
  std::vector<int> resolution;  // empty means default

  int dim() const;
  int ambient_dim() const;
  bool compact() const;
  bool operator==(const ShrinkerSpec&) const = default;
};

void to_json(nlohmann::json& j, const ShrinkerSpec& spec);
void from_json(const nlohmann::json& j, ShrinkerSpec& spec);

struct BuiltShrinker {
  ShrinkerSpec spec;
  Grid grid;
  std::vector<BuiltShrinker> factors;
  std::shared_ptr<const LagrangianShrinker> lagrangian;

  bool closed() const { return !grid.truncated(); }
};

Chart sphere_chart(int n, double radius);
// Circle through finite-difference jets, standing in for a user-supplied chart.
Chart circle_chart(double radius);
Chart plane_chart(int n, int ambient, double truncation);
Chart minimal_legendrian(int n);

std::vector<int> default_resolution(const ShrinkerSpec& spec);
BuiltShrinker build(const ShrinkerSpec& spec, std::vector<int> resolution = {}, GridOptions options = {});
BuiltShrinker product_shrinker(const BuiltShrinker& first, const BuiltShrinker& second, GridOptions options = {});
// Profile curve an anciaux spec asks for (shooting or the circle).
ProfileCurve anciaux_profile(const ShrinkerSpec& spec, int samples_per_piece);

struct CatalogEntry {
  std::string name;
  std::string description;
};
std::vector<CatalogEntry> catalog_entries();
// Spec for a catalog name with dimension override (n <= 0 keeps the default).
ShrinkerSpec named_spec(const std::string& name, int n = 0);

}  // namespace shrinker
