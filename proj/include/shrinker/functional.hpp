#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "shrinker/fields.hpp"
#include "shrinker/grid.hpp"

namespace shrinker {

struct FEvaluation {
  double value = 0.0;
  double quadrature_error = 0.0;  // |fine - nested coarse|, 0 when no nested rule exists
  double truncation_bound = 0.0;  // Gaussian tail beyond the truncation radius
  Vec center;
  double scale = 1.0;
};

// (4 pi t)^{-n/2} int exp(-|X - x|^2 / (4t)) dmu.
FEvaluation evaluate_F(const Grid& grid, const Vec& center, double scale);

// int <V, W> exp(-|X|^2/4) dmu, without the (4 pi)^{-n/2} prefactor.
double weighted_inner(const Grid& grid, const Mat& v, const Mat& w);
double weighted_inner(const Grid& grid, const NormalField& v, const NormalField& w);

// Variation of (Sigma, x, t): X' = V, x' = y, t' = tau, x'' = y_prime, t'' = tau_prime.
struct VariationData {
  NormalField V;
  Vec y;
  double tau = 0.0;
  Vec y_prime;
  double tau_prime = 0.0;

  // Normal field only, zero center and scale variations.
  static VariationData normal(const NormalField& field);
};

double first_variation(const Grid& grid, const VariationData& var, const Vec& x0, double t0);

// L^perp V = Delta^perp V + <A_ij, V> g^ki g^jl A_kl + V/2 - grad^perp_{X^T} V / 2.
Mat apply_L_perp(const Grid& grid, const NormalField& field);

// |grad^perp V|^2 - |<A, V>|^2 - |V|^2/2 per node (the weak form of -<V, L^perp V>).
Vec stability_density(const Grid& grid, const NormalField& field);

// Second variation at (0, 1) with the weak form for -<V, L^perp V>. Throws NotCritical when the
// largest self-shrinker residual exceeds residual_tol.
double second_variation_at_critical(const Grid& grid, const VariationData& var, double residual_tol);

// Second variation along the straight-line family X + sV, x0 + s y + s^2 y'/2, t0 + s tau + s^2 tau'/2.
double second_variation_general(const Grid& grid, const VariationData& var, const Vec& x0, double t0);

// Integral identities expected on every self-shrinker grid; each entry is a residual with its
// tolerance (tail bounds already added on truncated grids).
struct IdentityCheck {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed() const { return residual <= tolerance; }
};

struct IdentityOptions {
  double tolerance = 1e-6;
  double center_tolerance = 1e-7;
  int random_vectors = 3;
  std::uint64_t seed = 0;
};

std::vector<IdentityCheck> integral_identities(const Grid& grid, const IdentityOptions& options = {});

}  // namespace shrinker
