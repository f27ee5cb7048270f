#pragma once
#include <vector>

#include "shrinker/grid.hpp"

namespace shrinker {

// Normal-bundle section sampled on a grid: values are m x N (one column per node), and
// derivative[i] holds the normal covariant derivative along u_i in the same layout.
struct NormalField {
  Mat values;
  std::vector<Mat> derivative;

  int size() const { return static_cast<int>(values.cols()); }
};

// Normal part of each column.
Mat normal_projection(const Grid& grid, const Mat& values);
// Largest tangential component relative to the column norm, plus an absolute floor.
double max_tangential_defect(const Grid& grid, const Mat& values, double floor = 1e-12);

// grad^perp_{u_i} V = P^perp d_i V by central differences on the grid.
NormalField normal_covariant_derivative(const Grid& grid, const Mat& values);
// Projects arbitrary ambient values to the normal bundle before differentiating.
NormalField make_normal_field(const Grid& grid, const Mat& ambient_values);

NormalField mean_curvature_field(const Grid& grid);
NormalField translation_field(const Grid& grid, const Vec& direction);
NormalField zero_field(const Grid& grid);
NormalField scaled(const NormalField& field, double factor);
NormalField combine(const NormalField& a, double ca, const NormalField& b, double cb);

// Exact covariant derivative of y^perp: -<y, u_j> g^jk A_ik.
std::vector<Mat> translation_derivative_exact(const Grid& grid, const Vec& direction);

// Connection Laplacian of a normal field.
Mat connection_laplacian(const Grid& grid, const NormalField& field);
// sum_ijkl <A_ij, V> g^ik g^jl A_kl per node.
Mat second_form_action(const Grid& grid, const Mat& values);
// grad^perp along the tangential part of X.
Mat derivative_along_position(const Grid& grid, const NormalField& field);

// g^ij <grad_i V, grad_j W> per node.
Vec gradient_pairing(const Grid& grid, const NormalField& v, const NormalField& w);
// g^ik g^jl <A_ij, V> <A_kl, W> per node.
Vec second_form_pairing(const Grid& grid, const Mat& v, const Mat& w);

Vec scalar_laplacian(const Grid& grid, const Vec& f);
// Delta f - <X, grad f> / 2.
Vec scalar_script_L(const Grid& grid, const Vec& f);

// Columnwise dot product and squared norm.
Vec column_dot(const Mat& a, const Mat& b);

}  // namespace shrinker
