#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace shipplan {

using Vec2 = Eigen::Vector2d;

/// Planar Bezier curve over sigma in [0,1], defined by its control points.
/// Degree must be at least 4 so the curve is three times differentiable,
/// which the spatial-domain dynamics require.
struct PathSpec {
  std::vector<Vec2> control_points;

  int degree() const { return static_cast<int>(control_points.size()) - 1; }
};

void validate_path_spec(const PathSpec& spec);

/// Point on the curve, sum of Bernstein-weighted control points.
/// Evaluated with de Casteljau recursion (convex combinations only).
Vec2 bezier_eval(const PathSpec& spec, double sigma);

/// Exact k-th derivative with respect to sigma. The derivative of a Bezier
/// curve is itself a Bezier curve over the k-th finite differences of the
/// control points, scaled by n(n-1)...(n-k+1).
Vec2 bezier_derivative(const PathSpec& spec, int k, double sigma);

/// Path geometry sampled at N+1 evenly spaced sigma nodes.
/// sp12 = s1'^2 + s2'^2; theta = atan2(s2', s1') unwrapped so adjacent
/// nodes never jump by 2*pi; thetap/thetapp follow the closed-form total
/// derivatives of atan2.
struct PathSamples {
  std::vector<double> sigma;
  std::vector<double> s1, s2;
  std::vector<double> s1p, s2p;
  std::vector<double> s1pp, s2pp;
  std::vector<double> s1ppp, s2ppp;
  std::vector<double> sp12;
  std::vector<double> theta, thetap, thetapp;

  int node_count() const { return static_cast<int>(sigma.size()); }
  double dsigma() const { return sigma.size() > 1 ? sigma[1] - sigma[0] : 0.0; }
};

// Nodes where s1'^2 + s2'^2 falls below this are rejected: the spatial
// reformulation needs a nonsingular parametrization (sigma_dot > 0).
inline constexpr double kMinSp12 = 1e-9;  // m^2

PathSamples sample_path(const PathSpec& spec, int N);

/// Reproducible random control points (uniform in [0,box_x] x [0,box_y]).
PathSpec generate_random_path(std::uint32_t seed, int n_points, double box_x,
                              double box_y);

}  // namespace shipplan
