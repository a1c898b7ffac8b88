#include "shipplan/bezier.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace shipplan {

namespace {

Vec2 de_casteljau(std::vector<Vec2> pts, double sigma) {
  const double t = sigma;
  for (std::size_t level = pts.size() - 1; level > 0; --level) {
    for (std::size_t i = 0; i < level; ++i) {
      pts[i] = (1.0 - t) * pts[i] + t * pts[i + 1];
    }
  }
  return pts[0];
}

void check_sigma(double sigma) {
  if (!(sigma >= 0.0 && sigma <= 1.0)) {
    throw std::domain_error("bezier: sigma must lie in [0,1], got " +
                            std::to_string(sigma));
  }
}

}  // namespace

void validate_path_spec(const PathSpec& spec) {
  if (spec.control_points.size() < 5) {
    throw std::invalid_argument(
        "path: need at least 5 control points (degree >= 4) for a three "
        "times differentiable curve");
  }
  bool any_motion = false;
  for (std::size_t i = 1; i < spec.control_points.size(); ++i) {
    if ((spec.control_points[i] - spec.control_points[i - 1]).norm() > 0.0) {
      any_motion = true;
      break;
    }
  }
  if (!any_motion) {
    throw std::invalid_argument("path: all control points coincide");
  }
}

Vec2 bezier_eval(const PathSpec& spec, double sigma) {
  check_sigma(sigma);
  if (spec.control_points.empty()) {
    throw std::invalid_argument("path: no control points");
  }
  return de_casteljau(spec.control_points, sigma);
}

Vec2 bezier_derivative(const PathSpec& spec, int k, double sigma) {
  check_sigma(sigma);
  const int n = spec.degree();
  if (k < 1 || k > n) {
    throw std::domain_error("bezier_derivative: order k=" + std::to_string(k) +
                            " not in [1, degree=" + std::to_string(n) + "]");
  }
  // k-th finite differences of the control points and the n(n-1)..(n-k+1)
  // scale factor.
  std::vector<Vec2> diff = spec.control_points;
  double scale = 1.0;
  for (int level = 1; level <= k; ++level) {
    for (std::size_t i = 0; i + level < spec.control_points.size(); ++i) {
      diff[i] = diff[i + 1] - diff[i];
    }
    diff.pop_back();
    scale *= static_cast<double>(n - level + 1);
  }
  return scale * de_casteljau(diff, sigma);
}

PathSamples sample_path(const PathSpec& spec, int N) {
  validate_path_spec(spec);
  if (N < 2) {
    throw std::invalid_argument("sample_path: need N >= 2 intervals");
  }

  PathSamples out;
  const int count = N + 1;
  auto reserve = [&](std::vector<double>& v) { v.resize(count); };
  reserve(out.sigma);
  reserve(out.s1);
  reserve(out.s2);
  reserve(out.s1p);
  reserve(out.s2p);
  reserve(out.s1pp);
  reserve(out.s2pp);
  reserve(out.s1ppp);
  reserve(out.s2ppp);
  reserve(out.sp12);
  reserve(out.theta);
  reserve(out.thetap);
  reserve(out.thetapp);

  for (int i = 0; i < count; ++i) {
    const double sigma = static_cast<double>(i) / static_cast<double>(N);
    out.sigma[i] = sigma;
    const Vec2 p = bezier_eval(spec, sigma);
    const Vec2 d1 = bezier_derivative(spec, 1, sigma);
    const Vec2 d2 = bezier_derivative(spec, 2, sigma);
    const Vec2 d3 = bezier_derivative(spec, 3, sigma);

    out.s1[i] = p.x();
    out.s2[i] = p.y();
    out.s1p[i] = d1.x();
    out.s2p[i] = d1.y();
    out.s1pp[i] = d2.x();
    out.s2pp[i] = d2.y();
    out.s1ppp[i] = d3.x();
    out.s2ppp[i] = d3.y();

    const double k2 = d1.squaredNorm();
    out.sp12[i] = k2;
    if (!(k2 > kMinSp12)) {
      throw std::domain_error(
          "sample_path: degenerate parametrization at node " +
          std::to_string(i) + " (sigma=" + std::to_string(sigma) +
          "): s1'^2+s2'^2=" + std::to_string(k2));
    }

    out.theta[i] = std::atan2(d1.y(), d1.x());
    // Total derivatives of atan2(s2', s1').
    const double k1 = 2.0 * d1.x() * d2.x() + 2.0 * d1.y() * d2.y();
    out.thetap[i] = (d1.x() * d2.y() - d1.y() * d2.x()) / k2;
    out.thetapp[i] = (d1.y() * d2.x() * k1 - d1.x() * d2.y() * k1) / (k2 * k2) +
                     (d1.x() * d3.y() - d1.y() * d3.x()) / k2;
  }

  // Unwrap heading: atan2 branch cuts must not show up as 2*pi node jumps.
  double offset = 0.0;
  for (int i = 1; i < count; ++i) {
    double t = out.theta[i] + offset;
    while (t - out.theta[i - 1] > M_PI) {
      t -= 2.0 * M_PI;
      offset -= 2.0 * M_PI;
    }
    while (t - out.theta[i - 1] < -M_PI) {
      t += 2.0 * M_PI;
      offset += 2.0 * M_PI;
    }
    out.theta[i] = t;
  }
  return out;
}

PathSpec generate_random_path(std::uint32_t seed, int n_points, double box_x,
                              double box_y) {
  if (n_points < 5) {
    throw std::invalid_argument("generate_random_path: need >= 5 points");
  }
  std::mt19937 rng(seed);
  // Explicit uint->double mapping: std::uniform_real_distribution is not
  // bit-identical across standard libraries.
  auto unit = [&rng]() {
    return static_cast<double>(rng()) / 4294967296.0;
  };
  PathSpec spec;
  spec.control_points.reserve(n_points);
  for (int i = 0; i < n_points; ++i) {
    const double x = unit() * box_x;
    const double y = unit() * box_y;
    spec.control_points.push_back(Vec2(x, y));
  }
  return spec;
}

}  // namespace shipplan
