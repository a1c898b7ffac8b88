#include "shipplan/propeller.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace shipplan {

namespace {
constexpr double kTwoPi = 2.0 * M_PI;
}

double PropellerModel::atil_T3() const {
  return a_T2 * rho * D_p * D_p * (1.0 - f_w) * (1.0 - f_w);
}
double PropellerModel::atil_T2() const {
  return a_T1 * rho * std::pow(D_p, 3) * (1.0 - f_w);
}
double PropellerModel::atil_T1() const { return a_T0 * rho * std::pow(D_p, 4); }
double PropellerModel::atil_Q3() const {
  return a_Q2 * rho * std::pow(D_p, 3) * (1.0 - f_w) * (1.0 - f_w);
}
double PropellerModel::atil_Q2() const {
  return a_Q1 * rho * std::pow(D_p, 4) * (1.0 - f_w);
}
double PropellerModel::atil_Q1() const { return a_Q0 * rho * std::pow(D_p, 5); }
double PropellerModel::k_dEp3() const { return kTwoPi * atil_Q3(); }
double PropellerModel::k_dEp2() const { return kTwoPi * atil_Q2(); }
double PropellerModel::k_dEp1() const { return kTwoPi * atil_Q1(); }

double PropellerModel::thrust_physical(double v_s, double n_p) const {
  const double v_a = (1.0 - f_w) * v_s;
  return rho * std::pow(D_p, 4) * (a_T0 * n_p * n_p) -
         rho * std::pow(D_p, 3) * a_T1 * v_a * n_p -
         rho * D_p * D_p * a_T2 * v_a * v_a;
}

double PropellerModel::torque_physical(double v_s, double n_p) const {
  const double v_a = (1.0 - f_w) * v_s;
  return rho * std::pow(D_p, 5) * (a_Q0 * n_p * n_p) -
         rho * std::pow(D_p, 4) * a_Q1 * v_a * n_p -
         rho * std::pow(D_p, 3) * a_Q2 * v_a * v_a;
}

void PropellerModel::validate() const {
  if (!(D_p > 0.0)) throw std::invalid_argument("propeller: D_p must be > 0");
  if (!(rho > 0.0)) throw std::invalid_argument("propeller: rho must be > 0");
  if (!(f_w >= 0.0 && f_w < 1.0)) {
    throw std::invalid_argument("propeller: f_w must lie in [0,1)");
  }
  if (k_p < 1) throw std::invalid_argument("propeller: k_p must be >= 1");
  if (!(a_T0 > 0.0) || !(a_Q0 > 0.0)) {
    throw std::invalid_argument("propeller: a_T0 and a_Q0 must be > 0");
  }
  if (a_T1 < 0.0 || a_T2 < 0.0 || a_Q1 < 0.0 || a_Q2 < 0.0) {
    throw std::invalid_argument(
        "propeller: a_T1, a_T2, a_Q1, a_Q2 must be >= 0");
  }
}

double thrust_affine(double b, double z, double ntil, double sp12,
                     const PropellerModel& prop) {
  return -prop.atil_T3() * sp12 * b - prop.atil_T2() * z +
         prop.atil_T1() * ntil;
}

double torque_affine(double b, double z, double ntil, double sp12,
                     const PropellerModel& prop) {
  return -prop.atil_Q3() * sp12 * b - prop.atil_Q2() * z +
         prop.atil_Q1() * ntil;
}

double energy_rate_lower_bound_full(double b, double z, double ntil,
                                    double sp12, const PropellerModel& prop) {
  if (ntil == 0.0 && z == 0.0) return 0.0;  // idle propeller
  if (!(z > 0.0)) {
    throw std::domain_error(
        "energy_rate_lower_bound_full: z must be > 0 for a spinning "
        "propeller");
  }
  const double core = -prop.k_dEp3() * z - prop.k_dEp2() * ntil +
                      prop.k_dEp1() * ntil * ntil / z;
  return std::sqrt(sp12) * core;
}

double energy_rate_lower_bound_reduced(double b, double ntil, double sp12,
                                       const PropellerModel& prop) {
  if (ntil == 0.0) return 0.0;
  const double arg = ntil * sp12 * b;
  if (!(arg > 0.0)) {
    throw std::domain_error(
        "energy_rate_lower_bound_reduced: ntil*sp12*b must be > 0");
  }
  const double r = std::sqrt(arg);  // tight value of z
  return std::sqrt(sp12) *
         (prop.k_dEp1() * ntil * ntil / r - prop.k_dEp3() * r);
}

TightnessCondition theorem_condition(const PropellerModel& prop) {
  TightnessCondition out;
  if (prop.a_T1 <= 0.0) {
    out.vacuous = true;
    return out;
  }
  const double lhs = prop.a_Q1 * prop.a_T0 / (prop.a_Q0 * prop.a_T1) -
                     prop.a_Q2 * prop.a_T0 * prop.a_T0 /
                         (prop.a_Q0 * prop.a_T1 * prop.a_T1);
  out.holds = lhs > 1.0;
  out.margin = lhs - 1.0;
  return out;
}

std::pair<double, double> eval_wageningen(const OpenWaterCurve& curve,
                                          double J) {
  if (!curve.geometry || curve.thrust_terms.empty() ||
      curve.torque_terms.empty()) {
    throw std::runtime_error(
        "eval_wageningen: curve '" + curve.name +
        "' has no regression terms or geometry attached");
  }
  const WageningenGeometry& g = *curve.geometry;
  auto eval = [&](const std::vector<WageningenTerm>& terms) {
    double acc = 0.0;
    for (const WageningenTerm& t : terms) {
      acc += t.C * std::pow(J, t.S) * std::pow(g.P_D, t.t) *
             std::pow(g.AE_A0, t.u) * std::pow(g.Z, t.v);
    }
    return acc;
  };
  return {eval(curve.thrust_terms), eval(curve.torque_terms)};
}

OpenWaterCurve tabulate_wageningen(const OpenWaterCurve& terms_only,
                                   int n_grid) {
  if (n_grid < 3) throw std::invalid_argument("tabulate: need >= 3 points");
  const double kt0 = eval_wageningen(terms_only, 0.0).first;
  if (!(kt0 > 0.0)) {
    throw std::runtime_error("tabulate: K_T(0) must be positive, got " +
                             std::to_string(kt0));
  }
  // First zero crossing of K_T: scan then bisect.
  double j_lo = 0.0, j_hi = 0.0;
  for (double j = 0.05; j <= 3.0; j += 0.05) {
    if (eval_wageningen(terms_only, j).first <= 0.0) {
      j_hi = j;
      j_lo = j - 0.05;
      break;
    }
  }
  if (j_hi == 0.0) {
    throw std::runtime_error(
        "tabulate: K_T has no zero below J=3; not a thrust curve");
  }
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (j_lo + j_hi);
    if (eval_wageningen(terms_only, mid).first > 0.0) {
      j_lo = mid;
    } else {
      j_hi = mid;
    }
  }
  const double j_zero = 0.5 * (j_lo + j_hi);

  OpenWaterCurve out = terms_only;
  out.J.resize(n_grid);
  out.K_T.resize(n_grid);
  out.K_Q.resize(n_grid);
  for (int i = 0; i < n_grid; ++i) {
    const double j = j_zero * static_cast<double>(i) / (n_grid - 1);
    auto [kt, kq] = eval_wageningen(terms_only, j);
    out.J[i] = j;
    out.K_T[i] = kt;
    out.K_Q[i] = kq;
  }
  return out;
}

namespace {

// Weighted least squares of y ~ a0 - a1*J - a2*J^2 + c3*J^3 over the column
// subset given by `use`, solved by normal equations. Columns map to the
// monomials {1, -J, -J^2, +J^3}.
struct LsqProblem {
  const std::vector<double>& J;
  const std::vector<double>& y;
  const std::vector<double>& w;
};

PolyFit solve_subset(const LsqProblem& p, const std::array<bool, 4>& use,
                     double* out_cost) {
  int cols = 0;
  std::array<int, 4> map{};
  for (int c = 0; c < 4; ++c) {
    if (use[c]) map[cols++] = c;
  }
  Eigen::MatrixXd AtA = Eigen::MatrixXd::Zero(cols, cols);
  Eigen::VectorXd Atb = Eigen::VectorXd::Zero(cols);
  auto basis = [](double j, int c) {
    switch (c) {
      case 0: return 1.0;
      case 1: return -j;
      case 2: return -j * j;
      default: return j * j * j;
    }
  };
  for (std::size_t i = 0; i < p.J.size(); ++i) {
    for (int r = 0; r < cols; ++r) {
      const double br = basis(p.J[i], map[r]);
      Atb(r) += p.w[i] * br * p.y[i];
      for (int c = 0; c < cols; ++c) {
        AtA(r, c) += p.w[i] * br * basis(p.J[i], map[c]);
      }
    }
  }
  Eigen::VectorXd sol = AtA.ldlt().solve(Atb);
  PolyFit fit;
  for (int r = 0; r < cols; ++r) {
    if (map[r] == 0) fit.a0 = sol(r);
    if (map[r] == 1) fit.a1 = sol(r);
    if (map[r] == 2) fit.a2 = sol(r);
    if (map[r] == 3) fit.c3 = sol(r);
  }
  double cost = 0.0;
  for (std::size_t i = 0; i < p.J.size(); ++i) {
    const double r = fit.eval(p.J[i]) - p.y[i];
    cost += p.w[i] * r * r;
  }
  if (out_cost) *out_cost = cost;
  return fit;
}

// Active-set enumeration over the sign-constrained coefficients: a1 >= 0 and
// a2 >= 0 are either free or pinned to zero; a0 must come out positive.
PolyFit fit_constrained(const LsqProblem& p, bool allow_a1, bool allow_a2,
                        bool allow_c3, const std::string& what) {
  PolyFit best;
  double best_cost = std::numeric_limits<double>::infinity();
  bool found = false;
  for (int mask = 0; mask < 4; ++mask) {
    const bool a1_free = allow_a1 && !(mask & 1);
    const bool a2_free = allow_a2 && !(mask & 2);
    std::array<bool, 4> use = {true, a1_free, a2_free, allow_c3};
    double cost = 0.0;
    PolyFit fit = solve_subset(p, use, &cost);
    if (!(fit.a0 > 0.0)) continue;
    if (fit.a1 < 0.0 || fit.a2 < 0.0) continue;
    if (cost < best_cost - 1e-15 * (1.0 + best_cost)) {
      best = fit;
      best_cost = cost;
      found = true;
    }
  }
  if (!found) {
    throw std::runtime_error(
        "fit_poly2: sign-constrained fit infeasible for " + what +
        " (no subset yields a0 > 0, a1 >= 0, a2 >= 0)");
  }
  return best;
}

double mean_abs_rel_error(const std::vector<double>& truth,
                          const std::vector<double>& fit,
                          const std::vector<bool>& active) {
  double acc = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (!active[i]) continue;
    acc += std::abs(fit[i] - truth[i]) / std::abs(truth[i]);
    ++n;
  }
  return n > 0 ? acc / n : 0.0;
}

}  // namespace

FitReport fit_poly2(const OpenWaterCurve& curve, const FitOptions& options,
                    PropellerModel& out_coefficients) {
  if (curve.J.size() < 3) {
    throw std::invalid_argument("fit_poly2: need at least 3 grid points");
  }
  if (curve.K_T.size() != curve.J.size() ||
      curve.K_Q.size() != curve.J.size()) {
    throw std::invalid_argument("fit_poly2: grid/value size mismatch");
  }
  if (!(curve.K_T.front() > 0.0)) {
    throw std::invalid_argument("fit_poly2: K_T(0) must be positive");
  }

  const std::size_t n = curve.J.size();
  // Points too close to a zero crossing are excluded from the relative
  // metric (and from the relative weighting) to keep it finite.
  auto active_mask = [&](const std::vector<double>& y) {
    double peak = 0.0;
    for (double v : y) peak = std::max(peak, std::abs(v));
    std::vector<bool> mask(n);
    for (std::size_t i = 0; i < n; ++i) {
      mask[i] = std::abs(y[i]) > 1e-2 * peak;
    }
    return mask;
  };

  auto weights_for = [&](const std::vector<double>& y,
                         const std::vector<bool>& mask) {
    std::vector<double> w(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (!mask[i]) continue;
      w[i] = 1.0 / (y[i] * y[i]);
      if (options.weighted) {
        const double d = curve.J[i] - options.J_design;
        w[i] *= std::exp(-0.5 * d * d / (options.J_sigma * options.J_sigma));
      }
    }
    return w;
  };

  FitReport report;
  report.name = curve.name;

  const std::vector<bool> mask_T = active_mask(curve.K_T);
  const std::vector<bool> mask_Q = active_mask(curve.K_Q);
  const std::vector<double> w_T = weights_for(curve.K_T, mask_T);
  const std::vector<double> w_Q = weights_for(curve.K_Q, mask_Q);

  const bool a1_allowed = !options.constrain_linear_zero;
  LsqProblem pt{curve.J, curve.K_T, w_T};
  LsqProblem pq{curve.J, curve.K_Q, w_Q};

  report.linear_T = fit_constrained(pt, true, false, false, "K_T linear");
  report.poly2_T = fit_constrained(pt, a1_allowed, true, false, "K_T poly2");
  report.poly3_T = fit_constrained(pt, true, true, true, "K_T poly3");
  report.linear_Q = fit_constrained(pq, true, false, false, "K_Q linear");
  report.poly2_Q = fit_constrained(pq, a1_allowed, true, false, "K_Q poly2");
  report.poly3_Q = fit_constrained(pq, true, true, true, "K_Q poly3");

  auto tabulate = [&](const PolyFit& fit) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = fit.eval(curve.J[i]);
    return v;
  };
  const auto lin_T = tabulate(report.linear_T), lin_Q = tabulate(report.linear_Q);
  const auto p2_T = tabulate(report.poly2_T), p2_Q = tabulate(report.poly2_Q);
  const auto p3_T = tabulate(report.poly3_T), p3_Q = tabulate(report.poly3_Q);

  report.err_K_T.linear = mean_abs_rel_error(curve.K_T, lin_T, mask_T);
  report.err_K_T.poly2 = mean_abs_rel_error(curve.K_T, p2_T, mask_T);
  report.err_K_T.poly3 = mean_abs_rel_error(curve.K_T, p3_T, mask_T);
  report.err_K_Q.linear = mean_abs_rel_error(curve.K_Q, lin_Q, mask_Q);
  report.err_K_Q.poly2 = mean_abs_rel_error(curve.K_Q, p2_Q, mask_Q);
  report.err_K_Q.poly3 = mean_abs_rel_error(curve.K_Q, p3_Q, mask_Q);

  // eta_o = (K_T / K_Q) * J / (2*pi); compare where the true efficiency is
  // meaningfully nonzero.
  std::vector<double> eta_true(n, 0.0);
  std::vector<bool> mask_eta(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (mask_T[i] && mask_Q[i] && curve.J[i] > 0.0) {
      eta_true[i] = curve.K_T[i] / curve.K_Q[i] * curve.J[i] / (2.0 * M_PI);
      mask_eta[i] = eta_true[i] > 1e-3;
    }
  }
  auto eta_of = [&](const std::vector<double>& kt,
                    const std::vector<double>& kq) {
    std::vector<double> v(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (mask_eta[i] && kq[i] > 0.0) {
        v[i] = kt[i] / kq[i] * curve.J[i] / (2.0 * M_PI);
      }
    }
    return v;
  };
  report.err_eta_o.linear =
      mean_abs_rel_error(eta_true, eta_of(lin_T, lin_Q), mask_eta);
  report.err_eta_o.poly2 =
      mean_abs_rel_error(eta_true, eta_of(p2_T, p2_Q), mask_eta);
  report.err_eta_o.poly3 =
      mean_abs_rel_error(eta_true, eta_of(p3_T, p3_Q), mask_eta);

  out_coefficients.a_T0 = report.poly2_T.a0;
  out_coefficients.a_T1 = report.poly2_T.a1;
  out_coefficients.a_T2 = report.poly2_T.a2;
  out_coefficients.a_Q0 = report.poly2_Q.a0;
  out_coefficients.a_Q1 = report.poly2_Q.a1;
  out_coefficients.a_Q2 = report.poly2_Q.a2;
  return report;
}

}  // namespace shipplan
