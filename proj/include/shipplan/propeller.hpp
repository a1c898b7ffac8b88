#pragma once

#include <optional>
#include <string>
#include <vector>

namespace shipplan {

/// Fixed-pitch propeller with concave-parabola open-water coefficients
///   K_T(J) = -a_T2 J^2 - a_T1 J + a_T0,   K_Q(J) = -a_Q2 J^2 - a_Q1 J + a_Q0
/// and the derived constants used by the affine thrust/torque and the
/// convex shaft-energy lower bound. The reduced model sets the linear
/// coefficients to zero, which eliminates the z = v_s*n_p auxiliary.
struct PropellerModel {
  double D_p = 0.0;   // diameter, m
  double f_w = 0.0;   // wake fraction
  double rho = 0.0;   // water density, kg/m^3
  int k_p = 1;        // number of propeller+motor units

  double a_T0 = 0.0, a_T1 = 0.0, a_T2 = 0.0;
  double a_Q0 = 0.0, a_Q1 = 0.0, a_Q2 = 0.0;

  bool reduced() const { return a_T1 == 0.0 && a_Q1 == 0.0; }

  // T_p = -atil_T3 * sp12 * b - atil_T2 * z + atil_T1 * ntil
  double atil_T3() const;
  double atil_T2() const;
  double atil_T1() const;
  // Q_p analogously
  double atil_Q3() const;
  double atil_Q2() const;
  double atil_Q1() const;
  // shaft energy input per sigma: see energy_rate_lower_bound()
  double k_dEp3() const;
  double k_dEp2() const;
  double k_dEp1() const;

  double K_T(double J) const { return -a_T2 * J * J - a_T1 * J + a_T0; }
  double K_Q(double J) const { return -a_Q2 * J * J - a_Q1 * J + a_Q0; }

  /// Physical (time-domain) thrust/torque for one propeller, N and N*m.
  /// v_s is vessel speed; inflow is (1-f_w)*v_s; n_p in rev/s.
  double thrust_physical(double v_s, double n_p) const;
  double torque_physical(double v_s, double n_p) const;

  void validate() const;
};

/// Affine thrust per propeller in planner variables (b, z, ntil).
double thrust_affine(double b, double z, double ntil, double sp12,
                     const PropellerModel& prop);
/// Affine torque per propeller.
double torque_affine(double b, double z, double ntil, double sp12,
                     const PropellerModel& prop);

/// Convex lower bound on the fictive shaft input force F_dEp = P_p,in/sqrt(b)
/// (energy per unit path coordinate, per propeller).
/// Full model (requires z > 0):
///   sqrt(sp12) * (-k_dEp3*z - k_dEp2*ntil + k_dEp1*ntil^2/z)
/// The sqrt(sp12) factor makes the bound coincide with 2*pi*Q_p*n_p/sqrt(b)
/// when z takes its tight value sqrt(sp12*b*ntil).
double energy_rate_lower_bound_full(double b, double z, double ntil,
                                    double sp12, const PropellerModel& prop);
/// Reduced model (a_T1 = a_Q1 = 0), z eliminated at its tight value.
double energy_rate_lower_bound_reduced(double b, double ntil, double sp12,
                                       const PropellerModel& prop);

/// Tightness condition on the poly2 coefficients:
///   1 < a_Q1*a_T0/(a_Q0*a_T1) - a_Q2*a_T0^2/(a_Q0*a_T1^2).
/// For the reduced model the z relaxation does not exist, so the condition
/// is vacuous.
struct TightnessCondition {
  bool vacuous = false;
  bool holds = false;
  double margin = 0.0;  // lhs - 1, only meaningful when !vacuous
};
TightnessCondition theorem_condition(const PropellerModel& prop);

/// One monomial of the open-water regression polynomial:
/// C * J^S * (P/D)^t * (AE/A0)^u * Z^v.
struct WageningenTerm {
  double C = 0.0;
  double S = 0.0, t = 0.0, u = 0.0, v = 0.0;
};

struct WageningenGeometry {
  double Z = 0.0;      // blade count
  double AE_A0 = 0.0;  // expanded blade area ratio
  double P_D = 0.0;    // pitch-diameter ratio
};

/// Open-water characteristics on an advance-coefficient grid, optionally
/// backed by regression polynomial terms.
struct OpenWaterCurve {
  std::vector<double> J;
  std::vector<double> K_T;
  std::vector<double> K_Q;

  std::optional<WageningenGeometry> geometry;
  std::vector<WageningenTerm> thrust_terms;
  std::vector<WageningenTerm> torque_terms;

  std::string name;
};

/// Evaluate the regression polynomials at one advance coefficient.
/// Requires the term lists to be present.
std::pair<double, double> eval_wageningen(const OpenWaterCurve& curve,
                                          double J);

/// Build the evaluation grid for a term-backed curve: 101 points on
/// [0, J0] where J0 is the first zero of K_T (thrust-producing quadrant).
OpenWaterCurve tabulate_wageningen(const OpenWaterCurve& terms_only,
                                   int n_grid = 101);

/// Coefficients of one fitted polynomial K(J) = a0 - a1*J - a2*J^2 + c3*J^3.
struct PolyFit {
  double a0 = 0.0, a1 = 0.0, a2 = 0.0, c3 = 0.0;
  double eval(double J) const {
    return a0 - a1 * J - a2 * J * J + c3 * J * J * J;
  }
};

/// Mean absolute relative error per quantity and model order.
struct FitErrors {
  double linear = 0.0, poly2 = 0.0, poly3 = 0.0;
};

struct FitReport {
  FitErrors err_K_T;
  FitErrors err_K_Q;
  FitErrors err_eta_o;
  PolyFit poly2_T, poly2_Q;
  PolyFit linear_T, linear_Q;
  PolyFit poly3_T, poly3_Q;
  std::string name;
};

struct FitOptions {
  bool constrain_linear_zero = false;  // force a1 = 0 (reduced model)
  // Optional Gaussian emphasis around an operating advance coefficient.
  bool weighted = false;
  double J_design = 0.0;
  double J_sigma = 0.1;
};

/// Sign-constrained relative least squares of the three model orders
/// against the tabulated curve; fills the propeller coefficients from the
/// poly2 fits. Throws on infeasible sign pattern (a0 <= 0).
FitReport fit_poly2(const OpenWaterCurve& curve, const FitOptions& options,
                    PropellerModel& out_coefficients);

}  // namespace shipplan
