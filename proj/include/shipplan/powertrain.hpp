#pragma once

#include <vector>

namespace shipplan {

/// Gearbox + electric machine + inverter, with shaft speed in rev/s
/// throughout (matching the open-water coefficient definitions).
struct DrivetrainModel {
  double eta_EM = 1.0;
  double eta_g = 1.0;
  double eta_inv = 1.0;
  double i_g = 1.0;        // gear ratio n_EM / n_p
  double n_EM_max = 0.0;   // rev/s
  double Q_EM_max = 0.0;   // N m
  double P_EM_max = 0.0;   // W
  double v_ref = 1.0;      // Taylor reference speed for power limits, m/s

  double eta_tilde() const { return eta_EM * eta_g * eta_inv; }
  void validate() const;
};

/// General energy converter (fuel cell module or genset): affine fuel map
/// mdot = a_c0 + a_c1 * P_c per running unit.
struct ConverterModel {
  double a_c0 = 0.0;    // idle fuel rate, mg/s
  double a_c1 = 0.0;    // marginal fuel rate, mg/J
  double P_c_max = 0.0; // W per converter
  int K = 1;            // installed converter count

  void validate() const;
};

/// Battery equivalent circuit (open-circuit voltage + series resistance).
struct BatteryModel {
  double U0 = 0.0;          // V
  double R_i = 0.0;         // ohm
  double E_max = 0.0;       // usable pack energy, J
  double E0 = 0.0;          // initial energy, J
  double dE_min = 0.0;      // SOC-window lower deviation bound, J (<= 0)
  double dE_max = 0.0;      // SOC-window upper deviation bound, J (>= 0)
  double P_cha_max = 0.0;   // W, nonnegative
  double P_dis_max = 0.0;   // W, nonnegative
  double eta_dcdc = 1.0;
  bool soc_sustaining = true;

  void validate() const;
};

/// Tangent of P/sqrt(b) at the reference point b_r = v_ref^2/sp12. Since
/// b -> P/sqrt(b) is convex, the tangent under-estimates the true limit
/// everywhere, so the approximated constraint is conservative.
double taylor_force_limit(double P_max, double b, double sp12, double v_ref);

/// Electric machine input force and its limit residuals at one node.
/// Residuals are constraint values in standard form g <= 0.
struct EmEvaluation {
  double F_EM = 0.0;             // F_dEp / eta_tilde
  double speed_residual = 0.0;   // ntil - (n_EM_max / i_g)^2
  double torque_residual = 0.0;  // Q_p - Q_EM_max * eta_g * i_g
  double power_residual = 0.0;   // F_EM - taylor limit
};
EmEvaluation em_force_and_limits(double F_dEp, double b, double ntil,
                                 double Q_p, const DrivetrainModel& drv,
                                 double sp12);

/// Internal fuel force of one running converter, a_c0*y_t + (a_c1-1)*F_c
/// as printed in the source model. Note the assembled objective instead
/// charges (k_c*a_c0 + w_t)*y_t + k_c*a_c1*F_c; see README.
double converter_internal_force(double F_c, double y_t,
                                const ConverterModel& conv);

/// Convex battery dissipation lower bound R_i/U0^2 * F_bat^2 / y_t.
double battery_loss_lower_bound(double F_bat, double y_t,
                                const BatteryModel& batt);

/// Residual of the relaxed fictive-force balance (standard form, <= 0
/// feasible):
/// k_p*F_dEp/eta_tilde + P_aux*y_t + F_batd - (k_c*F_c + F_bat*eta_dcdc).
double energy_balance_residual(double F_dEp, double y_t, double F_batd,
                               double F_c, double F_bat, int k_c, int k_p,
                               double eta_tilde, double P_aux,
                               const BatteryModel& batt);

/// Integrate dE' = -F_bat * sqrt(sp12) with the same forward-difference
/// stepping the planner uses. F_bat has one entry per interval (N values),
/// sp12 one per node (N+1); returns N+1 energy deviations starting at 0.
std::vector<double> soc_trajectory(const std::vector<double>& F_bat,
                                   const std::vector<double>& sp12,
                                   double dsigma);

}  // namespace shipplan
