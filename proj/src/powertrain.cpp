#include "shipplan/powertrain.hpp"

#include <cmath>
#include <stdexcept>

namespace shipplan {

void DrivetrainModel::validate() const {
  auto in_unit = [](double v, const char* name) {
    if (!(v > 0.0 && v <= 1.0)) {
      throw std::invalid_argument(std::string("drivetrain: ") + name +
                                  " must lie in (0,1]");
    }
  };
  in_unit(eta_EM, "eta_EM");
  in_unit(eta_g, "eta_g");
  in_unit(eta_inv, "eta_inv");
  if (!(i_g > 0.0)) throw std::invalid_argument("drivetrain: i_g must be > 0");
  if (!(n_EM_max > 0.0) || !(Q_EM_max > 0.0) || !(P_EM_max > 0.0)) {
    throw std::invalid_argument("drivetrain: limits must be > 0");
  }
  if (!(v_ref > 0.0)) {
    throw std::invalid_argument("drivetrain: v_ref must be > 0");
  }
}

void ConverterModel::validate() const {
  if (a_c0 < 0.0 || a_c1 < 0.0) {
    throw std::invalid_argument("converter: fuel map must be nonnegative");
  }
  if (!(P_c_max > 0.0)) {
    throw std::invalid_argument("converter: P_c_max must be > 0");
  }
  if (K < 1) throw std::invalid_argument("converter: K must be >= 1");
}

void BatteryModel::validate() const {
  if (!(U0 > 0.0) || !(R_i > 0.0)) {
    throw std::invalid_argument("battery: U0 and R_i must be > 0");
  }
  if (!(dE_min <= 0.0 && dE_max >= 0.0)) {
    throw std::invalid_argument(
        "battery: SOC window must contain the initial state (dE_min <= 0 <= "
        "dE_max)");
  }
  if (P_cha_max < 0.0 || P_dis_max < 0.0) {
    throw std::invalid_argument("battery: power limits must be >= 0");
  }
  if (!(eta_dcdc > 0.0 && eta_dcdc <= 1.0)) {
    throw std::invalid_argument("battery: eta_dcdc must lie in (0,1]");
  }
  if (E_max > 0.0 && !(E0 >= 0.0 && E0 <= E_max)) {
    throw std::invalid_argument("battery: E0 must lie in [0, E_max]");
  }
}

double taylor_force_limit(double P_max, double b, double sp12, double v_ref) {
  return 0.5 * P_max * std::sqrt(sp12) / v_ref *
         (3.0 - sp12 * b / (v_ref * v_ref));
}

EmEvaluation em_force_and_limits(double F_dEp, double b, double ntil,
                                 double Q_p, const DrivetrainModel& drv,
                                 double sp12) {
  EmEvaluation out;
  out.F_EM = F_dEp / drv.eta_tilde();
  const double n_cap = drv.n_EM_max / drv.i_g;
  out.speed_residual = ntil - n_cap * n_cap;
  out.torque_residual = Q_p - drv.Q_EM_max * drv.eta_g * drv.i_g;
  out.power_residual =
      out.F_EM - taylor_force_limit(drv.P_EM_max, b, sp12, drv.v_ref);
  return out;
}

double converter_internal_force(double F_c, double y_t,
                                const ConverterModel& conv) {
  return conv.a_c0 * y_t + (conv.a_c1 - 1.0) * F_c;
}

double battery_loss_lower_bound(double F_bat, double y_t,
                                const BatteryModel& batt) {
  if (!(y_t > 0.0)) {
    if (F_bat != 0.0) {
      throw std::domain_error(
          "battery_loss_lower_bound: y_t = 0 with nonzero battery force");
    }
    return 0.0;
  }
  return batt.R_i / (batt.U0 * batt.U0) * F_bat * F_bat / y_t;
}

double energy_balance_residual(double F_dEp, double y_t, double F_batd,
                               double F_c, double F_bat, int k_c, int k_p,
                               double eta_tilde, double P_aux,
                               const BatteryModel& batt) {
  return k_p * F_dEp / eta_tilde + P_aux * y_t + F_batd -
         (static_cast<double>(k_c) * F_c + F_bat * batt.eta_dcdc);
}

std::vector<double> soc_trajectory(const std::vector<double>& F_bat,
                                   const std::vector<double>& sp12,
                                   double dsigma) {
  if (sp12.size() != F_bat.size() + 1) {
    throw std::invalid_argument(
        "soc_trajectory: need one sp12 sample per node and one F_bat per "
        "interval");
  }
  std::vector<double> dE(sp12.size(), 0.0);
  for (std::size_t i = 0; i < F_bat.size(); ++i) {
    dE[i + 1] = dE[i] - dsigma * std::sqrt(sp12[i]) * F_bat[i];
  }
  return dE;
}

}  // namespace shipplan
