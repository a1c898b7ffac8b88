#include "shipplan/hydro.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace shipplan {

namespace {
// Below this speed the hull force coefficient formulas are skipped; the
// quadratic force laws vanish faster than C_F blows up.
constexpr double kStillWater = 1e-9;  // m/s
}  // namespace

double VesselModel::stern_added_mass() const {
  return 0.5 * M_PI * rho * T * T;
}

void VesselModel::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) {
      throw std::invalid_argument(std::string("vessel: ") + name +
                                  " must be > 0");
    }
  };
  positive(m, "m");
  positive(Izz, "Izz");
  positive(S, "S");
  positive(A_s, "A_s");
  positive(Omega, "Omega");
  positive(L, "L");
  positive(T, "T");
  positive(nu, "nu");
  positive(rho, "rho");
  positive(rudder.A_R, "rudder.A_R");
  positive(rudder.b_R, "rudder.b_R");
  if (k1 < 0.0 || k2 < 0.0 || Iw < 0.0) {
    throw std::invalid_argument("vessel: added inertia terms must be >= 0");
  }
  if (!(rudder.k_tm > 0.0 && rudder.k_tm <= 1.0)) {
    throw std::invalid_argument("vessel: rudder.k_tm must lie in (0,1]");
  }
  // The linear lift model stops being valid at stall, around 20 deg.
  if (!(rudder.omega_max > 0.0 &&
        rudder.omega_max <= 20.0 * M_PI / 180.0 + 1e-12)) {
    throw std::invalid_argument(
        "vessel: rudder.omega_max must lie in (0, 20 deg]");
  }
  if (rudder.rho_power != 1 && rudder.rho_power != 2) {
    throw std::invalid_argument("vessel: rudder.rho_power must be 1 or 2");
  }
  if (!(beta_max > 0.0)) {
    throw std::invalid_argument("vessel: beta_max must be > 0");
  }
  if (a_L0 < 0.0 || a_L1 < 0.0 || C_R < 0.0) {
    throw std::invalid_argument("vessel: a_L0, a_L1, C_R must be >= 0");
  }
}

double friction_coefficient(double v_s, const VesselModel& vessel) {
  if (!(v_s > 0.0)) {
    throw std::domain_error("friction_coefficient: v_s must be > 0");
  }
  const double Rn = v_s * vessel.L / vessel.nu;
  const double denom = std::log10(Rn) - 2.0;
  if (denom <= 0.0) {
    throw std::domain_error(
        "friction_coefficient: Reynolds number too low (Rn=" +
        std::to_string(Rn) + ")");
  }
  return 0.075 / (denom * denom);
}

double drift_force_bound(double b, double sp12, const VesselModel& vessel) {
  return 0.5 * vessel.rho * vessel.S * vessel.C_L_max() * sp12 * b;
}

double drag_lower_bound(double F_H, double b, double sp12,
                        const VesselModel& vessel,
                        std::optional<double> C_F_fixed) {
  const double v2 = sp12 * b;
  if (!(v2 > 0.0)) {
    if (F_H != 0.0) {
      throw std::domain_error(
          "drag_lower_bound: b = 0 with nonzero drift force has no finite "
          "bound");
    }
    return 0.0;
  }
  const double C_F =
      C_F_fixed ? *C_F_fixed : friction_coefficient(std::sqrt(v2), vessel);
  const double base = 0.5 * vessel.rho * (C_F + vessel.C_R) * vessel.A_s * v2;
  const double induced = 2.0 * F_H * F_H * vessel.A_s /
                         (vessel.rho * M_PI * vessel.Omega * vessel.S *
                          vessel.S * v2);
  return base + induced;
}

double yaw_damping_force(double b, double sp12, double s3p,
                         const VesselModel& vessel) {
  return vessel.L_P * vessel.stern_added_mass() * s3p * std::sqrt(sp12) * b;
}

double rudder_lift_coefficient(double omega, const RudderModel& rudder) {
  const double lam = rudder.Lambda();
  return 2.0 * M_PI * lam * (lam + 1.0) / ((lam + 2.0) * (lam + 2.0)) *
         std::sin(omega);
}

double rudder_inflow_sq(double T_p, double b, double sp12,
                        const VesselModel& vessel,
                        const PropellerModel& prop) {
  const double va2 = (1.0 - prop.f_w) * (1.0 - prop.f_w) * sp12 * b;
  const double disk = 0.5 * vessel.rho * 0.25 * M_PI * prop.D_p * prop.D_p;
  return va2 + T_p / disk;
}

double rudder_force_bound(double T_p, double b, double sp12,
                          const VesselModel& vessel,
                          const PropellerModel& prop) {
  const double ck = rudder_lift_coefficient(vessel.rudder.omega_max,
                                            vessel.rudder);
  return 0.5 * vessel.rho * ck * vessel.rudder.A_R * vessel.rudder.k_tm *
         vessel.rudder.k_tm * rudder_inflow_sq(T_p, b, sp12, vessel, prop);
}

double rudder_drag_lower_bound(double F_R, double T_p, double b, double sp12,
                               const VesselModel& vessel,
                               const PropellerModel& prop) {
  const double inflow = rudder_inflow_sq(T_p, b, sp12, vessel, prop);
  const double rho_pow = vessel.rudder.rho_power == 1
                             ? vessel.rho
                             : vessel.rho * vessel.rho;
  const double denom = vessel.rudder.A_R * M_PI * vessel.rudder.Lambda() *
                       rho_pow * vessel.rudder.k_tm * vessel.rudder.k_tm *
                       inflow;
  if (!(denom > 0.0)) {
    if (F_R != 0.0) {
      throw std::domain_error(
          "rudder_drag_lower_bound: zero rudder inflow with nonzero rudder "
          "force");
    }
    return 0.0;
  }
  return 2.2 * F_R * F_R / denom;
}

HullForceSet physical_forces(double u_b, double v_b, double r,
                             double rudder_angle, double n_p,
                             const VesselModel& vessel,
                             const PropellerModel& prop) {
  HullForceSet out;
  const double v_s = std::hypot(u_b, v_b);

  // Drift angle: nose to port of the velocity vector is positive and
  // produces a port-side restoring lift.
  double beta = 0.0;
  if (v_s > kStillWater && u_b > 0.0) {
    beta = std::atan2(-v_b, u_b);
  }
  if (std::abs(beta) > vessel.beta_max) {
    beta = std::copysign(vessel.beta_max, beta);
    out.beta_clamped = true;
  }

  double omega = rudder_angle;
  if (std::abs(omega) > vessel.rudder.omega_max) {
    omega = std::copysign(vessel.rudder.omega_max, omega);
    out.rudder_clamped = true;
  }

  const double C_L = vessel.a_L0 + vessel.a_L1 * beta;
  const double q_hull = 0.5 * vessel.rho * v_s * v_s;
  out.F_H = q_hull * vessel.S * C_L;

  if (v_s > kStillWater) {
    const double C_F = friction_coefficient(v_s, vessel);
    const double C_D =
        C_L * C_L / (M_PI * vessel.Omega) + C_F + vessel.C_R;
    out.F_D = q_hull * C_D * vessel.A_s;
  }

  out.F_P = vessel.L_P * vessel.stern_added_mass() * v_s * r;

  const double t_per_prop = prop.thrust_physical(v_s, n_p);
  out.T_p = prop.k_p * t_per_prop;

  // Rudder inflow from the propeller race: v_R = k_tm * va * sqrt(1+C_th).
  const double v_a = (1.0 - prop.f_w) * v_s;
  const double disk = 0.5 * vessel.rho * 0.25 * M_PI * prop.D_p * prop.D_p;
  const double v_ds2 = std::max(0.0, v_a * v_a + t_per_prop / disk);
  const double v_R2 = vessel.rudder.k_tm * vessel.rudder.k_tm * v_ds2;
  const double ck = rudder_lift_coefficient(omega, vessel.rudder);
  out.F_R = 0.5 * vessel.rho * ck * vessel.rudder.A_R * v_R2;
  out.D_R = 0.5 * vessel.rho * 1.1 * ck * ck /
            (M_PI * vessel.rudder.Lambda()) * vessel.rudder.A_R * v_R2;
  return out;
}

}  // namespace shipplan
