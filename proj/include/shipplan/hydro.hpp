#pragma once

#include <optional>

#include "shipplan/propeller.hpp"

namespace shipplan {

/// Rudder geometry and inflow model. rho_power selects the density exponent
/// in the rudder-drag lower bound denominator (the source relation is
/// printed with rho^2; dimensional analysis of the lift/drag derivation
/// gives a single rho, so both are selectable).
struct RudderModel {
  double A_R = 0.0;       // projected side area, m^2
  double b_R = 0.0;       // average height, m
  double omega_max = 0.0; // stall-limited max angle of attack, rad
  double k_tm = 0.9;      // turbulent-mixing inflow correction
  int rho_power = 2;

  double Lambda() const { return b_R * b_R / A_R; }
};

/// 3-DOF rigid-body vessel with the hull force coefficients.
/// Body frame: x forward, y to port, heading theta CCW from global x.
struct VesselModel {
  double m = 0.0;    // kg
  double k1 = 0.0;   // surge/sway added-inertia coefficient
  double k2 = 0.0;   // yaw added-inertia coefficient
  double Izz = 0.0;  // kg m^2
  double Iw = 0.0;   // displaced-water yaw inertia, kg m^2

  double L_H = 0.0;  // drift force lever arm, m
  double L_P = 0.0;  // yaw damping lever arm (stern coordinate), m
  double L_R = 0.0;  // rudder lever arm, m

  double S = 0.0;        // hull lifting surface area, m^2
  double a_L0 = 0.0;     // lift coefficient at zero drift
  double a_L1 = 0.0;     // lift slope, 1/rad
  double beta_max = 0.0; // max drift angle, rad
  double C_R = 0.0;      // residual resistance coefficient
  double A_s = 0.0;      // wetted surface, m^2
  double Omega = 0.0;    // hull lifting aspect ratio
  double L = 0.0;        // length, m
  double T = 0.0;        // draft, m
  double nu = 1.0e-6;    // kinematic viscosity, m^2/s
  double rho = 0.0;      // kg/m^3

  RudderModel rudder;
  double tau[3] = {0.0, 0.0, 0.0};  // constant disturbance (N, N, N m)

  double mass_eff() const { return m * (1.0 + k1); }
  double yaw_inertia_eff() const { return Izz + k2 * Iw; }
  double C_L_max() const { return a_L0 + a_L1 * beta_max; }
  /// Strip added mass per unit length at the stern, (pi/2) rho T^2.
  double stern_added_mass() const;

  void validate() const;
};

/// Force set in the body frame. T_p is the total thrust over all k_p
/// propellers; the per-propeller value is T_p / k_p.
struct HullForceSet {
  double F_D = 0.0;  // total drag, N
  double F_H = 0.0;  // drift lift, N (positive to port)
  double F_P = 0.0;  // yaw damping force, N
  double F_R = 0.0;  // rudder lift, N
  double D_R = 0.0;  // rudder deflection drag, N
  double T_p = 0.0;  // total thrust, N
  bool beta_clamped = false;
  bool rudder_clamped = false;
};

/// ITTC-57 friction line, C_F = 0.075 / (log10(Rn) - 2)^2.
double friction_coefficient(double v_s, const VesselModel& vessel);

/// Largest drift lift available at squared-path-speed b:
/// (rho/2) S C_Lmax sp12 b, affine in b.
double drift_force_bound(double b, double sp12, const VesselModel& vessel);

/// Convex lower bound on total hull drag, friction+residual plus induced:
/// (rho/2)(C_F + C_R) A_s sp12 b + 2 F_H^2 A_s / (rho pi Omega S^2 sp12 b).
/// When C_F_fixed is not given, C_F is evaluated at v_s = sqrt(sp12*b),
/// which makes the bound equal the physical drag identically.
double drag_lower_bound(double F_H, double b, double sp12,
                        const VesselModel& vessel,
                        std::optional<double> C_F_fixed = std::nullopt);

/// Yaw damping force, linear in b: x_T m_a(x_T) s3' sqrt(sp12) b with the
/// stern coordinate taken as the damping lever arm L_P.
double yaw_damping_force(double b, double sp12, double s3p,
                         const VesselModel& vessel);

/// Rudder lift coefficient 2 pi Lambda (Lambda+1)/(Lambda+2)^2 * sin(omega).
double rudder_lift_coefficient(double omega, const RudderModel& rudder);

/// Squared inflow speed at the rudder (before the k_tm correction):
/// (1-f_w)^2 sp12 b + T_p / ((rho/2)(pi/4) D_p^2), affine in (b, T_p).
/// T_p is the per-propeller thrust feeding this rudder's race.
double rudder_inflow_sq(double T_p, double b, double sp12,
                        const VesselModel& vessel, const PropellerModel& prop);

/// Bound on rudder lift at full deflection: (rho/2) C_K(omega_max) A_R
/// k_tm^2 * rudder_inflow_sq, affine in (b, T_p).
double rudder_force_bound(double T_p, double b, double sp12,
                          const VesselModel& vessel,
                          const PropellerModel& prop);

/// Convex lower bound on rudder deflection drag:
/// 2.2 F_R^2 / (A_R pi Lambda rho^p k_tm^2 * rudder_inflow_sq).
double rudder_drag_lower_bound(double F_R, double T_p, double b, double sp12,
                               const VesselModel& vessel,
                               const PropellerModel& prop);

/// Nonconvex time-domain forces for the simulator. Velocities are in the
/// body frame (u_b surge, v_b sway toward port), r is the yaw rate. The
/// drift angle and rudder angle are clamped to their limits with a flag.
HullForceSet physical_forces(double u_b, double v_b, double r,
                             double rudder_angle, double n_p,
                             const VesselModel& vessel,
                             const PropellerModel& prop);

}  // namespace shipplan
