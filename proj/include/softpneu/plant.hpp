#pragma once

#include <cmath>
#include <vector>

#include "softpneu/error.hpp"
#include "softpneu/lti.hpp"

namespace softpneu {

inline constexpr double kGravity = 9.81;  // m/s^2, for weight-to-mass input

// Bending actuator treated as a uniform cantilever with an end load. The
// damping ratio is not derivable from the geometry; it is fitted from step
// experiments and carried here together with its observed spread.
struct ActuatorDesign {
    double youngs_modulus_pa = 0.0;    // E
    double moment_of_inertia_m4 = 0.0; // second moment of area I
    double mass_kg = 0.0;              // end mass M
    double length_m = 0.0;             // free length L
    double damping_ratio = 0.0;        // fitted zeta
    double damping_spread = 0.0;       // max observed |zeta_k - zeta|

    void validate() const {
        if (!(youngs_modulus_pa > 0.0))
            throw Error(ErrorKind::InvalidArgument, "youngs_modulus_pa must be > 0");
        if (!(moment_of_inertia_m4 > 0.0))
            throw Error(ErrorKind::InvalidArgument, "moment_of_inertia_m4 must be > 0");
        if (!(mass_kg > 0.0))
            throw Error(ErrorKind::InvalidArgument, "mass_kg must be > 0");
        if (!(length_m > 0.0))
            throw Error(ErrorKind::InvalidArgument, "length_m must be > 0");
        if (!(damping_ratio > 0.0 && damping_ratio < 1.0))
            throw Error(ErrorKind::InvalidArgument,
                        "damping_ratio must lie in (0, 1)");
        if (damping_spread < 0.0)
            throw Error(ErrorKind::InvalidArgument, "damping_spread must be >= 0");
        if (!(damping_ratio - damping_spread > 0.0))
            throw Error(ErrorKind::InvalidArgument,
                        "damping_ratio - damping_spread must stay positive");
    }
};

// Syringe pump driven by a lead screw: motor speed (rad/s) displaces the
// plunger, and the displaced volume divided by the pneumatic capacity of
// the actuator gives the pressure rate.
struct PumpConfig {
    double screw_lead_m = 0.0;          // plunger travel per motor revolution
    double syringe_area_m2 = 0.0;       // plunger cross-section
    double capacity_m3_per_pa = 0.0;    // actuator + line pneumatic capacity
    double max_motor_speed_rad_s = 0.0; // actuation limit

    void validate() const {
        if (!(screw_lead_m > 0.0))
            throw Error(ErrorKind::InvalidArgument, "screw_lead_m must be > 0");
        if (!(syringe_area_m2 > 0.0))
            throw Error(ErrorKind::InvalidArgument, "syringe_area_m2 must be > 0");
        if (!(capacity_m3_per_pa > 0.0))
            throw Error(ErrorKind::InvalidArgument, "capacity_m3_per_pa must be > 0");
        if (!(max_motor_speed_rad_s > 0.0))
            throw Error(ErrorKind::InvalidArgument, "max_motor_speed_rad_s must be > 0");
    }
};

// Effective rotational stiffness of the bent actuator: K = 2EI/L^2.
inline double spring_constant(const ActuatorDesign& d) {
    d.validate();
    return 2.0 * d.youngs_modulus_pa * d.moment_of_inertia_m4 /
           (d.length_m * d.length_m);
}

// Undamped natural frequency of the bending mode: sqrt(2EI/(M L^2)).
inline double natural_frequency(const ActuatorDesign& d) {
    d.validate();
    return std::sqrt(2.0 * d.youngs_modulus_pa * d.moment_of_inertia_m4 /
                     (d.mass_kg * d.length_m * d.length_m));
}

// Inversion helper: the I that makes natural_frequency() hit omega_n for
// the given E, M, L. Useful when a datasheet quotes the frequency but not
// the section geometry.
inline double moment_of_inertia_for(double youngs_modulus_pa, double mass_kg,
                                    double length_m, double omega_n) {
    if (!(youngs_modulus_pa > 0.0) || !(mass_kg > 0.0) || !(length_m > 0.0) ||
        !(omega_n > 0.0))
        throw Error(ErrorKind::InvalidArgument,
                    "moment_of_inertia_for needs positive inputs");
    return omega_n * omega_n * mass_kg * length_m * length_m /
           (2.0 * youngs_modulus_pa);
}

// Pressure-to-angle dynamics of the actuator alone:
//   theta/P = (c/M) / (s^2 + 2 zeta wn s + wn^2)
// where c converts pressure to bending force (calibrated, defaults to 1).
inline TransferFunction actuator_tf(const ActuatorDesign& d,
                                    double pressure_gain = 1.0) {
    d.validate();
    if (!(pressure_gain > 0.0))
        throw Error(ErrorKind::InvalidArgument, "pressure_gain must be > 0");
    const double wn = natural_frequency(d);
    return TransferFunction({pressure_gain / d.mass_kg},
                            {1.0, 2.0 * d.damping_ratio * wn, wn * wn});
}

// Instantaneous pressure rate for a commanded motor speed (rad/s):
//   dP/dt = lead * area * speed / (2 pi * capacity)
inline double pump_pressure_rate(const PumpConfig& p, double motor_speed) {
    p.validate();
    if (std::abs(motor_speed) > p.max_motor_speed_rad_s)
        throw Error(ErrorKind::ActuationLimit,
                    "motor speed exceeds max_motor_speed_rad_s");
    return p.screw_lead_m * p.syringe_area_m2 * motor_speed /
           (2.0 * M_PI * p.capacity_m3_per_pa);
}

// Motor speed to pressure is an integrator scaled by the pump gain.
inline double pump_gain(const PumpConfig& p) {
    p.validate();
    return p.screw_lead_m * p.syringe_area_m2 /
           (2.0 * M_PI * p.capacity_m3_per_pa);
}

inline TransferFunction pump_tf(const PumpConfig& p) {
    return TransferFunction({pump_gain(p)}, {1.0, 0.0});
}

// Full chain, motor speed to bending angle:
//   theta/u = g / (s^3 + 2 zeta wn s^2 + wn^2 s),
//   g = lead * area * c / (2 pi * capacity * M)
inline TransferFunction full_system_tf(const ActuatorDesign& d,
                                       const PumpConfig& p,
                                       double pressure_gain = 1.0) {
    d.validate();
    if (!(pressure_gain > 0.0))
        throw Error(ErrorKind::InvalidArgument, "pressure_gain must be > 0");
    const double wn = natural_frequency(d);
    const double g = pump_gain(p) * pressure_gain / d.mass_kg;
    return TransferFunction({g},
                            {1.0, 2.0 * d.damping_ratio * wn, wn * wn, 0.0});
}

// Least-squares calibration of the pressure-to-force gain from a static
// bend test: theta_ss = (c / (M wn^2)) P at each held pressure.
inline double calibrate_pressure_gain(const ActuatorDesign& d,
                                      const std::vector<double>& pressures_pa,
                                      const std::vector<double>& angles_rad) {
    d.validate();
    if (pressures_pa.size() != angles_rad.size() || pressures_pa.empty())
        throw Error(ErrorKind::InvalidArgument,
                    "calibration needs matching, non-empty sample lists");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < pressures_pa.size(); ++i) {
        num += pressures_pa[i] * angles_rad[i];
        den += pressures_pa[i] * pressures_pa[i];
    }
    if (den == 0.0)
        throw Error(ErrorKind::InvalidArgument,
                    "calibration needs a nonzero pressure sample");
    const double wn = natural_frequency(d);
    return (num / den) * d.mass_kg * wn * wn;
}

}  // namespace softpneu
