#pragma once

// Shared build points for the test suites: two actuator designs on the same
// syringe pump, with the state-penalty scale used throughout the reports.

#include "softpneu/plant.hpp"

namespace fixtures {

inline softpneu::PumpConfig pump() {
    softpneu::PumpConfig p;
    p.screw_lead_m = 0.002;
    p.syringe_area_m2 = 4.9e-4;
    p.capacity_m3_per_pa = 8.3e-11;
    p.max_motor_speed_rad_s = 300.0;
    return p;
}

struct DesignPoint {
    softpneu::ActuatorDesign actuator;
    double pressure_gain_n_per_pa;
    double omega_printed;
};

inline DesignPoint design1() {
    softpneu::ActuatorDesign d;
    d.youngs_modulus_pa = 0.34e6;
    d.mass_kg = 0.17 / softpneu::kGravity;
    d.length_m = 0.94;
    d.damping_ratio = 0.6;
    d.damping_spread = 0.1;
    d.moment_of_inertia_m4 = softpneu::moment_of_inertia_for(
        d.youngs_modulus_pa, d.mass_kg, d.length_m, 1.812);
    return {d, 1.42e-6, 1.812};
}

inline DesignPoint design4() {
    softpneu::ActuatorDesign d;
    d.youngs_modulus_pa = 10.0e6;
    d.mass_kg = 0.04 / softpneu::kGravity;
    d.length_m = 0.060;
    d.damping_ratio = 0.6;
    d.damping_spread = 0.1;
    d.moment_of_inertia_m4 = softpneu::moment_of_inertia_for(
        d.youngs_modulus_pa, d.mass_kg, d.length_m, 8.709);
    return {d, 7.73e-6, 8.709};
}

// state-penalty scale used for the documented closed-loop runs
inline constexpr double kPenaltyScale = 1e8;

}  // namespace fixtures
