#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "softpneu/plant.hpp"

using namespace softpneu;

namespace {

ActuatorDesign base_design() {
    ActuatorDesign d;
    d.youngs_modulus_pa = 0.34e6;
    d.moment_of_inertia_m4 = 7.4e-8;
    d.mass_kg = 0.017;
    d.length_m = 0.94;
    d.damping_ratio = 0.6;
    d.damping_spread = 0.1;
    return d;
}

PumpConfig unit_pump() {
    PumpConfig p;
    p.screw_lead_m = 2.0 * M_PI;
    p.syringe_area_m2 = 1.0;
    p.capacity_m3_per_pa = 1.0;
    p.max_motor_speed_rad_s = 100.0;
    return p;
}

// matches 4 printed significant figures, e.g. 1.812
void expect_sig4(double value, double printed) {
    const double unit = std::pow(10.0, std::floor(std::log10(std::abs(printed))) - 3);
    EXPECT_NEAR(value, printed, 0.5 * unit) << "value " << value;
}

struct CatalogRow {
    double youngs_pa, weight_n, length_m, omega_printed;
};

// four published build points, weights in newtons
const CatalogRow kCatalog[] = {
    {0.34e6, 0.17, 0.94, 1.812},
    {0.26e6, 0.24, 0.94, 1.372},
    {0.34e6, 0.20, 0.106, 1.422},
    {10.0e6, 0.04, 0.060, 8.709},
};

}  // namespace

TEST(SpringConstant, UnitValuesAndLengthScaling) {
    ActuatorDesign d = base_design();
    d.youngs_modulus_pa = 1.0;
    d.moment_of_inertia_m4 = 1.0;
    d.length_m = 1.0;
    EXPECT_DOUBLE_EQ(spring_constant(d), 2.0);

    ActuatorDesign twice = d;
    twice.length_m = 2.0;
    EXPECT_DOUBLE_EQ(spring_constant(twice), spring_constant(d) / 4.0);
}

TEST(SpringConstant, EqualsMassTimesOmegaSquared) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(0.2, 3.0);
    for (int i = 0; i < 30; ++i) {
        ActuatorDesign d = base_design();
        d.youngs_modulus_pa *= u(rng);
        d.moment_of_inertia_m4 *= u(rng);
        d.mass_kg *= u(rng);
        d.length_m *= u(rng);
        const double wn = natural_frequency(d);
        EXPECT_NEAR(spring_constant(d), d.mass_kg * wn * wn,
                    1e-12 * spring_constant(d));
    }
}

TEST(NaturalFrequency, ScalingLaws) {
    ActuatorDesign d = base_design();
    const double wn = natural_frequency(d);

    ActuatorDesign longer = d;
    longer.length_m *= 2.0;
    EXPECT_NEAR(natural_frequency(longer), wn / 2.0, 1e-12 * wn);

    ActuatorDesign stiffer = d;
    stiffer.youngs_modulus_pa *= 4.0;
    EXPECT_NEAR(natural_frequency(stiffer), 2.0 * wn, 1e-12 * wn);

    ActuatorDesign heavier = d;
    heavier.mass_kg *= 4.0;
    EXPECT_NEAR(natural_frequency(heavier), wn / 2.0, 1e-12 * wn);
}

TEST(NaturalFrequency, CatalogRowsReproduceFromInvertedInertia) {
    for (const auto& row : kCatalog) {
        ActuatorDesign d;
        d.youngs_modulus_pa = row.youngs_pa;
        d.mass_kg = row.weight_n / kGravity;
        d.length_m = row.length_m;
        d.damping_ratio = 0.6;
        d.damping_spread = 0.1;
        d.moment_of_inertia_m4 = moment_of_inertia_for(
            d.youngs_modulus_pa, d.mass_kg, d.length_m, row.omega_printed);
        expect_sig4(natural_frequency(d), row.omega_printed);
    }
}

TEST(MomentOfInertiaFor, RoundTripsWithForwardFormula) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.3, 3.0);
    for (int i = 0; i < 30; ++i) {
        ActuatorDesign d = base_design();
        d.moment_of_inertia_m4 *= u(rng);
        const double wn = natural_frequency(d);
        const double inv = moment_of_inertia_for(d.youngs_modulus_pa, d.mass_kg,
                                                 d.length_m, wn);
        EXPECT_NEAR(inv, d.moment_of_inertia_m4, 1e-12 * inv);
    }
}

TEST(DesignValidation, RejectsOutOfRangeFields) {
    auto expect_invalid = [](ActuatorDesign d) {
        EXPECT_THROW(natural_frequency(d), Error);
    };
    ActuatorDesign d = base_design();
    d.mass_kg = 0.0;
    expect_invalid(d);
    d = base_design();
    d.damping_ratio = 0.0;
    expect_invalid(d);
    d = base_design();
    d.damping_ratio = 1.0;
    expect_invalid(d);
    d = base_design();
    d.damping_spread = 0.7;  // larger than zeta
    expect_invalid(d);
    d = base_design();
    d.length_m = -1.0;
    expect_invalid(d);
}

TEST(ActuatorTf, CoefficientsAndDcGain) {
    ActuatorDesign d = base_design();
    const double wn = natural_frequency(d);
    const double c = 1.42e-6;
    auto tf = actuator_tf(d, c);
    ASSERT_EQ(tf.den().size(), 3u);
    EXPECT_DOUBLE_EQ(tf.den()[0], 1.0);
    EXPECT_NEAR(tf.den()[1], 2.0 * 0.6 * wn, 1e-12);
    EXPECT_NEAR(tf.den()[2], wn * wn, 1e-12);
    EXPECT_NEAR(tf.num()[0], c / d.mass_kg, 1e-18);
    // DC: theta/P = c/(M wn^2)
    const double dc = tf.num()[0] / tf.den()[2];
    EXPECT_NEAR(dc, c / (d.mass_kg * wn * wn), 1e-12 * dc);
}

TEST(PumpRate, UnitAndPublishedNumbers) {
    EXPECT_DOUBLE_EQ(pump_pressure_rate(unit_pump(), 1.0), 1.0);
    EXPECT_DOUBLE_EQ(pump_pressure_rate(unit_pump(), 0.0), 0.0);

    PumpConfig p;
    p.screw_lead_m = 0.002;
    p.syringe_area_m2 = 4.9e-4;
    p.capacity_m3_per_pa = 1e-8;
    p.max_motor_speed_rad_s = 50.0;
    const double expected =
        p.screw_lead_m * p.syringe_area_m2 * 10.0 / (2.0 * M_PI * p.capacity_m3_per_pa);
    EXPECT_DOUBLE_EQ(pump_pressure_rate(p, 10.0), expected);
    EXPECT_NEAR(expected, 155.9718, 5e-4);
}

TEST(PumpRate, EnforcesActuationLimit) {
    PumpConfig p = unit_pump();
    p.max_motor_speed_rad_s = 5.0;
    try {
        pump_pressure_rate(p, 5.1);
        FAIL() << "expected actuation-limit error";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ActuationLimit);
    }
    EXPECT_NO_THROW(pump_pressure_rate(p, -5.0));
}

TEST(PumpTf, IntegratorWithGain) {
    auto tf = pump_tf(unit_pump());
    ASSERT_EQ(tf.den().size(), 2u);
    EXPECT_DOUBLE_EQ(tf.den()[1], 0.0);
    EXPECT_NEAR(tf.num()[0], 1.0, 1e-15);

    auto pts = frequency_response(tf, {10.0});
    EXPECT_NEAR(pts[0].magnitude, 0.1, 1e-12);
    EXPECT_NEAR(pts[0].phase_rad, -M_PI / 2.0, 1e-12);
}

TEST(FullSystemTf, MatchesSeriesOfPumpAndActuator) {
    ActuatorDesign d = base_design();
    PumpConfig p;
    p.screw_lead_m = 0.002;
    p.syringe_area_m2 = 4.9e-4;
    p.capacity_m3_per_pa = 8.3e-11;
    p.max_motor_speed_rad_s = 300.0;
    const double c = 1.42e-6;

    auto direct = full_system_tf(d, p, c);
    auto series = pump_tf(p) * actuator_tf(d, c);
    ASSERT_EQ(direct.den().size(), series.den().size());
    for (std::size_t i = 0; i < direct.den().size(); ++i)
        EXPECT_NEAR(direct.den()[i], series.den()[i],
                    1e-12 * std::abs(direct.den()[i]) + 1e-15);
    ASSERT_EQ(direct.num().size(), series.num().size());
    EXPECT_NEAR(direct.num()[0], series.num()[0], 1e-12 * direct.num()[0]);

    const double wn = natural_frequency(d);
    const double g = pump_gain(p) * c / d.mass_kg;
    EXPECT_NEAR(direct.num()[0], g, 1e-15 * g);
    EXPECT_DOUBLE_EQ(direct.den().back(), 0.0);
    EXPECT_NEAR(direct.den()[1], 2.0 * d.damping_ratio * wn, 1e-12);
}

TEST(Calibration, RecoversPressureGain) {
    ActuatorDesign d = base_design();
    const double wn = natural_frequency(d);
    const double c_true = 1.42e-6;
    std::vector<double> pressures, angles;
    for (double p = 1e4; p <= 6e4; p += 1e4) {
        pressures.push_back(p);
        angles.push_back(c_true / (d.mass_kg * wn * wn) * p);
    }
    EXPECT_NEAR(calibrate_pressure_gain(d, pressures, angles), c_true,
                1e-12 * c_true);

    // mild measurement noise keeps the least-squares answer close
    std::mt19937_64 rng(3);
    std::normal_distribution<double> noise(0.0, 0.01);
    std::vector<double> noisy = angles;
    for (double& a : noisy) a *= 1.0 + noise(rng);
    EXPECT_NEAR(calibrate_pressure_gain(d, pressures, noisy), c_true,
                0.05 * c_true);
}
