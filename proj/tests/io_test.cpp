// Config schema validation, angle parsing, trace CSV round trips, and the
// run-manifest digest.

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "softpneu/config.hpp"
#include "softpneu/manifest.hpp"
#include "softpneu/trace_csv.hpp"

using namespace softpneu;
using nlohmann::json;

namespace {

json baseline() {
    return json{
        {"actuator",
         {{"youngs_modulus_pa", 0.34e6},
          {"moment_of_inertia_m4", 7.3933811376e-08},
          {"weight_n", 0.17},
          {"length_m", 0.94},
          {"damping_ratio", 0.6},
          {"damping_spread", 0.1},
          {"pressure_gain_n_per_pa", 1.42e-6}}},
        {"pump",
         {{"screw_lead_m", 0.002},
          {"syringe_area_m2", 4.9e-4},
          {"capacity_m3_per_pa", 8.3e-11},
          {"max_motor_speed_rad_s", 300.0}}},
        {"lqr", {{"p", 1e8}, {"r", 1.0}, {"settling_band", 0.02}}},
        {"sim", {{"dt_s", 1e-3}, {"horizon_s", 10.0}, {"square_period_s", 5.0}}},
        {"paths", {{"traces_dir", "data"}, {"out_dir", "out"}}}};
}

// Applies one mutation and asserts the parse fails with the expected kind
// and a message containing the expected fragment.
void expect_rejected(const json& doc, ErrorKind kind,
                     const std::string& fragment) {
    try {
        parse_project_config(doc.dump(), "config");
        FAIL() << "expected rejection mentioning '" << fragment << "'";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), kind) << e.what();
        EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos)
            << "message was: " << e.what();
    }
}

TEST(ConfigSchema, BaselineParsesWithExpectedValues) {
    const ProjectConfig cfg = parse_project_config(baseline().dump());
    EXPECT_NEAR(cfg.actuator.mass_kg, 0.17 / 9.81, 1e-12);
    EXPECT_DOUBLE_EQ(cfg.actuator.youngs_modulus_pa, 0.34e6);
    EXPECT_DOUBLE_EQ(cfg.pressure_gain_n_per_pa, 1.42e-6);
    EXPECT_DOUBLE_EQ(cfg.pump.capacity_m3_per_pa, 8.3e-11);
    EXPECT_DOUBLE_EQ(cfg.lqr.p, 1e8);
    EXPECT_DOUBLE_EQ(cfg.sim.square_period_s, 5.0);
    EXPECT_EQ(cfg.paths.traces_dir, "data");
}

TEST(ConfigSchema, MassGivenDirectlyIsNotConverted) {
    json doc = baseline();
    doc["actuator"].erase("weight_n");
    doc["actuator"]["mass_kg"] = 0.02;
    EXPECT_DOUBLE_EQ(parse_project_config(doc.dump()).actuator.mass_kg, 0.02);
}

TEST(ConfigSchema, OptionalSectionsFallBackToDefaults) {
    json doc = baseline();
    doc.erase("lqr");
    doc.erase("sim");
    doc.erase("paths");
    doc["actuator"].erase("pressure_gain_n_per_pa");
    const ProjectConfig cfg = parse_project_config(doc.dump());
    EXPECT_DOUBLE_EQ(cfg.lqr.p, 1.0);
    EXPECT_DOUBLE_EQ(cfg.lqr.settling_band, 0.02);
    EXPECT_DOUBLE_EQ(cfg.sim.dt_s, 1e-3);
    EXPECT_DOUBLE_EQ(cfg.sim.horizon_s, 10.0);
    EXPECT_EQ(cfg.paths.out_dir, "out");
    EXPECT_DOUBLE_EQ(cfg.pressure_gain_n_per_pa, 1.0);
}

TEST(ConfigSchema, RejectsMalformedJson) {
    try {
        parse_project_config("{ not json", "broken.json");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Parse);
        EXPECT_NE(std::string(e.what()).find("broken.json"),
                  std::string::npos);
    }
}

TEST(ConfigSchema, RejectsNumberOverflowAsParseError) {
    std::string text = baseline().dump();
    const std::string needle = "300.0";
    text.replace(text.find(needle), needle.size(), "1e999");
    try {
        parse_project_config(text, "config");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Parse) << e.what();
    }
}

TEST(ConfigSchema, MutationsAreRejectedWithNamedPaths) {
    // each entry: mutate a fresh baseline, expect the named complaint
    struct Case {
        const char* label;
        void (*mutate)(json&);
        const char* fragment;
    };
    const Case cases[] = {
        {"missing actuator", [](json& d) { d.erase("actuator"); },
         "config.actuator: missing required key"},
        {"missing pump", [](json& d) { d.erase("pump"); },
         "config.pump: missing required key"},
        {"top-level unknown key", [](json& d) { d["extra"] = 1; },
         "config: unknown key 'extra'"},
        {"actuator unknown key",
         [](json& d) { d["actuator"]["stiffness"] = 2.0; },
         "config.actuator: unknown key 'stiffness'"},
        {"pump unknown key", [](json& d) { d["pump"]["rpm"] = 3.0; },
         "config.pump: unknown key 'rpm'"},
        {"lqr unknown key", [](json& d) { d["lqr"]["q"] = 3.0; },
         "config.lqr: unknown key 'q'"},
        {"sim unknown key", [](json& d) { d["sim"]["steps"] = 10; },
         "config.sim: unknown key 'steps'"},
        {"paths unknown key", [](json& d) { d["paths"]["tmp"] = "x"; },
         "config.paths: unknown key 'tmp'"},
        {"missing modulus",
         [](json& d) { d["actuator"].erase("youngs_modulus_pa"); },
         "config.actuator.youngs_modulus_pa: missing required key"},
        {"missing inertia",
         [](json& d) { d["actuator"].erase("moment_of_inertia_m4"); },
         "config.actuator.moment_of_inertia_m4: missing required key"},
        {"missing length", [](json& d) { d["actuator"].erase("length_m"); },
         "config.actuator.length_m: missing required key"},
        {"missing damping",
         [](json& d) { d["actuator"].erase("damping_ratio"); },
         "config.actuator.damping_ratio: missing required key"},
        {"no mass at all", [](json& d) { d["actuator"].erase("weight_n"); },
         "missing 'mass_kg' (or 'weight_n')"},
        {"both masses", [](json& d) { d["actuator"]["mass_kg"] = 0.017; },
         "give exactly one of 'mass_kg' and 'weight_n'"},
        {"zero modulus",
         [](json& d) { d["actuator"]["youngs_modulus_pa"] = 0.0; },
         "config.actuator.youngs_modulus_pa: must be > 0"},
        {"negative length", [](json& d) { d["actuator"]["length_m"] = -0.9; },
         "config.actuator.length_m: must be > 0"},
        {"zero weight", [](json& d) { d["actuator"]["weight_n"] = 0.0; },
         "config.actuator.weight_n: must be > 0"},
        {"overdamped", [](json& d) { d["actuator"]["damping_ratio"] = 1.0; },
         "config.actuator.damping_ratio: must be < 1"},
        {"negative spread",
         [](json& d) { d["actuator"]["damping_spread"] = -0.1; },
         "config.actuator.damping_spread: must be >= 0"},
        {"zero pressure gain",
         [](json& d) { d["actuator"]["pressure_gain_n_per_pa"] = 0.0; },
         "config.actuator.pressure_gain_n_per_pa: must be > 0"},
        {"textual number",
         [](json& d) { d["pump"]["screw_lead_m"] = "0.002"; },
         "config.pump.screw_lead_m: expected a number"},
        {"infinity dumps to null",
         [](json& d) {
             d["pump"]["syringe_area_m2"] =
                 std::numeric_limits<double>::infinity();
         },
         "config.pump.syringe_area_m2: expected a number"},
        {"zero capacity",
         [](json& d) { d["pump"]["capacity_m3_per_pa"] = 0.0; },
         "config.pump.capacity_m3_per_pa: must be > 0"},
        {"negative motor limit",
         [](json& d) { d["pump"]["max_motor_speed_rad_s"] = -300.0; },
         "config.pump.max_motor_speed_rad_s: must be > 0"},
        {"zero p", [](json& d) { d["lqr"]["p"] = 0.0; },
         "config.lqr.p: must be > 0"},
        {"negative r", [](json& d) { d["lqr"]["r"] = -1.0; },
         "config.lqr.r: must be > 0"},
        {"wide settling band",
         [](json& d) { d["lqr"]["settling_band"] = 0.25; },
         "config.lqr.settling_band: must be in (0, 0.1]"},
        {"zero dt", [](json& d) { d["sim"]["dt_s"] = 0.0; },
         "config.sim.dt_s: must be > 0"},
        {"negative horizon", [](json& d) { d["sim"]["horizon_s"] = -1.0; },
         "config.sim.horizon_s: must be > 0"},
        {"actuator not object", [](json& d) { d["actuator"] = 7; },
         "config.actuator: expected an object"},
        {"sim not object", [](json& d) { d["sim"] = json::array(); },
         "config.sim: expected an object"},
        {"non-string path", [](json& d) { d["paths"]["traces_dir"] = 4; },
         "config.paths.traces_dir: expected a string"},
    };
    for (const auto& c : cases) {
        json doc = baseline();
        c.mutate(doc);
        SCOPED_TRACE(c.label);
        expect_rejected(doc, ErrorKind::Validation, c.fragment);
    }
}

TEST(AngleParsing, AcceptsDegreesRadiansAndBareNumbers) {
    EXPECT_DOUBLE_EQ(parse_angle("90deg"), std::numbers::pi / 2.0);
    EXPECT_DOUBLE_EQ(parse_angle("-45deg"), -std::numbers::pi / 4.0);
    EXPECT_DOUBLE_EQ(parse_angle("1.57rad"), 1.57);
    EXPECT_DOUBLE_EQ(parse_angle("0.5"), 0.5);
}

TEST(AngleParsing, RejectsUnknownUnitsAndJunk) {
    EXPECT_THROW(parse_angle("12furlongs"), Error);
    EXPECT_THROW(parse_angle("deg"), Error);
    EXPECT_THROW(parse_angle(""), Error);
}

TEST(TraceCsv, RoundTripsThroughWriteAndRead) {
    ExperimentTrace tr;
    for (int i = 0; i < 32; ++i) {
        tr.timestamps_s.push_back(0.01 * i);
        tr.input.push_back(60000.0);
        tr.output_rad.push_back(0.001 * i * i);
    }
    std::ostringstream out;
    write_trace_csv(out, tr);
    std::istringstream in(out.str());
    const ExperimentTrace back = read_trace_csv(in, "mem");
    ASSERT_EQ(back.timestamps_s.size(), tr.timestamps_s.size());
    for (std::size_t i = 0; i < tr.timestamps_s.size(); ++i) {
        EXPECT_DOUBLE_EQ(back.timestamps_s[i], tr.timestamps_s[i]);
        EXPECT_DOUBLE_EQ(back.output_rad[i], tr.output_rad[i]);
    }
}

TEST(TraceCsv, DegreeHeaderConvertsOnRead) {
    std::string text = "t_s,input,theta_deg\n";
    for (int i = 0; i < 20; ++i)
        text += std::to_string(0.05 * i) + ",1000,90\n";
    std::istringstream in(text);
    const ExperimentTrace tr = read_trace_csv(in, "mem");
    EXPECT_NEAR(tr.output_rad[5], std::numbers::pi / 2.0, 1e-12);
}

TEST(TraceCsv, NamesLineAndFileInErrors) {
    const auto expect_parse_error = [](const std::string& text,
                                       const std::string& fragment) {
        std::istringstream in(text);
        try {
            read_trace_csv(in, "trace.csv");
            FAIL() << "expected rejection mentioning '" << fragment << "'";
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::Parse);
            EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos)
                << "message was: " << e.what();
        }
    };
    expect_parse_error("a,b,c\n1,2,3\n", "trace.csv:1");
    std::string good_start = "t_s,input,theta_rad\n";
    for (int i = 0; i < 20; ++i)
        good_start += std::to_string(0.05 * i) + ",1,0.1\n";
    expect_parse_error(good_start + "1.0,2\n", "trace.csv:22");
    expect_parse_error(good_start + "1.0,2,bogus\n", "trace.csv:22");
}

TEST(Manifest, DigestMatchesKnownFnv1aVectors) {
    InputsDigest d;
    EXPECT_EQ(d.hex(), "cbf29ce484222325");  // offset basis, nothing hashed
    InputsDigest e;
    e.update(std::string("a"));
    EXPECT_EQ(e.hex(), "af63dc4c8601ec8c");
    InputsDigest f;
    f.update(std::string("foobar"));
    EXPECT_EQ(f.hex(), "85944171f73967e8");
}

TEST(Manifest, JsonCarriesCommandSeedAndOutputs) {
    RunManifest m;
    m.command = "simulate";
    m.seed = 7;
    m.inputs_hash = "0123456789abcdef";
    m.outputs = {"sim.csv", "sim_metrics.json"};
    const json j = manifest_json(m);
    EXPECT_EQ(j.at("command"), "simulate");
    EXPECT_EQ(j.at("seed"), 7);
    EXPECT_EQ(j.at("inputs_hash_fnv1a64"), "0123456789abcdef");
    EXPECT_EQ(j.at("version"), kToolVersion);
    EXPECT_EQ(j.at("outputs").size(), 2u);
}

}  // namespace
