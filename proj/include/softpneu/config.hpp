#pragma once

#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "softpneu/error.hpp"
#include "softpneu/plant.hpp"

namespace softpneu {

// Controller weights as they appear in a project file. p scales the default
// state penalty diag(1, 0.1, 0); r is the scalar input penalty.
struct LqrConfig {
    double p = 1.0;
    double r = 1.0;
    double settling_band = 0.02;
};

struct SimConfig {
    double dt_s = 1e-3;
    double horizon_s = 10.0;
    double square_period_s = 20.0;
};

struct PathsConfig {
    std::string traces_dir;
    std::string out_dir = "out";
};

// One project file describes one actuator/pump bundle plus the knobs every
// command reads. Units are carried in the key names; angles never appear in
// the file (command lines pass them with an explicit deg/rad suffix).
struct ProjectConfig {
    ActuatorDesign actuator;
    double pressure_gain_n_per_pa = 1.0;
    PumpConfig pump;
    LqrConfig lqr;
    SimConfig sim;
    PathsConfig paths;
};

namespace detail {

// Strict reader over one JSON object: every accepted key is recorded, and
// finish() rejects whatever remains, naming the full field path.
class StrictObject {
 public:
    StrictObject(const nlohmann::json& node, std::string path)
        : node_(node), path_(std::move(path)) {
        if (!node_.is_object())
            throw Error(ErrorKind::Validation, path_ + ": expected an object");
    }

    bool has(const char* key) const { return node_.contains(key); }

    double number(const char* key) {
        require(key);
        return as_number(key);
    }

    double number_or(const char* key, double fallback) {
        if (!node_.contains(key)) return fallback;
        seen_.push_back(key);
        return as_number(key);
    }

    double positive(const char* key) {
        const double v = number(key);
        if (!(v > 0.0))
            throw Error(ErrorKind::Validation,
                        path_ + "." + key + ": must be > 0");
        return v;
    }

    double positive_or(const char* key, double fallback) {
        const double v = number_or(key, fallback);
        if (!(v > 0.0))
            throw Error(ErrorKind::Validation,
                        path_ + "." + key + ": must be > 0");
        return v;
    }

    std::string text_or(const char* key, std::string fallback) {
        if (!node_.contains(key)) return fallback;
        seen_.push_back(key);
        const auto& v = node_.at(key);
        if (!v.is_string())
            throw Error(ErrorKind::Validation,
                        path_ + "." + key + ": expected a string");
        return v.get<std::string>();
    }

    nlohmann::json child(const char* key) {
        require(key);
        const auto& v = node_.at(key);
        if (!v.is_object())
            throw Error(ErrorKind::Validation,
                        path_ + "." + key + ": expected an object");
        return v;
    }

    std::optional<nlohmann::json> child_if(const char* key) {
        if (!node_.contains(key)) return std::nullopt;
        return child(key);
    }

    void finish() const {
        for (const auto& item : node_.items()) {
            bool known = false;
            for (const auto& s : seen_)
                if (s == item.key()) { known = true; break; }
            if (!known)
                throw Error(ErrorKind::Validation,
                            path_ + ": unknown key '" + item.key() + "'");
        }
    }

 private:
    void require(const char* key) {
        if (!node_.contains(key))
            throw Error(ErrorKind::Validation,
                        path_ + "." + key + ": missing required key");
        seen_.push_back(key);
    }

    double as_number(const char* key) {
        const auto& v = node_.at(key);
        if (!v.is_number())
            throw Error(ErrorKind::Validation,
                        path_ + "." + key + ": expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d))
            throw Error(ErrorKind::Validation,
                        path_ + "." + key + ": must be finite");
        return d;
    }

    const nlohmann::json& node_;
    std::string path_;
    std::vector<std::string> seen_;
};

inline ActuatorDesign parse_actuator(const nlohmann::json& node,
                                     const std::string& path,
                                     double* pressure_gain) {
    StrictObject obj(node, path);
    ActuatorDesign d;
    d.youngs_modulus_pa = obj.positive("youngs_modulus_pa");
    d.moment_of_inertia_m4 = obj.positive("moment_of_inertia_m4");
    d.length_m = obj.positive("length_m");
    d.damping_ratio = obj.positive("damping_ratio");
    d.damping_spread = obj.number_or("damping_spread", 0.0);
    *pressure_gain = obj.positive_or("pressure_gain_n_per_pa", 1.0);

    // the load is given either directly or as a weight to convert
    const bool has_mass = obj.has("mass_kg");
    const bool has_weight = obj.has("weight_n");
    if (has_mass && has_weight)
        throw Error(ErrorKind::Validation,
                    path + ": give exactly one of 'mass_kg' and 'weight_n'");
    if (!has_mass && !has_weight)
        throw Error(ErrorKind::Validation,
                    path + ": missing 'mass_kg' (or 'weight_n')");
    d.mass_kg = has_mass ? obj.positive("mass_kg")
                         : obj.positive("weight_n") / kGravity;

    if (d.damping_spread < 0.0)
        throw Error(ErrorKind::Validation,
                    path + ".damping_spread: must be >= 0");
    if (!(d.damping_ratio < 1.0))
        throw Error(ErrorKind::Validation,
                    path + ".damping_ratio: must be < 1 (underdamped model)");
    obj.finish();
    d.validate();
    return d;
}

inline PumpConfig parse_pump(const nlohmann::json& node,
                             const std::string& path) {
    StrictObject obj(node, path);
    PumpConfig p;
    p.screw_lead_m = obj.positive("screw_lead_m");
    p.syringe_area_m2 = obj.positive("syringe_area_m2");
    p.capacity_m3_per_pa = obj.positive("capacity_m3_per_pa");
    p.max_motor_speed_rad_s = obj.positive("max_motor_speed_rad_s");
    obj.finish();
    p.validate();
    return p;
}

inline LqrConfig parse_lqr(const nlohmann::json& node,
                           const std::string& path) {
    StrictObject obj(node, path);
    LqrConfig l;
    l.p = obj.positive_or("p", l.p);
    l.r = obj.positive_or("r", l.r);
    l.settling_band = obj.positive_or("settling_band", l.settling_band);
    if (l.settling_band > 0.1)
        throw Error(ErrorKind::Validation,
                    path + ".settling_band: must be in (0, 0.1]");
    obj.finish();
    return l;
}

inline SimConfig parse_sim(const nlohmann::json& node,
                           const std::string& path) {
    StrictObject obj(node, path);
    SimConfig s;
    s.dt_s = obj.positive_or("dt_s", s.dt_s);
    s.horizon_s = obj.positive_or("horizon_s", s.horizon_s);
    s.square_period_s = obj.positive_or("square_period_s", s.square_period_s);
    obj.finish();
    return s;
}

inline PathsConfig parse_paths(const nlohmann::json& node,
                               const std::string& path) {
    StrictObject obj(node, path);
    PathsConfig p;
    p.traces_dir = obj.text_or("traces_dir", p.traces_dir);
    p.out_dir = obj.text_or("out_dir", p.out_dir);
    obj.finish();
    return p;
}

}  // namespace detail

inline ProjectConfig parse_project_config(const std::string& json_text,
                                          const std::string& origin = "config") {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        // also covers number overflow, which the parser reports as
        // out_of_range rather than parse_error
        throw Error(ErrorKind::Parse, origin + ": " + e.what());
    }

    detail::StrictObject top(root, origin);
    ProjectConfig cfg;
    cfg.actuator = detail::parse_actuator(top.child("actuator"),
                                          origin + ".actuator",
                                          &cfg.pressure_gain_n_per_pa);
    cfg.pump = detail::parse_pump(top.child("pump"), origin + ".pump");
    if (auto node = top.child_if("lqr"))
        cfg.lqr = detail::parse_lqr(*node, origin + ".lqr");
    if (auto node = top.child_if("sim"))
        cfg.sim = detail::parse_sim(*node, origin + ".sim");
    if (auto node = top.child_if("paths"))
        cfg.paths = detail::parse_paths(*node, origin + ".paths");
    top.finish();
    return cfg;
}

inline ProjectConfig load_project_config(const std::string& file_path) {
    std::ifstream in(file_path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::Parse, file_path + ": cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_project_config(buf.str(), file_path);
}

// Angles cross the command-line boundary with an explicit unit: "90deg",
// "1.57rad", or a bare number meaning radians.
inline double parse_angle(const std::string& text) {
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        throw Error(ErrorKind::Validation,
                    "angle '" + text + "': expected <number>[deg|rad]");
    }
    const std::string suffix = text.substr(used);
    if (suffix == "deg") return value * std::numbers::pi / 180.0;
    if (suffix.empty() || suffix == "rad") return value;
    throw Error(ErrorKind::Validation,
                "angle '" + text + "': unknown unit '" + suffix + "'");
}

}  // namespace softpneu
