#pragma once

#include <fstream>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "crackdyn/crack_physics.hpp"
#include "crackdyn/dynamics.hpp"
#include "crackdyn/errors.hpp"
#include "crackdyn/modal_solver.hpp"

namespace crackdyn {

struct ModalSettings {
    int n_modes = 8;
    ScanSettings scan; // scan_step, lambda_max (0 = automatic)
};

struct SimulationSettings {
    ModelKind model_kind = ModelKind::beam;
    double t_final = 0.0;
    double dt = 0.0;
    int record_every = 1;
    std::vector<double> initial_modal; // initial displacement coefficients, zero-padded
    LoadModel load;
};

struct Config {
    std::optional<PhysicalBeam> physical;
    std::optional<NondimModel> nondim;
    ModalSettings modal;
    std::optional<SimulationSettings> simulation;
};

namespace detail {

using json = nlohmann::json;

[[noreturn]] inline void fail(const std::string& path, const std::string& what) {
    throw config_error(path, what);
}

inline void expect_object(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
}

inline void check_keys(const json& j, const std::string& path,
                       std::initializer_list<const char*> allowed) {
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* k : allowed)
            if (item.key() == k) { known = true; break; }
        if (!known) fail(path + "." + item.key(), "unknown key");
    }
}

inline const json* find(const json& j, const char* key) {
    auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

inline double get_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

inline double req_number(const json& j, const std::string& path, const char* key) {
    const json* v = find(j, key);
    if (!v) fail(path + "." + key, "missing required key");
    return get_number(*v, path + "." + key);
}

inline double opt_number(const json& j, const std::string& path, const char* key, double dflt) {
    const json* v = find(j, key);
    return v ? get_number(*v, path + "." + key) : dflt;
}

inline int opt_int(const json& j, const std::string& path, const char* key, int dflt) {
    const json* v = find(j, key);
    if (!v) return dflt;
    if (!v->is_number_integer()) fail(path + "." + key, "expected an integer");
    return v->get<int>();
}

inline std::string req_string(const json& j, const std::string& path, const char* key) {
    const json* v = find(j, key);
    if (!v) fail(path + "." + key, "missing required key");
    if (!v->is_string()) fail(path + "." + key, "expected a string");
    return v->get<std::string>();
}

inline std::vector<double> number_array(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    out.reserve(j.size());
    std::size_t i = 0;
    for (const auto& e : j) {
        out.push_back(get_number(e, path + "[" + std::to_string(i) + "]"));
        ++i;
    }
    return out;
}

inline CrackKind parse_crack_kind(const std::string& s, const std::string& path) {
    if (s == "single") return CrackKind::single_sided;
    if (s == "double") return CrackKind::double_sided;
    if (s == "direct") return CrackKind::direct;
    fail(path, "expected one of \"single\", \"double\", \"direct\"");
}

inline PhysicalBeam parse_physical(const json& j, const std::string& path) {
    expect_object(j, path);
    check_keys(j, path,
               {"length", "youngs_modulus", "area_moment", "cross_section_area", "density",
                "damping", "viscosity", "axial_force", "section_height", "cracks"});
    PhysicalBeam pb;
    pb.length = req_number(j, path, "length");
    pb.youngs_modulus = req_number(j, path, "youngs_modulus");
    pb.area_moment = req_number(j, path, "area_moment");
    pb.cross_section_area = req_number(j, path, "cross_section_area");
    pb.density = req_number(j, path, "density");
    pb.damping = opt_number(j, path, "damping", 0.0);
    pb.viscosity = opt_number(j, path, "viscosity", 0.0);
    pb.initial_axial_force = opt_number(j, path, "axial_force", 0.0);
    pb.section_height = opt_number(j, path, "section_height", 0.0);
    if (const json* cracks = find(j, "cracks")) {
        const std::string cpath = path + ".cracks";
        if (!cracks->is_array()) fail(cpath, "expected an array");
        std::size_t i = 0;
        for (const auto& c : *cracks) {
            const std::string ipath = cpath + "[" + std::to_string(i) + "]";
            expect_object(c, ipath);
            check_keys(c, ipath, {"position", "kind", "depth_ratio", "flexibility"});
            CrackSpec spec;
            spec.position = req_number(c, ipath, "position");
            spec.kind = parse_crack_kind(req_string(c, ipath, "kind"), ipath + ".kind");
            const json* ratio = find(c, "depth_ratio");
            const json* flex = find(c, "flexibility");
            if (spec.kind == CrackKind::direct) {
                if (!flex) fail(ipath + ".flexibility", "missing required key for kind \"direct\"");
                if (ratio) fail(ipath + ".depth_ratio", "not allowed for kind \"direct\"");
                spec.flexibility = get_number(*flex, ipath + ".flexibility");
            } else {
                if (!ratio) fail(ipath + ".depth_ratio", "missing required key");
                if (flex) fail(ipath + ".flexibility", "not allowed when depth_ratio is given");
                spec.depth_ratio = get_number(*ratio, ipath + ".depth_ratio");
            }
            pb.cracks.push_back(spec);
            ++i;
        }
        bool needs_height = false;
        for (const auto& c : pb.cracks)
            if (c.kind != CrackKind::direct) needs_height = true;
        if (needs_height && !(pb.section_height > 0.0))
            fail(path + ".section_height", "must be positive when a crack specifies depth_ratio");
    }
    return pb;
}

inline NondimModel parse_nondim(const json& j, const std::string& path) {
    expect_object(j, path);
    check_keys(j, path, {"crack_positions", "flexibilities", "beta", "c_d", "mu"});
    NondimModel m;
    if (const json* v = find(j, "crack_positions"))
        m.crack_positions = number_array(*v, path + ".crack_positions");
    if (const json* v = find(j, "flexibilities"))
        m.flexibilities = number_array(*v, path + ".flexibilities");
    m.beta = opt_number(j, path, "beta", 0.0);
    m.c_d = opt_number(j, path, "c_d", 0.0);
    m.mu = opt_number(j, path, "mu", 0.0);
    return m;
}

inline ModalSettings parse_modal(const json& j, const std::string& path) {
    expect_object(j, path);
    check_keys(j, path, {"n_modes", "scan_step", "lambda_max"});
    ModalSettings ms;
    ms.n_modes = opt_int(j, path, "n_modes", ms.n_modes);
    if (ms.n_modes < 1) fail(path + ".n_modes", "must be at least 1");
    ms.scan.step = opt_number(j, path, "scan_step", ms.scan.step);
    if (!(ms.scan.step > 0.0)) fail(path + ".scan_step", "must be positive");
    ms.scan.lambda_max = opt_number(j, path, "lambda_max", 0.0);
    if (ms.scan.lambda_max < 0.0) fail(path + ".lambda_max", "must be nonnegative");
    return ms;
}

inline LoadModel parse_load(const json& j, const std::string& path) {
    expect_object(j, path);
    check_keys(j, path, {"kind", "p0", "modal", "profile"});
    LoadModel load;
    const std::string kind = req_string(j, path, "kind");
    if (kind == "zero") {
        load.kind = LoadKind::zero;
        if (find(j, "p0")) fail(path + ".p0", "not allowed for kind \"zero\"");
        if (find(j, "modal")) fail(path + ".modal", "not allowed for kind \"zero\"");
    } else if (kind == "modal") {
        load.kind = LoadKind::modal;
        if (find(j, "p0")) fail(path + ".p0", "not allowed for kind \"modal\"");
        const json* v = find(j, "modal");
        if (!v) fail(path + ".modal", "missing required key");
        std::vector<double> amp = number_array(*v, path + ".modal");
        load.modal_amplitudes =
            Eigen::Map<const Eigen::VectorXd>(amp.data(), static_cast<Eigen::Index>(amp.size()));
    } else if (kind == "uniform") {
        load.kind = LoadKind::uniform;
        if (find(j, "modal")) fail(path + ".modal", "not allowed for kind \"uniform\"");
        load.p0 = req_number(j, path, "p0");
    } else {
        fail(path + ".kind", "expected one of \"zero\", \"modal\", \"uniform\"");
    }
    if (const json* prof = find(j, "profile")) {
        const std::string ppath = path + ".profile";
        expect_object(*prof, ppath);
        check_keys(*prof, ppath, {"type", "amplitude", "omega", "phase"});
        const std::string type = req_string(*prof, ppath, "type");
        if (type == "constant") {
            load.profile = TimeProfile::constant;
            for (const char* k : {"amplitude", "omega", "phase"})
                if (find(*prof, k))
                    fail(ppath + "." + k, "not allowed for type \"constant\"");
        } else if (type == "sinusoid") {
            load.profile = TimeProfile::sinusoid;
            load.amplitude = opt_number(*prof, ppath, "amplitude", 1.0);
            load.omega = req_number(*prof, ppath, "omega");
            load.phase = opt_number(*prof, ppath, "phase", 0.0);
        } else {
            fail(ppath + ".type", "expected \"constant\" or \"sinusoid\"");
        }
    }
    return load;
}

inline SimulationSettings parse_simulation(const json& j, const std::string& path) {
    expect_object(j, path);
    check_keys(j, path, {"model_kind", "t_final", "dt", "record_every", "initial", "load"});
    SimulationSettings sim;
    const std::string kind = req_string(j, path, "model_kind");
    if (kind == "beam")
        sim.model_kind = ModelKind::beam;
    else if (kind == "arch")
        sim.model_kind = ModelKind::arch;
    else
        fail(path + ".model_kind", "expected \"beam\" or \"arch\"");
    sim.t_final = req_number(j, path, "t_final");
    if (!(sim.t_final > 0.0)) fail(path + ".t_final", "must be positive");
    sim.dt = req_number(j, path, "dt");
    if (!(sim.dt > 0.0)) fail(path + ".dt", "must be positive");
    sim.record_every = opt_int(j, path, "record_every", 1);
    if (sim.record_every < 1) fail(path + ".record_every", "must be at least 1");
    if (const json* init = find(j, "initial")) {
        const std::string ipath = path + ".initial";
        expect_object(*init, ipath);
        check_keys(*init, ipath, {"modal"});
        if (const json* v = find(*init, "modal"))
            sim.initial_modal = number_array(*v, ipath + ".modal");
    }
    if (const json* load = find(j, "load")) sim.load = parse_load(*load, path + ".load");
    return sim;
}

} // namespace detail

// Strict parse: exactly one of "physical"/"nondim", unknown keys rejected with
// the offending path named. A "summary" block (as emitted by the nondim
// command) is accepted and ignored so that output can be fed back in as input.
inline Config parse_config(const nlohmann::json& doc) {
    using detail::fail;
    detail::expect_object(doc, "$");
    detail::check_keys(doc, "$", {"physical", "nondim", "modal", "simulation", "summary"});
    Config cfg;
    const nlohmann::json* phys = detail::find(doc, "physical");
    const nlohmann::json* nd = detail::find(doc, "nondim");
    if (phys && nd) fail("$", "\"physical\" and \"nondim\" are mutually exclusive");
    if (!phys && !nd) fail("$", "one of \"physical\" or \"nondim\" is required");
    if (phys) {
        cfg.physical = detail::parse_physical(*phys, "$.physical");
        try {
            validate(*cfg.physical);
        } catch (const std::exception& e) {
            fail("$.physical", e.what());
        }
    } else {
        cfg.nondim = detail::parse_nondim(*nd, "$.nondim");
        try {
            validate(*cfg.nondim);
        } catch (const std::exception& e) {
            fail("$.nondim", e.what());
        }
    }
    if (const nlohmann::json* m = detail::find(doc, "modal"))
        cfg.modal = detail::parse_modal(*m, "$.modal");
    if (const nlohmann::json* s = detail::find(doc, "simulation"))
        cfg.simulation = detail::parse_simulation(*s, "$.simulation");
    return cfg;
}

inline Config load_config(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw config_error(file, "cannot open config file");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw config_error(file, std::string("invalid JSON: ") + e.what());
    }
    return parse_config(doc);
}

// Non-dimensional model for a parsed config, scaling if needed.
inline NondimModel resolve_model(const Config& cfg, NondimSummary* summary = nullptr) {
    if (cfg.nondim) {
        if (summary) *summary = NondimSummary{};
        return *cfg.nondim;
    }
    auto [model, s] = nondimensionalize(*cfg.physical);
    if (summary) *summary = s;
    return model;
}

} // namespace crackdyn
