#include "umf/config.hpp"

#include <cmath>
#include <set>

#include "umf/error.hpp"

namespace umf {

namespace {

using io::json;

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& what) {
    if (!j.is_object()) throw ValidationError(what + " must be a JSON object");
    for (const auto& [key, value] : j.items())
        if (!known.count(key)) throw ValidationError(what + ": unknown key '" + key + "'");
}

double get_number(const json& j, const char* key) {
    if (!j.at(key).is_number()) throw ValidationError(std::string("config: '") + key + "' must be a number");
    return j.at(key).get<double>();
}

std::size_t get_count(const json& j, const char* key) {
    const double v = get_number(j, key);
    if (v < 0.0 || v != std::floor(v)) throw ValidationError(std::string("config: '") + key + "' must be a count");
    return static_cast<std::size_t>(v);
}

std::uint64_t get_seed(const json& j) {
    const json& v = j.at("seed");
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<long long>() >= 0) return static_cast<std::uint64_t>(v.get<long long>());
    throw ValidationError("config: 'seed' must be a non-negative integer");
}

json packet_json(const PacketSpec& p) {
    json j{{"x2_center", p.x2_center},
           {"k_center", p.k_center},
           {"k_width", p.k_width},
           {"profile", p.profile == PacketProfile::ground_state ? "ground_state" : "gaussian"},
           {"min_capture", p.min_capture}};
    if (p.profile == PacketProfile::gaussian) {
        j["x1_center"] = p.x1_center;
        j["x1_width"] = p.x1_width;
    }
    return j;
}

PacketSpec packet_from_json(const json& j) {
    reject_unknown(j, {"x2_center", "k_center", "k_width", "profile", "x1_center", "x1_width", "min_capture"},
                   "packet");
    PacketSpec p;
    if (j.contains("x2_center")) p.x2_center = get_number(j, "x2_center");
    if (j.contains("k_center")) p.k_center = get_number(j, "k_center");
    if (j.contains("k_width")) p.k_width = get_number(j, "k_width");
    if (j.contains("x1_center")) p.x1_center = get_number(j, "x1_center");
    if (j.contains("x1_width")) p.x1_width = get_number(j, "x1_width");
    if (j.contains("min_capture")) p.min_capture = get_number(j, "min_capture");
    if (j.contains("profile")) {
        const std::string s = j.at("profile").get<std::string>();
        if (s == "ground_state") {
            p.profile = PacketProfile::ground_state;
        } else if (s == "gaussian") {
            p.profile = PacketProfile::gaussian;
        } else {
            throw ValidationError("packet: unknown profile '" + s + "'");
        }
    }
    return p;
}

}  // namespace

io::json to_json(const RunConfig& c) {
    json kg{{"n_k", c.kgrid.n_k}};
    if (c.kgrid.k_min) kg["k_min"] = *c.kgrid.k_min;
    if (c.kgrid.k_max) kg["k_max"] = *c.kgrid.k_max;
    json j{{"field", io::to_json(c.field)},
           {"grid", io::to_json(c.grid)},
           {"kgrid", kg},
           {"n_max", c.n_max},
           {"tol_flat", c.tol_flat},
           {"dynamics",
            {{"packet", packet_json(c.dynamics.packet)},
             {"horizon", c.dynamics.horizon},
             {"samples", c.dynamics.samples},
             {"t_min", c.dynamics.t_min}}},
           {"out", c.out},
           {"threads", c.threads},
           {"ensemble", c.ensemble},
           {"svg", c.svg}};
    j["seed"] = c.seed ? json(*c.seed) : json(nullptr);
    if (c.verify_shift) j["verify_shift"] = *c.verify_shift;
    if (!c.tolerances.empty()) j["tolerances"] = c.tolerances;
    return j;
}

RunConfig run_config_from_json(const io::json& j, const io::fs::path& base_dir) {
    reject_unknown(j,
                   {"field", "grid", "kgrid", "n_max", "tol_flat", "dynamics", "seed", "out", "threads", "ensemble",
                    "svg", "verify_shift", "tolerances"},
                   "config");
    RunConfig c;
    try {
        if (j.contains("field")) c.field = io::field_spec_from_json(j.at("field"), base_dir);
        if (j.contains("grid")) c.grid = io::grid_from_json(j.at("grid"));
        if (j.contains("kgrid")) {
            const json& k = j.at("kgrid");
            reject_unknown(k, {"k_min", "k_max", "n_k"}, "kgrid");
            if (k.contains("k_min")) c.kgrid.k_min = get_number(k, "k_min");
            if (k.contains("k_max")) c.kgrid.k_max = get_number(k, "k_max");
            if (k.contains("n_k")) c.kgrid.n_k = get_count(k, "n_k");
            if (c.kgrid.k_min.has_value() != c.kgrid.k_max.has_value())
                throw ValidationError("kgrid: give both k_min and k_max or neither");
        }
        if (j.contains("n_max")) {
            const double n = get_number(j, "n_max");
            if (n < 0.0 || n != std::floor(n)) throw ValidationError("config: 'n_max' must be a non-negative integer");
            c.n_max = static_cast<int>(n);
        }
        if (j.contains("tol_flat")) c.tol_flat = get_number(j, "tol_flat");
        if (j.contains("dynamics")) {
            const json& d = j.at("dynamics");
            reject_unknown(d, {"packet", "horizon", "samples", "t_min"}, "dynamics");
            if (d.contains("packet")) c.dynamics.packet = packet_from_json(d.at("packet"));
            if (d.contains("horizon")) c.dynamics.horizon = get_number(d, "horizon");
            if (d.contains("samples")) c.dynamics.samples = get_count(d, "samples");
            if (d.contains("t_min")) c.dynamics.t_min = get_number(d, "t_min");
        }
        if (j.contains("seed") && !j.at("seed").is_null()) c.seed = get_seed(j);
        if (j.contains("out")) c.out = j.at("out").get<std::string>();
        if (j.contains("threads")) c.threads = get_count(j, "threads");
        if (j.contains("ensemble")) c.ensemble = get_count(j, "ensemble");
        if (j.contains("svg")) c.svg = j.at("svg").get<bool>();
        if (j.contains("verify_shift")) c.verify_shift = get_number(j, "verify_shift");
        if (j.contains("tolerances")) {
            for (const auto& [key, value] : j.at("tolerances").items()) {
                if (!value.is_number()) throw ValidationError("tolerances: '" + key + "' must be a number");
                c.tolerances[key] = value.get<double>();
            }
        }
    } catch (const io::json::exception& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
    return c;
}

RunConfig load_run_config(const io::fs::path& path) {
    io::json j;
    try {
        j = io::json::parse(io::read_text(path));
    } catch (const io::json::parse_error& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
    return run_config_from_json(j, path.parent_path());
}

KGrid resolve_kgrid(const RunConfig& config, const VectorPotential& a, const FieldRealization& field) {
    if (config.kgrid.k_min) return KGrid(*config.kgrid.k_min, *config.kgrid.k_max, config.kgrid.n_k);
    return default_kgrid(a, config.kgrid.n_k, default_target_energy(field, config.n_max));
}

KGrid resolve_packet_kgrid(const RunConfig& config) {
    if (config.kgrid.k_min) return KGrid(*config.kgrid.k_min, *config.kgrid.k_max, config.kgrid.n_k);
    const PacketSpec& p = config.dynamics.packet;
    if (!(p.k_width > 0.0)) throw ValidationError("packet: k_width must be positive");
    return KGrid(p.k_center - 8.0 * p.k_width, p.k_center + 8.0 * p.k_width, config.kgrid.n_k);
}

}  // namespace umf
