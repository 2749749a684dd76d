#include <json.hpp>
#include <set>

#include "kfs/errors.hpp"
#include "kfs/experiments.hpp"

namespace kfs {

namespace {

using Json = nlohmann::json;

void check_keys(const Json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw SchemaError(where + " must be a JSON object");
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key)) throw SchemaError("unknown key '" + key + "' in " + where);
}

double number(const Json& v, const std::string& key) {
    if (!v.is_number()) throw SchemaError("'" + key + "' must be a number");
    return v.get<double>();
}

long long integer(const Json& v, const std::string& key) {
    if (!v.is_number_integer()) throw SchemaError("'" + key + "' must be an integer");
    return v.get<long long>();
}

std::optional<int> optional_count(const Json& v, const std::string& key) {
    if (v.is_null()) return std::nullopt;
    const long long x = integer(v, key);
    if (x < 0) throw SchemaError("'" + key + "' must be non-negative or null");
    return static_cast<int>(x);
}

Boundary parse_boundary(const std::string& s) {
    if (s == "cylinder") return Boundary::Cylinder;
    if (s == "open") return Boundary::Open;
    throw SchemaError("boundary must be 'cylinder' or 'open'");
}

void parse_noise(const Json& j, NoiseModel& n) {
    check_keys(j, {"p_ini", "p_layer", "loss_fraction_ini", "loss_fraction_layer", "pauli_bias", "angle_offset",
                   "profile"},
               "noise");
    if (j.contains("p_ini")) n.p_ini = number(j["p_ini"], "p_ini");
    if (j.contains("p_layer")) n.p_layer = number(j["p_layer"], "p_layer");
    if (j.contains("loss_fraction_ini")) n.loss_fraction_ini = number(j["loss_fraction_ini"], "loss_fraction_ini");
    if (j.contains("loss_fraction_layer"))
        n.loss_fraction_layer = number(j["loss_fraction_layer"], "loss_fraction_layer");
    if (j.contains("angle_offset")) n.angle_offset = number(j["angle_offset"], "angle_offset");
    if (j.contains("pauli_bias")) {
        const Json& b = j["pauli_bias"];
        if (!b.is_array() || b.size() != 3) throw SchemaError("pauli_bias must list three weights (X, Y, Z)");
        for (std::size_t k = 0; k < 3; ++k) n.pauli_bias[k] = number(b[k], "pauli_bias");
    }
    if (j.contains("profile")) {
        const std::string p = j["profile"].is_string() ? j["profile"].get<std::string>() : "";
        if (p == "phenomenological") n.profile = NoiseProfile::Phenomenological;
        else if (p == "gate_layer") n.profile = NoiseProfile::GateLayer;
        else throw SchemaError("noise profile must be 'phenomenological' or 'gate_layer'");
    }
    n.validate();
}

}  // namespace

RunConfig default_config(const std::string& preset) {
    preset_info(preset);
    RunConfig c;
    c.preset = preset;
    return c;
}

RunConfig parse_run_config(const std::string& text) {
    const Json j = Json::parse(text, nullptr, false);
    if (j.is_discarded()) throw SchemaError("configuration is not valid JSON");
    check_keys(j,
               {"preset", "lattice", "noise", "postselection", "trajectories", "seed", "workers", "out_dir",
                "write_snapshots", "params", "sweep"},
               "configuration");
    if (!j.contains("preset") || !j["preset"].is_string()) throw SchemaError("'preset' is required");
    RunConfig c = default_config(j["preset"].get<std::string>());

    if (j.contains("lattice")) {
        const Json& l = j["lattice"];
        check_keys(l, {"plaquette_rows", "plaquette_cols", "boundary"}, "lattice");
        if (l.contains("plaquette_rows")) c.lattice.plaquette_rows = static_cast<int>(integer(l["plaquette_rows"], "plaquette_rows"));
        if (l.contains("plaquette_cols")) c.lattice.plaquette_cols = static_cast<int>(integer(l["plaquette_cols"], "plaquette_cols"));
        if (l.contains("boundary")) {
            if (!l["boundary"].is_string()) throw SchemaError("'boundary' must be a string");
            c.lattice.boundary = parse_boundary(l["boundary"].get<std::string>());
        }
        if (c.lattice.plaquette_rows < 1 || c.lattice.plaquette_cols < 1)
            throw SchemaError("lattice dimensions must be positive");
    }
    if (j.contains("noise")) parse_noise(j["noise"], c.noise);
    if (j.contains("postselection")) {
        const Json& p = j["postselection"];
        check_keys(p, {"loss_radius", "decoding_threshold"}, "postselection");
        if (p.contains("loss_radius")) c.postselection.loss_radius = optional_count(p["loss_radius"], "loss_radius");
        if (p.contains("decoding_threshold"))
            c.postselection.decoding_threshold = optional_count(p["decoding_threshold"], "decoding_threshold");
    }
    if (j.contains("trajectories")) {
        c.trajectories = integer(j["trajectories"], "trajectories");
        if (c.trajectories < 1) throw SchemaError("'trajectories' must be at least 1");
    }
    if (j.contains("seed")) {
        const long long s = integer(j["seed"], "seed");
        if (s < 0) throw SchemaError("'seed' must be non-negative");
        c.seed = static_cast<std::uint64_t>(s);
    }
    if (j.contains("workers")) {
        c.workers = static_cast<int>(integer(j["workers"], "workers"));
        if (c.workers < 1) throw SchemaError("'workers' must be at least 1");
    }
    if (j.contains("out_dir")) {
        if (!j["out_dir"].is_string()) throw SchemaError("'out_dir' must be a string");
        c.out_dir = j["out_dir"].get<std::string>();
    }
    if (j.contains("write_snapshots")) {
        if (!j["write_snapshots"].is_boolean()) throw SchemaError("'write_snapshots' must be a boolean");
        c.write_snapshots = j["write_snapshots"].get<bool>();
    }
    if (j.contains("params")) {
        if (!j["params"].is_object()) throw SchemaError("'params' must be an object");
        c.params = j["params"].dump();
    }
    if (j.contains("sweep")) {
        if (!j["sweep"].is_array()) throw SchemaError("'sweep' must be an array of axes");
        for (const Json& a : j["sweep"]) {
            check_keys(a, {"key", "values"}, "sweep axis");
            if (!a.contains("key") || !a["key"].is_string() || !a.contains("values") || !a["values"].is_array() ||
                a["values"].empty())
                throw SchemaError("a sweep axis needs a key and a non-empty value list");
            SweepAxis axis{a["key"].get<std::string>(), {}};
            for (const Json& v : a["values"]) axis.values.push_back(number(v, axis.key));
            c.sweep.push_back(std::move(axis));
        }
    }
    return c;
}

void apply_override(RunConfig& c, const std::string& key, double value) {
    static const std::string noise_prefix = "noise.";
    if (key.rfind(noise_prefix, 0) == 0) {
        const std::string field = key.substr(noise_prefix.size());
        if (field == "p_ini") c.noise.p_ini = value;
        else if (field == "p_layer") c.noise.p_layer = value;
        else if (field == "loss_fraction_ini") c.noise.loss_fraction_ini = value;
        else if (field == "loss_fraction_layer") c.noise.loss_fraction_layer = value;
        else if (field == "angle_offset") c.noise.angle_offset = value;
        else throw SchemaError("cannot sweep noise field '" + field + "'");
        c.noise.validate();
        return;
    }
    if (key == "postselection.loss_radius" || key == "postselection.decoding_threshold") {
        if (value < 0 || value != static_cast<int>(value)) throw SchemaError(key + " must be a non-negative integer");
        if (key == "postselection.loss_radius") c.postselection.loss_radius = static_cast<int>(value);
        else c.postselection.decoding_threshold = static_cast<int>(value);
        return;
    }
    Json p = Json::parse(c.params);
    p[key] = value;
    c.params = p.dump();
}

}  // namespace kfs
