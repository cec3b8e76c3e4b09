#include "tmc/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "tmc/errors.hpp"

namespace tmc {

namespace {

using nlohmann::json;

// Converts a byte offset from nlohmann's parse_error into line:column.
std::pair<std::size_t, std::size_t> line_of_byte(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
        if (text[k] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

[[noreturn]] void fail(const std::string& name, const std::string& path,
                       const std::string& what) {
    throw ConfigError(name + ": " + path + ": " + what);
}

// Strict object view: every key must be consumed exactly once.
class Section {
public:
    Section(const json& node, std::string path, const std::string& name)
        : node_(node), path_(std::move(path)), name_(name) {
        if (!node.is_object()) fail(name_, path_, "expected an object");
    }

    // Call once after consuming all expected keys.
    void finish() const {
        for (auto it = node_.begin(); it != node_.end(); ++it)
            if (!seen_.count(it.key()))
                fail(name_, path_ + "." + it.key(), "unknown key");
    }

    bool has(const std::string& key) {
        if (node_.contains(key)) {
            seen_.insert(key);
            return true;
        }
        return false;
    }

    const json& require(const std::string& key) {
        if (!has(key)) fail(name_, path_ + "." + key, "missing required key");
        return node_.at(key);
    }

    template <typename T>
    T get(const std::string& key, T fallback) {
        if (!has(key)) return fallback;
        return convert<T>(node_.at(key), key);
    }

    template <typename T>
    T get_required(const std::string& key) {
        return convert<T>(require(key), key);
    }

    const json* child(const std::string& key) {
        if (!has(key)) return nullptr;
        return &node_.at(key);
    }

    const std::string& path() const noexcept { return path_; }
    const std::string& name() const noexcept { return name_; }

private:
    template <typename T>
    T convert(const json& v, const std::string& key) {
        try {
            if constexpr (std::is_same_v<T, bool>) {
                if (!v.is_boolean()) throw json::type_error::create(302, "not boolean", &v);
            } else if constexpr (std::is_same_v<T, std::string>) {
                if (!v.is_string()) throw json::type_error::create(302, "not string", &v);
            } else if constexpr (std::is_integral_v<T>) {
                if (!v.is_number_integer() && !v.is_number_unsigned())
                    throw json::type_error::create(302, "not integer", &v);
            } else {
                if (!v.is_number()) throw json::type_error::create(302, "not number", &v);
            }
            return v.get<T>();
        } catch (const json::exception&) {
            fail(name_, path_ + "." + key, "wrong type (got " + std::string(v.type_name()) + ")");
        }
    }

    const json& node_;
    std::string path_;
    const std::string& name_;
    std::set<std::string> seen_;
};

LatticeSpec parse_lattice(const json& node, const std::string& path, const std::string& name) {
    Section sec(node, path, name);
    LatticeSpec spec;
    const std::string geom = sec.get_required<std::string>("geometry");
    if (geom == "chain")
        spec.geometry = Geometry::chain;
    else if (geom == "square")
        spec.geometry = Geometry::square;
    else if (geom == "triangular")
        spec.geometry = Geometry::triangular;
    else
        fail(name, path + ".geometry", "expected chain|square|triangular, got '" + geom + "'");
    spec.lx = sec.get_required<int>("lx");
    spec.ly = sec.get<int>("ly", 1);
    spec.periodic_x = sec.get<bool>("periodic_x", false);
    spec.periodic_y = sec.get<bool>("periodic_y", false);
    sec.finish();
    return spec;
}

ModelConfig parse_model(const json& node, const std::string& name) {
    Section sec(node, "model", name);
    ModelConfig model;
    const std::string kind = sec.get_required<std::string>("kind");
    const json* lattice = sec.child("lattice");
    if (lattice == nullptr) fail(name, "model.lattice", "missing required key");
    model.lattice = parse_lattice(*lattice, "model.lattice", name);
    if (kind == "heisenberg") {
        model.kind = ModelKind::heisenberg;
        model.coupling_j = sec.get<double>("coupling_j", 1.0);
    } else if (kind == "hubbard") {
        model.kind = ModelKind::hubbard;
        model.hopping_t = sec.get<double>("hopping_t", 1.0);
        model.onsite_u = sec.get<double>("onsite_u", 0.0);
        model.n_up = sec.get_required<int>("n_up");
        model.n_down = sec.get_required<int>("n_down");
    } else {
        fail(name, "model.kind", "expected heisenberg|hubbard, got '" + kind + "'");
    }
    sec.finish();
    return model;
}

BiasParams parse_bias(const json& node, const std::string& name) {
    Section sec(node, "engine.bias", name);
    BiasParams bias;
    bias.kappa = sec.get<double>("kappa", 0.0);
    bias.enabled = sec.get<bool>("enabled", true);
    sec.finish();
    return bias;
}

EngineConfig parse_engine(const json& node, const std::string& name) {
    Section sec(node, "engine", name);
    EngineConfig cfg;
    cfg.r = sec.get_required<double>("r");
    cfg.initial_shift = sec.get<double>("initial_shift", 0.0);
    cfg.damping_xi = sec.get<double>("damping_xi", 0.1);
    cfg.target_population = sec.get<double>("target_population", 1000.0);
    cfg.shift_update_period = sec.get<std::uint64_t>("shift_update_period", 1);
    cfg.c_init_threshold = sec.get<double>("c_init_threshold", 1.0);
    cfg.n_init_threshold = sec.get<int>("n_init_threshold", 1);
    cfg.initial_weight = sec.get<double>("initial_weight", 1.0);
    cfg.initial_triplet_count = sec.get<std::size_t>("initial_triplet_count", 1);
    cfg.n_thermalization = sec.get<std::uint64_t>("n_thermalization", 0);
    cfg.n_sampling = sec.get<std::uint64_t>("n_sampling", 0);
    cfg.rng_seed = sec.get<std::uint64_t>("rng_seed", 0);
    cfg.initiator_enabled = sec.get<bool>("initiator_enabled", true);
    cfg.shift_control_enabled = sec.get<bool>("shift_control_enabled", true);
    cfg.resample_survivors = sec.get<bool>("resample_survivors", false);
    cfg.dust_cutoff = sec.get<double>("dust_cutoff", 1e-9);
    cfg.initiator_walker_units = sec.get<bool>("initiator_walker_units", false);
    if (const json* bias = sec.child("bias")) cfg.bias = parse_bias(*bias, name);
    sec.finish();
    return cfg;
}

OutputConfig parse_output(const json& node, const std::string& name) {
    Section sec(node, "output", name);
    OutputConfig out;
    out.directory = sec.get<std::string>("directory", "out");
    out.series_filename = sec.get<std::string>("series_filename", "series.csv");
    out.summary_filename = sec.get<std::string>("summary_filename", "summary.json");
    sec.finish();
    return out;
}

} // namespace

const char* model_kind_name(ModelKind kind) noexcept {
    return kind == ModelKind::heisenberg ? "heisenberg" : "hubbard";
}

RunConfig parse_config(const std::string& text, const std::string& name) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_of_byte(text, e.byte > 0 ? e.byte - 1 : 0);
        throw ConfigError(name + ":" + std::to_string(line) + ":" + std::to_string(col) +
                          ": " + e.what());
    }

    RunConfig cfg;
    {
        Section sec(root, "<root>", name);
        const json* model = sec.child("model");
        if (model == nullptr) fail(name, "model", "missing required key");
        cfg.model = parse_model(*model, name);
        const json* engine = sec.child("engine");
        if (engine == nullptr) fail(name, "engine", "missing required key");
        cfg.engine = parse_engine(*engine, name);
        if (const json* output = sec.child("output"))
            cfg.output = parse_output(*output, name);
        sec.finish();
    }

    validate(cfg.engine); // structural engine invariants (r > 0, xi > 0, ...)
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ": cannot open configuration file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

nlohmann::json config_to_json(const RunConfig& cfg) {
    json lattice = {{"geometry", geometry_name(cfg.model.lattice.geometry)},
                    {"lx", cfg.model.lattice.lx},
                    {"ly", cfg.model.lattice.ly},
                    {"periodic_x", cfg.model.lattice.periodic_x},
                    {"periodic_y", cfg.model.lattice.periodic_y}};
    json model = {{"kind", model_kind_name(cfg.model.kind)}, {"lattice", lattice}};
    if (cfg.model.kind == ModelKind::heisenberg) {
        model["coupling_j"] = cfg.model.coupling_j;
    } else {
        model["hopping_t"] = cfg.model.hopping_t;
        model["onsite_u"] = cfg.model.onsite_u;
        model["n_up"] = cfg.model.n_up;
        model["n_down"] = cfg.model.n_down;
    }
    const EngineConfig& e = cfg.engine;
    json engine = {{"r", e.r},
                   {"initial_shift", e.initial_shift},
                   {"damping_xi", e.damping_xi},
                   {"target_population", e.target_population},
                   {"shift_update_period", e.shift_update_period},
                   {"c_init_threshold", e.c_init_threshold},
                   {"n_init_threshold", e.n_init_threshold},
                   {"initial_weight", e.initial_weight},
                   {"initial_triplet_count", e.initial_triplet_count},
                   {"n_thermalization", e.n_thermalization},
                   {"n_sampling", e.n_sampling},
                   {"rng_seed", e.rng_seed},
                   {"bias", {{"kappa", e.bias.kappa}, {"enabled", e.bias.enabled}}},
                   {"initiator_enabled", e.initiator_enabled},
                   {"shift_control_enabled", e.shift_control_enabled},
                   {"resample_survivors", e.resample_survivors},
                   {"dust_cutoff", e.dust_cutoff},
                   {"initiator_walker_units", e.initiator_walker_units}};
    json output = {{"directory", cfg.output.directory},
                   {"series_filename", cfg.output.series_filename},
                   {"summary_filename", cfg.output.summary_filename}};
    return json{{"model", model}, {"engine", engine}, {"output", output}};
}

} // namespace tmc
