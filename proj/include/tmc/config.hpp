#pragma once

// Run-configuration file schema: strict JSON (unknown keys rejected) with a
// model section, an engine section and an output section. Parse errors carry
// file:line:column; schema errors carry the offending key path.

#include <string>

#include "json.hpp"

#include "tmc/engine.hpp"
#include "tmc/lattice.hpp"

namespace tmc {

enum class ModelKind { heisenberg, hubbard };

struct ModelConfig {
    ModelKind kind = ModelKind::heisenberg;
    LatticeSpec lattice;
    // Heisenberg
    double coupling_j = 1.0;
    // Hubbard
    double hopping_t = 1.0;
    double onsite_u = 0.0;
    int n_up = 0;
    int n_down = 0;
};

struct OutputConfig {
    std::string directory = "out";
    std::string series_filename = "series.csv";
    std::string summary_filename = "summary.json";
};

struct RunConfig {
    ModelConfig model;
    EngineConfig engine;
    OutputConfig output;
};

// Parses and schema-validates; `name` appears in diagnostics.
RunConfig parse_config(const std::string& text, const std::string& name = "<config>");

// Reads the file and parses it.
RunConfig load_config(const std::string& path);

// Normalized echo of a configuration; parse_config(dump) reproduces it.
nlohmann::json config_to_json(const RunConfig& cfg);

const char* model_kind_name(ModelKind kind) noexcept;

} // namespace tmc
