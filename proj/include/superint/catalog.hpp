#pragma once

#include "superint/dynamics.hpp"
#include "superint/flatspace.hpp"
#include "superint/sphere.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace superint {

using json = nlohmann::json;

class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Where an integral's quadratic part came from; kept for the
// Bertrand-Darboux registry.
struct IntegralSource {
    enum Kind { killing, conformal } kind = killing;
    Field a;  // K_zz or c1
    Field b;  // K_zzbar or c2
    Field W;
};

struct LoadedSystem {
    std::string name;
    SystemSpec spec;
    std::vector<IntegralSource> sources;
    std::vector<std::string> registries;  // expected to pass
    std::optional<std::pair<Sym3, Sym3>> sphere_pair;
};

// Schema:
// {"name": "...", "params": {"a0": 1.0, ...},
//  "chart": {"kind": "flat" | "sphere" | "conformal", "phi": "<field>",
//            "domain": [x0, x1, y0, y1], "grid": [nx, ny]},
//  "structure": {"s": "<field>", "t": "<field>" | "tz": "<field>", "base": [x, y]}
//             | {"sphere_pair": {"L1": [6], "L2": [6]}, "base": [x, y]}
//             | {"proper_flat_seed": {"s": [re, im], "theta": th}, "base": [x, y]},
//  "V": "<field>",
//  "integrals": [{"label": "...", "kzz": "<field>", "kzw": "<field>", "W": "<field>"}
//              | {"label": "...", "c1": "<field>", "c2": "<field>", "W": "<field>"}
//              | {"label": "...", "sphere_killing": [6], "W": "<field>"}],
//  "registries": ["conformal", ...]}
// Overrides replace "s", "t", "tz" or "V" by a field string. Throws
// SchemaError on any malformed input, including unparsable fields.
[[nodiscard]] LoadedSystem load_system(const json& j, const std::map<std::string, std::string>& overrides = {});

// "conformal", "standard", "flat", "proper", "flat-correspondence",
// "wilczynski", "bracket", "bertrand-darboux", "sphere-constraint"
[[nodiscard]] const std::vector<std::string>& registry_names();

struct RegistryOptions {
    bool relative = true;
    int phase_samples = 100;
    unsigned seed = 1;
};
[[nodiscard]] ResidualReport run_registry(const LoadedSystem& sys, const std::string& registry,
                                          const RegistryOptions& opt = {});

struct CatalogEntry {
    std::string name;
    std::string provenance;
    json spec;
};
// Built on first use: the oscillator from its closed form, the other
// entries from the sphere and reconstruct pipelines.
[[nodiscard]] const std::vector<CatalogEntry>& catalog();
[[nodiscard]] const CatalogEntry& catalog_entry(const std::string& name);

[[nodiscard]] json report_json(const ResidualReport& r, double tol);
// Runs the named registries (the system's own list when empty, "conformal"
// when that is empty too): {system, tolerance, mode, registries, max_abs,
// failing, pass}.
[[nodiscard]] json verify_report(const LoadedSystem& sys, std::vector<std::string> registries,
                                 const RegistryOptions& opt, double tol);
// Rounds to 15 significant digits so reports are byte-stable.
[[nodiscard]] double fixed(double v);

}  // namespace superint
