#include "superint/catalog.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace superint {

namespace {

struct Loader {
    std::map<std::string, double> params;

    Field field(const json& j, const std::string& key) const
    {
        if (!j.is_string() && !j.is_number()) throw SchemaError("'" + key + "' must be a field string");
        const std::string text = j.is_string() ? j.get<std::string>() : j.dump();
        try {
            return parse_field(text, params);
        } catch (const ParseError& e) {
            throw SchemaError("'" + key + "': " + e.what());
        }
    }

    Field field_or(const json& obj, const std::string& key, const std::string& fallback) const
    {
        return obj.contains(key) ? field(obj.at(key), key) : field(json(fallback), key);
    }
};

std::vector<double> numbers(const json& j, std::size_t n, const std::string& key)
{
    if (!j.is_array() || j.size() != n) throw SchemaError("'" + key + "' must be an array of " + std::to_string(n));
    std::vector<double> out;
    for (const auto& v : j) {
        if (!v.is_number()) throw SchemaError("'" + key + "' entries must be numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

Sym3 sym3(const json& j, const std::string& key)
{
    auto v = numbers(j, 6, key);
    Sym3 L;
    std::copy(v.begin(), v.end(), L.e.begin());
    return L;
}

Domain domain_from(const json& chart)
{
    Domain d;
    if (chart.contains("domain")) {
        auto v = numbers(chart.at("domain"), 4, "domain");
        d.x0 = v[0], d.x1 = v[1], d.y0 = v[2], d.y1 = v[3];
        if (!(d.x0 < d.x1 && d.y0 < d.y1)) throw SchemaError("empty domain");
    }
    if (chart.contains("grid")) {
        auto v = numbers(chart.at("grid"), 2, "grid");
        d.nx = static_cast<int>(v[0]), d.ny = static_cast<int>(v[1]);
        if (d.nx < 1 || d.ny < 1) throw SchemaError("grid must be positive");
    }
    return d;
}

ChartPoint base_from(const json& obj)
{
    if (!obj.contains("base")) return {};
    auto v = numbers(obj.at("base"), 2, "base");
    return {v[0], v[1]};
}

ResidualEntry entry(double v, ChartPoint at, int samples)
{
    ResidualEntry e;
    e.max_abs = v;
    e.argmax = at;
    e.samples = samples;
    return e;
}

const StructureFunctions& need_sf(const LoadedSystem& sys)
{
    if (!sys.spec.sf) throw std::invalid_argument("registry needs structure functions");
    return *sys.spec.sf;
}

StructureFunctions flat_gauge(const StructureFunctions& sf)
{
    return sf.chart.phi() == Field(1.0) ? sf : to_flat_gauge(sf);
}

}  // namespace

LoadedSystem load_system(const json& j, const std::map<std::string, std::string>& overrides)
{
    if (!j.is_object()) throw SchemaError("system spec must be a JSON object");
    for (const auto& [k, v] : overrides)
        if (k != "s" && k != "t" && k != "tz" && k != "V") throw SchemaError("cannot override '" + k + "'");

    LoadedSystem sys;
    sys.name = j.value("name", std::string("unnamed"));
    Loader ld;
    if (j.contains("params")) {
        if (!j.at("params").is_object()) throw SchemaError("'params' must be an object");
        for (const auto& [k, v] : j.at("params").items()) {
            if (!v.is_number()) throw SchemaError("param '" + k + "' must be a number");
            ld.params[k] = v.get<double>();
        }
    }
    auto over = [&](const std::string& key) -> std::optional<Field> {
        auto it = overrides.find(key);
        if (it == overrides.end()) return std::nullopt;
        return ld.field(json(it->second), key);
    };

    const json chart = j.value("chart", json::object());
    const Domain dom = domain_from(chart);
    const std::string kind = chart.value("kind", chart.contains("phi") ? "conformal" : "flat");
    if (kind == "flat")
        sys.spec.chart = ConformalChart::flat(dom);
    else if (kind == "sphere")
        sys.spec.chart = ConformalChart::sphere(dom);
    else if (kind == "conformal")
        sys.spec.chart = ConformalChart(ld.field_or(chart, "phi", "1"), dom);
    else
        throw SchemaError("unknown chart kind '" + kind + "'");

    if (j.contains("structure")) {
        const json& st = j.at("structure");
        if (!st.is_object()) throw SchemaError("'structure' must be an object");
        const ChartPoint base = base_from(st);
        if (st.contains("sphere_pair")) {
            const json& p = st.at("sphere_pair");
            if (kind != "sphere") throw SchemaError("sphere_pair needs the sphere chart");
            sys.sphere_pair = {sym3(p.at("L1"), "L1"), sym3(p.at("L2"), "L2")};
            sys.spec.sf = sphere_structure(sys.sphere_pair->first, sys.sphere_pair->second, dom, base);
        } else if (st.contains("proper_flat_seed")) {
            const json& p = st.at("proper_flat_seed");
            if (kind != "flat") throw SchemaError("proper_flat_seed needs the flat chart");
            auto s = numbers(p.at("s"), 2, "s");
            if (!p.contains("theta") || !p.at("theta").is_number()) throw SchemaError("'theta' must be a number");
            const ProperFlatSeed seed = solve_proper_flat_seed({s[0], s[1]}, p.at("theta").get<double>());
            sys.spec.sf = proper_flat_structure(seed, dom, base);
        } else {
            const Field s = ld.field_or(st, "s", "0");
            if (st.contains("t"))
                sys.spec.sf = make_structure(sys.spec.chart, s, ld.field(st.at("t"), "t"), base);
            else
                sys.spec.sf = make_structure_tz(sys.spec.chart, s, ld.field_or(st, "tz", "0"), base);
        }
        StructureFunctions& sf = *sys.spec.sf;
        if (auto t = over("t"))
            sf = make_structure(sf.chart, over("s").value_or(sf.s), *t, sf.base);
        else if (auto tz = over("tz"))
            sf = make_structure_tz(sf.chart, over("s").value_or(sf.s), *tz, sf.base);
        else if (auto s = over("s"))
            sf = sf.t ? make_structure(sf.chart, *s, *sf.t, sf.base) : make_structure_tz(sf.chart, *s, sf.tz, sf.base);
    } else if (over("s") || over("t") || over("tz")) {
        throw SchemaError("structure override without a structure");
    }

    sys.spec.V = over("V").value_or(ld.field_or(j, "V", "0"));

    if (j.contains("integrals")) {
        if (!j.at("integrals").is_array()) throw SchemaError("'integrals' must be an array");
        int k = 0;
        for (const json& I : j.at("integrals")) {
            ++k;
            if (!I.is_object()) throw SchemaError("integral must be an object");
            IntegralSource src;
            src.W = ld.field_or(I, "W", "0");
            if (I.contains("c1") || I.contains("c2")) {
                src.kind = IntegralSource::conformal;
                src.a = ld.field_or(I, "c1", "0");
                src.b = ld.field_or(I, "c2", "0");
            } else if (I.contains("sphere_killing")) {
                if (kind != "sphere") throw SchemaError("sphere_killing needs the sphere chart");
                auto r = restriction_fields(sym3(I.at("sphere_killing"), "sphere_killing"));
                src.a = r.Lzz;
                src.b = -r.Lzw;
            } else if (I.contains("kzz") || I.contains("kzw")) {
                src.a = ld.field_or(I, "kzz", "0");
                src.b = ld.field_or(I, "kzw", "0");
            } else {
                throw SchemaError("integral needs c1/c2, kzz/kzw or sphere_killing");
            }
            Integral in;
            in.label = I.value("label", "F" + std::to_string(k));
            if (src.kind == IntegralSource::conformal) {
                in.F = conformal_observable(src.a, src.b, src.W);
                in.rho = rho_from_C(sys.spec.chart, src.a, src.b);
            } else {
                in.F = killing_observable(sys.spec.chart, src.a, src.b, src.W);
            }
            sys.spec.integrals.push_back(std::move(in));
            sys.sources.push_back(std::move(src));
        }
    }

    if (j.contains("registries")) {
        for (const json& r : j.at("registries")) {
            if (!r.is_string()) throw SchemaError("registry names must be strings");
            const auto& names = registry_names();
            if (std::find(names.begin(), names.end(), r.get<std::string>()) == names.end())
                throw SchemaError("unknown registry '" + r.get<std::string>() + "'");
            sys.registries.push_back(r.get<std::string>());
        }
    }
    return sys;
}

const std::vector<std::string>& registry_names()
{
    static const std::vector<std::string> names = {"conformal", "standard",       "flat",
                                                   "proper",    "flat-correspondence", "wilczynski",
                                                   "bracket",   "bertrand-darboux",    "sphere-constraint"};
    return names;
}

ResidualReport run_registry(const LoadedSystem& sys, const std::string& registry, const RegistryOptions& opt)
{
    ResidualOptions ro;
    ro.relative = opt.relative;
    const Domain& dom = sys.spec.chart.domain();

    if (registry == "conformal") return conformal_residuals(need_sf(sys), ro);
    if (registry == "standard") return standard_residuals(to_standard_gauge(need_sf(sys)), ro);
    if (registry == "flat") return flat_residuals(flat_gauge(need_sf(sys)), ro);
    if (registry == "proper") {
        try {
            return proper_residuals(need_sf(sys), ro);
        } catch (const NotProper& e) {
            ResidualReport r;
            r.entries["P:tau"] = entry(e.tau_max(), {}, dom.nx * dom.ny);
            return r;
        }
    }
    if (registry == "flat-correspondence") {
        const StructureFunctions sf = flat_gauge(need_sf(sys));
        FlatCorrespondence fc;
        try {
            fc = build_correspondence(sf);
        } catch (const NotProper& e) {
            ResidualReport r;
            r.entries["P:tau"] = entry(e.tau_max(), {}, dom.nx * dom.ny);
            return r;
        }
        ResidualReport r = obstruction_residuals(fc, ro);
        r.merge(evaluate({Equation{"beta-z", {Component{{fc.beta.dz()}}}}}, dom, ro));
        if (sys.spec.chart.phi() == Field(1.0)) {
            const Field c = correspondence_consistency(fc, sys.spec.V);
            r.merge(evaluate({Equation{"consistency", {Component{{c}}}}}, dom));
        }
        return r;
    }
    if (registry == "wilczynski") return wilczynski_residual(need_sf(sys), sys.spec.V, false, ro);
    if (registry == "bracket") {
        ResidualReport r;
        const auto pts = phase_samples(dom, opt.phase_samples, opt.seed);
        for (int a = 1; a <= static_cast<int>(sys.spec.integrals.size()); ++a) {
            const std::string& label = sys.spec.integral(a).label;
            const DefectScan d = defect_scan(sys.spec, a, pts);
            r.entries["bracket:" + label] = entry(d.value, {}, opt.phase_samples);
            r.entries["bracket:" + label + ":cubic"] = entry(d.cubic, {}, opt.phase_samples);
            r.entries["bracket:" + label + ":linear"] = entry(d.linear, {}, opt.phase_samples);
            r.entries["bracket:" + label + ":parity"] = entry(d.parity, {}, opt.phase_samples);
        }
        return r;
    }
    if (registry == "bertrand-darboux") {
        std::vector<Equation> eqs;
        for (std::size_t k = 0; k < sys.sources.size(); ++k) {
            const IntegralSource& s = sys.sources[k];
            const Field bd = s.kind == IntegralSource::conformal
                                 ? bertrand_darboux_residual(sys.spec.chart, s.a, s.b, sys.spec.V)
                                 : bertrand_darboux_killing(sys.spec.chart, s.a, s.b, sys.spec.V);
            eqs.push_back({"BD:" + sys.spec.integrals[k].label, {Component{{bd}}}});
        }
        return evaluate(eqs, dom);
    }
    if (registry == "sphere-constraint") {
        if (!sys.sphere_pair) throw std::invalid_argument("sphere-constraint needs a sphere_pair structure");
        ResidualEntry e;
        for (const ChartPoint& p : dom.grid()) {
            try {
                const double v = sphere_constraint_residual(sys.sphere_pair->first, sys.sphere_pair->second, p.z());
                if (v >= e.max_abs) e.max_abs = v, e.argmax = p;
                ++e.samples;
            } catch (const SingularDenominator&) {
                ++e.excluded;
            } catch (const DomainError&) {
                ++e.excluded;
            }
        }
        ResidualReport r;
        r.entries["sphere:Remn"] = e;
        return r;
    }
    throw std::invalid_argument("unknown registry '" + registry + "'");
}

const std::vector<CatalogEntry>& catalog()
{
    static const std::vector<CatalogEntry> entries = [] {
        std::vector<CatalogEntry> out;
        out.push_back({"harmonic-oscillator", "closed form",
                       json::parse(R"({
  "name": "harmonic-oscillator",
  "params": {"a0": 1.0, "a1": 1.0, "a2": 1.0, "a3": 0.0},
  "chart": {"kind": "flat", "domain": [-1.5, 1.5, -1.5, 1.5], "grid": [11, 11]},
  "structure": {"s": "0", "t": "0", "base": [0, 0]},
  "V": "a0*z*zbar + a1*(z + zbar) + i*a2*(z - zbar) + a3",
  "integrals": [
    {"label": "dx2", "kzz": "0.25", "kzw": "0.25", "W": "a0*x^2 + 2*a1*x"},
    {"label": "dxdy", "kzz": "-0.25*i", "kzw": "0", "W": "a0*x*y - a2*x + a1*y"}
  ],
  "registries": ["conformal", "standard", "flat", "proper", "flat-correspondence",
                 "wilczynski", "bracket", "bertrand-darboux"]
})")});
        // Structure read off from the Plücker coordinates of a generic pair;
        // the integrals are the restricted special conformal Killing tensors.
        out.push_back({"sphere-generic", "sphere pipeline",
                       json::parse(R"({
  "name": "sphere-generic",
  "chart": {"kind": "sphere", "domain": [0.1, 0.7, 0.15, 0.65], "grid": [11, 11]},
  "structure": {"sphere_pair": {"L1": [1, 0, 0, -1, 0, 0], "L2": [1, 0, 0, 1, 0, -2]}, "base": [0.4, 0.4]},
  "V": "0",
  "integrals": [
    {"label": "L1", "sphere_killing": [1, 0, 0, -1, 0, 0]},
    {"label": "L2", "sphere_killing": [1, 0, 0, 1, 0, -2]}
  ],
  "registries": ["conformal", "flat", "proper", "wilczynski", "bracket", "bertrand-darboux",
                 "sphere-constraint"]
})")});
        // Admissible seed from the root solver, closed-form D and beta.
        out.push_back({"flat-proper-seed", "reconstruct pipeline",
                       json::parse(R"({
  "name": "flat-proper-seed",
  "chart": {"kind": "flat", "domain": [-0.25, 0.25, -0.25, 0.25], "grid": [11, 11]},
  "structure": {"proper_flat_seed": {"s": [0.4, 0.2], "theta": 0.3}, "base": [0, 0]},
  "V": "0",
  "registries": ["conformal", "standard", "flat", "proper", "flat-correspondence"]
})")});
        return out;
    }();
    return entries;
}

const CatalogEntry& catalog_entry(const std::string& name)
{
    for (const auto& e : catalog())
        if (e.name == name) return e;
    throw std::out_of_range("no catalog entry '" + name + "'");
}

double fixed(double v)
{
    if (!std::isfinite(v) || v == 0.0) return v;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return std::strtod(buf, nullptr);
}

json report_json(const ResidualReport& r, double tol)
{
    json out = json::object();
    for (const auto& [name, e] : r.entries) {
        out[name] = {{"max_abs", fixed(e.max_abs)},
                     {"argmax", {fixed(e.argmax.x), fixed(e.argmax.y)}},
                     {"samples", e.samples},
                     {"excluded", e.excluded},
                     {"pass", e.max_abs < tol}};
    }
    return out;
}

json verify_report(const LoadedSystem& sys, std::vector<std::string> registries, const RegistryOptions& opt,
                   double tol)
{
    if (registries.empty()) registries = sys.registries;
    if (registries.empty()) registries = {"conformal"};
    json out;
    out["system"] = sys.name;
    out["tolerance"] = tol;
    out["mode"] = opt.relative ? "relative" : "absolute";
    json reports = json::object();
    std::vector<std::string> failing;
    double worst = 0.0;
    for (const auto& r : registries) {
        const ResidualReport rep = run_registry(sys, r, opt);
        reports[r] = report_json(rep, tol);
        for (const auto& f : rep.failing(tol)) failing.push_back(r + "/" + f);
        worst = std::max(worst, rep.max_abs());
    }
    out["registries"] = reports;
    out["max_abs"] = fixed(worst);
    out["failing"] = failing;
    out["pass"] = failing.empty();
    return out;
}

}  // namespace superint
