#include "superint/catalog.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace superint;

namespace {

enum Exit { ok = 0, residual_fail = 1, schema_fail = 2, domain_fail = 3 };

struct Common {
    std::string spec;
    std::vector<std::string> overrides;
    std::vector<int> grid;
    std::string out;
};

json read_spec(const std::string& arg)
{
    if (std::filesystem::exists(arg)) {
        std::ifstream in(arg);
        try {
            return json::parse(in);
        } catch (const json::parse_error& e) {
            throw SchemaError(std::string("invalid JSON: ") + e.what());
        }
    }
    try {
        return catalog_entry(arg).spec;
    } catch (const std::out_of_range&) {
        throw SchemaError("'" + arg + "' is neither a file nor a catalog entry");
    }
}

LoadedSystem load(const Common& c)
{
    json j = read_spec(c.spec);
    if (!c.grid.empty()) {
        if (!j.contains("chart")) j["chart"] = json::object();
        j["chart"]["grid"] = c.grid;
    }
    std::map<std::string, std::string> ov;
    for (const auto& o : c.overrides) {
        auto eq = o.find('=');
        if (eq == std::string::npos) throw SchemaError("override must be key=field: " + o);
        ov[o.substr(0, eq)] = o.substr(eq + 1);
    }
    return load_system(j, ov);
}

void emit(const json& j, const std::string& out)
{
    const std::string text = j.dump(2) + "\n";
    if (out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out);
    f << text;
}

json cplx_json(cplx v) { return {fixed(v.real()), fixed(v.imag())}; }

std::vector<std::string> split(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

// Integers, fractions ("3/4") or decimals ("0.25") to exact rationals.
mpq_class rational(const std::string& s)
{
    std::string t = s;
    mpq_class q;
    auto dot = t.find('.');
    if (dot != std::string::npos) {
        std::string digits = t.substr(0, dot) + t.substr(dot + 1);
        std::string den = "1" + std::string(t.size() - dot - 1, '0');
        t = digits + "/" + den;
    }
    if (q.set_str(t, 10) != 0) throw SchemaError("not a rational: " + s);
    q.canonicalize();
    return q;
}

std::string qstr(const mpq_class& q) { return q.get_str(); }
json qc_json(const QC& v) { return {qstr(v.re), qstr(v.im)}; }

int cmd_verify(const Common& c, const std::string& registries, double tol, bool absolute, int samples,
               unsigned seed)
{
    const LoadedSystem sys = load(c);
    RegistryOptions opt;
    opt.relative = !absolute;
    opt.phase_samples = samples;
    opt.seed = seed;
    const json out = verify_report(sys, split(registries), opt, tol);
    emit(out, c.out);
    return out["pass"].get<bool>() ? ok : residual_fail;
}

int cmd_reconstruct(const Common& c, const std::vector<double>& seed_in, const std::vector<double>& target_in,
                    int paths, const std::string& mode, double tol, const std::vector<double>& pf_seed)
{
    json out;
    IntegratorOptions opt;
    if (!pf_seed.empty()) {
        const ProperFlatSeed seed{{pf_seed[0], pf_seed[1]}, {pf_seed[2], pf_seed[3]}, {pf_seed[4], pf_seed[5]}};
        const cplx target{target_in[0], target_in[1]};
        const Trajectory tr = integrate_structure_proper_flat(seed, ChartPath::straight(0.0, target), opt);
        const auto& y = tr.end();
        out["endpoint"] = {{"s", cplx_json(y[0])}, {"xi", cplx_json(y[1])}, {"tz", cplx_json(y[2])},
                           {"t", fixed(y[3].real())}};
        out["warnings"] = tr.warnings;
        emit(out, c.out);
        return ok;
    }

    const LoadedSystem sys = load(c);
    const StructureFunctions& sf = sys.spec.sf.value();
    const ChartPoint b = sf.base;
    PotentialSeed seed;
    bool from_spec = seed_in.empty();
    if (from_spec) {
        const Field& V = sys.spec.V;
        seed.V0 = V.eval(b).real();
        seed.Vz0 = V.dz().eval(b);
        seed.DeltaV0 = sf.chart.laplacian(V).eval(b).real();
    } else {
        seed = {seed_in[0], {seed_in[1], seed_in[2]}, seed_in[3]};
    }
    const cplx target{target_in[0], target_in[1]};
    const TauMode tm = mode == "proper" ? TauMode::proper : TauMode::conformal;

    json ends = json::array();
    std::vector<std::string> warnings;
    for (const ChartPath& p : path_fan(b.z(), target, paths)) {
        const Trajectory tr = integrate_potential(sf, tm, seed, p, opt);
        const auto& y = tr.end();
        ends.push_back({{"V", fixed(y[0].real())}, {"Vz", cplx_json(y[1])}, {"DeltaV", fixed(y[3].real())}});
        for (const auto& w : tr.warnings)
            if (std::find(warnings.begin(), warnings.end(), w) == warnings.end()) warnings.push_back(w);
    }
    const double disc = potential_path_independence(sf, tm, seed, target, paths, opt);
    out["system"] = sys.name;
    out["seed"] = {{"V", fixed(seed.V0)}, {"Vz", cplx_json(seed.Vz0)}, {"DeltaV", fixed(seed.DeltaV0)}};
    out["target"] = cplx_json(target);
    out["endpoints"] = ends;
    out["discrepancy"] = fixed(disc);
    out["warnings"] = warnings;
    if (from_spec) {
        const double exact = sys.spec.V.eval(ChartPoint::from_z(target)).real();
        out["spec_V"] = fixed(exact);
        out["spec_mismatch"] = fixed(std::abs(ends[0]["V"].get<double>() - exact));
    }
    emit(out, c.out);
    return disc < tol ? ok : residual_fail;
}

int cmd_sphere(const Common& c, const std::vector<std::string>& l1, const std::vector<std::string>& l2,
               const std::vector<std::string>& dom, bool exact)
{
    const int nx = c.grid.empty() ? 5 : c.grid[0];
    const int ny = c.grid.empty() ? 5 : c.grid[1];
    std::array<mpq_class, 4> d;
    for (int k = 0; k < 4; ++k) d[k] = rational(dom[k]);
    Sym3Q Q1, Q2;
    for (int k = 0; k < 6; ++k) Q1.e[k] = rational(l1[k]), Q2.e[k] = rational(l2[k]);
    const Sym3 L1 = to_double(Q1), L2 = to_double(Q2);

    json pts = json::array();
    int singular = 0;
    double worst = 0.0;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const mpq_class x = nx == 1 ? d[0] : mpq_class(d[0] + (d[1] - d[0]) * i / (nx - 1));
            const mpq_class y = ny == 1 ? d[2] : mpq_class(d[2] + (d[3] - d[2]) * j / (ny - 1));
            json p;
            if (exact) {
                const QC z{x, y};
                p["z"] = qc_json(z);
                p["plucker_exact"] = plucker_relations_exact(plucker(Q1, Q2, z));
                try {
                    p["F"] = qc_json(sphere_constraint_exact(Q1, Q2, z));
                    p["cleared"] = qc_json(cleared_polynomial(Q1, Q2, z));
                } catch (const SingularDenominator&) {
                    p["singular"] = true;
                    ++singular;
                }
            } else {
                const cplx z{x.get_d(), y.get_d()};
                p["z"] = cplx_json(z);
                p["plucker_max"] = fixed(plucker_relations_max(plucker(L1, L2, stereographic_inverse(z))));
                try {
                    p["F"] = cplx_json(sphere_constraint_component(L1, L2, z));
                    const double r = sphere_constraint_residual(L1, L2, z);
                    p["residual"] = fixed(r);
                    worst = std::max(worst, r);
                    p["cleared"] = cplx_json(cleared_polynomial_float(L1, L2, z));
                } catch (const SingularDenominator&) {
                    p["singular"] = true;
                    ++singular;
                }
            }
            pts.push_back(p);
        }
    }
    json out;
    out["mode"] = exact ? "exact" : "float";
    out["L1"] = l1;
    out["L2"] = l2;
    out["grid"] = {nx, ny};
    out["points"] = pts;
    out["singular"] = singular;
    if (!exact) out["max_residual"] = fixed(worst);
    emit(out, c.out);
    return ok;
}

int cmd_bracket(const Common& c, int samples, unsigned seed, double tol)
{
    const LoadedSystem sys = load(c);
    const auto pts = phase_samples(sys.spec.chart.domain(), samples, seed);
    json out;
    out["system"] = sys.name;
    out["samples"] = samples;
    json integrals = json::object();
    bool pass = true;
    for (int a = 1; a <= static_cast<int>(sys.spec.integrals.size()); ++a) {
        const DefectScan d = defect_scan(sys.spec, a, pts);
        integrals[sys.spec.integral(a).label] = {{"defect", fixed(d.value)},
                                                 {"cubic", fixed(d.cubic)},
                                                 {"linear", fixed(d.linear)},
                                                 {"parity", fixed(d.parity)}};
        pass = pass && d.value < tol && d.cubic < tol && d.linear < tol;
    }
    double smin = std::numeric_limits<double>::infinity();
    for (const auto& p : pts) {
        auto sv = independence_singular_values(sys.spec, p);
        smin = std::min(smin, sv.back());
    }
    out["integrals"] = integrals;
    out["min_singular_value"] = fixed(smin);
    out["pass"] = pass;
    emit(out, c.out);
    return pass ? ok : residual_fail;
}

void add_common(CLI::App* sub, Common& c, bool spec = true)
{
    if (spec) sub->add_option("spec", c.spec, "SystemSpec JSON file or catalog entry name")->required();
    sub->add_option("--override", c.overrides, "Replace s, t, tz or V: key=field");
    sub->add_option("--grid", c.grid, "Grid size NX NY")->expected(2);
    sub->add_option("--out", c.out, "Write the report to FILE instead of stdout");
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Verify and reconstruct second-order superintegrable systems on surfaces"};
    app.require_subcommand(1);
    double tol = 1e-9;
    app.add_option("--tolerance", tol, "Residual tolerance")->capture_default_str();

    Common c;
    std::string registries;
    bool absolute = false;
    int samples = 100;
    unsigned seed = 1;
    auto* verify = app.add_subcommand("verify", "Run residual registries on a system");
    add_common(verify, c);
    verify->add_option("--registry", registries, "Comma-separated registries (default: the spec's list)");
    verify->add_flag("--absolute", absolute, "Absolute instead of term-scaled residuals");
    verify->add_option("--samples", samples, "Phase samples for the bracket registry")->capture_default_str();
    verify->add_option("--seed", seed, "Sampling seed")->capture_default_str();

    std::vector<double> pot_seed, target{1.0, 1.0}, pf_seed;
    int paths = 4;
    std::string mode = "conformal";
    auto* rec = app.add_subcommand("reconstruct", "Integrate the potential prolongation along a path fan");
    add_common(rec, c, false);
    rec->add_option("spec", c.spec, "SystemSpec JSON file or catalog entry name");
    rec->add_option("--seed", pot_seed, "V, Re V_z, Im V_z, Laplacian V at the base (default: from the spec's V)")
        ->expected(4);
    rec->add_option("--target", target, "Target point x y")->expected(2);
    rec->add_option("--paths", paths, "Number of paths")->capture_default_str();
    rec->add_option("--mode", mode, "conformal or proper")->check(CLI::IsMember({"conformal", "proper"}));
    rec->add_option("--proper-flat-seed", pf_seed, "Propagate flat proper data (s, xi, t_z as 6 reals) instead")
        ->expected(6);

    std::vector<std::string> l1, l2, dom{"1/10", "7/10", "3/20", "13/20"};
    bool exact = false;
    auto* sph = app.add_subcommand("sphere", "Scan the sphere constraint for a pair of ambient tensors");
    add_common(sph, c, false);
    sph->add_option("--L1", l1, "xx xy xz yy yz zz")->expected(6)->required();
    sph->add_option("--L2", l2, "xx xy xz yy yz zz")->expected(6)->required();
    sph->add_option("--domain", dom, "x0 x1 y0 y1")->expected(4);
    sph->add_flag("--exact", exact, "Rational arithmetic, results as strings");

    auto* br = app.add_subcommand("bracket", "Integral defects and functional independence");
    add_common(br, c);
    br->add_option("--samples", samples, "Phase samples")->capture_default_str();
    br->add_option("--seed", seed, "Sampling seed")->capture_default_str();

    std::string name;
    auto* cat = app.add_subcommand("catalog", "List catalog entries or dump one as JSON");
    cat->add_option("name", name, "Entry to dump");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : schema_fail;
    }

    try {
        if (*verify) return cmd_verify(c, registries, tol, absolute, samples, seed);
        if (*rec) {
            if (pf_seed.empty() && c.spec.empty()) throw SchemaError("reconstruct needs a spec or --proper-flat-seed");
            return cmd_reconstruct(c, pot_seed, target, paths, mode, 1e-8, pf_seed);
        }
        if (*sph) return cmd_sphere(c, l1, l2, dom, exact);
        if (*br) return cmd_bracket(c, samples, seed, tol);
        if (*cat) {
            if (name.empty()) {
                for (const auto& e : catalog()) std::cout << e.name << "\t" << e.provenance << "\n";
            } else {
                std::cout << catalog_entry(name).spec.dump(2) << "\n";
            }
            return ok;
        }
    } catch (const SeedObstruction& e) {
        emit({{"error", "SeedObstruction"}, {"remn", fixed(e.remn())}, {"dremn", fixed(e.dremn())}}, c.out);
        return domain_fail;
    } catch (const SchemaError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return schema_fail;
    } catch (const json::exception& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return schema_fail;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << "\n";
        return schema_fail;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return schema_fail;
    } catch (const std::bad_optional_access&) {
        std::cerr << "error: the system has no structure functions\n";
        return schema_fail;
    } catch (const std::exception& e) {
        // DomainError, DomainExit, StepFailure, NotFlatGauge, NorthPole,
        // SingularDenominator, NotProper.
        std::cerr << "aborted: " << e.what() << "\n";
        return domain_fail;
    }
    return ok;
}
