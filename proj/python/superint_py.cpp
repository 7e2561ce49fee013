#include "superint/catalog.hpp"

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace superint;

namespace {

py::object to_py(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

json from_py(const py::object& o) { return json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>()); }

// A catalog name or a spec dict.
LoadedSystem resolve(const py::object& spec, const std::map<std::string, std::string>& overrides)
{
    if (py::isinstance<py::str>(spec)) return load_system(catalog_entry(spec.cast<std::string>()).spec, overrides);
    return load_system(from_py(spec), overrides);
}

Sym3 sym3(const std::array<double, 6>& e) { return Sym3{e}; }

Sym3Q sym3q(const std::array<std::string, 6>& e)
{
    Sym3Q L;
    for (int k = 0; k < 6; ++k) {
        if (L.e[k].set_str(e[k], 10) != 0) throw SchemaError("not a rational: " + e[k]);
        L.e[k].canonicalize();
    }
    return L;
}

QC qc(const std::pair<std::string, std::string>& z)
{
    mpq_class re, im;
    if (re.set_str(z.first, 10) != 0 || im.set_str(z.second, 10) != 0) throw SchemaError("not a rational point");
    re.canonicalize();
    im.canonicalize();
    return {re, im};
}

std::pair<std::string, std::string> qc_str(const QC& v) { return {v.re.get_str(), v.im.get_str()}; }

}  // namespace

PYBIND11_MODULE(superint_py, m)
{
    m.doc() = "Superintegrable systems on surfaces: residual registries, reconstruction, sphere pipeline.";

    py::register_exception<SchemaError>(m, "SchemaError", PyExc_ValueError);
    py::register_exception<NotProper>(m, "NotProper", PyExc_ArithmeticError);
    py::register_exception<SeedObstruction>(m, "SeedObstruction", PyExc_ArithmeticError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ArithmeticError);
    py::register_exception<SingularDenominator>(m, "SingularDenominator", PyExc_ZeroDivisionError);

    py::class_<Field>(m, "Field")
        .def(py::init([](const std::string& text, const std::map<std::string, double>& params) {
                 return parse_field(text, params);
             }),
             py::arg("text"), py::arg("params") = std::map<std::string, double>{})
        .def("__call__", [](const Field& f, double x, double y) { return f.eval({x, y}); })
        .def("dz", &Field::dz)
        .def("dzbar", &Field::dzbar)
        .def("conj", &Field::conj)
        .def("is_zero", &Field::is_zero)
        .def("__str__", &Field::str)
        .def("__repr__", [](const Field& f) { return "Field('" + f.str() + "')"; })
        .def("__eq__", [](const Field& a, const Field& b) { return a == b; })
        .def("__add__", [](const Field& a, const Field& b) { return a + b; })
        .def("__sub__", [](const Field& a, const Field& b) { return a - b; })
        .def("__mul__", [](const Field& a, const Field& b) { return a * b; })
        .def("__truediv__", [](const Field& a, const Field& b) { return a / b; });

    m.def(
        "fd_probe",
        [](const Field& f, double x, double y, const std::string& var, double h) {
            return fd_probe(f, {x, y}, var == "z" ? Var::z : Var::zbar, h);
        },
        py::arg("field"), py::arg("x"), py::arg("y"), py::arg("var") = "z", py::arg("h") = 1e-4);

    m.def("catalog", [] {
        std::vector<std::string> names;
        for (const auto& e : catalog()) names.push_back(e.name);
        return names;
    });
    m.def("catalog_spec", [](const std::string& name) { return to_py(catalog_entry(name).spec); });
    m.def("registry_names", &registry_names);

    m.def(
        "verify",
        [](const py::object& spec, const std::vector<std::string>& registries, bool absolute, int samples,
           unsigned seed, double tolerance, const std::map<std::string, std::string>& overrides) {
            const LoadedSystem sys = resolve(spec, overrides);
            return to_py(verify_report(sys, registries, {!absolute, samples, seed}, tolerance));
        },
        py::arg("spec"), py::arg("registries") = std::vector<std::string>{}, py::arg("absolute") = false,
        py::arg("samples") = 100, py::arg("seed") = 1u, py::arg("tolerance") = 1e-9,
        py::arg("overrides") = std::map<std::string, std::string>{});

    m.def(
        "reconstruct",
        [](const py::object& spec, cplx target, int paths, const std::string& mode) {
            const LoadedSystem sys = resolve(spec, {});
            const StructureFunctions& sf = sys.spec.sf.value();
            const ChartPoint b = sf.base;
            const Field& V = sys.spec.V;
            const PotentialSeed seed{V.eval(b).real(), V.dz().eval(b), sf.chart.laplacian(V).eval(b).real()};
            const TauMode tm = mode == "proper" ? TauMode::proper : TauMode::conformal;
            std::vector<double> ends;
            for (const ChartPath& p : path_fan(b.z(), target, paths))
                ends.push_back(integrate_potential(sf, tm, seed, p).end()[0].real());
            py::dict out;
            out["endpoints"] = ends;
            out["discrepancy"] = potential_path_independence(sf, tm, seed, target, paths);
            out["spec_V"] = V.eval(ChartPoint::from_z(target)).real();
            return out;
        },
        py::arg("spec"), py::arg("target"), py::arg("paths") = 4, py::arg("mode") = "conformal");

    m.def(
        "endpoint_ranks",
        [](const py::object& spec, cplx target) {
            const LoadedSystem sys = resolve(spec, {});
            const StructureFunctions& sf = sys.spec.sf.value();
            return std::make_pair(potential_endpoint_map(sf, TauMode::proper, target).rank(),
                                  killing_endpoint_map(sf, target).rank());
        },
        py::arg("spec"), py::arg("target"));

    m.def(
        "propagated_obstructions",
        [](cplx s, double theta, int n) {
            const auto po = propagated_obstructions(solve_proper_flat_seed(s, theta),
                                                    {-0.25, 0.25, -0.25, 0.25, n, n}, {0, 0});
            py::dict out;
            out["D3z"] = po.d3z;
            out["D3w"] = po.d3w;
            out["D2z2w"] = po.d2z2w;
            out["fit_residual"] = po.fit_residual;
            out["points"] = po.points;
            return out;
        },
        py::arg("s"), py::arg("theta"), py::arg("n") = 5);

    m.def(
        "sphere_constraint",
        [](const std::array<double, 6>& L1, const std::array<double, 6>& L2, cplx z) {
            return sphere_constraint_component(sym3(L1), sym3(L2), z);
        },
        py::arg("L1"), py::arg("L2"), py::arg("z"));
    m.def(
        "cleared_polynomial",
        [](const std::array<double, 6>& L1, const std::array<double, 6>& L2, cplx z) {
            return cleared_polynomial_float(sym3(L1), sym3(L2), z);
        },
        py::arg("L1"), py::arg("L2"), py::arg("z"));
    m.def(
        "cleared_polynomial_exact",
        [](const std::array<std::string, 6>& L1, const std::array<std::string, 6>& L2,
           const std::pair<std::string, std::string>& z) { return qc_str(cleared_polynomial(sym3q(L1), sym3q(L2), qc(z))); },
        py::arg("L1"), py::arg("L2"), py::arg("z"));
    m.def(
        "plucker_relations_exact",
        [](const std::array<std::string, 6>& L1, const std::array<std::string, 6>& L2,
           const std::pair<std::string, std::string>& z) {
            return plucker_relations_exact(plucker(sym3q(L1), sym3q(L2), qc(z)));
        },
        py::arg("L1"), py::arg("L2"), py::arg("z"));

    m.def(
        "tensor_identity_check",
        [](unsigned seed, int draws) { return tensor_identity_check(seed, draws).max_abs(); }, py::arg("seed") = 1u,
        py::arg("draws") = 100);
}
