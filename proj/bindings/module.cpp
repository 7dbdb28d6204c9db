// Python bindings for the main library operations. All entry points take the
// deformation parameter q directly and build the evaluation context
// internally; parities and scan predicates are passed as strings.

#include "qcat/completeness.hpp"
#include "qcat/fockspace.hpp"
#include "qcat/observables.hpp"
#include "qcat/qcalculus.hpp"
#include "qcat/qkernel.hpp"
#include "qcat/states.hpp"

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <complex>
#include <tuple>
#include <vector>

namespace py = pybind11;

namespace {

qcat::Parity parse_parity(const std::string& s) {
    if (s == "even")
        return qcat::Parity::even;
    if (s == "odd")
        return qcat::Parity::odd;
    if (s == "full")
        return qcat::Parity::full;
    throw qcat::Error(qcat::errc::domain, "unknown parity: " + s);
}

qcat::ScanPredicate parse_predicate(const std::string& s) {
    if (s == "j-negative")
        return qcat::ScanPredicate::j_negative;
    if (s == "coth-lt-1")
        return qcat::ScanPredicate::coth_bar_lt_1;
    if (s == "su11-squeezed")
        return qcat::ScanPredicate::su11_squeezed;
    throw qcat::Error(qcat::errc::domain, "unknown predicate: " + s);
}

qcat::CoherentFamilySpec make_spec(double xi, double theta, long charge,
                                   const std::string& parity) {
    qcat::CoherentFamilySpec spec;
    spec.xi_modulus = xi;
    spec.xi_phase = theta;
    spec.charge = charge;
    spec.parity = parse_parity(parity);
    return spec;
}

} // namespace

PYBIND11_MODULE(_qcat, m) {
    m.doc() = "even/odd q-deformed charge coherent states: core numerics";

    py::register_exception<qcat::Error>(m, "QcatError", PyExc_ValueError);

    m.def(
        "qnumber",
        [](double q, long n) { return qcat::qnumber(qcat::QContext(q), n); },
        py::arg("q"), py::arg("n"), "symmetric bracket (q^n - q^-n)/(q - 1/q)");

    m.def(
        "qfactorial",
        [](double q, long n) { return qcat::qfactorial(qcat::QContext(q), n); },
        py::arg("q"), py::arg("n"));

    m.def(
        "qexp", [](double q, double x) { return qcat::qexp(qcat::QContext(q), x); },
        py::arg("q"), py::arg("x"),
        "piecewise q-exponential; exactly 0 at and below its largest negative zero");

    m.def(
        "find_zeta", [](double q) { return qcat::find_zeta(qcat::QContext(q)); }, py::arg("q"),
        "largest zero -zeta of the q-exponential");

    m.def(
        "qbessel_j",
        [](double q, int nu, double x) { return qcat::qbessel_j(qcat::QContext(q), nu, x); },
        py::arg("q"), py::arg("nu"), py::arg("x"));

    m.def(
        "state_coefficients",
        [](double q, long charge, double xi, double theta, const std::string& parity,
           int n_max) {
            qcat::QContext ctx(q);
            qcat::CoherentFamilySpec spec = make_spec(xi, theta, charge, parity);
            qcat::TruncatedSpace space = qcat::build_space(ctx, n_max);
            qcat::TwoModeState st = spec.parity == qcat::Parity::full
                                        ? qcat::charge_coherent(ctx, spec, space)
                                        : qcat::even_odd_charge_coherent(ctx, spec, space);
            std::vector<std::tuple<int, int, std::complex<double>>> out;
            int side = n_max + 1;
            for (int mm = 0; mm <= n_max; ++mm)
                for (int nn = 0; nn <= n_max; ++nn) {
                    std::complex<double> c = st.coeff[mm * side + nn];
                    if (c != std::complex<double>(0.0, 0.0))
                        out.emplace_back(mm, nn, c);
                }
            return out;
        },
        py::arg("q"), py::arg("charge"), py::arg("xi"), py::arg("theta") = 0.0,
        py::arg("parity") = "full", py::arg("n_max") = 40,
        "nonzero Fock coefficients as (m, n, value) tuples");

    m.def(
        "overlap",
        [](double q, long charge1, double xi1, double theta1, const std::string& parity1,
           long charge2, double xi2, double theta2, const std::string& parity2, int n_max) {
            qcat::QContext ctx(q);
            return qcat::overlap(ctx, make_spec(xi1, theta1, charge1, parity1),
                                 make_spec(xi2, theta2, charge2, parity2), n_max);
        },
        py::arg("q"), py::arg("charge1"), py::arg("xi1"), py::arg("theta1"), py::arg("parity1"),
        py::arg("charge2"), py::arg("xi2"), py::arg("theta2"), py::arg("parity2"),
        py::arg("n_max") = 40);

    m.def(
        "hyperbolic_ratios",
        [](double q, double xi_sq, long charge) {
            return qcat::hyperbolic_ratios(qcat::QContext(q), xi_sq, charge);
        },
        py::arg("q"), py::arg("xi_sq"), py::arg("charge"),
        "(tanh-bar, coth-bar) of the parity-split sector series");

    m.def(
        "su11_variances",
        [](double q, long charge, double xi, double theta, const std::string& parity,
           int n_max) {
            qcat::QContext ctx(q);
            qcat::QuadratureReport rep =
                qcat::su11_variances(ctx, make_spec(xi, theta, charge, parity), theta, n_max);
            py::dict d;
            d["variance1"] = rep.variance1;
            d["variance2"] = rep.variance2;
            d["fock_variance1"] = rep.fock_variance1;
            d["fock_variance2"] = rep.fock_variance2;
            d["bound"] = rep.bound;
            d["squeezed1"] = rep.squeezed1;
            d["squeezed2"] = rep.squeezed2;
            return d;
        },
        py::arg("q"), py::arg("charge"), py::arg("xi"), py::arg("theta"), py::arg("parity"),
        py::arg("n_max") = 40);

    m.def(
        "correlation_g",
        [](double q, long charge, double xi, const std::string& parity, int n_max) {
            qcat::QContext ctx(q);
            qcat::CorrelationReport rep =
                qcat::correlation_routes(ctx, make_spec(xi, 0.0, charge, parity), n_max);
            py::dict d;
            d["closed"] = rep.closed;
            d["fock"] = rep.fock;
            d["antibunched"] = rep.antibunched;
            return d;
        },
        py::arg("q"), py::arg("charge"), py::arg("xi"), py::arg("parity"),
        py::arg("n_max") = 40);

    m.def(
        "squeezing_scan",
        [](double q, long charge, const std::string& predicate, double lo, double hi,
           double resolution) {
            qcat::QContext ctx(q);
            qcat::ScanReport rep =
                qcat::squeezing_scan(ctx, charge, parse_predicate(predicate), lo, hi, resolution);
            std::vector<std::pair<double, double>> out;
            for (const auto& iv : rep.intervals)
                out.emplace_back(iv.lo, iv.hi);
            return out;
        },
        py::arg("q"), py::arg("charge"), py::arg("predicate"), py::arg("lo") = 0.0,
        py::arg("hi") = 10.0, py::arg("resolution") = 1e-2,
        "list of (lo, hi) intervals where the predicate holds");

    m.def(
        "radial_moment_check",
        [](double q, int n, long charge) {
            qcat::MomentCheckResult r = qcat::radial_moment_check(qcat::QContext(q), n, charge);
            py::dict d;
            d["computed"] = r.computed;
            d["expected"] = r.expected;
            d["relative_error"] = r.relative_error;
            return d;
        },
        py::arg("q"), py::arg("n"), py::arg("charge"));
}
