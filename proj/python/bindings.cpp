#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "comodep/analytic.hpp"
#include "comodep/empirical.hpp"
#include "comodep/errors.hpp"
#include "comodep/oracle.hpp"
#include "comodep/simulate.hpp"

namespace py = pybind11;
using namespace comodep;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

SampleMatrix to_sample(const Array& a) {
    if (a.ndim() != 2) throw InvalidArgument("expected a 2-D array (rows = observations)");
    const auto n = static_cast<std::size_t>(a.shape(0));
    const auto m = static_cast<std::size_t>(a.shape(1));
    return SampleMatrix(n, m, std::vector<double>(a.data(), a.data() + n * m));
}

Array to_array(const SampleMatrix& s) {
    Array out({s.rows(), s.cols()});
    std::copy(s.data().begin(), s.data().end(), out.mutable_data());
    return out;
}

std::vector<Marginal> margins(const std::string& kind, std::size_t m) {
    if (kind == "uniform") return std::vector<Marginal>(m, Marginal::uniform(0.0, 1.0));
    if (kind == "exp1") return std::vector<Marginal>(m, Marginal::exponential(1.0));
    throw InvalidArgument("margins must be 'uniform' or 'exp1'");
}

QuadratureSpec spec(double tolerance) {
    QuadratureSpec q;
    q.tolerance = tolerance;
    return q;
}

py::dict ratio_dict(const analytic::RatioResult& r) {
    py::dict d;
    d["value"] = r.value;
    d["numerator"] = r.numerator;
    d["denominator"] = r.denominator;
    d["error"] = r.error;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
    mod.doc() = "Comonotonicity-based dependence measures";

    auto base = py::register_exception<Error>(mod, "Error", PyExc_RuntimeError);
    py::register_exception<InvalidArgument>(mod, "InvalidArgument", base.ptr());
    py::register_exception<MomentUndefined>(mod, "MomentUndefined", base.ptr());
    py::register_exception<QuadratureNotConverged>(mod, "QuadratureNotConverged", base.ptr());
    py::register_exception<DimensionUnsupported>(mod, "DimensionUnsupported", base.ptr());
    py::register_exception<DegenerateDenominator>(mod, "DegenerateDenominator", base.ptr());
    py::register_exception<InadmissibleCopula>(mod, "InadmissibleCopula", base.ptr());
    py::register_exception<ModelNotSamplable>(mod, "ModelNotSamplable", base.ptr());
    py::register_exception<ParseError>(mod, "ParseError", base.ptr());

    py::class_<JointModel>(mod, "JointModel")
        .def_property_readonly("dim", &JointModel::dim)
        .def("__repr__", &JointModel::describe);

    mod.def("fgm2_model", [](double alpha, const std::string& m) {
        return JointModel::copula_model(Copula::fgm2(alpha), margins(m, 2));
    }, py::arg("alpha"), py::arg("margins") = "uniform");
    mod.def("egm3_model", [](double a12, double a13, double a23, double a123, const std::string& m) {
        return JointModel::copula_model(Copula::egm3(a12, a13, a23, a123), margins(m, 3));
    }, py::arg("a12"), py::arg("a13"), py::arg("a23"), py::arg("a123"), py::arg("margins") = "uniform");
    mod.def("independent_model", [](std::size_t dim, const std::string& m) {
        return JointModel::copula_model(Copula::independent(dim), margins(m, dim));
    }, py::arg("dim"), py::arg("margins") = "uniform");
    mod.def("comonotone_model", [](std::size_t dim, const std::string& m) {
        return JointModel::copula_model(Copula::comonotone(dim), margins(m, dim));
    }, py::arg("dim"), py::arg("margins") = "uniform");
    mod.def("pareto3_model", [](double alpha, double alpha0) { return JointModel::pareto3(alpha, alpha0); },
            py::arg("alpha"), py::arg("alpha0"));
    mod.def("gaussian_model", [](const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov) {
        return JointModel::gaussian(mean, cov);
    }, py::arg("mean"), py::arg("cov"));

    mod.def("rho_hat_general", [](const Array& y) { return empirical::rho_hat_general(to_sample(y)); });
    mod.def("rho_hat_nonneg", [](const Array& y) { return empirical::rho_hat_nonneg(to_sample(y)); });
    mod.def("rho_c_hat", [](const Array& y) { return empirical::rho_c_hat(to_sample(y)); });
    mod.def("kappa_hat", [](const Array& y) { return empirical::kappa_hat(to_sample(y)); });
    mod.def("classical_hat", [](const Array& y) {
        const auto c = empirical::classical_hat(to_sample(y));
        py::dict d;
        d["pearson"] = c.pearson;
        d["kendall"] = c.kendall;
        d["spearman"] = c.spearman;
        d["gini"] = c.gini;
        d["blomqvist"] = c.blomqvist;
        return d;
    });

    mod.def("fgm_rho_closed", [](double alpha, const std::string& m) {
        if (m == "uniform") return analytic::fgm_rho_closed(alpha, analytic::FgmMargins::uniform01);
        if (m == "exp1") return analytic::fgm_rho_closed(alpha, analytic::FgmMargins::exp1);
        throw InvalidArgument("margins must be 'uniform' or 'exp1'");
    }, py::arg("alpha"), py::arg("margins") = "uniform");
    mod.def("egm3_rho", [](double a, double b, double c, double d) { return analytic::egm3_rho({a, b, c, d}); });
    mod.def("egm3_kappa", [](double a, double b, double c, double d) { return analytic::egm3_kappa({a, b, c, d}); });
    mod.def("egm3_rho_c", [](double a, double b, double c, double d) { return analytic::egm3_rho_c({a, b, c, d}); });
    mod.def("pareto3_rho", [](double alpha0, double alpha, const std::string& variant) {
        if (variant == "corrected") return analytic::pareto3_rho(alpha0, alpha, analytic::ParetoVariant::corrected);
        if (variant == "paper") return analytic::pareto3_rho(alpha0, alpha, analytic::ParetoVariant::paper);
        throw InvalidArgument("variant must be 'corrected' or 'paper'");
    }, py::arg("alpha0"), py::arg("alpha"), py::arg("variant") = "corrected");
    mod.def("pareto3_rho_c", &analytic::pareto3_rho_c, py::arg("alpha0"), py::arg("alpha"));
    mod.def("gaussian_product_moment", &analytic::gaussian_product_moment, py::arg("mean"), py::arg("cov"));
    mod.def("gaussian_rho", &analytic::gaussian_rho, py::arg("mean"), py::arg("cov"));
    mod.def("gaussian_rho_c", &analytic::gaussian_rho_c, py::arg("cov"));

    mod.def("rho_from_copula", [](const JointModel& model, double tol) {
        return ratio_dict(analytic::rho_from_copula(model, spec(tol)));
    }, py::arg("model"), py::arg("tolerance") = 1e-10);
    mod.def("tail_integral_rho", [](const JointModel& model, double tol) {
        return ratio_dict(oracle::tail_integral_rho(model, spec(tol)));
    }, py::arg("model"), py::arg("tolerance") = 1e-10);
    mod.def("discrete_rho", [](const Array& points, const std::vector<double>& probs) {
        const auto s = to_sample(points);
        if (probs.size() != s.rows()) throw InvalidArgument("one probability per point is required");
        std::vector<DiscreteAtom> atoms;
        for (std::size_t i = 0; i < s.rows(); ++i) {
            const auto r = s.row(i);
            atoms.push_back({std::vector<double>(r.begin(), r.end()), probs[i]});
        }
        return oracle::discrete_rho(DiscreteJoint(std::move(atoms)));
    }, py::arg("points"), py::arg("probs"));
    mod.def("mc_rho", [](const JointModel& model, std::size_t n, std::uint64_t seed) {
        const auto r = oracle::mc_rho(model, n, seed);
        return py::make_tuple(r.value, r.std_error);
    }, py::arg("model"), py::arg("n"), py::arg("seed"));

    mod.def("sample", [](const JointModel& model, std::size_t n, std::uint64_t seed) {
        return to_array(simulate::sample(model, n, seed));
    }, py::arg("model"), py::arg("n"), py::arg("seed"));
}
