#include "comodep/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/math/special_functions/erf.hpp>

#include "comodep/errors.hpp"
#include "comodep/quadrature.hpp"

namespace comodep {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_open_unit(double p, const char* what) {
    if (!(p > 0.0 && p < 1.0)) {
        throw InvalidArgument(std::string(what) + ": probability must lie in (0, 1), got " + std::to_string(p));
    }
}

// Smallest k in 1..n with k/n >= p.
std::size_t empirical_rank(std::size_t n, double p) {
    const double nd = static_cast<double>(n);
    auto k = static_cast<std::size_t>(std::ceil(nd * p));
    k = std::clamp<std::size_t>(k, 1, n);
    while (k > 1 && static_cast<double>(k - 1) / nd >= p) --k;
    while (k < n && static_cast<double>(k) / nd < p) ++k;
    return k;
}

}  // namespace

// ---------------------------------------------------------------------------
// Normal helpers
// ---------------------------------------------------------------------------

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_quantile(double p) {
    require_open_unit(p, "normal_quantile");
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double bivariate_normal_cdf_excess(double h, double k, double r) {
    if (!(r >= -1.0 && r <= 1.0)) throw InvalidArgument("bivariate_normal_cdf: correlation outside [-1, 1]");
    if (std::isinf(h) || std::isinf(k) || r == 0.0) return 0.0;
    if (r == 1.0) return normal_cdf(std::min(h, k)) - normal_cdf(h) * normal_cdf(k);
    if (r == -1.0) return std::max(0.0, normal_cdf(h) - normal_cdf(-k)) - normal_cdf(h) * normal_cdf(k);
    // d/dr Phi2 = phi2; with r = sin(theta) the integrand stays bounded as |r| -> 1.
    static const auto rule = [] {
        std::vector<double> x, w;
        gauss_legendre(48, x, w);
        return std::pair{x, w};
    }();
    const double upper = std::asin(r);
    const double hk = h * k;
    const double hh = 0.5 * (h * h + k * k);
    double sum = 0.0;
    // Two panels so the steep end near |theta| = pi/2 gets its own nodes.
    const double split = 0.75 * upper;
    for (int panel = 0; panel < 2; ++panel) {
        const double a = panel == 0 ? 0.0 : split;
        const double b = panel == 0 ? split : upper;
        const double half = 0.5 * (b - a);
        const double mid = 0.5 * (a + b);
        for (std::size_t i = 0; i < rule.first.size(); ++i) {
            const double theta = mid + half * rule.first[i];
            const double s = std::sin(theta);
            const double c2 = 1.0 - s * s;
            if (c2 <= 0.0) continue;
            sum += half * rule.second[i] * std::exp(-(hh - hk * s) / c2);
        }
    }
    return sum / (2.0 * std::numbers::pi);
}

double bivariate_normal_cdf(double h, double k, double r) {
    if (h == -kInf || k == -kInf) return 0.0;
    if (h == kInf) return normal_cdf(k);
    if (k == kInf) return normal_cdf(h);
    if (r == 1.0) return normal_cdf(std::min(h, k));
    if (r == -1.0) return std::max(0.0, normal_cdf(h) - normal_cdf(-k));
    return normal_cdf(h) * normal_cdf(k) + bivariate_normal_cdf_excess(h, k, r);
}

// ---------------------------------------------------------------------------
// Marginal
// ---------------------------------------------------------------------------

Marginal Marginal::uniform(double lo, double hi) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo)) throw InvalidArgument("Uniform: need finite lo < hi");
    return Marginal(Uniform{lo, hi});
}

Marginal Marginal::exponential(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) throw InvalidArgument("Exponential: rate must be positive");
    return Marginal(Exponential{rate});
}

Marginal Marginal::pareto2(double location, double scale, double shape) {
    if (!std::isfinite(location)) throw InvalidArgument("ParetoII: location must be finite");
    if (!(scale > 0.0) || !std::isfinite(scale)) throw InvalidArgument("ParetoII: scale must be positive");
    if (!(shape > 0.0) || !std::isfinite(shape)) throw InvalidArgument("ParetoII: shape must be positive");
    return Marginal(ParetoII{location, scale, shape});
}

Marginal Marginal::normal(double mean, double sd) {
    if (!std::isfinite(mean)) throw InvalidArgument("Normal: mean must be finite");
    if (!(sd > 0.0) || !std::isfinite(sd)) throw InvalidArgument("Normal: sd must be positive");
    return Marginal(Normal{mean, sd});
}

Marginal Marginal::empirical(std::vector<double> values) {
    if (values.empty()) throw InvalidArgument("EmpiricalColumn: values must be nonempty");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) throw InvalidArgument("EmpiricalColumn: values must be finite");
        if (i > 0 && values[i] < values[i - 1]) throw InvalidArgument("EmpiricalColumn: values must be ascending");
    }
    return Marginal(EmpiricalColumn{std::move(values)});
}

Marginal Marginal::empirical_unsorted(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    return empirical(std::move(values));
}

std::string Marginal::describe() const {
    std::ostringstream os;
    std::visit(overloaded{
                   [&](const Uniform& u) { os << "Uniform(" << u.lo << ", " << u.hi << ")"; },
                   [&](const Exponential& e) { os << "Exponential(" << e.rate << ")"; },
                   [&](const ParetoII& p) { os << "ParetoII(" << p.location << ", " << p.scale << ", " << p.shape << ")"; },
                   [&](const Normal& n) { os << "Normal(" << n.mean << ", " << n.sd << ")"; },
                   [&](const EmpiricalColumn& e) { os << "Empirical(n=" << e.values.size() << ")"; },
               },
               params_);
    return os.str();
}

double Marginal::cdf(double x) const {
    return std::visit(overloaded{
                          [&](const Uniform& u) { return std::clamp((x - u.lo) / (u.hi - u.lo), 0.0, 1.0); },
                          [&](const Exponential& e) { return x <= 0.0 ? 0.0 : -std::expm1(-e.rate * x); },
                          [&](const ParetoII& p) {
                              if (x <= p.location) return 0.0;
                              return -std::expm1(-p.shape * std::log1p((x - p.location) / p.scale));
                          },
                          [&](const Normal& n) { return normal_cdf((x - n.mean) / n.sd); },
                          [&](const EmpiricalColumn& e) {
                              const auto it = std::upper_bound(e.values.begin(), e.values.end(), x);
                              return static_cast<double>(it - e.values.begin()) / static_cast<double>(e.values.size());
                          },
                      },
                      params_);
}

double Marginal::tail(double x) const {
    return std::visit(overloaded{
                          [&](const Uniform& u) { return std::clamp((u.hi - x) / (u.hi - u.lo), 0.0, 1.0); },
                          [&](const Exponential& e) { return x <= 0.0 ? 1.0 : std::exp(-e.rate * x); },
                          [&](const ParetoII& p) {
                              if (x <= p.location) return 1.0;
                              return std::exp(-p.shape * std::log1p((x - p.location) / p.scale));
                          },
                          [&](const Normal& n) { return normal_cdf(-(x - n.mean) / n.sd); },
                          [&](const EmpiricalColumn& e) {
                              const auto it = std::upper_bound(e.values.begin(), e.values.end(), x);
                              return static_cast<double>(e.values.end() - it) / static_cast<double>(e.values.size());
                          },
                      },
                      params_);
}

double Marginal::pdf(double x) const {
    return std::visit(overloaded{
                          [&](const Uniform& u) { return (x < u.lo || x > u.hi) ? 0.0 : 1.0 / (u.hi - u.lo); },
                          [&](const Exponential& e) { return x < 0.0 ? 0.0 : e.rate * std::exp(-e.rate * x); },
                          [&](const ParetoII& p) {
                              if (x < p.location) return 0.0;
                              const double z = (x - p.location) / p.scale;
                              return p.shape / p.scale * std::exp(-(p.shape + 1.0) * std::log1p(z));
                          },
                          [&](const Normal& n) {
                              const double z = (x - n.mean) / n.sd;
                              return std::exp(-0.5 * z * z) / (n.sd * std::sqrt(2.0 * std::numbers::pi));
                          },
                          [&](const EmpiricalColumn&) -> double {
                              throw InvalidArgument("EmpiricalColumn has no density");
                          },
                      },
                      params_);
}

double Marginal::quantile(double p) const {
    require_open_unit(p, "quantile");
    return std::visit(overloaded{
                          [&](const Uniform& u) { return u.lo + (u.hi - u.lo) * p; },
                          [&](const Exponential& e) { return -std::log1p(-p) / e.rate; },
                          [&](const ParetoII& q) {
                              return q.location + q.scale * std::expm1(-std::log1p(-p) / q.shape);
                          },
                          [&](const Normal& n) { return n.mean + n.sd * normal_quantile(p); },
                          [&](const EmpiricalColumn& e) { return e.values[empirical_rank(e.values.size(), p) - 1]; },
                      },
                      params_);
}

double Marginal::tail_quantile(double q) const {
    require_open_unit(q, "tail_quantile");
    return std::visit(overloaded{
                          [&](const Uniform& u) { return u.hi - (u.hi - u.lo) * q; },
                          [&](const Exponential& e) { return -std::log(q) / e.rate; },
                          [&](const ParetoII& p) { return p.location + p.scale * std::expm1(-std::log(q) / p.shape); },
                          [&](const Normal& n) { return n.mean - n.sd * normal_quantile(q); },
                          [&](const EmpiricalColumn& e) {
                              return e.values[empirical_rank(e.values.size(), 1.0 - q) - 1];
                          },
                      },
                      params_);
}

double Marginal::mean() const {
    return std::visit(overloaded{
                          [](const Uniform& u) { return 0.5 * (u.lo + u.hi); },
                          [](const Exponential& e) { return 1.0 / e.rate; },
                          [](const ParetoII& p) {
                              if (!(p.shape > 1.0)) {
                                  throw MomentUndefined("ParetoII mean requires shape > 1, got " +
                                                        std::to_string(p.shape));
                              }
                              return p.location + p.scale / (p.shape - 1.0);
                          },
                          [](const Normal& n) { return n.mean; },
                          [](const EmpiricalColumn& e) {
                              double s = 0.0;
                              for (double v : e.values) s += v;
                              return s / static_cast<double>(e.values.size());
                          },
                      },
                      params_);
}

bool Marginal::continuous() const noexcept { return !std::holds_alternative<EmpiricalColumn>(params_); }

double Marginal::support_lower() const noexcept {
    return std::visit(overloaded{
                          [](const Uniform& u) { return u.lo; },
                          [](const Exponential&) { return 0.0; },
                          [](const ParetoII& p) { return p.location; },
                          [](const Normal&) { return -kInf; },
                          [](const EmpiricalColumn& e) { return e.values.front(); },
                      },
                      params_);
}

double Marginal::support_upper() const noexcept {
    return std::visit(overloaded{
                          [](const Uniform& u) { return u.hi; },
                          [](const Exponential&) { return kInf; },
                          [](const ParetoII&) { return kInf; },
                          [](const Normal&) { return kInf; },
                          [](const EmpiricalColumn& e) { return e.values.back(); },
                      },
                      params_);
}

bool Marginal::moment_exists(int order) const noexcept {
    if (const auto* p = std::get_if<ParetoII>(&params_)) return p->shape > static_cast<double>(order);
    return true;
}

double cdf(const Marginal& marginal, double x) { return marginal.cdf(x); }
double quantile(const Marginal& marginal, double p) { return marginal.quantile(p); }
double marginal_mean(const Marginal& marginal) { return marginal.mean(); }

// ---------------------------------------------------------------------------
// Copula
// ---------------------------------------------------------------------------

bool egm3_admissible(const Egm3& p) noexcept {
    for (int e1 : {-1, 1}) {
        for (int e2 : {-1, 1}) {
            for (int e3 : {-1, 1}) {
                const double v = 1.0 + p.a12 * e1 * e2 + p.a13 * e1 * e3 + p.a23 * e2 * e3 + p.a123 * e1 * e2 * e3;
                if (v < 0.0) return false;
            }
        }
    }
    return std::isfinite(p.a12) && std::isfinite(p.a13) && std::isfinite(p.a23) && std::isfinite(p.a123);
}

Copula::Copula(Params p) : params_(std::move(p)) {
    if (const auto* g = std::get_if<GaussianCopula>(&params_)) {
        Eigen::LLT<Eigen::MatrixXd> llt(g->corr);
        if (llt.info() == Eigen::Success) {
            factor_ = llt.matrixL();
        } else {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g->corr);
            const Eigen::VectorXd d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
            factor_ = es.eigenvectors() * d.asDiagonal();
        }
    }
}

Copula Copula::independent(std::size_t dim) {
    if (dim < 2) throw InvalidArgument("Independent copula: dimension must be >= 2");
    return Copula(IndependentCopula{dim});
}

Copula Copula::comonotone(std::size_t dim) {
    if (dim < 2) throw InvalidArgument("Comonotone copula: dimension must be >= 2");
    return Copula(ComonotoneCopula{dim});
}

Copula Copula::fgm2(double alpha) {
    if (!(alpha >= -1.0 && alpha <= 1.0)) {
        throw InadmissibleCopula("FGM2: alpha must lie in [-1, 1], got " + std::to_string(alpha));
    }
    return Copula(Fgm2{alpha});
}

Copula Copula::egm3(double a12, double a13, double a23, double a123) {
    const Egm3 p{a12, a13, a23, a123};
    if (!egm3_admissible(p)) throw InadmissibleCopula("EGM3: coefficients give a negative density");
    return Copula(p);
}

Copula Copula::gaussian(Eigen::MatrixXd corr) {
    const auto m = static_cast<std::size_t>(corr.rows());
    if (corr.rows() != corr.cols() || m < 2) throw InadmissibleCopula("Gaussian copula: need a square matrix, dim >= 2");
    for (std::size_t i = 0; i < m; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        if (!std::isfinite(corr(ii, ii)) || std::abs(corr(ii, ii) - 1.0) > 1e-12) {
            throw InadmissibleCopula("Gaussian copula: diagonal must be 1");
        }
        for (std::size_t j = 0; j < i; ++j) {
            const auto jj = static_cast<Eigen::Index>(j);
            if (!std::isfinite(corr(ii, jj)) || std::abs(corr(ii, jj) - corr(jj, ii)) > 1e-12) {
                throw InadmissibleCopula("Gaussian copula: matrix must be symmetric");
            }
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(corr, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10) {
        throw InadmissibleCopula("Gaussian copula: matrix is not positive semidefinite");
    }
    return Copula(GaussianCopula{std::move(corr)});
}

std::size_t Copula::dim() const noexcept {
    return std::visit(overloaded{
                          [](const IndependentCopula& c) { return c.dim; },
                          [](const ComonotoneCopula& c) { return c.dim; },
                          [](const Fgm2&) { return std::size_t{2}; },
                          [](const Egm3&) { return std::size_t{3}; },
                          [](const GaussianCopula& g) { return static_cast<std::size_t>(g.corr.rows()); },
                      },
                      params_);
}

std::string Copula::describe() const {
    std::ostringstream os;
    std::visit(overloaded{
                   [&](const IndependentCopula& c) { os << "Independent(" << c.dim << ")"; },
                   [&](const ComonotoneCopula& c) { os << "Comonotone(" << c.dim << ")"; },
                   [&](const Fgm2& f) { os << "FGM2(" << f.alpha << ")"; },
                   [&](const Egm3& e) { os << "EGM3(" << e.a12 << ", " << e.a13 << ", " << e.a23 << ", " << e.a123 << ")"; },
                   [&](const GaussianCopula& g) { os << "GaussianCopula(dim=" << g.corr.rows() << ")"; },
               },
               params_);
    return os.str();
}

namespace {

double product(std::span<const double> u) {
    double p = 1.0;
    for (double x : u) p *= x;
    return p;
}

// EGM3 polynomial bracket minus one, in terms of the complements 1 - u_i.
double egm3_bracket_excess(const Egm3& e, double c1, double c2, double c3) {
    return e.a12 * c1 * c2 + e.a13 * c1 * c3 + e.a23 * c2 * c3 + e.a123 * c1 * c2 * c3;
}

void check_dim(std::span<const double> u, std::size_t dim) {
    if (u.size() != dim) throw InvalidArgument("copula argument has wrong dimension");
}

double gaussian2_excess(const GaussianCopula& g, double u1, double u2) {
    if (u1 <= 0.0 || u2 <= 0.0 || u1 >= 1.0 || u2 >= 1.0) return 0.0;
    return bivariate_normal_cdf_excess(normal_quantile(u1), normal_quantile(u2), g.corr(0, 1));
}

}  // namespace

double Copula::cdf_excess(std::span<const double> u) const {
    check_dim(u, dim());
    return std::visit(overloaded{
                          [&](const IndependentCopula&) { return 0.0; },
                          [&](const ComonotoneCopula&) { return *std::min_element(u.begin(), u.end()) - product(u); },
                          [&](const Fgm2& f) { return f.alpha * u[0] * u[1] * (1.0 - u[0]) * (1.0 - u[1]); },
                          [&](const Egm3& e) {
                              return product(u) * egm3_bracket_excess(e, 1.0 - u[0], 1.0 - u[1], 1.0 - u[2]);
                          },
                          [&](const GaussianCopula& g) -> double {
                              if (g.corr.rows() != 2) throw DimensionUnsupported("Gaussian copula CDF only for m = 2");
                              return gaussian2_excess(g, u[0], u[1]);
                          },
                      },
                      params_);
}

double Copula::cdf(std::span<const double> u) const {
    check_dim(u, dim());
    if (const auto* c = std::get_if<ComonotoneCopula>(&params_)) {
        (void)c;
        return *std::min_element(u.begin(), u.end());
    }
    return product(u) + cdf_excess(u);
}

double Copula::survival_excess(std::span<const double> v) const {
    check_dim(v, dim());
    return std::visit(overloaded{
                          [&](const IndependentCopula&) { return 0.0; },
                          [&](const ComonotoneCopula&) { return *std::min_element(v.begin(), v.end()) - product(v); },
                          // FGM is radially symmetric.
                          [&](const Fgm2& f) { return f.alpha * v[0] * v[1] * (1.0 - v[0]) * (1.0 - v[1]); },
                          // Reflection flips the sign of the odd-order coefficient only.
                          [&](const Egm3& e) {
                              const Egm3 reflected{e.a12, e.a13, e.a23, -e.a123};
                              return product(v) * egm3_bracket_excess(reflected, 1.0 - v[0], 1.0 - v[1], 1.0 - v[2]);
                          },
                          [&](const GaussianCopula& g) -> double {
                              if (g.corr.rows() != 2) throw DimensionUnsupported("Gaussian survival copula only for m = 2");
                              return gaussian2_excess(g, v[0], v[1]);
                          },
                      },
                      params_);
}

double Copula::survival(std::span<const double> v) const {
    check_dim(v, dim());
    if (std::holds_alternative<ComonotoneCopula>(params_)) return *std::min_element(v.begin(), v.end());
    return product(v) + survival_excess(v);
}

bool Copula::has_polynomial_density() const noexcept {
    return std::holds_alternative<IndependentCopula>(params_) || std::holds_alternative<Fgm2>(params_) ||
           std::holds_alternative<Egm3>(params_);
}

double Copula::density_excess(std::span<const double> u) const {
    check_dim(u, dim());
    return std::visit(overloaded{
                          [&](const IndependentCopula&) { return 0.0; },
                          [&](const Fgm2& f) { return f.alpha * (1.0 - 2.0 * u[0]) * (1.0 - 2.0 * u[1]); },
                          [&](const Egm3& e) {
                              const double b1 = 1.0 - 2.0 * u[0];
                              const double b2 = 1.0 - 2.0 * u[1];
                              const double b3 = 1.0 - 2.0 * u[2];
                              return e.a12 * b1 * b2 + e.a13 * b1 * b3 + e.a23 * b2 * b3 + e.a123 * b1 * b2 * b3;
                          },
                          [&](const auto&) -> double { throw InvalidArgument("copula has no polynomial density"); },
                      },
                      params_);
}

const Eigen::MatrixXd& Copula::gaussian_factor() const {
    if (!std::holds_alternative<GaussianCopula>(params_)) throw InvalidArgument("not a Gaussian copula");
    return factor_;
}

// ---------------------------------------------------------------------------
// JointModel
// ---------------------------------------------------------------------------

JointModel JointModel::copula_model(Copula copula, std::vector<Marginal> marginals) {
    if (marginals.size() != copula.dim()) {
        throw InvalidArgument("CopulaModel: " + std::to_string(marginals.size()) + " marginals for a copula of dimension " +
                              std::to_string(copula.dim()));
    }
    auto m = marginals;
    return JointModel(CopulaModel{std::move(copula), std::move(marginals)}, std::move(m));
}

JointModel JointModel::pareto3(std::array<double, 3> location, std::array<double, 3> scale, double alpha,
                               double alpha0) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidArgument("ParetoII3: alpha must be positive");
    if (!(alpha0 >= 0.0) || !std::isfinite(alpha0)) throw InvalidArgument("ParetoII3: alpha0 must be nonnegative");
    std::vector<Marginal> margins;
    for (std::size_t j = 0; j < 3; ++j) margins.push_back(Marginal::pareto2(location[j], scale[j], alpha0 + alpha));
    return JointModel(ParetoII3{location, scale, alpha, alpha0}, std::move(margins));
}

JointModel JointModel::pareto3(double alpha, double alpha0) { return pareto3({0, 0, 0}, {1, 1, 1}, alpha, alpha0); }

JointModel JointModel::gaussian(Eigen::VectorXd mean, Eigen::MatrixXd cov) {
    const auto m = mean.size();
    if (m < 2 || cov.rows() != m || cov.cols() != m) throw InvalidArgument("GaussianJoint: dimension mismatch");
    if (!mean.allFinite() || !cov.allFinite()) throw InvalidArgument("GaussianJoint: entries must be finite");
    if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, cov.cwiseAbs().maxCoeff())) {
        throw InvalidArgument("GaussianJoint: covariance must be symmetric");
    }
    std::vector<Marginal> margins;
    for (Eigen::Index i = 0; i < m; ++i) {
        if (!(cov(i, i) > 0.0)) throw InvalidArgument("GaussianJoint: variances must be positive");
        margins.push_back(Marginal::normal(mean(i), std::sqrt(cov(i, i))));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10 * std::max(1.0, cov.diagonal().maxCoeff())) {
        throw InvalidArgument("GaussianJoint: covariance is not positive semidefinite");
    }
    return JointModel(GaussianJoint{std::move(mean), std::move(cov)}, std::move(margins));
}

std::size_t JointModel::dim() const noexcept { return marginals_.size(); }

std::string JointModel::describe() const {
    std::ostringstream os;
    std::visit(overloaded{
                   [&](const CopulaModel& c) {
                       os << c.copula.describe() << " [";
                       for (std::size_t j = 0; j < c.marginals.size(); ++j) {
                           os << (j ? ", " : "") << c.marginals[j].describe();
                       }
                       os << "]";
                   },
                   [&](const ParetoII3& p) { os << "ParetoII3(alpha=" << p.alpha << ", alpha0=" << p.alpha0 << ")"; },
                   [&](const GaussianJoint& g) { os << "GaussianJoint(dim=" << g.mean.size() << ")"; },
               },
               params_);
    return os.str();
}

// ---------------------------------------------------------------------------
// SampleMatrix
// ---------------------------------------------------------------------------

SampleMatrix::SampleMatrix(std::size_t rows, std::size_t cols, std::vector<double> data,
                           std::vector<std::string> names)
    : rows_(rows), cols_(cols), data_(std::move(data)), names_(std::move(names)) {
    if (rows_ < 2) throw InvalidArgument("SampleMatrix: need at least 2 rows");
    if (cols_ < 2) throw InvalidArgument("SampleMatrix: need at least 2 columns");
    if (data_.size() != rows_ * cols_) throw InvalidArgument("SampleMatrix: data size does not match shape");
    if (!names_.empty() && names_.size() != cols_) throw InvalidArgument("SampleMatrix: wrong number of column names");
    for (std::size_t k = 0; k < data_.size(); ++k) {
        if (!std::isfinite(data_[k])) {
            throw InvalidArgument("SampleMatrix: non-finite entry at row " + std::to_string(k / cols_) + ", column " +
                                  std::to_string(k % cols_));
        }
    }
    degenerate_.assign(cols_, 1);
    for (std::size_t j = 0; j < cols_; ++j) {
        for (std::size_t i = 1; i < rows_; ++i) {
            if ((*this)(i, j) != (*this)(0, j)) {
                degenerate_[j] = 0;
                break;
            }
        }
    }
}

SampleMatrix SampleMatrix::from_rows(const std::vector<std::vector<double>>& rows, std::vector<std::string> names) {
    if (rows.empty()) throw InvalidArgument("SampleMatrix: no rows");
    const std::size_t m = rows.front().size();
    std::vector<double> data;
    data.reserve(rows.size() * m);
    for (const auto& r : rows) {
        if (r.size() != m) throw InvalidArgument("SampleMatrix: ragged rows");
        data.insert(data.end(), r.begin(), r.end());
    }
    return SampleMatrix(rows.size(), m, std::move(data), std::move(names));
}

std::vector<double> SampleMatrix::column(std::size_t j) const {
    std::vector<double> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
}

bool SampleMatrix::any_degenerate() const noexcept {
    return std::any_of(degenerate_.begin(), degenerate_.end(), [](char c) { return c != 0; });
}

SampleMatrix SampleMatrix::negated() const {
    auto d = data_;
    for (double& x : d) x = -x;
    return SampleMatrix(rows_, cols_, std::move(d), names_);
}

SampleMatrix SampleMatrix::shifted_to_column_minima() const {
    auto d = data_;
    for (std::size_t j = 0; j < cols_; ++j) {
        double lo = (*this)(0, j);
        for (std::size_t i = 1; i < rows_; ++i) lo = std::min(lo, (*this)(i, j));
        for (std::size_t i = 0; i < rows_; ++i) d[i * cols_ + j] -= lo;
    }
    return SampleMatrix(rows_, cols_, std::move(d), names_);
}

SampleMatrix SampleMatrix::select_columns(std::span<const std::size_t> order) const {
    std::vector<double> d;
    d.reserve(rows_ * order.size());
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j : order) d.push_back((*this)(i, j));
    }
    std::vector<std::string> n;
    if (!names_.empty()) {
        for (std::size_t j : order) n.push_back(names_[j]);
    }
    return SampleMatrix(rows_, order.size(), std::move(d), std::move(n));
}

SampleMatrix SampleMatrix::select_rows(std::span<const std::size_t> order) const {
    std::vector<double> d;
    d.reserve(order.size() * cols_);
    for (std::size_t i : order) {
        const auto r = row(i);
        d.insert(d.end(), r.begin(), r.end());
    }
    return SampleMatrix(order.size(), cols_, std::move(d), names_);
}

SampleMatrix SampleMatrix::head(std::size_t n) const { return slice_rows(0, n); }

SampleMatrix SampleMatrix::slice_rows(std::size_t begin, std::size_t end) const {
    if (end > rows_ || begin >= end) throw InvalidArgument("SampleMatrix: bad row slice");
    std::vector<double> d(data_.begin() + static_cast<std::ptrdiff_t>(begin * cols_),
                          data_.begin() + static_cast<std::ptrdiff_t>(end * cols_));
    return SampleMatrix(end - begin, cols_, std::move(d), names_);
}

// ---------------------------------------------------------------------------
// DiscreteJoint
// ---------------------------------------------------------------------------

DiscreteJoint::DiscreteJoint(std::vector<DiscreteAtom> atoms) : atoms_(std::move(atoms)) {
    if (atoms_.empty()) throw InvalidArgument("DiscreteJoint: empty support");
    dim_ = atoms_.front().point.size();
    if (dim_ < 2) throw InvalidArgument("DiscreteJoint: dimension must be >= 2");
    double total = 0.0;
    std::set<std::vector<double>> seen;
    for (const auto& a : atoms_) {
        if (a.point.size() != dim_) throw InvalidArgument("DiscreteJoint: points of unequal dimension");
        for (double x : a.point) {
            if (!std::isfinite(x)) throw InvalidArgument("DiscreteJoint: non-finite support point");
        }
        if (!(a.prob > 0.0)) throw InvalidArgument("DiscreteJoint: probabilities must be positive");
        if (!seen.insert(a.point).second) throw InvalidArgument("DiscreteJoint: support points must be distinct");
        total += a.prob;
    }
    if (std::abs(total - 1.0) > 1e-12) throw InvalidArgument("DiscreteJoint: probabilities must sum to 1");
}

DiscreteJoint DiscreteJoint::from_sample(const SampleMatrix& sample) {
    std::map<std::vector<double>, std::size_t> counts;
    for (std::size_t i = 0; i < sample.rows(); ++i) {
        const auto r = sample.row(i);
        ++counts[std::vector<double>(r.begin(), r.end())];
    }
    std::vector<DiscreteAtom> atoms;
    atoms.reserve(counts.size());
    const double n = static_cast<double>(sample.rows());
    for (auto& [point, count] : counts) atoms.push_back({point, static_cast<double>(count) / n});
    return DiscreteJoint(std::move(atoms));
}

// ---------------------------------------------------------------------------
// Reports and settings
// ---------------------------------------------------------------------------

std::string_view to_string(Measure m) noexcept {
    switch (m) {
        case Measure::rho: return "rho";
        case Measure::rho_c: return "rho_c";
        case Measure::kappa: return "kappa";
        case Measure::pearson: return "pearson";
        case Measure::kendall: return "kendall";
        case Measure::spearman: return "spearman";
        case Measure::gini: return "gini";
        case Measure::blomqvist: return "blomqvist";
    }
    return "?";
}

std::string_view to_string(Variant v) noexcept {
    switch (v) {
        case Variant::closed_form: return "closed_form";
        case Variant::quadrature: return "quadrature";
        case Variant::monte_carlo: return "monte_carlo";
        case Variant::estimator_general: return "estimator_general";
        case Variant::estimator_nonneg: return "estimator_nonneg";
    }
    return "?";
}

std::optional<Measure> parse_measure(std::string_view name) noexcept {
    for (Measure m : {Measure::rho, Measure::rho_c, Measure::kappa, Measure::pearson, Measure::kendall,
                      Measure::spearman, Measure::gini, Measure::blomqvist}) {
        if (to_string(m) == name) return m;
    }
    return std::nullopt;
}

MeasureReport MeasureReport::make(Measure m, Variant v, double value, Diagnostics d) {
    if (!std::isfinite(value)) throw InvalidArgument("MeasureReport: value must be finite");
    if (v == Variant::monte_carlo && !d.seed) throw InvalidArgument("MeasureReport: Monte Carlo report needs a seed");
    return MeasureReport{m, v, value, d};
}

void QuadratureSpec::validate() const {
    if (nodes < 8) throw InvalidArgument("QuadratureSpec: need at least 8 nodes per axis");
    if (!(truncation > 0.0 && truncation < 0.5)) throw InvalidArgument("QuadratureSpec: truncation must lie in (0, 0.5)");
    if (!(tolerance > 0.0)) throw InvalidArgument("QuadratureSpec: tolerance must be positive");
}

}  // namespace comodep
