#include "comodep/analytic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "comodep/errors.hpp"
#include "detail.hpp"

namespace comodep::analytic {

using detail::overloaded;
using detail::quantile_at;

// ---------------------------------------------------------------------------
// Pairings
// ---------------------------------------------------------------------------

namespace {

void extend_pairings(std::vector<std::size_t>& remaining, GaussianMomentTerm& current,
                     std::vector<GaussianMomentTerm>& out) {
    if (remaining.empty()) {
        out.push_back(current);
        return;
    }
    const std::size_t first = remaining.front();
    std::vector<std::size_t> rest(remaining.begin() + 1, remaining.end());

    current.unpaired.push_back(first);
    extend_pairings(rest, current, out);
    current.unpaired.pop_back();

    for (std::size_t k = 0; k < rest.size(); ++k) {
        std::vector<std::size_t> next;
        next.reserve(rest.size() - 1);
        for (std::size_t j = 0; j < rest.size(); ++j) {
            if (j != k) next.push_back(rest[j]);
        }
        current.pairing.emplace_back(first, rest[k]);
        extend_pairings(next, current, out);
        current.pairing.pop_back();
    }
}

}  // namespace

std::vector<GaussianMomentTerm> enumerate_pairings(std::size_t m) {
    std::vector<std::size_t> all(m);
    for (std::size_t i = 0; i < m; ++i) all[i] = i;
    GaussianMomentTerm current;
    std::vector<GaussianMomentTerm> out;
    extend_pairings(all, current, out);
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.pairing.size() < b.pairing.size(); });
    return out;
}

std::uint64_t pairing_count(std::size_t m, std::size_t k) {
    if (2 * k > m) return 0;
    // m! / (2^k k! (m-2k)!) = C(m, 2k) * (2k - 1)!!
    std::uint64_t binom = 1;
    for (std::size_t i = 1; i <= 2 * k; ++i) binom = binom * (m - 2 * k + i) / i;
    std::uint64_t dfact = 1;
    for (std::size_t i = 1; i < 2 * k; i += 2) dfact *= i;
    return binom * dfact;
}

// ---------------------------------------------------------------------------
// Comonotone product moment and quadrature rho
// ---------------------------------------------------------------------------

QuadratureResult comonotone_product_moment(std::span<const Marginal> marginals, const QuadratureSpec& spec) {
    if (marginals.empty()) throw InvalidArgument("comonotone_product_moment: no marginals");
    detail::require_comonotone_moment(marginals);
    const auto flags = detail::truncation_flags(marginals);
    const bool truncate = std::any_of(flags.begin(), flags.end(), [](bool b) { return b; });
    return integrate_unit(
        spec,
        [&](double x, double xc) {
            double p = 1.0;
            for (const auto& m : marginals) p *= quantile_at(m, x, xc);
            return p;
        },
        truncate);
}

RatioResult rho_from_copula(const JointModel& model, const QuadratureSpec& spec) {
    const auto* cm = std::get_if<CopulaModel>(&model.params());
    if (!cm) throw InvalidArgument("rho_from_copula: model is not a CopulaModel");
    const std::size_t m = model.dim();
    if (m != 2 && m != 3) throw DimensionUnsupported("rho_from_copula: only m = 2 or 3 is supported");
    const auto& margins = cm->marginals;
    for (const auto& mg : margins) {
        if (!mg.continuous()) throw InvalidArgument("rho_from_copula: marginals must be continuous");
    }

    const double means = detail::product_of_means(margins);
    const auto comonotone = comonotone_product_moment(margins, spec);
    const double den = comonotone.value - means;

    CubeOptions opts;
    opts.truncate = detail::truncation_flags(margins);

    double num = 0.0;
    double num_err = 0.0;
    std::size_t nodes = comonotone.nodes_per_axis;
    std::visit(overloaded{
                   [&](const IndependentCopula&) {},
                   [&](const ComonotoneCopula&) {
                       num = den;
                       num_err = comonotone.error;
                   },
                   [&](const GaussianCopula&) {
                       const Eigen::MatrixXd& factor = cm->copula.gaussian_factor();
                       const auto r = integrate_cube(
                           m, spec,
                           [&](std::span<const AxisNode> p) {
                               std::array<double, 3> w{};
                               double indep = 1.0;
                               for (std::size_t i = 0; i < m; ++i) {
                                   w[i] = p[i].x <= 0.5 ? normal_quantile(p[i].x) : -normal_quantile(p[i].xc);
                                   indep *= quantile_at(margins[i], p[i].x, p[i].xc);
                               }
                               double dep = 1.0;
                               for (std::size_t i = 0; i < m; ++i) {
                                   double z = 0.0;
                                   for (std::size_t j = 0; j < m; ++j) {
                                       z += factor(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * w[j];
                                   }
                                   const double u = normal_cdf(z);
                                   const double uc = normal_cdf(-z);
                                   if (u <= 0.0 || uc <= 0.0) return 0.0;
                                   dep *= quantile_at(margins[i], u, uc);
                               }
                               return dep - indep;
                           },
                           opts);
                       num = r.value;
                       num_err = r.error;
                       nodes = std::max(nodes, r.nodes_per_axis);
                   },
                   [&](const auto&) {
                       const Copula& c = cm->copula;
                       const auto r = integrate_cube(
                           m, spec,
                           [&](std::span<const AxisNode> p) {
                               std::array<double, 3> u{};
                               double q = 1.0;
                               for (std::size_t i = 0; i < m; ++i) {
                                   u[i] = p[i].x;
                                   q *= quantile_at(margins[i], p[i].x, p[i].xc);
                               }
                               return q * c.density_excess(std::span<const double>(u.data(), m));
                           },
                           opts);
                       num = r.value;
                       num_err = r.error;
                       nodes = std::max(nodes, r.nodes_per_axis);
                   },
               },
               cm->copula.params());

    if (std::abs(den) < kDenominatorZero) {
        throw DegenerateDenominator("rho_from_copula: comonotone and independent product moments coincide");
    }
    RatioResult out;
    out.numerator = num;
    out.denominator = den;
    out.value = num / den;
    out.error = (num_err + std::abs(out.value) * comonotone.error) / std::abs(den);
    out.nodes = nodes;
    return out;
}

// ---------------------------------------------------------------------------
// FGM / EGM closed forms
// ---------------------------------------------------------------------------

double fgm_rho_closed(double alpha, FgmMargins margins) {
    if (!(alpha >= -1.0 && alpha <= 1.0)) throw InadmissibleCopula("FGM2: alpha must lie in [-1, 1]");
    // Numerator alpha * (int q(u)(1-2u) du)^2 over the comonotone variance term.
    switch (margins) {
        case FgmMargins::uniform01: return alpha / 3.0;
        case FgmMargins::exp1: return alpha / 4.0;
    }
    return 0.0;
}

namespace {

void require_admissible(const Egm3& p) {
    if (!egm3_admissible(p)) throw InadmissibleCopula("EGM3: coefficients give a negative density");
}

}  // namespace

double egm3_rho(const Egm3& p) {
    require_admissible(p);
    return (p.a12 + p.a13 + p.a23) / 9.0 - p.a123 / 27.0;
}

double egm3_kappa(const Egm3& p) {
    require_admissible(p);
    return (p.a12 + p.a13 + p.a23) / 9.0 + p.a123 / 27.0;
}

double egm3_rho_c(const Egm3& p) {
    require_admissible(p);
    // Pairwise covariances a_ij / 36 over the comonotone ones 1/12.
    return (p.a12 + p.a13 + p.a23) / 9.0;
}

// ---------------------------------------------------------------------------
// Pareto II
// ---------------------------------------------------------------------------

ParetoMoments pareto3_moments(double alpha0, double alpha) {
    if (!(alpha0 >= 0.0) || !std::isfinite(alpha0)) throw InvalidArgument("pareto3: alpha0 must be nonnegative");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidArgument("pareto3: alpha must be positive");
    const double theta = alpha0 + alpha;
    if (!(theta > 3.0)) {
        throw MomentUndefined("pareto3: third moments need alpha0 + alpha > 3, got " + std::to_string(theta));
    }
    ParetoMoments r;
    const double d1 = theta - 1.0;
    const double d2 = alpha0 + 2.0 * alpha - 2.0;
    const double d3 = alpha0 + 3.0 * alpha - 3.0;
    r.mean = 1.0 / d1;
    r.pair_moment = 2.0 / (d1 * d2);
    r.triple_moment = 6.0 / (d1 * d2 * d3);
    if (alpha > 3.0) r.comonotone_triple_paper = 1.0 / ((alpha - 1.0) * (alpha - 2.0) * (alpha - 3.0));
    r.comonotone_triple_corrected = 6.0 / ((theta - 1.0) * (theta - 2.0) * (theta - 3.0));
    return r;
}

double pareto3_rho(double alpha0, double alpha, ParetoVariant variant) {
    const auto mo = pareto3_moments(alpha0, alpha);
    double comonotone = mo.comonotone_triple_corrected;
    if (variant == ParetoVariant::paper) {
        if (!mo.comonotone_triple_paper) {
            throw MomentUndefined("pareto3 (paper variant): requires alpha > 3, got " + std::to_string(alpha));
        }
        comonotone = *mo.comonotone_triple_paper;
    }
    const double mean3 = mo.mean * mo.mean * mo.mean;
    const double den = comonotone - mean3;
    if (std::abs(den) < kDenominatorZero) throw DegenerateDenominator("pareto3_rho: zero denominator");
    return (mo.triple_moment - mean3) / den;
}

double pareto3_rho_c(double alpha0, double alpha) {
    if (!(alpha0 >= 0.0) || !std::isfinite(alpha0)) throw InvalidArgument("pareto3: alpha0 must be nonnegative");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidArgument("pareto3: alpha must be positive");
    const double theta = alpha0 + alpha;
    if (!(theta > 2.0)) throw MomentUndefined("pareto3_rho_c: covariances need alpha0 + alpha > 2");
    return alpha0 * (theta - 2.0) / (theta * (alpha0 + 2.0 * alpha - 2.0));
}

// ---------------------------------------------------------------------------
// Gaussian
// ---------------------------------------------------------------------------

double gaussian_product_moment(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov) {
    const auto m = static_cast<std::size_t>(mean.size());
    if (m < 1 || m > 10) throw DimensionUnsupported("gaussian_product_moment: need 1 <= m <= 10");
    if (cov.rows() != mean.size() || cov.cols() != mean.size()) {
        throw InvalidArgument("gaussian_product_moment: dimension mismatch");
    }
    double total = 0.0;
    for (const auto& term : enumerate_pairings(m)) {
        double t = 1.0;
        for (const auto& [a, b] : term.pairing) t *= cov(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        for (std::size_t i : term.unpaired) t *= mean(static_cast<Eigen::Index>(i));
        total += t;
    }
    return total;
}

Eigen::MatrixXd comonotone_covariance(const Eigen::MatrixXd& cov) {
    const Eigen::VectorXd sd = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
    return sd * sd.transpose();
}

double gaussian_rho(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov) {
    if ((cov.diagonal().array() <= 0.0).any()) throw InvalidArgument("gaussian_rho: variances must be positive");
    double mean_product = 1.0;
    for (Eigen::Index i = 0; i < mean.size(); ++i) mean_product *= mean(i);
    const double num = gaussian_product_moment(mean, cov) - mean_product;
    const double den = gaussian_product_moment(mean, comonotone_covariance(cov)) - mean_product;
    if (std::abs(den) < kDenominatorZero) {
        throw DegenerateDenominator("gaussian_rho: comonotone excess product moment vanishes");
    }
    return num / den;
}

double gaussian_rho_c(const Eigen::MatrixXd& cov) {
    if (cov.rows() != cov.cols() || cov.rows() < 2) throw InvalidArgument("gaussian_rho_c: need a square matrix, m >= 2");
    if ((cov.diagonal().array() <= 0.0).any()) throw InvalidArgument("gaussian_rho_c: variances must be positive");
    double num = 0.0;
    double den = 0.0;
    for (Eigen::Index i = 0; i < cov.rows(); ++i) {
        for (Eigen::Index j = 0; j < i; ++j) {
            num += cov(i, j);
            den += std::sqrt(cov(i, i) * cov(j, j));
        }
    }
    return num / den;
}

// ---------------------------------------------------------------------------
// Bivariate population measures
// ---------------------------------------------------------------------------

Population2d population_measures_2d(const Copula& copula, const QuadratureSpec& spec) {
    if (copula.dim() != 2) throw DimensionUnsupported("population_measures_2d: copula must be bivariate");
    if (std::holds_alternative<IndependentCopula>(copula.params())) return {0.0, 0.0, 0.0, 0.0};
    if (std::holds_alternative<ComonotoneCopula>(copula.params())) return {1.0, 1.0, 1.0, 1.0};

    Population2d out;
    auto excess = [&](double u1, double u2) {
        const std::array<double, 2> u{u1, u2};
        return copula.cdf_excess(u);
    };

    // Spearman: 12 * integral of (C - u v).
    out.spearman =
        12.0 * integrate_cube(2, spec, [&](std::span<const AxisNode> p) { return excess(p[0].x, p[1].x); }).value;

    // Gini: 4 [int C(u, 1-u) du - int (u - C(u, u)) du], written with excesses.
    out.gini = 4.0 * integrate_unit(spec, [&](double x, double xc) { return excess(x, xc) + excess(x, x); }).value;

    out.blomqvist = 4.0 * excess(0.5, 0.5);

    // Kendall: 4 E_C[C(U)] - 1.
    if (const auto* g = std::get_if<GaussianCopula>(&copula.params())) {
        const double r = g->corr(0, 1);
        const Eigen::MatrixXd& f = copula.gaussian_factor();
        const double ec = integrate_cube(2, spec, [&](std::span<const AxisNode> p) {
                              const double w1 = p[0].x <= 0.5 ? normal_quantile(p[0].x) : -normal_quantile(p[0].xc);
                              const double w2 = p[1].x <= 0.5 ? normal_quantile(p[1].x) : -normal_quantile(p[1].xc);
                              const double z1 = f(0, 0) * w1 + f(0, 1) * w2;
                              const double z2 = f(1, 0) * w1 + f(1, 1) * w2;
                              return bivariate_normal_cdf(z1, z2, r);
                          }).value;
        out.kendall = 4.0 * ec - 1.0;
    } else {
        const double ec = integrate_cube(2, spec, [&](std::span<const AxisNode> p) {
                              const std::array<double, 2> u{p[0].x, p[1].x};
                              return copula.cdf(u) * (1.0 + copula.density_excess(u));
                          }).value;
        out.kendall = 4.0 * ec - 1.0;
    }
    return out;
}

}  // namespace comodep::analytic
