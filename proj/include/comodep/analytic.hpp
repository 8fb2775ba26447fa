#pragma once

// Closed forms and quadrature evaluations of the comonotonicity-based
// dependence measure rho and the comparison measures for parametric models.
//
// rho(X) = (E[prod X_i] - prod E[X_i]) / (E[prod X_i^C] - prod E[X_i]),
// where X^C is the comonotone coupling of the same marginals.

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "comodep/model.hpp"
#include "comodep/quadrature.hpp"

namespace comodep::analytic {

// Denominators closer to zero than this are treated as exact zeros.
inline constexpr double kDenominatorZero = 1e-12;

// One term of the Isserlis/Wick expansion: disjoint index pairs plus the
// indices left unpaired.
struct GaussianMomentTerm {
    std::vector<std::pair<std::size_t, std::size_t>> pairing;
    std::vector<std::size_t> unpaired;
};

// All partial pairings of {0, ..., m-1}, grouped by ascending pair count.
std::vector<GaussianMomentTerm> enumerate_pairings(std::size_t m);

// Number of ways to pick k disjoint pairs from m labels: m! / (2^k k! (m-2k)!).
std::uint64_t pairing_count(std::size_t m, std::size_t k);

// E[prod_i F_i^{-1}(U)] for U uniform, by 1-D quadrature.
QuadratureResult comonotone_product_moment(std::span<const Marginal> marginals, const QuadratureSpec& spec);

struct RatioResult {
    double value = 0.0;
    double numerator = 0.0;
    double denominator = 0.0;
    double error = 0.0;  // propagated quadrature error estimate on `value`
    std::size_t nodes = 0;
};

// rho of a CopulaModel (m = 2 or 3) from expectation integrals under the
// copula: numerator = E_C[prod q_i(U_i)] - prod E[X_i], denominator from the
// comonotone product moment.
RatioResult rho_from_copula(const JointModel& model, const QuadratureSpec& spec);

enum class FgmMargins { uniform01, exp1 };

double fgm_rho_closed(double alpha, FgmMargins margins);

// Uniform marginals.
double egm3_rho(const Egm3& p);
double egm3_kappa(const Egm3& p);
double egm3_rho_c(const Egm3& p);

struct ParetoMoments {
    double mean = 0.0;
    double pair_moment = 0.0;
    double triple_moment = 0.0;
    // Value printed in the literature, 1/((a-1)(a-2)(a-3)); absent unless alpha > 3.
    std::optional<double> comonotone_triple_paper;
    // E[X^3] of the common marginal, 6/((t-1)(t-2)(t-3)) with t = alpha0 + alpha.
    double comonotone_triple_corrected = 0.0;
};

// Standardised trivariate Pareto II (location 0, scale 1). Needs alpha0 >= 0,
// alpha > 0 and alpha0 + alpha > 3.
ParetoMoments pareto3_moments(double alpha0, double alpha);

enum class ParetoVariant { paper, corrected };

double pareto3_rho(double alpha0, double alpha, ParetoVariant variant = ParetoVariant::corrected);
double pareto3_rho_c(double alpha0, double alpha);

// E[prod X_i] for X ~ N(mean, cov) by summing over all partial pairings.
double gaussian_product_moment(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov);

// The comonotone coupling of a Gaussian vector has covariance sigma_i sigma_j.
Eigen::MatrixXd comonotone_covariance(const Eigen::MatrixXd& cov);

double gaussian_rho(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov);
double gaussian_rho_c(const Eigen::MatrixXd& cov);

struct Population2d {
    double kendall = 0.0;
    double spearman = 0.0;
    double gini = 0.0;
    double blomqvist = 0.0;
};

// Copula-integral definitions of the classical bivariate measures.
Population2d population_measures_2d(const Copula& copula, const QuadratureSpec& spec);

}  // namespace comodep::analytic
