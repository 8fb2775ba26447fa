#pragma once

// Brute-force reference values: exact sums over finite supports, dense
// quadrature of the defining integrals, and Monte Carlo estimates.

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "comodep/analytic.hpp"
#include "comodep/model.hpp"
#include "comodep/quadrature.hpp"

namespace comodep::oracle {

// rho of a law with finite support. The comonotone product moment is summed
// exactly over the common refinement of the marginal cumulative-probability
// steps.
double discrete_rho(const DiscreteJoint& joint);

// E[prod_i X_i^C] for a finite-support law, by the same staircase merge.
double discrete_comonotone_moment(const DiscreteJoint& joint);

// rho from the tail-integral form for non-negative continuous marginals:
//   int (Fbar - prod Fbar_i) / int (min_i Fbar_i - prod Fbar_i).
// Integrals are taken in tail-probability coordinates v_i = Fbar_i(x_i), split
// into the m! ordered simplices so the minimum is smooth on each piece; flat
// stretches below a support's lower end enter as exact lengths. Supports
// ParetoII3 and CopulaModel with m = 2 or 3.
analytic::RatioResult tail_integral_rho(const JointModel& model, const QuadratureSpec& spec);

// E[prod_{i in axes} X_i] = int Fbar_axes, for the same models.
QuadratureResult tail_product_moment(const JointModel& model, const std::vector<std::size_t>& axes,
                                     const QuadratureSpec& spec);

// kappa from the CDF form int (F - prod F_i) / int (min_i F_i - prod F_i)
// over the support box; CopulaModel with bounded continuous marginals.
analytic::RatioResult kappa_from_copula(const JointModel& model, const QuadratureSpec& spec);

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

inline constexpr std::size_t kMcBatches = 16;

// rho_hat_general on a simulated sample; the standard error comes from the
// spread of the estimator over kMcBatches consecutive row batches.
McEstimate mc_rho(const JointModel& model, std::size_t n, std::uint64_t seed);

// Monte Carlo mean of prod_i X_i for X ~ N(mean, cov), with standard error
// sd / sqrt(n_mc).
McEstimate isserlis_bruteforce(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov, std::size_t n_mc,
                               std::uint64_t seed);

}  // namespace comodep::oracle
