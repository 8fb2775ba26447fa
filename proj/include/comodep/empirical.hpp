#pragma once

// Sample estimators of rho and of the comparison measures.
//
// Sums over observations are taken in a canonical order (sorted terms,
// compensated summation) and row products multiply their factors in sorted
// order, so every estimator is bit-identical under row and column
// permutations of the input.

#include <cstddef>
#include <span>

#include "comodep/model.hpp"

namespace comodep::empirical {

// Column-wise sort of a sample: row i holds the i-th order statistic of
// every column, which is a sample of the comonotone coupling with the same
// empirical marginals.
struct ComonotoneRearrangement {
    SampleMatrix sorted;
};

ComonotoneRearrangement comonotonic_rearrangement(const SampleMatrix& sample);

struct EstimatorParts {
    double numerator = 0.0;
    double denominator = 0.0;
    double value = 0.0;
};

// Moment estimator:
//   (mean_i prod_j Y_ij - prod_j mean_i Y_ij) / (mean_i prod_j Y_(i)j - prod_j mean_i Y_ij).
EstimatorParts rho_hat_general_parts(const SampleMatrix& sample);
double rho_hat_general(const SampleMatrix& sample);

// Plug-in of empirical tail functions into the tail-integral form; the data
// are shifted by their column minima.
EstimatorParts rho_hat_nonneg_parts(const SampleMatrix& sample);
double rho_hat_nonneg(const SampleMatrix& sample);

// Sum of pairwise sample covariances (1/n) over the same sum for the
// rearranged sample.
double rho_c_hat(const SampleMatrix& sample);

// Row limit for kappa_hat with m = 3 (the exact integrator is cubic in n).
inline constexpr std::size_t kKappaMaxRowsM3 = 1000;

// Empirical CDFs substituted into the comonotonicity coefficient and
// integrated exactly over the sample bounding box. m must be 2 or 3.
double kappa_hat(const SampleMatrix& sample);

enum class Orthant { lower, upper };

// Exact integrals over the bounding box of the empirical joint CDF (lower)
// or joint tail (upper), of the product of the marginal ones, and of their
// minimum (the comonotone coupling). Computed cell by cell on the grid of
// distinct order statistics from a cumulative-count tensor; m must be 2 or 3.
struct OrthantIntegrals {
    double joint = 0.0;
    double independent = 0.0;
    double comonotone = 0.0;
};

OrthantIntegrals box_orthant_integrals(const SampleMatrix& sample, Orthant orthant);

struct Classical {
    double pearson = 0.0;
    double kendall = 0.0;
    double spearman = 0.0;
    double gini = 0.0;
    double blomqvist = 0.0;
};

// Bivariate sample versions: Pearson moment ratio, Kendall tau-a, Spearman
// on midranks, Gini on midranks normalised by floor(n^2/2), Blomqvist from
// the quadrant count at the componentwise medians.
Classical classical_hat(const SampleMatrix& sample);

// (1/n) #{i : Y_ij > x_j for all j}.
double empirical_tail(const SampleMatrix& sample, std::span<const double> x);

// Ranks 1..n with ties replaced by their average rank.
std::vector<double> midranks(std::span<const double> values);

}  // namespace comodep::empirical
