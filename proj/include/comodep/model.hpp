#pragma once

// Domain types shared by every other module: univariate marginals, copulas,
// joint models, observation matrices, finite discrete laws, measure reports
// and quadrature settings. All of them are immutable once constructed.

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace comodep {

// ---------------------------------------------------------------------------
// Marginals
// ---------------------------------------------------------------------------

struct Uniform {
    double lo;
    double hi;
};

struct Exponential {
    double rate;
};

// Pareto of the second kind (Lomax with location): tail (1 + (x - location)/scale)^(-shape).
struct ParetoII {
    double location;
    double scale;
    double shape;
};

struct Normal {
    double mean;
    double sd;
};

// Empirical law of a finite column; values are kept ascending.
struct EmpiricalColumn {
    std::vector<double> values;
};

class Marginal {
public:
    using Params = std::variant<Uniform, Exponential, ParetoII, Normal, EmpiricalColumn>;

    static Marginal uniform(double lo, double hi);
    static Marginal exponential(double rate);
    static Marginal pareto2(double location, double scale, double shape);
    static Marginal normal(double mean, double sd);
    // `values` must be finite and ascending.
    static Marginal empirical(std::vector<double> values);
    // Sorts a copy of `values` first.
    static Marginal empirical_unsorted(std::vector<double> values);

    const Params& params() const noexcept { return params_; }
    std::string describe() const;

    double cdf(double x) const;
    // P(X > x), evaluated without forming 1 - cdf(x).
    double tail(double x) const;
    double pdf(double x) const;
    // Generalized inverse inf{x : F(x) >= p}; p must lie in (0, 1).
    double quantile(double p) const;
    // quantile(1 - q) for q in (0, 1), accurate when q is tiny.
    double tail_quantile(double q) const;
    double mean() const;

    bool continuous() const noexcept;
    double support_lower() const noexcept;
    double support_upper() const noexcept;
    // Whether E|X|^order is finite.
    bool moment_exists(int order) const noexcept;

private:
    explicit Marginal(Params p) : params_(std::move(p)) {}
    Params params_;
};

double cdf(const Marginal& marginal, double x);
double quantile(const Marginal& marginal, double p);
double marginal_mean(const Marginal& marginal);

// ---------------------------------------------------------------------------
// Copulas
// ---------------------------------------------------------------------------

struct IndependentCopula {
    std::size_t dim;
};

struct ComonotoneCopula {
    std::size_t dim;
};

// Farlie-Gumbel-Morgenstern: C(u) = u1 u2 [1 + alpha (1-u1)(1-u2)].
struct Fgm2 {
    double alpha;
};

// Three-dimensional Eyraud-Gumbel-Morgenstern copula.
struct Egm3 {
    double a12;
    double a13;
    double a23;
    double a123;
};

struct GaussianCopula {
    Eigen::MatrixXd corr;
};

bool egm3_admissible(const Egm3& p) noexcept;

class Copula {
public:
    using Params = std::variant<IndependentCopula, ComonotoneCopula, Fgm2, Egm3, GaussianCopula>;

    static Copula independent(std::size_t dim);
    static Copula comonotone(std::size_t dim);
    static Copula fgm2(double alpha);
    static Copula egm3(double a12, double a13, double a23, double a123);
    static Copula gaussian(Eigen::MatrixXd corr);

    const Params& params() const noexcept { return params_; }
    std::size_t dim() const noexcept;
    std::string describe() const;

    // C(u).
    double cdf(std::span<const double> u) const;
    // C(u) - prod(u).
    double cdf_excess(std::span<const double> u) const;
    // Survival copula in tail-probability coordinates: P(U_i > 1 - v_i for all i).
    double survival(std::span<const double> v) const;
    // survival(v) - prod(v), computed without cancellation for the polynomial families.
    double survival_excess(std::span<const double> v) const;

    // True for the absolutely continuous families with a closed-form density.
    bool has_polynomial_density() const noexcept;
    // c(u) - 1 for FGM2 / EGM3 / independence.
    double density_excess(std::span<const double> u) const;

    // Lower Cholesky factor of the correlation matrix (Gaussian only).
    const Eigen::MatrixXd& gaussian_factor() const;

private:
    explicit Copula(Params p);
    Params params_;
    Eigen::MatrixXd factor_;
};

// Standard bivariate normal CDF P(Z1 <= h, Z2 <= k) with correlation r.
double bivariate_normal_cdf(double h, double k, double r);
// bivariate_normal_cdf(h, k, r) - Phi(h) Phi(k).
double bivariate_normal_cdf_excess(double h, double k, double r);

double normal_cdf(double z);
double normal_quantile(double p);

// ---------------------------------------------------------------------------
// Joint models
// ---------------------------------------------------------------------------

struct CopulaModel {
    Copula copula;
    std::vector<Marginal> marginals;
};

// Trivariate Pareto II with common exponent alpha and shared max-term exponent
// alpha0. Joint tail (1 + max_j z_j)^(-alpha0) prod_j (1 + z_j)^(-alpha),
// z_j = (x_j - location_j) / scale_j. Each marginal is ParetoII with shape
// alpha0 + alpha.
struct ParetoII3 {
    std::array<double, 3> location;
    std::array<double, 3> scale;
    double alpha;
    double alpha0;
};

struct GaussianJoint {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
};

class JointModel {
public:
    using Params = std::variant<CopulaModel, ParetoII3, GaussianJoint>;

    static JointModel copula_model(Copula copula, std::vector<Marginal> marginals);
    static JointModel pareto3(std::array<double, 3> location, std::array<double, 3> scale, double alpha,
                              double alpha0);
    // Standardised Pareto (location 0, scale 1).
    static JointModel pareto3(double alpha, double alpha0);
    static JointModel gaussian(Eigen::VectorXd mean, Eigen::MatrixXd cov);

    const Params& params() const noexcept { return params_; }
    std::size_t dim() const noexcept;
    const std::vector<Marginal>& marginals() const noexcept { return marginals_; }
    std::string describe() const;

private:
    JointModel(Params p, std::vector<Marginal> marginals)
        : params_(std::move(p)), marginals_(std::move(marginals)) {}
    Params params_;
    std::vector<Marginal> marginals_;
};

// ---------------------------------------------------------------------------
// Samples and finite laws
// ---------------------------------------------------------------------------

class SampleMatrix {
public:
    // `data` is row-major, rows * cols entries, all finite; rows >= 2, cols >= 2.
    SampleMatrix(std::size_t rows, std::size_t cols, std::vector<double> data,
                 std::vector<std::string> names = {});
    static SampleMatrix from_rows(const std::vector<std::vector<double>>& rows,
                                  std::vector<std::string> names = {});

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }
    std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> data() const noexcept { return data_; }
    std::vector<double> column(std::size_t j) const;
    const std::vector<std::string>& names() const noexcept { return names_; }

    // Zero-variance (constant) column.
    bool degenerate(std::size_t j) const noexcept { return degenerate_[j] != 0; }
    bool any_degenerate() const noexcept;

    SampleMatrix negated() const;
    SampleMatrix shifted_to_column_minima() const;
    SampleMatrix select_columns(std::span<const std::size_t> order) const;
    SampleMatrix select_rows(std::span<const std::size_t> order) const;
    SampleMatrix head(std::size_t n) const;
    SampleMatrix slice_rows(std::size_t begin, std::size_t end) const;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
    std::vector<std::string> names_;
    std::vector<char> degenerate_;
};

struct DiscreteAtom {
    std::vector<double> point;
    double prob;
};

class DiscreteJoint {
public:
    // Points must be distinct and of equal dimension >= 2; probabilities
    // positive and summing to one within 1e-12.
    explicit DiscreteJoint(std::vector<DiscreteAtom> atoms);
    // Plug-in (empirical) law of a sample; duplicate rows are merged.
    static DiscreteJoint from_sample(const SampleMatrix& sample);

    std::size_t dim() const noexcept { return dim_; }
    const std::vector<DiscreteAtom>& atoms() const noexcept { return atoms_; }

private:
    std::vector<DiscreteAtom> atoms_;
    std::size_t dim_;
};

// ---------------------------------------------------------------------------
// Reports and quadrature settings
// ---------------------------------------------------------------------------

enum class Measure { rho, rho_c, kappa, pearson, kendall, spearman, gini, blomqvist };
enum class Variant { closed_form, quadrature, monte_carlo, estimator_general, estimator_nonneg };

std::string_view to_string(Measure m) noexcept;
std::string_view to_string(Variant v) noexcept;
std::optional<Measure> parse_measure(std::string_view name) noexcept;

struct Diagnostics {
    std::optional<std::size_t> n;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> quadrature_nodes;
    std::optional<double> error_estimate;
};

struct MeasureReport {
    Measure measure;
    Variant variant;
    double value;
    Diagnostics diagnostics;

    // Throws InvalidArgument if the value is not finite or a Monte Carlo
    // report carries no seed.
    static MeasureReport make(Measure m, Variant v, double value, Diagnostics d = {});
};

enum class QuadratureScheme { gauss_legendre, tanh_sinh };

struct QuadratureSpec {
    QuadratureScheme scheme = QuadratureScheme::tanh_sinh;
    // Starting node count per axis; refinement doubles it.
    std::size_t nodes = 25;
    // Probability-scale truncation for unbounded marginals (Gauss-Legendre only).
    double truncation = 1e-4;
    double tolerance = 1e-10;

    void validate() const;
};

}  // namespace comodep
