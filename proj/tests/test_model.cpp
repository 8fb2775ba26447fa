#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "comodep/csv.hpp"
#include "comodep/errors.hpp"
#include "comodep/model.hpp"

using namespace comodep;

namespace {

std::vector<Marginal> all_marginals() {
    return {Marginal::uniform(-1.0, 3.0), Marginal::exponential(2.0), Marginal::pareto2(0.5, 2.0, 5.0),
            Marginal::normal(1.0, 2.0), Marginal::empirical({1.0, 2.0, 2.0, 3.0, 7.0})};
}

}  // namespace

TEST(Marginal, CdfExamples) {
    EXPECT_DOUBLE_EQ(cdf(Marginal::uniform(0, 1), 0.3), 0.3);
    EXPECT_EQ(cdf(Marginal::pareto2(0, 1, 5), 0.0), 0.0);
    EXPECT_NEAR(cdf(Marginal::exponential(1), std::log(2.0)), 0.5, 1e-15);
}

TEST(Marginal, QuantileExamples) {
    EXPECT_DOUBLE_EQ(quantile(Marginal::uniform(0, 1), 0.75), 0.75);
    EXPECT_NEAR(quantile(Marginal::exponential(1), 0.5), std::log(2.0), 1e-15);
    EXPECT_EQ(quantile(Marginal::empirical({1, 2, 3}), 0.5), 2.0);
    EXPECT_EQ(quantile(Marginal::empirical({1, 2, 3}), 1.0 / 3.0), 1.0);
    EXPECT_THROW(quantile(Marginal::uniform(0, 1), 0.0), InvalidArgument);
    EXPECT_THROW(quantile(Marginal::uniform(0, 1), 1.0), InvalidArgument);
}

TEST(Marginal, MeanExamples) {
    EXPECT_DOUBLE_EQ(marginal_mean(Marginal::pareto2(0, 1, 5)), 0.25);
    EXPECT_DOUBLE_EQ(marginal_mean(Marginal::uniform(0, 1)), 0.5);
    EXPECT_THROW(marginal_mean(Marginal::pareto2(0, 1, 1)), MomentUndefined);
    EXPECT_DOUBLE_EQ(marginal_mean(Marginal::empirical({1, 2, 2, 3, 7})), 3.0);
}

TEST(Marginal, RejectsInvalidParameters) {
    EXPECT_THROW(Marginal::uniform(1, 1), InvalidArgument);
    EXPECT_THROW(Marginal::exponential(0), InvalidArgument);
    EXPECT_THROW(Marginal::pareto2(0, -1, 2), InvalidArgument);
    EXPECT_THROW(Marginal::pareto2(0, 1, 0), InvalidArgument);
    EXPECT_THROW(Marginal::normal(0, 0), InvalidArgument);
    EXPECT_THROW(Marginal::empirical({}), InvalidArgument);
    EXPECT_THROW(Marginal::empirical({2, 1}), InvalidArgument);
    EXPECT_NO_THROW(Marginal::empirical_unsorted({2, 1}));
}

TEST(Marginal, QuantileIsGeneralizedInverse) {
    for (const auto& m : all_marginals()) {
        double prev = -INFINITY;
        for (int k = 1; k < 1000; ++k) {
            const double p = k / 1000.0;
            const double q = m.quantile(p);
            EXPECT_GE(q, prev) << m.describe();
            EXPECT_GE(m.cdf(q), p - 1e-15) << m.describe() << " p=" << p;
            prev = q;
        }
        if (m.continuous()) {
            for (double x : {-0.5, 0.1, 0.7, 1.5, 2.5}) {
                const double F = m.cdf(x);
                if (F > 0.0 && F < 1.0) {
                    EXPECT_LE(m.quantile(F), x + 1e-12 * std::max(1.0, std::abs(x))) << m.describe();
                }
            }
        }
    }
}

TEST(Marginal, TailQuantileKeepsUpperTailPrecision) {
    const auto p = Marginal::pareto2(0, 1, 5);
    // Fbar(x) = (1+x)^-5 = 1e-20 at x = 1e4 - 1.
    EXPECT_NEAR(p.tail_quantile(1e-20), 1e4 - 1.0, 1e-8);
    EXPECT_NEAR(p.tail(1e4 - 1.0), 1e-20, 1e-32);
    const auto e = Marginal::exponential(1);
    EXPECT_NEAR(e.tail_quantile(1e-300), 300 * std::log(10.0), 1e-10);
}

TEST(Marginal, ParetoMomentExistence) {
    const auto p = Marginal::pareto2(0, 1, 3);
    EXPECT_TRUE(p.moment_exists(2));
    EXPECT_FALSE(p.moment_exists(3));
    EXPECT_TRUE(Marginal::exponential(1).moment_exists(50));
}

TEST(NormalHelpers, QuantileRoundTrip) {
    for (double p : {1e-300, 1e-10, 0.01, 0.3, 0.5, 0.9, 1 - 1e-12}) {
        EXPECT_NEAR(normal_cdf(normal_quantile(p)) / p, 1.0, 1e-12);
    }
}

TEST(NormalHelpers, BivariateCdfAtOrigin) {
    // Sheppard: Phi2(0, 0; r) = 1/4 + asin(r) / (2 pi).
    for (double r : {-0.99, -0.5, 0.0, 0.3, 0.8, 0.999}) {
        EXPECT_NEAR(bivariate_normal_cdf(0, 0, r), 0.25 + std::asin(r) / (2 * std::numbers::pi), 1e-15);
    }
}

TEST(NormalHelpers, BivariateCdfReferenceValues) {
    // 30-digit values from a direct integral of the conditional normal
    // (mpmath, see tests/oracles/reference_values.py).
    EXPECT_NEAR(bivariate_normal_cdf(1.0, -0.5, 0.6), 0.30132191575296217, 1e-14);
    EXPECT_NEAR(bivariate_normal_cdf(-2.0, 1.5, -0.7), 0.0095031193582388468, 1e-14);
    EXPECT_NEAR(bivariate_normal_cdf(0.3, 0.3, 0.95), 0.56961250698354635, 1e-14);
    EXPECT_NEAR(bivariate_normal_cdf(2.0, 2.0, 1.0), normal_cdf(2.0), 1e-15);
    EXPECT_NEAR(bivariate_normal_cdf(1.0, -1.0, -1.0), normal_cdf(1.0) - normal_cdf(1.0), 1e-15);
}

TEST(Copula, BoundaryConditions) {
    Eigen::MatrixXd R(2, 2);
    R << 1, 0.4, 0.4, 1;
    const std::vector<Copula> cs{Copula::independent(2), Copula::comonotone(2), Copula::fgm2(-0.7),
                                 Copula::gaussian(R)};
    for (const auto& c : cs) {
        for (double u : {0.1, 0.5, 0.93}) {
            const double a[2] = {u, 1.0};
            const double b[2] = {1.0, u};
            const double z[2] = {0.0, u};
            EXPECT_NEAR(c.cdf(a), u, 1e-14) << c.describe();
            EXPECT_NEAR(c.cdf(b), u, 1e-14) << c.describe();
            EXPECT_NEAR(c.cdf(z), 0.0, 1e-14) << c.describe();
        }
    }
}

TEST(Copula, FgmSurvivalMatchesInclusionExclusion) {
    const auto c = Copula::fgm2(0.6);
    for (double v1 : {0.2, 0.5, 0.9}) {
        for (double v2 : {0.1, 0.7}) {
            const double u[2] = {1 - v1, 1 - v2};
            const double v[2] = {v1, v2};
            EXPECT_NEAR(c.survival(v), v1 + v2 - 1 + c.cdf(u), 1e-15);
        }
    }
}

TEST(Copula, Egm3SurvivalMatchesInclusionExclusion) {
    const auto c = Copula::egm3(0.3, -0.2, 0.2, 0.1);
    auto C = [&](double a, double b, double d) {
        const double u[3] = {a, b, d};
        return c.cdf(u);
    };
    const double v[3] = {0.3, 0.6, 0.8};
    const double u1 = 1 - v[0], u2 = 1 - v[1], u3 = 1 - v[2];
    const double incl = 1 - u1 - u2 - u3 + C(u1, u2, 1) + C(u1, 1, u3) + C(1, u2, u3) - C(u1, u2, u3);
    EXPECT_NEAR(c.survival(v), incl, 1e-15);
}

TEST(Copula, Egm3Admissibility) {
    EXPECT_TRUE(egm3_admissible({1, 1, 1, 0}));
    EXPECT_FALSE(egm3_admissible({1, 1, 1, 2}));
    EXPECT_NO_THROW(Copula::egm3(1, 1, 1, 0));
    EXPECT_THROW(Copula::egm3(1, 1, 1, 2), InadmissibleCopula);
}

TEST(Copula, FgmParameterRange) {
    EXPECT_NO_THROW(Copula::fgm2(-1));
    EXPECT_NO_THROW(Copula::fgm2(1));
    EXPECT_THROW(Copula::fgm2(1.01), InadmissibleCopula);
}

TEST(Copula, GaussianRejectsIndefiniteCorrelation) {
    Eigen::MatrixXd R(3, 3);
    R << 1, 0.9, -0.9, 0.9, 1, 0.9, -0.9, 0.9, 1;  // smallest eigenvalue about -0.8
    EXPECT_THROW(Copula::gaussian(R), InadmissibleCopula);
    Eigen::MatrixXd S(2, 2);
    S << 1, 0.5, 0.4, 1;
    EXPECT_THROW(Copula::gaussian(S), InadmissibleCopula);
    Eigen::MatrixXd D(2, 2);
    D << 2, 0.5, 0.5, 1;
    EXPECT_THROW(Copula::gaussian(D), InadmissibleCopula);
    Eigen::MatrixXd singular(2, 2);
    singular << 1, 1, 1, 1;
    EXPECT_NO_THROW(Copula::gaussian(singular));
}

TEST(JointModel, ParetoMarginalShapeIsCombined) {
    const auto m = JointModel::pareto3(4.0, 1.0);
    ASSERT_EQ(m.dim(), 3u);
    const auto& p = std::get<ParetoII>(m.marginals()[1].params());
    EXPECT_EQ(p.shape, 5.0);
    EXPECT_DOUBLE_EQ(m.marginals()[0].mean(), 0.25);
}

TEST(JointModel, CopulaModelChecksDimension) {
    EXPECT_THROW(JointModel::copula_model(Copula::fgm2(0.1), {Marginal::uniform(0, 1)}), InvalidArgument);
}

TEST(JointModel, GaussianValidation) {
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(2);
    Eigen::MatrixXd bad(2, 2);
    bad << 1, 2, 2, 1;
    EXPECT_THROW(JointModel::gaussian(mu, bad), InvalidArgument);
    Eigen::MatrixXd zero_var(2, 2);
    zero_var << 0, 0, 0, 1;
    EXPECT_THROW(JointModel::gaussian(mu, zero_var), InvalidArgument);
}

TEST(SampleMatrix, Validation) {
    EXPECT_THROW(SampleMatrix(1, 2, {1, 2}), InvalidArgument);
    EXPECT_THROW(SampleMatrix(2, 1, {1, 2}), InvalidArgument);
    EXPECT_THROW(SampleMatrix(2, 2, {1, 2, NAN, 3}), InvalidArgument);
    EXPECT_THROW(SampleMatrix(2, 2, {1, 2, INFINITY, 3}), InvalidArgument);
    const SampleMatrix s(3, 2, {1, 5, 1, 6, 1, 7});
    EXPECT_TRUE(s.degenerate(0));
    EXPECT_FALSE(s.degenerate(1));
    EXPECT_TRUE(s.any_degenerate());
}

TEST(SampleMatrix, Transformations) {
    const SampleMatrix s(3, 2, {1, -2, 3, 4, 5, 0});
    const auto neg = s.negated();
    EXPECT_EQ(neg(1, 1), -4.0);
    const auto sh = s.shifted_to_column_minima();
    EXPECT_EQ(sh(0, 0), 0.0);
    EXPECT_EQ(sh(1, 1), 6.0);
    const std::size_t order[2] = {1, 0};
    EXPECT_EQ(s.select_columns(order)(2, 0), 0.0);
    EXPECT_EQ(s.slice_rows(1, 3).rows(), 2u);
    EXPECT_EQ(s.head(2)(1, 0), 3.0);
}

TEST(DiscreteJoint, Validation) {
    EXPECT_THROW(DiscreteJoint({{{0, 0}, 0.5}, {{0, 0}, 0.5}}), InvalidArgument);
    EXPECT_THROW(DiscreteJoint({{{0, 0}, 0.5}, {{1, 1}, 0.4}}), InvalidArgument);
    EXPECT_THROW(DiscreteJoint({{{0, 0}, 1.0}, {{1, 1}, 0.0}}), InvalidArgument);
    EXPECT_NO_THROW(DiscreteJoint({{{0, 1}, 1.0 / 3}, {{1, 0}, 1.0 / 3}, {{0, -1}, 1.0 / 3}}));
}

TEST(DiscreteJoint, FromSampleMergesDuplicates) {
    const SampleMatrix s(4, 2, {1, 1, 2, 2, 1, 1, 3, 0});
    const auto d = DiscreteJoint::from_sample(s);
    ASSERT_EQ(d.atoms().size(), 3u);
    double total = 0;
    for (const auto& a : d.atoms()) {
        total += a.prob;
        if (a.point == std::vector<double>{1, 1}) EXPECT_DOUBLE_EQ(a.prob, 0.5);
    }
    EXPECT_DOUBLE_EQ(total, 1.0);
}

TEST(MeasureReport, Invariants) {
    EXPECT_THROW(MeasureReport::make(Measure::rho, Variant::closed_form, NAN), InvalidArgument);
    EXPECT_THROW(MeasureReport::make(Measure::rho, Variant::monte_carlo, 0.5), InvalidArgument);
    Diagnostics d;
    d.seed = 7;
    EXPECT_NO_THROW(MeasureReport::make(Measure::rho, Variant::monte_carlo, 0.5, d));
    EXPECT_EQ(to_string(Measure::rho_c), "rho_c");
    EXPECT_EQ(parse_measure("blomqvist"), Measure::blomqvist);
    EXPECT_FALSE(parse_measure("tau").has_value());
}

TEST(QuadratureSpec, Validation) {
    QuadratureSpec q;
    EXPECT_NO_THROW(q.validate());
    q.nodes = 7;
    EXPECT_THROW(q.validate(), InvalidArgument);
    q = {};
    q.truncation = 0.5;
    EXPECT_THROW(q.validate(), InvalidArgument);
    q = {};
    q.tolerance = 0;
    EXPECT_THROW(q.validate(), InvalidArgument);
}

TEST(Csv, ReadsHeaderAndRows) {
    std::istringstream in("\xEF\xBB\xBFx,y\r\n1,2.5\r\n-3e2,4\n");
    const auto s = read_csv(in);
    EXPECT_EQ(s.rows(), 2u);
    EXPECT_EQ(s.names()[0], "x");
    EXPECT_EQ(s(1, 0), -300.0);
}

TEST(Csv, ReportsRowAndColumn) {
    std::istringstream in("a,b\n1,2\n3,x\n");
    try {
        read_csv(in);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.row(), 3u);
        EXPECT_EQ(e.column(), 2u);
    }
    std::istringstream ragged("a,b\n1,2\n3\n");
    EXPECT_THROW(read_csv(ragged), ParseError);
    std::istringstream comma_decimal("a,b\n1;2,3\n");
    EXPECT_THROW(read_csv(comma_decimal), ParseError);
}

TEST(Csv, RoundTripIsExact) {
    const SampleMatrix s(2, 3, {0.1, 1.0 / 3.0, -2e-300, 5e300, std::nextafter(1.0, 2.0), 7}, {"a", "b", "c"});
    std::stringstream io;
    write_csv(io, s);
    const auto back = read_csv(io);
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(back(i, j), s(i, j));
    }
    EXPECT_EQ(back.names(), s.names());
}
