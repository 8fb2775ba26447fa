#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "comodep/analytic.hpp"
#include "comodep/empirical.hpp"
#include "comodep/errors.hpp"
#include "comodep/oracle.hpp"

using namespace comodep;
using namespace comodep::oracle;

namespace {

DiscreteJoint law(const std::vector<std::vector<double>>& pts, const std::vector<double>& p) {
    std::vector<DiscreteAtom> atoms;
    for (std::size_t i = 0; i < pts.size(); ++i) atoms.push_back({pts[i], p[i]});
    return DiscreteJoint(std::move(atoms));
}

QuadratureSpec tight() {
    QuadratureSpec q;
    q.tolerance = 1e-9;
    return q;
}

JointModel uniform_model(Copula c) {
    const std::size_t m = c.dim();
    return JointModel::copula_model(std::move(c), std::vector<Marginal>(m, Marginal::uniform(0, 1)));
}

}  // namespace

TEST(DiscreteRho, Examples) {
    const double third = 1.0 / 3.0;
    const auto three = law({{0, 1}, {1, 0}, {0, -1}}, {third, third, third});
    EXPECT_EQ(discrete_rho(three), 0.0);
    EXPECT_NEAR(discrete_comonotone_moment(three), third, 1e-15);
    EXPECT_EQ(discrete_rho(law({{0, 0}, {1, 1}}, {0.5, 0.5})), 1.0);
    EXPECT_EQ(discrete_rho(law({{0, 0}, {0, 1}, {1, 0}, {1, 1}}, {0.25, 0.25, 0.25, 0.25})), 0.0);
    EXPECT_THROW(discrete_rho(law({{1, 2}, {1, 3}}, {0.5, 0.5})), DegenerateDenominator);
}

TEST(DiscreteRho, UnequalWeightsHandComputed) {
    // X1 in {0,1} with P(1)=0.3, X2 in {0,2} with P(2)=0.6; atoms (0,0) .4, (0,2) .3, (1,2) .3.
    // E[X1 X2] = 0.6, E X1 E X2 = 0.36, comonotone E = 2 * 0.3 = 0.6 -> rho = 1.
    EXPECT_NEAR(discrete_rho(law({{0, 0}, {0, 2}, {1, 2}}, {0.4, 0.3, 0.3})), 1.0, 1e-15);
    // Atoms (1,0) .3, (0,2) .6, (0,0) .1: E[X1 X2] = 0 -> rho = -0.36 / 0.24.
    EXPECT_NEAR(discrete_rho(law({{1, 0}, {0, 2}, {0, 0}}, {0.3, 0.6, 0.1})), -1.5, 1e-14);
}

TEST(DiscreteRho, PlugInOfEstimator) {
    std::mt19937_64 gen(5);
    std::normal_distribution<double> z;
    std::uniform_int_distribution<std::size_t> rows(2, 60);
    int checked = 0;
    for (int t = 0; t < 300; ++t) {
        const std::size_t m = 2 + t % 3;
        const std::size_t n = rows(gen);
        std::vector<double> d(n * m);
        for (auto& v : d) v = t % 2 ? std::round(2 * z(gen)) : z(gen);
        const SampleMatrix y(n, m, std::move(d));
        if (y.any_degenerate()) continue;
        const double est = empirical::rho_hat_general(y);
        EXPECT_NEAR(discrete_rho(DiscreteJoint::from_sample(y)), est, 1e-12 * std::max(1.0, std::abs(est)));
        ++checked;
    }
    EXPECT_GT(checked, 200);
}

TEST(TailIntegral, ParetoExamples) {
    EXPECT_NEAR(tail_integral_rho(JointModel::pareto3(4, 0), tight()).value, 0.0, 1e-12);
    const double ref = analytic::pareto3_rho(1, 4);
    EXPECT_NEAR(tail_integral_rho(JointModel::pareto3(4, 1), tight()).value, ref, 1e-3 * ref);
}

TEST(TailIntegral, ParetoMomentsAgainstClosedForms) {
    const auto model = JointModel::pareto3(4, 1);
    const auto m = analytic::pareto3_moments(1, 4);
    EXPECT_NEAR(tail_product_moment(model, {0, 1}, tight()).value, m.pair_moment, 1e-8);
    EXPECT_NEAR(tail_product_moment(model, {0, 1, 2}, tight()).value, m.triple_moment, 1e-8);
    EXPECT_NEAR(tail_product_moment(model, {2}, tight()).value, m.mean, 1e-10);
}

TEST(TailIntegral, FgmAgainstClosedForm) {
    EXPECT_NEAR(tail_integral_rho(uniform_model(Copula::fgm2(0.8)), tight()).value, 0.8 / 3.0, 1e-6);
    const auto exp_model =
        JointModel::copula_model(Copula::fgm2(-0.7), {Marginal::exponential(1), Marginal::exponential(1)});
    EXPECT_NEAR(tail_integral_rho(exp_model, tight()).value, -0.7 / 4.0, 1e-6);
}

TEST(TailIntegral, AgreesWithCopulaQuadrature) {
    Eigen::MatrixXd R(2, 2);
    R << 1, 0.5, 0.5, 1;
    const auto model = JointModel::copula_model(Copula::gaussian(R), {Marginal::exponential(1), Marginal::pareto2(1, 1, 5)});
    const auto a = tail_integral_rho(model, tight());
    const auto b = analytic::rho_from_copula(model, tight());
    EXPECT_NEAR(a.value, b.value, 10 * (a.error + b.error) + 1e-9);
}

TEST(TailIntegral, Errors) {
    const auto g = JointModel::gaussian(Eigen::Vector2d(1, 1), Eigen::Matrix2d::Identity());
    EXPECT_THROW(tail_integral_rho(g, tight()), InvalidArgument);
    const auto normal = JointModel::copula_model(Copula::fgm2(0.2), {Marginal::normal(0, 1), Marginal::uniform(0, 1)});
    EXPECT_THROW(tail_integral_rho(normal, tight()), InvalidArgument);
    const auto four = JointModel::copula_model(Copula::independent(4), std::vector<Marginal>(4, Marginal::uniform(0, 1)));
    EXPECT_THROW(tail_integral_rho(four, tight()), DimensionUnsupported);
    EXPECT_THROW(tail_product_moment(JointModel::pareto3(4, 1), {0, 0}, tight()), InvalidArgument);
}

TEST(KappaFromCopula, EgmClosedForm) {
    const Egm3 p{0.2, -0.1, 0.1, 0.3};
    const auto model = uniform_model(Copula::egm3(p.a12, p.a13, p.a23, p.a123));
    EXPECT_NEAR(kappa_from_copula(model, tight()).value, analytic::egm3_kappa(p), 1e-8);
    EXPECT_NEAR(kappa_from_copula(uniform_model(Copula::fgm2(0.6)), tight()).value, 0.2, 1e-9);
}

TEST(McRho, ComonotoneIsExactlyOne) {
    const auto model = JointModel::copula_model(Copula::comonotone(3), std::vector<Marginal>(3, Marginal::uniform(0, 1)));
    for (std::size_t n : {32u, 1000u}) EXPECT_EQ(mc_rho(model, n, 9).value, 1.0);
}

TEST(McRho, BitReproducible) {
    const auto model = uniform_model(Copula::fgm2(0.6));
    const auto a = mc_rho(model, 5000, 77);
    const auto b = mc_rho(model, 5000, 77);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.std_error, b.std_error);
    EXPECT_NE(mc_rho(model, 5000, 78).value, a.value);
}

TEST(McRho, FgmAndGaussian) {
    EXPECT_NEAR(mc_rho(uniform_model(Copula::fgm2(0.6)), 200000, 1).value, 0.2, 0.02);
    Eigen::Matrix3d S;
    S << 1, 0.5, 0.5, 0.5, 1, 0.5, 0.5, 0.5, 1;
    const auto g = JointModel::gaussian(Eigen::Vector3d::Ones(), S);
    const auto r = mc_rho(g, 200000, 2);
    EXPECT_NEAR(r.value, 0.5, 0.03);
    EXPECT_GT(r.std_error, 0.0);
}

TEST(McRho, Errors) {
    EXPECT_THROW(mc_rho(JointModel::pareto3(4, 1), 1000, 1), ModelNotSamplable);
    EXPECT_THROW(mc_rho(uniform_model(Copula::fgm2(0.1)), 31, 1), InvalidArgument);
}

TEST(Isserlis, PairingSumsWithinThreeStandardErrors) {
    Eigen::Matrix2d s2;
    s2 << 1, 0.4, 0.4, 1;
    const auto a = isserlis_bruteforce(Eigen::Vector2d::Zero(), s2, 400000, 3);
    EXPECT_NEAR(a.value, 0.4, 3 * a.std_error);
    Eigen::Matrix3d s3;
    s3 << 1, 0.3, -0.2, 0.3, 2, 0.4, -0.2, 0.4, 1.5;
    const auto b = isserlis_bruteforce(Eigen::Vector3d::Zero(), s3, 400000, 4);
    EXPECT_NEAR(b.value, 0.0, 3 * b.std_error);
    Eigen::Matrix4d s4;
    s4 << 1, .5, .3, .4, .5, 1, .7, .6, .3, .7, 1, .5, .4, .6, .5, 1;
    const auto c = isserlis_bruteforce(Eigen::Vector4d::Zero(), s4, 400000, 5);
    EXPECT_NEAR(c.value, 0.71, 3 * c.std_error);
}
