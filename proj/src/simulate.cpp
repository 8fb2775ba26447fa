#include "comodep/simulate.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "comodep/errors.hpp"
#include "comodep/quadrature.hpp"
#include "detail.hpp"

namespace comodep::simulate {

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c, std::array<std::uint32_t, 2> k) {
    constexpr std::uint64_t m0 = 0xD2511F53u;
    constexpr std::uint64_t m1 = 0xCD9E8D57u;
    constexpr std::uint32_t w0 = 0x9E3779B9u;
    constexpr std::uint32_t w1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = m0 * c[0];
        const std::uint64_t p1 = m1 * c[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
        k[0] += w0;
        k[1] += w1;
    }
    return c;
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}, stream_(stream) {}

std::uint32_t RandomStream::next_u32() {
    if (used_ == 4) {
        buffer_ = philox4x32({static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32),
                              static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
                             key_);
        ++counter_;
        used_ = 0;
    }
    return buffer_[used_++];
}

double RandomStream::uniform() {
    const std::uint64_t hi = next_u32();
    const std::uint64_t lo = next_u32();
    const std::uint64_t bits = ((hi << 32) | lo) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1p-53;
}

double RandomStream::normal() { return normal_quantile(uniform()); }

double fgm2_conditional_inverse(double alpha, double u1, double w) {
    const double a = alpha * (1.0 - 2.0 * u1);
    // Root of a u^2 - (1 + a) u + w = 0 in [0, 1], written without the 1/a
    // so that a = 0 reduces to u = w.
    const double b = 1.0 + a;
    const double disc = b * b - 4.0 * a * w;
    const double u2 = 2.0 * w / (b + std::sqrt(std::max(disc, 0.0)));
    // Rounding can push w = 1 a few ulps past 1.
    if (!(u2 >= 0.0 && u2 <= 1.0 + 8 * DBL_EPSILON)) throw InvalidArgument("FGM conditional inverse left [0, 1]");
    return std::min(u2, 1.0);
}

namespace {

// Maps a standard normal draw to a marginal without losing the upper tail.
double normal_to_marginal(const Marginal& m, double z) {
    double u = normal_cdf(z);
    double uc = normal_cdf(-z);
    u = std::clamp(u, DBL_MIN, 1.0 - DBL_EPSILON / 2);
    uc = std::clamp(uc, DBL_MIN, 1.0 - DBL_EPSILON / 2);
    return detail::quantile_at(m, u, uc);
}

Eigen::MatrixXd covariance_factor(const Eigen::MatrixXd& cov) {
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * root.asDiagonal();
}

// Fills rows [begin, end) of `out` from one stream; returns proposals used.
std::size_t fill_block(const JointModel& model, const Eigen::MatrixXd* factor, std::vector<double>& out,
                       std::size_t begin, std::size_t end, RandomStream& rng) {
    const std::size_t m = model.dim();
    const auto& ms = model.marginals();
    std::size_t proposals = 0;
    std::vector<double> u(m);
    Eigen::VectorXd eps(static_cast<Eigen::Index>(m));

    for (std::size_t i = begin; i < end; ++i) {
        double* row = out.data() + i * m;
        std::visit(detail::overloaded{
                       [&](const CopulaModel& cm) {
                           std::visit(detail::overloaded{
                                          [&](const IndependentCopula&) {
                                              for (std::size_t j = 0; j < m; ++j) row[j] = ms[j].quantile(rng.uniform());
                                              ++proposals;
                                          },
                                          [&](const ComonotoneCopula&) {
                                              const double v = rng.uniform();
                                              for (std::size_t j = 0; j < m; ++j) row[j] = ms[j].quantile(v);
                                              ++proposals;
                                          },
                                          [&](const Fgm2& f) {
                                              const double u1 = rng.uniform();
                                              const double w = rng.uniform();
                                              const double u2 = std::clamp(fgm2_conditional_inverse(f.alpha, u1, w),
                                                                           DBL_MIN, 1.0 - DBL_EPSILON / 2);
                                              row[0] = ms[0].quantile(u1);
                                              row[1] = ms[1].quantile(u2);
                                              ++proposals;
                                          },
                                          [&](const Egm3& e) {
                                              const double envelope = 1.0 + std::abs(e.a12) + std::abs(e.a13) +
                                                                      std::abs(e.a23) + std::abs(e.a123);
                                              while (true) {
                                                  for (double& x : u) x = rng.uniform();
                                                  const double w = rng.uniform();
                                                  ++proposals;
                                                  const double density = 1.0 + cm.copula.density_excess(u);
                                                  if (w * envelope <= density) break;
                                              }
                                              for (std::size_t j = 0; j < m; ++j) row[j] = ms[j].quantile(u[j]);
                                          },
                                          [&](const GaussianCopula&) {
                                              for (std::size_t j = 0; j < m; ++j) eps(static_cast<Eigen::Index>(j)) = rng.normal();
                                              const Eigen::VectorXd z = (*factor) * eps;
                                              for (std::size_t j = 0; j < m; ++j) {
                                                  row[j] = normal_to_marginal(ms[j], z(static_cast<Eigen::Index>(j)));
                                              }
                                              ++proposals;
                                          },
                                      },
                                      cm.copula.params());
                       },
                       [&](const GaussianJoint& g) {
                           for (std::size_t j = 0; j < m; ++j) eps(static_cast<Eigen::Index>(j)) = rng.normal();
                           const Eigen::VectorXd x = g.mean + (*factor) * eps;
                           for (std::size_t j = 0; j < m; ++j) row[j] = x(static_cast<Eigen::Index>(j));
                           ++proposals;
                       },
                       [&](const ParetoII3&) {},
                   },
                   model.params());
    }
    return proposals;
}

}  // namespace

SampleStats sample_with_stats(const JointModel& model, std::size_t n, std::uint64_t seed) {
    if (n < 2) throw InvalidArgument("sample: need n >= 2");
    if (std::holds_alternative<ParetoII3>(model.params())) {
        throw ModelNotSamplable("sample: no sampler for the trivariate Pareto II model");
    }
    Eigen::MatrixXd factor;
    if (const auto* cm = std::get_if<CopulaModel>(&model.params())) {
        if (const auto* e = std::get_if<Egm3>(&cm->copula.params()); e && !egm3_admissible(*e)) {
            throw InadmissibleCopula("sample: EGM3 parameters give a negative density");
        }
        if (std::holds_alternative<GaussianCopula>(cm->copula.params())) factor = cm->copula.gaussian_factor();
    } else if (const auto* g = std::get_if<GaussianJoint>(&model.params())) {
        factor = covariance_factor(g->cov);
    }

    const std::size_t m = model.dim();
    std::vector<double> data(n * m);
    const std::size_t blocks = (n + kBlockRows - 1) / kBlockRows;
    std::vector<std::size_t> proposals(blocks, 0);
    parallel_for(blocks, [&](std::size_t b) {
        RandomStream rng(seed, b);
        const std::size_t begin = b * kBlockRows;
        const std::size_t end = std::min(n, begin + kBlockRows);
        proposals[b] = fill_block(model, &factor, data, begin, end, rng);
    });

    SampleStats out{SampleMatrix(n, m, std::move(data)), 0};
    for (auto p : proposals) out.proposals += p;
    return out;
}

SampleMatrix sample(const JointModel& model, std::size_t n, std::uint64_t seed) {
    return sample_with_stats(model, n, seed).sample;
}

}  // namespace comodep::simulate
