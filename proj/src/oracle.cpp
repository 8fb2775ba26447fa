#include "comodep/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

#include "comodep/empirical.hpp"
#include "comodep/errors.hpp"
#include "comodep/simulate.hpp"
#include "detail.hpp"

namespace comodep::oracle {

namespace {

double neumaier(const std::vector<double>& terms) {
    double sum = 0.0;
    double comp = 0.0;
    for (double v : terms) {
        const double t = sum + v;
        comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
        sum = t;
    }
    return sum + comp;
}

struct Step {
    double value;
    double cumulative;
};

std::vector<Step> marginal_staircase(const DiscreteJoint& joint, std::size_t j) {
    std::vector<std::pair<double, double>> vp;
    for (const auto& a : joint.atoms()) vp.emplace_back(a.point[j], a.prob);
    std::sort(vp.begin(), vp.end());
    std::vector<Step> steps;
    std::vector<double> probs;
    for (std::size_t i = 0; i < vp.size();) {
        std::size_t k = i;
        while (k < vp.size() && vp[k].first == vp[i].first) probs.push_back(vp[k++].second);
        steps.push_back({vp[i].first, neumaier(probs)});
        i = k;
    }
    return steps;
}

}  // namespace

double discrete_comonotone_moment(const DiscreteJoint& joint) {
    const std::size_t m = joint.dim();
    std::vector<std::vector<Step>> stairs;
    std::vector<double> breaks;
    for (std::size_t j = 0; j < m; ++j) {
        stairs.push_back(marginal_staircase(joint, j));
        for (const auto& s : stairs.back()) breaks.push_back(s.cumulative);
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    // On (t_{l-1}, t_l] every marginal quantile is constant.
    std::vector<std::size_t> idx(m, 0);
    std::vector<double> terms;
    double prev = 0.0;
    for (double t : breaks) {
        double prod = t - prev;
        for (std::size_t j = 0; j < m; ++j) {
            while (idx[j] + 1 < stairs[j].size() && stairs[j][idx[j]].cumulative < t) ++idx[j];
            prod *= stairs[j][idx[j]].value;
        }
        terms.push_back(prod);
        prev = t;
    }
    return neumaier(terms);
}

double discrete_rho(const DiscreteJoint& joint) {
    const std::size_t m = joint.dim();
    std::vector<double> joint_terms;
    std::vector<std::vector<double>> mean_terms(m);
    std::vector<double> lo(m, INFINITY), hi(m, -INFINITY);
    for (const auto& a : joint.atoms()) {
        double prod = a.prob;
        for (std::size_t j = 0; j < m; ++j) {
            prod *= a.point[j];
            mean_terms[j].push_back(a.prob * a.point[j]);
            lo[j] = std::min(lo[j], a.point[j]);
            hi[j] = std::max(hi[j], a.point[j]);
        }
        joint_terms.push_back(prod);
    }
    double mean_product = 1.0;
    double scale = 1.0;
    for (std::size_t j = 0; j < m; ++j) {
        mean_product *= neumaier(mean_terms[j]);
        scale *= hi[j] - lo[j];
    }
    const double num = neumaier(joint_terms) - mean_product;
    const double den = discrete_comonotone_moment(joint) - mean_product;
    if (!(std::abs(den) > 1e-12 * std::max(std::abs(num), scale))) {
        throw DegenerateDenominator("discrete_rho: comonotone denominator vanishes");
    }
    return num / den;
}

// ---------------------------------------------------------------------------
// Defining integrals
// ---------------------------------------------------------------------------

namespace {

enum class Integrand { joint, joint_excess, comonotone_excess };

double product(std::span<const double> v) {
    double p = 1.0;
    for (double x : v) p *= x;
    return p;
}

// |dx/dv| at the point with Fbar(x) = v.
double tail_jacobian(const Marginal& m, double v) {
    return std::visit(detail::overloaded{
                          [&](const Uniform& u) { return u.hi - u.lo; },
                          [&](const Exponential& e) { return 1.0 / (e.rate * v); },
                          [&](const ParetoII& p) { return p.scale / p.shape * std::pow(v, -1.0 / p.shape - 1.0); },
                          [&](const auto&) -> double {
                              throw InvalidArgument("tail integral: marginal " + m.describe() +
                                                    " is not a supported non-negative continuous law");
                          },
                      },
                      m.params());
}

void require_tail_marginals(const std::vector<Marginal>& ms) {
    for (const auto& m : ms) {
        (void)tail_jacobian(m, 0.5);
        if (m.support_lower() < 0.0) {
            throw InvalidArgument("tail integral: marginal " + m.describe() + " takes negative values");
        }
    }
}

// Joint survival in tail-probability coordinates, or its excess over the
// product, for the full m-vector v.
double survival_in_v(const JointModel& model, std::span<const double> v, bool excess) {
    return std::visit(detail::overloaded{
                          [&](const CopulaModel& c) {
                              return excess ? c.copula.survival_excess(v) : c.copula.survival(v);
                          },
                          [&](const ParetoII3& p) {
                              // Fbar = (min v)^(a0/t) prod v^(a/t) with t = a0 + a.
                              const double t = p.alpha0 + p.alpha;
                              const double lo = *std::min_element(v.begin(), v.end());
                              const double common = std::pow(product(v), p.alpha / t);
                              const double joint = std::pow(lo, p.alpha0 / t);
                              return excess ? common * (joint - std::pow(product(v), p.alpha0 / t)) : common * joint;
                          },
                          [&](const GaussianJoint&) -> double {
                              throw InvalidArgument("tail integral: Gaussian vectors are not non-negative");
                          },
                      },
                      model.params());
}

// Sum over the k! orderings of f(v) * Jacobian, where within each ordering
// the sorted coordinates are s1 >= s1 s2 >= s1 s2 s3.
template <class F>
double simplex_sum(std::size_t k, std::span<const AxisNode> s, F&& f) {
    std::array<double, 3> sorted{};
    double jac = 1.0;
    double t = 1.0;
    for (std::size_t j = 0; j < k; ++j) {
        t *= s[j].x;
        sorted[j] = t;
        if (j + 1 < k) jac *= std::pow(s[j].x, static_cast<double>(k - 1 - j));
    }
    if (!(sorted[k - 1] > 0.0)) return 0.0;
    std::array<std::size_t, 3> perm{0, 1, 2};
    std::array<double, 3> v{};
    double total = 0.0;
    do {
        for (std::size_t j = 0; j < k; ++j) v[perm[j]] = sorted[j];
        total += f(std::span<const double>(v.data(), k));
    } while (std::next_permutation(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(k)));
    const double out = total * jac;
    return std::isfinite(out) ? out : 0.0;
}

struct Accumulated {
    double value = 0.0;
    double error = 0.0;
    std::size_t nodes = 0;
};

// int over [0, inf)^axes of the chosen integrand, split by which axes lie in
// their support (v in (0,1)) and which lie below it (v = 1, exact length).
Accumulated tail_integral(const JointModel& model, const std::vector<std::size_t>& axes, Integrand kind,
                          const QuadratureSpec& spec) {
    const auto& ms = model.marginals();
    const std::size_t m = model.dim();
    const std::size_t a = axes.size();
    Accumulated acc;
    for (unsigned mask = 0; mask < (1u << a); ++mask) {
        std::vector<std::size_t> inside;
        double length = 1.0;
        for (std::size_t i = 0; i < a; ++i) {
            if (mask & (1u << i)) {
                inside.push_back(axes[i]);
            } else {
                length *= ms[axes[i]].support_lower();
            }
        }
        if (length == 0.0) continue;
        const std::size_t k = inside.size();

        auto g = [&](std::span<const double> vin) {
            std::array<double, 3> full{1.0, 1.0, 1.0};
            double jac = 1.0;
            for (std::size_t i = 0; i < k; ++i) {
                full[inside[i]] = vin[i];
                jac *= tail_jacobian(ms[inside[i]], vin[i]);
            }
            const std::span<const double> v(full.data(), m);
            double value = 0.0;
            switch (kind) {
                case Integrand::joint: value = survival_in_v(model, v, false); break;
                case Integrand::joint_excess: value = survival_in_v(model, v, true); break;
                case Integrand::comonotone_excess: {
                    // min and product over the integrated axes only; the
                    // others sit at v = 1.
                    double lo = 1.0;
                    for (std::size_t i = 0; i < k; ++i) lo = std::min(lo, vin[i]);
                    value = lo - product(vin);
                    break;
                }
            }
            return value * jac;
        };

        if (k == 0) {
            acc.value += length * g({});
            continue;
        }
        const auto r = integrate_cube(k, spec, [&](std::span<const AxisNode> s) { return simplex_sum(k, s, g); });
        acc.value += length * r.value;
        acc.error += length * r.error;
        acc.nodes = std::max(acc.nodes, r.nodes_per_axis);
    }
    return acc;
}

void require_tail_model(const JointModel& model) {
    const std::size_t m = model.dim();
    if (m != 2 && m != 3) throw DimensionUnsupported("tail integral: only m = 2 or 3 is supported");
    if (std::holds_alternative<GaussianJoint>(model.params())) {
        throw InvalidArgument("tail integral: Gaussian vectors are not non-negative");
    }
    require_tail_marginals(model.marginals());
}

analytic::RatioResult make_ratio(const Accumulated& num, const Accumulated& den, const char* what) {
    if (!(std::abs(den.value) > analytic::kDenominatorZero * std::max(1.0, std::abs(num.value)))) {
        throw DegenerateDenominator(std::string(what) + ": denominator vanishes");
    }
    analytic::RatioResult out;
    out.numerator = num.value;
    out.denominator = den.value;
    out.value = num.value / den.value;
    out.error = (num.error + std::abs(out.value) * den.error) / std::abs(den.value);
    out.nodes = std::max(num.nodes, den.nodes);
    return out;
}

}  // namespace

analytic::RatioResult tail_integral_rho(const JointModel& model, const QuadratureSpec& spec) {
    spec.validate();
    require_tail_model(model);
    detail::require_comonotone_moment(model.marginals());
    std::vector<std::size_t> axes(model.dim());
    std::iota(axes.begin(), axes.end(), 0);
    const auto num = tail_integral(model, axes, Integrand::joint_excess, spec);
    const auto den = tail_integral(model, axes, Integrand::comonotone_excess, spec);
    return make_ratio(num, den, "tail_integral_rho");
}

QuadratureResult tail_product_moment(const JointModel& model, const std::vector<std::size_t>& axes,
                                     const QuadratureSpec& spec) {
    spec.validate();
    require_tail_model(model);
    if (axes.empty() || axes.size() > model.dim()) throw InvalidArgument("tail_product_moment: bad axis list");
    for (std::size_t i = 0; i < axes.size(); ++i) {
        if (axes[i] >= model.dim()) throw InvalidArgument("tail_product_moment: axis out of range");
        for (std::size_t j = 0; j < i; ++j) {
            if (axes[i] == axes[j]) throw InvalidArgument("tail_product_moment: repeated axis");
        }
    }
    std::vector<Marginal> picked;
    for (auto i : axes) picked.push_back(model.marginals()[i]);
    detail::require_comonotone_moment(picked);
    const auto r = tail_integral(model, axes, Integrand::joint, spec);
    return {r.value, r.error, r.nodes, 0};
}

analytic::RatioResult kappa_from_copula(const JointModel& model, const QuadratureSpec& spec) {
    spec.validate();
    const auto* cm = std::get_if<CopulaModel>(&model.params());
    if (cm == nullptr) throw InvalidArgument("kappa_from_copula: needs a copula model");
    const std::size_t m = model.dim();
    if (m != 2 && m != 3) throw DimensionUnsupported("kappa_from_copula: only m = 2 or 3 is supported");
    double width = 1.0;
    for (const auto& mg : model.marginals()) {
        const auto* u = std::get_if<Uniform>(&mg.params());
        if (u == nullptr) throw InvalidArgument("kappa_from_copula: marginals must be uniform");
        width *= u->hi - u->lo;
    }
    // With uniform marginals dx = width du on the support box.
    auto run = [&](bool joint) {
        const auto r = integrate_cube(m, spec, [&](std::span<const AxisNode> s) {
            return simplex_sum(m, s, [&](std::span<const double> u) {
                if (joint) return cm->copula.cdf_excess(u);
                return *std::min_element(u.begin(), u.end()) - product(u);
            });
        });
        return Accumulated{width * r.value, width * r.error, r.nodes_per_axis};
    };
    return make_ratio(run(true), run(false), "kappa_from_copula");
}

// ---------------------------------------------------------------------------
// Monte Carlo
// ---------------------------------------------------------------------------

McEstimate mc_rho(const JointModel& model, std::size_t n, std::uint64_t seed) {
    if (n < 2 * kMcBatches) throw InvalidArgument("mc_rho: need at least two rows per batch");
    const SampleMatrix s = simulate::sample(model, n, seed);
    McEstimate out;
    out.value = empirical::rho_hat_general(s);
    std::vector<double> batch(kMcBatches);
    for (std::size_t b = 0; b < kMcBatches; ++b) {
        batch[b] = empirical::rho_hat_general(s.slice_rows(b * n / kMcBatches, (b + 1) * n / kMcBatches));
    }
    const double mean = std::accumulate(batch.begin(), batch.end(), 0.0) / kMcBatches;
    double ss = 0.0;
    for (double x : batch) ss += (x - mean) * (x - mean);
    out.std_error = std::sqrt(ss / (kMcBatches - 1) / kMcBatches);
    return out;
}

McEstimate isserlis_bruteforce(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov, std::size_t n_mc,
                               std::uint64_t seed) {
    if (n_mc < 2) throw InvalidArgument("isserlis_bruteforce: need n_mc >= 2");
    const SampleMatrix s = simulate::sample(JointModel::gaussian(mean, cov), n_mc, seed);
    std::vector<double> prods(n_mc);
    for (std::size_t i = 0; i < n_mc; ++i) prods[i] = product(s.row(i));
    const double mu = neumaier(prods) / static_cast<double>(n_mc);
    std::vector<double> sq(n_mc);
    for (std::size_t i = 0; i < n_mc; ++i) sq[i] = (prods[i] - mu) * (prods[i] - mu);
    const double var = neumaier(sq) / static_cast<double>(n_mc - 1);
    return {mu, std::sqrt(var / static_cast<double>(n_mc))};
}

}  // namespace comodep::oracle
