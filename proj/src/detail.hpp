#pragma once

// Internal helpers shared by the analytic and oracle modules.

#include <cmath>
#include <span>
#include <vector>

#include "comodep/errors.hpp"
#include "comodep/model.hpp"
#include "comodep/quadrature.hpp"

namespace comodep::detail {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Quantile at a node, taking the tail branch near 1 so heavy tails keep
// full relative precision.
inline double quantile_at(const Marginal& m, double x, double xc) {
    return x <= 0.5 ? m.quantile(x) : m.tail_quantile(xc);
}

inline bool unbounded(const Marginal& m) {
    return !std::isfinite(m.support_lower()) || !std::isfinite(m.support_upper());
}

inline std::vector<bool> truncation_flags(std::span<const Marginal> ms) {
    std::vector<bool> out;
    for (const auto& m : ms) out.push_back(unbounded(m));
    return out;
}

// Throws MomentUndefined unless E[prod_i F_i^{-1}(U)] is finite. Pareto
// marginals with shapes t_i contribute (1-u)^(-1/t_i); the product is
// integrable iff sum 1/t_i < 1. Other families have all moments.
inline void require_comonotone_moment(std::span<const Marginal> ms) {
    double inverse_shapes = 0.0;
    for (const auto& m : ms) {
        if (const auto* p = std::get_if<ParetoII>(&m.params())) inverse_shapes += 1.0 / p->shape;
    }
    if (!(inverse_shapes < 1.0)) {
        throw MomentUndefined("comonotone product moment diverges (sum of inverse Pareto shapes >= 1)");
    }
}

inline double product_of_means(std::span<const Marginal> ms) {
    double p = 1.0;
    for (const auto& m : ms) p *= m.mean();
    return p;
}

}  // namespace comodep::detail
