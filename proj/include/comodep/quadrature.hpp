#pragma once

// Tensor-product quadrature on the open unit cube with node doubling.
//
// Every node carries its complement 1 - x computed directly, so integrands
// with endpoint singularities (quantile functions of unbounded laws) can be
// evaluated without cancellation near x = 1.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "comodep/model.hpp"

namespace comodep {

struct AxisNode {
    double x;   // abscissa in (0, 1)
    double xc;  // 1 - x
    double w;   // weight
};

// Gauss-Legendre abscissae and weights on [-1, 1], ascending.
void gauss_legendre(std::size_t n, std::vector<double>& x, std::vector<double>& w);

// n-point Gauss-Legendre rule on [a, 1 - a].
std::vector<AxisNode> gauss_legendre_unit(std::size_t n, double a = 0.0);

inline constexpr double kTanhSinhTMax = 6.0;

// Tanh-sinh rule on (0, 1) with step h over t in [-t_max, t_max].
std::vector<AxisNode> tanh_sinh_unit(double h, double t_max = kTanhSinhTMax);

// Axis rule at refinement `level` (level 0 uses spec.nodes points, each level
// doubles the density). `truncated` applies the probability truncation of a
// Gauss-Legendre spec; tanh-sinh ignores it.
std::vector<AxisNode> axis_rule(const QuadratureSpec& spec, std::size_t level, bool truncated,
                                double truncation_override = -1.0);

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    std::size_t nodes_per_axis = 0;
    std::size_t levels = 0;
};

using CubeIntegrand = std::function<double(std::span<const AxisNode>)>;

struct CubeOptions {
    // Per-axis truncation flags (Gauss-Legendre only); empty means none.
    std::vector<bool> truncate;
    std::size_t max_levels = 8;
    // Refuse a refinement level whose tensor grid exceeds this many points.
    std::size_t max_points = 60'000'000;
};

// Integrates f over (0,1)^dim, doubling node density until two successive
// levels agree to spec.tolerance relative to the integral of |f|. Throws
// QuadratureNotConverged otherwise. Deterministic regardless of thread count.
QuadratureResult integrate_cube(std::size_t dim, const QuadratureSpec& spec, const CubeIntegrand& f,
                                const CubeOptions& options = {});

// One-dimensional convenience wrapper; f receives (x, 1 - x).
QuadratureResult integrate_unit(const QuadratureSpec& spec, const std::function<double(double, double)>& f,
                                bool truncated = false);

// Worker count from COMODEP_THREADS (default: hardware concurrency).
std::size_t worker_count();

// Runs body(i) for i in [0, count) on worker threads. Bodies must write to
// disjoint state.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

// Evaluates part(i) for i in [0, count) on worker threads and sums the
// results in index order.
double ordered_parallel_sum(std::size_t count, const std::function<double(std::size_t)>& part);

}  // namespace comodep
