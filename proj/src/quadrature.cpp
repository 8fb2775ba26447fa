#include "comodep/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>
#include <thread>

#include "comodep/errors.hpp"

namespace comodep {

void gauss_legendre(std::size_t n, std::vector<double>& x, std::vector<double>& w) {
    if (n == 0) throw InvalidArgument("gauss_legendre: n must be positive");
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const std::size_t half = (n + 1) / 2;
    for (std::size_t i = 0; i < half; ++i) {
        // Tricomi initial guess, then Newton on P_n.
        double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = z;
            for (std::size_t k = 2; k <= n; ++k) {
                const double kk = static_cast<double>(k);
                const double p2 = ((2.0 * kk - 1.0) * z * p1 - (kk - 1.0) * p0) / kk;
                p0 = p1;
                p1 = p2;
            }
            dp = static_cast<double>(n) * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        // Recompute derivative at the converged root.
        double p0 = 1.0;
        double p1 = z;
        for (std::size_t k = 2; k <= n; ++k) {
            const double kk = static_cast<double>(k);
            const double p2 = ((2.0 * kk - 1.0) * z * p1 - (kk - 1.0) * p0) / kk;
            p0 = p1;
            p1 = p2;
        }
        dp = static_cast<double>(n) * (z * p1 - p0) / (z * z - 1.0);
        const double weight = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = weight;
        w[n - 1 - i] = weight;
    }
    if (n % 2 == 1) x[n / 2] = 0.0;
}

std::vector<AxisNode> gauss_legendre_unit(std::size_t n, double a) {
    std::vector<double> x;
    std::vector<double> w;
    gauss_legendre(n, x, w);
    const double span = 1.0 - 2.0 * a;
    std::vector<AxisNode> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i].x = a + span * 0.5 * (1.0 + x[i]);
        out[i].xc = a + span * 0.5 * (1.0 - x[i]);
        out[i].w = span * 0.5 * w[i];
    }
    return out;
}

std::vector<AxisNode> tanh_sinh_unit(double h, double t_max) {
    if (!(h > 0.0)) throw InvalidArgument("tanh_sinh_unit: step must be positive");
    const auto k_max = static_cast<long>(std::floor(t_max / h + 1e-9));
    std::vector<AxisNode> out;
    out.reserve(static_cast<std::size_t>(2 * k_max + 1));
    for (long k = -k_max; k <= k_max; ++k) {
        const double t = static_cast<double>(k) * h;
        const double s = std::numbers::pi * std::sinh(t);
        // Logistic form of (1 + tanh(s/2)) / 2 and its complement.
        const double x = 1.0 / (1.0 + std::exp(-s));
        const double xc = 1.0 / (1.0 + std::exp(s));
        const double w = h * std::numbers::pi * std::cosh(t) * x * xc;
        if (x <= 0.0 || xc <= 0.0 || !(w > 0.0)) continue;
        out.push_back({x, xc, w});
    }
    return out;
}

std::vector<AxisNode> axis_rule(const QuadratureSpec& spec, std::size_t level, bool truncated,
                                double truncation_override) {
    const double scale = std::ldexp(1.0, static_cast<int>(level));
    if (spec.scheme == QuadratureScheme::gauss_legendre) {
        const double eps = truncation_override >= 0.0 ? truncation_override : spec.truncation;
        const auto n = static_cast<std::size_t>(static_cast<double>(spec.nodes) * scale);
        return gauss_legendre_unit(n, truncated ? eps : 0.0);
    }
    const double h0 = 2.0 * kTanhSinhTMax / static_cast<double>(spec.nodes - 1);
    return tanh_sinh_unit(h0 / scale);
}

std::size_t worker_count() {
    std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("COMODEP_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) hw = static_cast<std::size_t>(v);
    }
    return hw;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min(worker_count(), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < count; i += workers) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

double ordered_parallel_sum(std::size_t count, const std::function<double(std::size_t)>& part) {
    std::vector<double> partial(count, 0.0);
    parallel_for(count, [&](std::size_t i) { partial[i] = part(i); });
    double sum = 0.0;
    double comp = 0.0;
    for (double v : partial) {
        // Neumaier summation in fixed index order.
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    return sum + comp;
}

namespace {

struct TensorSums {
    double value;
    double magnitude;
};

TensorSums tensor_sum(std::size_t dim, const std::vector<std::vector<AxisNode>>& rules, const CubeIntegrand& f) {
    const auto& first = rules[0];
    std::vector<double> mags(first.size(), 0.0);
    const double value = ordered_parallel_sum(first.size(), [&](std::size_t i0) {
        std::vector<AxisNode> point(dim);
        std::vector<std::size_t> idx(dim, 0);
        point[0] = first[i0];
        double acc = 0.0;
        double mag = 0.0;
        if (dim == 1) {
            const double v = f(point);
            acc = first[i0].w * v;
            mag = std::abs(acc);
        } else {
            while (true) {
                double wprod = first[i0].w;
                for (std::size_t d = 1; d < dim; ++d) {
                    point[d] = rules[d][idx[d]];
                    wprod *= point[d].w;
                }
                const double v = f(point);
                acc += wprod * v;
                mag += std::abs(wprod * v);
                std::size_t d = dim - 1;
                while (d >= 1) {
                    if (++idx[d] < rules[d].size()) break;
                    idx[d] = 0;
                    --d;
                }
                if (d == 0) break;
            }
        }
        mags[i0] = mag;
        return acc;
    });
    double magnitude = 0.0;
    for (double m : mags) magnitude += m;
    return {value, magnitude};
}

}  // namespace

QuadratureResult integrate_cube(std::size_t dim, const QuadratureSpec& spec, const CubeIntegrand& f,
                                const CubeOptions& options) {
    spec.validate();
    if (dim == 0) throw InvalidArgument("integrate_cube: dimension must be positive");
    auto truncated = [&](std::size_t d) { return d < options.truncate.size() && options.truncate[d]; };
    const bool any_truncated =
        spec.scheme == QuadratureScheme::gauss_legendre &&
        std::any_of(options.truncate.begin(), options.truncate.end(), [](bool b) { return b; });

    auto evaluate = [&](std::size_t level, double eps_override) {
        std::vector<std::vector<AxisNode>> rules(dim);
        double points = 1.0;
        for (std::size_t d = 0; d < dim; ++d) {
            rules[d] = axis_rule(spec, level, truncated(d), eps_override);
            points *= static_cast<double>(rules[d].size());
        }
        if (points > static_cast<double>(options.max_points)) {
            return std::pair<TensorSums, std::size_t>{{std::nan(""), 0.0}, 0};
        }
        return std::pair<TensorSums, std::size_t>{tensor_sum(dim, rules, f), rules[0].size()};
    };

    auto [prev, prev_nodes] = evaluate(0, -1.0);
    double last_diff = std::nan("");
    for (std::size_t level = 1; level <= options.max_levels; ++level) {
        auto [cur, nodes] = evaluate(level, -1.0);
        if (nodes == 0) break;
        const double diff = std::abs(cur.value - prev.value);
        last_diff = diff;
        const double scale = std::max(cur.magnitude, std::abs(cur.value));
        if (!std::isfinite(cur.value)) break;
        if (diff <= spec.tolerance * scale) {
            QuadratureResult r{cur.value, diff, nodes, level + 1};
            if (any_truncated) {
                // Truncation check at half the cut-off.
                auto [half, hn] = evaluate(level, spec.truncation / 2.0);
                if (hn != 0) r.error += std::abs(half.value - cur.value);
            }
            return r;
        }
        prev = cur;
        prev_nodes = nodes;
    }
    throw QuadratureNotConverged("cube quadrature (dim " + std::to_string(dim) +
                                 ") did not reach tolerance; last change " + std::to_string(last_diff) +
                                 " at " + std::to_string(prev_nodes) + " nodes per axis");
}

QuadratureResult integrate_unit(const QuadratureSpec& spec, const std::function<double(double, double)>& f,
                                bool truncated) {
    CubeOptions opts;
    opts.truncate = {truncated};
    opts.max_levels = 10;
    return integrate_cube(1, spec, [&](std::span<const AxisNode> p) { return f(p[0].x, p[0].xc); }, opts);
}

}  // namespace comodep
