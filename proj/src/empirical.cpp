#include "comodep/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "comodep/errors.hpp"

namespace comodep::empirical {

namespace {

// Neumaier summation of the values sorted ascending: independent of the
// order in which the terms were produced.
double canonical_sum(std::vector<double> terms) {
    std::sort(terms.begin(), terms.end());
    double sum = 0.0;
    double comp = 0.0;
    for (double v : terms) {
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

double canonical_product(std::vector<double> factors) {
    std::sort(factors.begin(), factors.end());
    double p = 1.0;
    for (double f : factors) p *= f;
    return p;
}

double row_product(std::span<const double> row) { return canonical_product({row.begin(), row.end()}); }

double mean_of_row_products(const SampleMatrix& s) {
    std::vector<double> prods(s.rows());
    for (std::size_t i = 0; i < s.rows(); ++i) prods[i] = row_product(s.row(i));
    return canonical_sum(std::move(prods)) / static_cast<double>(s.rows());
}

std::vector<double> column_sums(const SampleMatrix& s) {
    std::vector<double> out(s.cols());
    for (std::size_t j = 0; j < s.cols(); ++j) out[j] = canonical_sum(s.column(j));
    return out;
}

double range_product(const SampleMatrix& s) {
    std::vector<double> ranges(s.cols());
    for (std::size_t j = 0; j < s.cols(); ++j) {
        const auto c = s.column(j);
        const auto [lo, hi] = std::minmax_element(c.begin(), c.end());
        ranges[j] = *hi - *lo;
    }
    return canonical_product(std::move(ranges));
}

void require_nondegenerate(const SampleMatrix& s, const char* what) {
    for (std::size_t j = 0; j < s.cols(); ++j) {
        if (s.degenerate(j)) {
            throw DegenerateDenominator(std::string(what) + ": column " + std::to_string(j + 1) + " is constant");
        }
    }
}

void require_denominator(double num, double den, double scale, const char* what) {
    if (!(std::abs(den) > 1e-12 * std::max(std::abs(num), scale))) {
        throw DegenerateDenominator(std::string(what) + ": denominator vanishes");
    }
}

}  // namespace

ComonotoneRearrangement comonotonic_rearrangement(const SampleMatrix& sample) {
    const std::size_t n = sample.rows();
    const std::size_t m = sample.cols();
    std::vector<double> data(n * m);
    for (std::size_t j = 0; j < m; ++j) {
        auto c = sample.column(j);
        std::sort(c.begin(), c.end());
        for (std::size_t i = 0; i < n; ++i) data[i * m + j] = c[i];
    }
    return {SampleMatrix(n, m, std::move(data), sample.names())};
}

EstimatorParts rho_hat_general_parts(const SampleMatrix& sample) {
    require_nondegenerate(sample, "rho_hat_general");
    const double n = static_cast<double>(sample.rows());
    auto means = column_sums(sample);
    for (double& v : means) v /= n;
    const double mean_product = canonical_product(means);
    const double joint = mean_of_row_products(sample);
    const double comonotone = mean_of_row_products(comonotonic_rearrangement(sample).sorted);
    EstimatorParts p;
    p.numerator = joint - mean_product;
    p.denominator = comonotone - mean_product;
    require_denominator(p.numerator, p.denominator, range_product(sample), "rho_hat_general");
    p.value = p.numerator / p.denominator;
    return p;
}

double rho_hat_general(const SampleMatrix& sample) { return rho_hat_general_parts(sample).value; }

EstimatorParts rho_hat_nonneg_parts(const SampleMatrix& sample) {
    require_nondegenerate(sample, "rho_hat_nonneg");
    const std::size_t n = sample.rows();
    const std::size_t m = sample.cols();
    const double nd = static_cast<double>(n);
    std::vector<double> minima(m);
    for (std::size_t j = 0; j < m; ++j) {
        const auto c = sample.column(j);
        minima[j] = *std::min_element(c.begin(), c.end());
    }

    // (1/n^m) prod_j (sum_i Y_ij - n m_j)
    const auto sums = column_sums(sample);
    std::vector<double> shifted_sums(m);
    for (std::size_t j = 0; j < m; ++j) shifted_sums[j] = (sums[j] - nd * minima[j]) / nd;
    const double independent = canonical_product(shifted_sums);

    auto shifted_moment = [&](const SampleMatrix& s) {
        std::vector<double> prods(n);
        std::vector<double> f(m);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < m; ++j) f[j] = s(i, j) - minima[j];
            prods[i] = canonical_product(f);
        }
        return canonical_sum(std::move(prods)) / nd;
    };

    EstimatorParts p;
    p.numerator = shifted_moment(sample) - independent;
    p.denominator = shifted_moment(comonotonic_rearrangement(sample).sorted) - independent;
    require_denominator(p.numerator, p.denominator, range_product(sample), "rho_hat_nonneg");
    p.value = p.numerator / p.denominator;
    return p;
}

double rho_hat_nonneg(const SampleMatrix& sample) { return rho_hat_nonneg_parts(sample).value; }

namespace {

// Pairwise covariance sum with 1/n normalisation.
double pairwise_covariance_sum(const SampleMatrix& s, std::span<const double> means, double& scale) {
    const std::size_t n = s.rows();
    const std::size_t m = s.cols();
    std::vector<double> pair_terms;
    std::vector<double> ranges(m);
    for (std::size_t j = 0; j < m; ++j) {
        const auto c = s.column(j);
        const auto [lo, hi] = std::minmax_element(c.begin(), c.end());
        ranges[j] = *hi - *lo;
    }
    scale = 0.0;
    std::vector<double> prods(n);
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = 0; b < a; ++b) {
            for (std::size_t i = 0; i < n; ++i) {
                prods[i] = canonical_product({s(i, a) - means[a], s(i, b) - means[b]});
            }
            pair_terms.push_back(canonical_sum(prods) / static_cast<double>(n));
            scale += ranges[a] * ranges[b];
        }
    }
    return canonical_sum(std::move(pair_terms));
}

}  // namespace

double rho_c_hat(const SampleMatrix& sample) {
    const double n = static_cast<double>(sample.rows());
    auto means = column_sums(sample);
    for (double& v : means) v /= n;
    double scale = 0.0;
    const double num = pairwise_covariance_sum(sample, means, scale);
    const double den = pairwise_covariance_sum(comonotonic_rearrangement(sample).sorted, means, scale);
    require_denominator(num, den, scale, "rho_c_hat");
    return num / den;
}

// ---------------------------------------------------------------------------
// Exact step-function integrals over the bounding box
// ---------------------------------------------------------------------------

namespace {

struct AxisGrid {
    std::vector<double> widths;       // cell widths, size K - 1
    std::vector<std::size_t> ranks;   // per observation, in 0..K-1
    std::vector<double> marginal;     // empirical marginal value on each cell, size K - 1
};

// For Orthant::lower, cell k = [a_k, a_{k+1}) and an observation counts when
// its rank r <= k (Y <= x on the cell). For Orthant::upper the axis is
// reversed so that the same "<=" test encodes Y > x.
AxisGrid make_axis(const SampleMatrix& s, std::size_t j, Orthant orthant) {
    const std::size_t n = s.rows();
    auto c = s.column(j);
    std::vector<double> grid = c;
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    const std::size_t k_count = grid.size();

    AxisGrid ax;
    ax.widths.resize(k_count - 1);
    for (std::size_t k = 0; k + 1 < k_count; ++k) ax.widths[k] = grid[k + 1] - grid[k];
    ax.ranks.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        ax.ranks[i] = static_cast<std::size_t>(std::lower_bound(grid.begin(), grid.end(), c[i]) - grid.begin());
    }
    if (orthant == Orthant::upper) {
        std::reverse(ax.widths.begin(), ax.widths.end());
        for (auto& r : ax.ranks) r = k_count - 1 - r;
    }
    std::vector<std::size_t> hist(k_count, 0);
    for (auto r : ax.ranks) ++hist[r];
    ax.marginal.resize(k_count - 1);
    std::size_t cum = 0;
    for (std::size_t k = 0; k + 1 < k_count; ++k) {
        cum += hist[k];
        ax.marginal[k] = static_cast<double>(cum) / static_cast<double>(n);
    }
    return ax;
}

double weighted_marginal_integral(const AxisGrid& ax) {
    double s = 0.0;
    for (std::size_t k = 0; k < ax.widths.size(); ++k) s += ax.widths[k] * ax.marginal[k];
    return s;
}

// 2-D cumulative counts C[a][b] = #{i in rows : r1 <= a, r2 <= b} from a
// histogram, via prefix sums.
void cumulate_2d(std::vector<double>& grid, std::size_t k1, std::size_t k2) {
    for (std::size_t a = 0; a < k1; ++a) {
        for (std::size_t b = 1; b < k2; ++b) grid[a * k2 + b] += grid[a * k2 + b - 1];
    }
    for (std::size_t a = 1; a < k1; ++a) {
        for (std::size_t b = 0; b < k2; ++b) grid[a * k2 + b] += grid[(a - 1) * k2 + b];
    }
}

}  // namespace

OrthantIntegrals box_orthant_integrals(const SampleMatrix& sample, Orthant orthant) {
    const std::size_t m = sample.cols();
    const std::size_t n = sample.rows();
    if (m != 2 && m != 3) throw DimensionUnsupported("box_orthant_integrals: only m = 2 or 3 is supported");
    if (m == 3 && n > kKappaMaxRowsM3) {
        throw DimensionUnsupported("box_orthant_integrals: m = 3 limited to " + std::to_string(kKappaMaxRowsM3) +
                                   " rows");
    }
    std::vector<AxisGrid> axes;
    for (std::size_t j = 0; j < m; ++j) axes.push_back(make_axis(sample, j, orthant));

    OrthantIntegrals out;
    out.independent = 1.0;
    for (const auto& ax : axes) out.independent *= weighted_marginal_integral(ax);
    for (const auto& ax : axes) {
        if (ax.widths.empty()) return {0.0, 0.0, 0.0};
    }

    const double nd = static_cast<double>(n);
    const std::size_t c1 = axes[0].widths.size();
    const std::size_t c2 = axes[1].widths.size();

    if (m == 2) {
        std::vector<double> counts(c1 * c2, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto r1 = axes[0].ranks[i];
            const auto r2 = axes[1].ranks[i];
            if (r1 < c1 && r2 < c2) counts[r1 * c2 + r2] += 1.0;
        }
        cumulate_2d(counts, c1, c2);
        double joint = 0.0;
        double comon = 0.0;
        for (std::size_t a = 0; a < c1; ++a) {
            double row_joint = 0.0;
            double row_comon = 0.0;
            for (std::size_t b = 0; b < c2; ++b) {
                row_joint += axes[1].widths[b] * counts[a * c2 + b];
                row_comon += axes[1].widths[b] * std::min(axes[0].marginal[a], axes[1].marginal[b]);
            }
            joint += axes[0].widths[a] * row_joint;
            comon += axes[0].widths[a] * row_comon;
        }
        out.joint = joint / nd;
        out.comonotone = comon;
        return out;
    }

    // m = 3: sweep the third axis, keeping the 2-D histogram of observations
    // whose third rank is at most the current slice.
    const std::size_t c3 = axes[2].widths.size();
    std::vector<std::vector<std::size_t>> by_slice(c3 + 1);
    for (std::size_t i = 0; i < n; ++i) by_slice[axes[2].ranks[i]].push_back(i);
    std::vector<double> hist(c1 * c2, 0.0);
    std::vector<double> counts(c1 * c2, 0.0);
    double joint = 0.0;
    double comon = 0.0;
    for (std::size_t c = 0; c < c3; ++c) {
        for (std::size_t i : by_slice[c]) {
            const auto r1 = axes[0].ranks[i];
            const auto r2 = axes[1].ranks[i];
            if (r1 < c1 && r2 < c2) hist[r1 * c2 + r2] += 1.0;
        }
        counts = hist;
        cumulate_2d(counts, c1, c2);
        const double f3 = axes[2].marginal[c];
        double slice_joint = 0.0;
        double slice_comon = 0.0;
        for (std::size_t a = 0; a < c1; ++a) {
            const double f1 = std::min(axes[0].marginal[a], f3);
            double row_joint = 0.0;
            double row_comon = 0.0;
            for (std::size_t b = 0; b < c2; ++b) {
                row_joint += axes[1].widths[b] * counts[a * c2 + b];
                row_comon += axes[1].widths[b] * std::min(f1, axes[1].marginal[b]);
            }
            slice_joint += axes[0].widths[a] * row_joint;
            slice_comon += axes[0].widths[a] * row_comon;
        }
        joint += axes[2].widths[c] * slice_joint;
        comon += axes[2].widths[c] * slice_comon;
    }
    out.joint = joint / nd;
    out.comonotone = comon;
    return out;
}

double kappa_hat(const SampleMatrix& sample) {
    const std::size_t m = sample.cols();
    if (m != 2 && m != 3) throw DimensionUnsupported("kappa_hat: only m = 2 or 3 is supported");
    require_nondegenerate(sample, "kappa_hat");
    const auto I = box_orthant_integrals(sample, Orthant::lower);
    const double num = I.joint - I.independent;
    const double den = I.comonotone - I.independent;
    require_denominator(num, den, range_product(sample), "kappa_hat");
    return num / den;
}

// ---------------------------------------------------------------------------
// Classical bivariate measures
// ---------------------------------------------------------------------------

std::vector<double> midranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

namespace {

double pearson_of(std::span<const double> x, std::span<const double> y, const char* what) {
    const std::size_t n = x.size();
    const double nd = static_cast<double>(n);
    const double mx = canonical_sum({x.begin(), x.end()}) / nd;
    const double my = canonical_sum({y.begin(), y.end()}) / nd;
    std::vector<double> sxy(n), sxx(n), syy(n);
    for (std::size_t i = 0; i < n; ++i) {
        sxy[i] = (x[i] - mx) * (y[i] - my);
        sxx[i] = (x[i] - mx) * (x[i] - mx);
        syy[i] = (y[i] - my) * (y[i] - my);
    }
    const double vx = canonical_sum(std::move(sxx));
    const double vy = canonical_sum(std::move(syy));
    if (!(vx > 0.0) || !(vy > 0.0)) throw DegenerateDenominator(std::string(what) + ": constant column");
    return std::clamp(canonical_sum(std::move(sxy)) / std::sqrt(vx * vy), -1.0, 1.0);
}

}  // namespace

Classical classical_hat(const SampleMatrix& sample) {
    if (sample.cols() != 2) throw DimensionUnsupported("classical measures are bivariate only");
    const std::size_t n = sample.rows();
    const auto x = sample.column(0);
    const auto y = sample.column(1);
    Classical out;
    out.pearson = pearson_of(x, y, "pearson");

    // Kendall tau-a.
    long long score = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = x[j] - x[i];
            const double dy = y[j] - y[i];
            const int sx = (dx > 0) - (dx < 0);
            const int sy = (dy > 0) - (dy < 0);
            score += sx * sy;
        }
    }
    const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
    out.kendall = static_cast<double>(score) / pairs;

    const auto rx = midranks(x);
    const auto ry = midranks(y);
    out.spearman = pearson_of(rx, ry, "spearman");

    // Gini's gamma on ranks; comonotone data give exactly 1.
    const double nd = static_cast<double>(n);
    double g = 0.0;
    for (std::size_t i = 0; i < n; ++i) g += std::abs(rx[i] + ry[i] - nd - 1.0) - std::abs(rx[i] - ry[i]);
    out.gini = g / std::floor(nd * nd / 2.0);

    // Blomqvist's beta: quadrant count at the ceil(n/2)-th order statistics,
    // relative to the largest count the marginal counts allow.
    auto sx = x;
    auto sy = y;
    std::sort(sx.begin(), sx.end());
    std::sort(sy.begin(), sy.end());
    const std::size_t h = (n + 1) / 2;
    const double medx = sx[h - 1];
    const double medy = sy[h - 1];
    std::size_t both = 0, cx = 0, cy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const bool ax = x[i] <= medx;
        const bool ay = y[i] <= medy;
        cx += ax;
        cy += ay;
        both += ax && ay;
    }
    out.blomqvist = 2.0 * static_cast<double>(both) / static_cast<double>(std::min(cx, cy)) - 1.0;
    return out;
}

double empirical_tail(const SampleMatrix& sample, std::span<const double> x) {
    if (x.size() != sample.cols()) throw InvalidArgument("empirical_tail: point has wrong dimension");
    std::size_t count = 0;
    for (std::size_t i = 0; i < sample.rows(); ++i) {
        const auto r = sample.row(i);
        bool all = true;
        for (std::size_t j = 0; j < r.size(); ++j) {
            if (!(r[j] > x[j])) {
                all = false;
                break;
            }
        }
        count += all;
    }
    return static_cast<double>(count) / static_cast<double>(sample.rows());
}

}  // namespace comodep::empirical
