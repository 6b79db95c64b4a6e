#include "urnsim/estimators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "urnsim/errors.hpp"

namespace urnsim {

namespace {

constexpr double kGolden = 0.6180339887498949; // (sqrt(5) - 1) / 2

// Sum_{k=a}^{m} k^(-alpha): the first few terms exactly, the remainder by
// Euler-Maclaurin. Accurate to ~1e-10 relative for a >= 1.
double partial_power_sum(double alpha, std::uint64_t a, std::uint64_t m) {
    if (m < a) return 0.0;
    constexpr std::uint64_t kExact = 48;
    double s = 0.0;
    const std::uint64_t stop = std::min(m, a + kExact - 1);
    for (std::uint64_t k = a; k <= stop; ++k)
        s += std::exp(-alpha * std::log(static_cast<double>(k)));
    if (stop == m) return s;
    const double lo = static_cast<double>(stop + 1);
    const double hi = static_cast<double>(m);
    const double one_m_a = 1.0 - alpha;
    double integral;
    if (std::abs(one_m_a) < 1e-12)
        integral = std::log(hi) - std::log(lo);
    else
        integral = (std::pow(hi, one_m_a) - std::pow(lo, one_m_a)) / one_m_a;
    const double f_lo = std::pow(lo, -alpha);
    const double f_hi = std::pow(hi, -alpha);
    const double fp_lo = -alpha * std::pow(lo, -alpha - 1.0);
    const double fp_hi = -alpha * std::pow(hi, -alpha - 1.0);
    return s + integral + 0.5 * (f_lo + f_hi) + (fp_hi - fp_lo) / 12.0;
}

struct TailStats {
    std::size_t n = 0;
    double sum_log = 0; // sum of count * ln(value) over the tail
};

// Golden-section maximizer of the tail log-likelihood
//   l(alpha) = -alpha * sum_log - n * ln Z(alpha)
double mle_alpha(const TailStats& t, std::uint64_t x_min, std::uint64_t x_max,
                 double* log_lik_out) {
    const auto neg_ll = [&](double alpha) {
        const double z = partial_power_sum(alpha, x_min, x_max);
        return alpha * t.sum_log + static_cast<double>(t.n) * std::log(z);
    };
    double lo = 1e-3, hi = 6.0;
    double x1 = hi - kGolden * (hi - lo);
    double x2 = lo + kGolden * (hi - lo);
    double f1 = neg_ll(x1), f2 = neg_ll(x2);
    for (int it = 0; it < 100; ++it) {
        if (f1 < f2) {
            hi = x2; x2 = x1; f2 = f1;
            x1 = hi - kGolden * (hi - lo);
            f1 = neg_ll(x1);
        } else {
            lo = x1; x1 = x2; f1 = f2;
            x2 = lo + kGolden * (hi - lo);
            f2 = neg_ll(x2);
        }
    }
    const double alpha = 0.5 * (lo + hi);
    if (log_lik_out) *log_lik_out = -neg_ll(alpha);
    return alpha;
}

// 3x3 linear solve, Gaussian elimination with partial pivoting.
std::array<double, 3> solve3(std::array<std::array<double, 3>, 3> a,
                             std::array<double, 3> rhs) {
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        std::swap(a[col], a[piv]);
        std::swap(rhs[col], rhs[piv]);
        const double d = a[col][col];
        if (d == 0.0) throw FitError("fit_breakpoint: singular normal equations");
        for (int r = col + 1; r < 3; ++r) {
            const double f = a[r][col] / d;
            for (int cc = col; cc < 3; ++cc) a[r][cc] -= f * a[col][cc];
            rhs[r] -= f * rhs[col];
        }
    }
    std::array<double, 3> x{};
    for (int r = 2; r >= 0; --r) {
        double s = rhs[r];
        for (int cc = r + 1; cc < 3; ++cc) s -= a[r][cc] * x[cc];
        x[r] = s / a[r][r];
    }
    return x;
}

struct SegFit {
    double sse;
    double value_at_break;
    double slope_left;
    double slope_right;
};

// Least squares for y = a + s1*min(x-t,0) + s2*max(x-t,0) at fixed t.
SegFit two_segment_ls(std::span<const double> xs, std::span<const double> ys, double t) {
    double su = 0, sv = 0, suu = 0, svv = 0, sy = 0, suy = 0, svy = 0;
    const std::size_t n = xs.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double u = std::min(xs[i] - t, 0.0);
        const double v = std::max(xs[i] - t, 0.0);
        su += u; sv += v; suu += u * u; svv += v * v;
        sy += ys[i]; suy += u * ys[i]; svy += v * ys[i];
    }
    const auto coef = solve3({{{static_cast<double>(n), su, sv},
                               {su, suu, 0.0},
                               {sv, 0.0, svv}}},
                             {sy, suy, svy});
    double sse = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = std::min(xs[i] - t, 0.0);
        const double v = std::max(xs[i] - t, 0.0);
        const double r = ys[i] - (coef[0] + coef[1] * u + coef[2] * v);
        sse += r * r;
    }
    return {sse, coef[0], coef[1], coef[2]};
}

} // namespace

PowerLawFit fit_power_law(std::span<const std::uint64_t> samples) {
    if (samples.size() < 10) throw FitError("fit_power_law: need at least 10 samples");
    std::map<std::uint64_t, std::size_t> hist;
    for (std::uint64_t v : samples) {
        if (v < 1) throw FitError("fit_power_law: samples must be positive integers");
        ++hist[v];
    }
    if (hist.size() < 2)
        throw FitError("fit_power_law: degenerate sample (zero tail variance)");

    std::vector<std::uint64_t> values;
    std::vector<std::size_t> counts;
    values.reserve(hist.size());
    for (const auto& [v, c] : hist) {
        values.push_back(v);
        counts.push_back(c);
    }
    const std::uint64_t x_max = values.back();

    // suffix statistics for every cutoff
    const std::size_t m = values.size();
    std::vector<std::size_t> tail_n(m + 1, 0);
    std::vector<double> tail_sum_log(m + 1, 0.0);
    std::vector<std::size_t> tail_distinct(m + 1, 0);
    for (std::size_t i = m; i-- > 0;) {
        tail_n[i] = tail_n[i + 1] + counts[i];
        tail_sum_log[i] = tail_sum_log[i + 1] +
                          static_cast<double>(counts[i]) *
                              std::log(static_cast<double>(values[i]));
        tail_distinct[i] = tail_distinct[i + 1] + 1;
    }

    // x_min is a lower cutoff, so only the smallest unique values are
    // worth scanning; cap the candidate list to bound the search.
    constexpr std::size_t kMaxCandidates = 100;
    bool found = false;
    PowerLawFit best;
    std::size_t scanned = 0;
    for (std::size_t i = 0; i < m && scanned < kMaxCandidates; ++i) {
        if (tail_n[i] < 10 || tail_distinct[i] < 2) break;
        ++scanned;
        const std::uint64_t x_min = values[i];
        TailStats ts{tail_n[i], tail_sum_log[i]};
        double ll = 0;
        const double alpha = mle_alpha(ts, x_min, x_max, &ll);
        const double z = partial_power_sum(alpha, x_min, x_max);
        double ks = 0, ecdf = 0;
        for (std::size_t j = i; j < m; ++j) {
            ecdf += static_cast<double>(counts[j]) / static_cast<double>(ts.n);
            const double cdf = partial_power_sum(alpha, x_min, values[j]) / z;
            ks = std::max(ks, std::abs(ecdf - cdf));
        }
        if (!found || ks < best.ks_distance) {
            found = true;
            best = PowerLawFit{alpha, x_min, ts.n, ks, ll};
        }
    }
    if (!found) throw FitError("fit_power_law: no admissible cutoff (tail too small)");
    return best;
}

BreakpointFit fit_breakpoint(std::span<const double> xs, std::span<const double> ys) {
    const std::size_t n = xs.size();
    if (n != ys.size()) throw FitError("fit_breakpoint: xs and ys differ in length");
    if (n < 8) throw FitError("fit_breakpoint: need at least 8 points");
    for (std::size_t i = 1; i < n; ++i)
        if (!(xs[i] > xs[i - 1]))
            throw FitError("fit_breakpoint: xs must be strictly increasing");

    // candidate breakpoints: midpoints leaving >= 2 points on each side
    std::vector<double> mids;
    for (std::size_t i = 1; i + 2 < n; ++i) mids.push_back(0.5 * (xs[i] + xs[i + 1]));

    std::size_t best_i = 0;
    double best_sse = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < mids.size(); ++i) {
        const double sse = two_segment_ls(xs, ys, mids[i]).sse;
        if (sse < best_sse) {
            best_sse = sse;
            best_i = i;
        }
    }
    double lo = mids[best_i > 0 ? best_i - 1 : 0];
    double hi = mids[std::min(best_i + 1, mids.size() - 1)];
    double x1 = hi - kGolden * (hi - lo);
    double x2 = lo + kGolden * (hi - lo);
    double f1 = two_segment_ls(xs, ys, x1).sse;
    double f2 = two_segment_ls(xs, ys, x2).sse;
    for (int it = 0; it < 70; ++it) {
        if (f1 < f2) {
            hi = x2; x2 = x1; f2 = f1;
            x1 = hi - kGolden * (hi - lo);
            f1 = two_segment_ls(xs, ys, x1).sse;
        } else {
            lo = x1; x1 = x2; f1 = f2;
            x2 = lo + kGolden * (hi - lo);
            f2 = two_segment_ls(xs, ys, x2).sse;
        }
    }
    double t = 0.5 * (lo + hi);
    SegFit refined = two_segment_ls(xs, ys, t);
    if (best_sse < refined.sse) { // keep the grid winner if refinement lost it
        t = mids[best_i];
        refined = two_segment_ls(xs, ys, t);
    }
    return BreakpointFit{refined.slope_left, refined.slope_right, t,
                         std::sqrt(refined.sse / static_cast<double>(n))};
}

LossCurveFit fit_loss_curve(std::span<const double> ds, std::span<const double> ls) {
    const std::size_t n = ds.size();
    if (n != ls.size()) throw FitError("fit_loss_curve: ds and ls differ in length");
    if (n < 6) throw FitError("fit_loss_curve: need at least 6 points");
    for (std::size_t i = 0; i < n; ++i)
        if (!(ds[i] > 0.0)) throw FitError("fit_loss_curve: D values must be positive");
    for (std::size_t i = 1; i < n; ++i)
        if (!(ds[i] > ds[i - 1]))
            throw FitError("fit_loss_curve: D values must be strictly increasing");

    double l_min = ls[0], l_max = ls[0];
    for (double v : ls) {
        l_min = std::min(l_min, v);
        l_max = std::max(l_max, v);
    }
    const double span = l_max - l_min;
    if (!(span > 0.0)) throw FitError("fit_loss_curve: constant loss data");

    std::vector<double> log_d(n);
    for (std::size_t i = 0; i < n; ++i) log_d[i] = std::log(ds[i]);

    struct Inner {
        double sse, amplitude, exponent;
    };
    const auto inner_fit = [&](double l0) -> Inner {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double y = std::log(ls[i] - l0);
            sx += log_d[i];
            sy += y;
            sxx += log_d[i] * log_d[i];
            sxy += log_d[i] * y;
        }
        const double nn = static_cast<double>(n);
        const double slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
        const double intercept = (sy - slope * sx) / nn;
        const double a = std::exp(intercept);
        const double s = -slope;
        double sse = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = ls[i] - (l0 + a * std::pow(ds[i], -s));
            sse += r * r;
        }
        return {sse, a, s};
    };

    // l_opt = l_min - delta; coarse log-spaced scan over delta, then golden
    constexpr int kGrid = 80;
    const double d_lo = span * 1e-6, d_hi = span * 10.0;
    const double step = std::log(d_hi / d_lo) / (kGrid - 1);
    int best = -1;
    double best_sse = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kGrid; ++i) {
        const double delta = d_lo * std::exp(step * i);
        const double sse = inner_fit(l_min - delta).sse;
        if (sse < best_sse) {
            best_sse = sse;
            best = i;
        }
    }
    if (best <= 0 || best >= kGrid - 1)
        throw FitError("fit_loss_curve: residual search does not bracket a minimum");
    double lo = d_lo * std::exp(step * (best - 1));
    double hi = d_lo * std::exp(step * (best + 1));
    double x1 = hi - kGolden * (hi - lo);
    double x2 = lo + kGolden * (hi - lo);
    double f1 = inner_fit(l_min - x1).sse;
    double f2 = inner_fit(l_min - x2).sse;
    for (int it = 0; it < 90; ++it) {
        if (f1 < f2) {
            hi = x2; x2 = x1; f2 = f1;
            x1 = hi - kGolden * (hi - lo);
            f1 = inner_fit(l_min - x1).sse;
        } else {
            lo = x1; x1 = x2; f1 = f2;
            x2 = lo + kGolden * (hi - lo);
            f2 = inner_fit(l_min - x2).sse;
        }
    }
    const double l_opt = l_min - 0.5 * (lo + hi);
    const Inner fit = inner_fit(l_opt);
    if (!(fit.exponent > 1e-8))
        throw FitError("fit_loss_curve: exponent degenerates to zero");
    return LossCurveFit{l_opt, fit.amplitude, fit.exponent,
                        std::sqrt(fit.sse / static_cast<double>(n))};
}

double ks_distance(std::span<const std::uint64_t> samples, const Pmf& pmf) {
    if (samples.empty()) throw FitError("ks_distance: empty sample list");
    const std::uint64_t d_max = pmf.d_max();
    std::vector<std::size_t> counts(d_max + 1, 0);
    for (std::uint64_t v : samples) {
        if (v < 1 || v > d_max)
            throw FitError("ks_distance: sample outside pmf support");
        ++counts[v];
    }
    const double n = static_cast<double>(samples.size());
    double ecdf = 0, cdf = 0, d = 0;
    for (std::uint64_t k = 1; k <= d_max; ++k) {
        ecdf += static_cast<double>(counts[k]) / n;
        cdf += pmf.at(k);
        d = std::max(d, std::abs(ecdf - cdf));
    }
    return d;
}

} // namespace urnsim
