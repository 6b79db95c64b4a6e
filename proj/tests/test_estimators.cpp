#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "urnsim/errors.hpp"
#include "urnsim/estimators.hpp"
#include "urnsim/urn.hpp"

using namespace urnsim;

namespace {

// inverse-CDF sampler over a Pmf, for synthetic-recovery oracles
std::vector<std::uint64_t> draw_from_pmf(const Pmf& pmf, std::size_t n,
                                         std::uint64_t seed) {
    std::vector<double> cdf(pmf.d_max());
    double acc = 0;
    for (std::uint64_t k = 1; k <= pmf.d_max(); ++k) {
        acc += pmf.at(k);
        cdf[k - 1] = acc;
    }
    std::mt19937_64 gen(seed);
    std::vector<std::uint64_t> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
        const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        out.push_back(static_cast<std::uint64_t>(it - cdf.begin()) + 1);
    }
    return out;
}

} // namespace

TEST_CASE("fit_power_law recovers a planted exponent") {
    const Pmf pmf = steady_state_pmf_powerlaw(0.5, 10000);
    const auto samples = draw_from_pmf(pmf, 100000, 2024);
    const PowerLawFit fit = fit_power_law(samples);
    CHECK(fit.alpha_hat > 0.45);
    CHECK(fit.alpha_hat < 0.55);
    CHECK(fit.n_tail >= 10);
    CHECK(fit.ks_distance < 0.05);
}

TEST_CASE("fit_power_law rejects degenerate and undersized input") {
    const std::vector<std::uint64_t> same(50, 7);
    CHECK_THROWS_AS(fit_power_law(same), FitError);
    const std::vector<std::uint64_t> few{1, 2, 3};
    CHECK_THROWS_AS(fit_power_law(few), FitError);
}

TEST_CASE("fit_power_law is deterministic") {
    const Pmf pmf = steady_state_pmf_powerlaw(0.7, 3000);
    const auto samples = draw_from_pmf(pmf, 20000, 5);
    const PowerLawFit a = fit_power_law(samples);
    const PowerLawFit b = fit_power_law(samples);
    CHECK(a.alpha_hat == b.alpha_hat);
    CHECK(a.x_min == b.x_min);
    CHECK(a.ks_distance == b.ks_distance);
}

TEST_CASE("fit_power_law sees the k^-(1-b) body of the process marginal") {
    // With b < 1 the positive-count law has a k^-(1-b) body below the
    // cutoff scale T/(b(N-1)). Restricted to that body the fitted exponent
    // recovers 1-b; past the cutoff the distribution steepens, so the
    // unrestricted fit is a property of the window, not of the body.
    const double b = 0.5;
    const FiniteMarginal m = polya_marginal_pmf(b, 2000, 4000000); // cutoff ~ 4000
    std::vector<double> body(m.positive.probs.begin(),
                             m.positive.probs.begin() + 400);
    double total = 0;
    for (double v : body) total += v;
    for (double& v : body) v /= total;
    const auto samples = draw_from_pmf(Pmf{body}, 20000, 99);
    const PowerLawFit fit = fit_power_law(samples);
    CHECK(fit.alpha_hat > 0.3);
    CHECK(fit.alpha_hat < 0.8);
}

TEST_CASE("fit_breakpoint recovers an exact two-segment curve") {
    std::vector<double> xs, ys;
    for (double x = 0; x <= 14.0001; x += 0.25) {
        xs.push_back(x);
        ys.push_back(x < 9.0 ? x : 9.0); // slope 1 then 0, knee at 9
    }
    const BreakpointFit fit = fit_breakpoint(xs, ys);
    CHECK(std::abs(fit.breakpoint - 9.0) < 0.05);
    CHECK(fit.slope_left == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(fit.slope_right) < 1e-9);
    CHECK(fit.rmse < 1e-9);
}

TEST_CASE("fit_breakpoint on the analytic growth curve finds the true knee") {
    // For b = 1 the knee sits at log10(bN/c) (up to log10(e-1) = 0.235);
    // for large b the curve saturates once c*D reaches N, three decades
    // earlier than bN/c for b = 1e3.
    const auto curve = [](const ModelParams& p) {
        std::vector<double> xs, ys;
        for (double x = 0; x <= 14.0001; x += 0.25) {
            xs.push_back(x);
            ys.push_back(std::log10(k_large_limit(p, std::pow(10.0, x))));
        }
        return fit_breakpoint(xs, ys);
    };

    const ModelParams b1{1e11, 1.0, 1e5, 0, 0};
    const BreakpointFit f1 = curve(b1);
    CHECK(std::abs(f1.breakpoint - std::log10(b1.b * b1.n / b1.c)) < 1.0);
    CHECK(std::abs(f1.slope_left - 1.0) < 0.05);
    CHECK(std::abs(f1.slope_right) < 0.05);

    const ModelParams fig{1e11, 1e3, 1e5, 0, 0};
    const BreakpointFit f2 = curve(fig);
    const double true_knee =
        std::log10(fig.b * fig.n * (std::exp(1.0 / fig.b) - 1.0) / fig.c);
    CHECK(true_knee == doctest::Approx(6.0).epsilon(1e-3));
    CHECK(std::abs(f2.breakpoint - true_knee) < 0.5);
    CHECK(std::abs(f2.slope_left - 1.0) < 0.05);
    CHECK(std::abs(f2.slope_right) < 0.05);
}

TEST_CASE("fit_breakpoint: straight line never fits worse than one segment") {
    std::vector<double> xs, ys;
    for (double x = 0; x < 10; x += 1.0) {
        xs.push_back(x);
        ys.push_back(0.5 * x + 2.0);
    }
    const BreakpointFit fit = fit_breakpoint(xs, ys);
    CHECK(fit.rmse <= 1e-9); // the best single line has rmse 0
    CHECK(fit.slope_left == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(fit.slope_right == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("fit_breakpoint is shift-equivariant") {
    std::vector<double> xs, ys, xs_shifted;
    std::mt19937_64 gen(33);
    for (double x = 0; x <= 12.0001; x += 0.5) {
        xs.push_back(x);
        xs_shifted.push_back(x + 5.0);
        const double noise = 1e-3 * (static_cast<double>(gen() >> 11) * 0x1.0p-53 - 0.5);
        ys.push_back((x < 6 ? 0.8 * x : 4.8 + 0.1 * (x - 6)) + noise);
    }
    const BreakpointFit a = fit_breakpoint(xs, ys);
    const BreakpointFit b = fit_breakpoint(xs_shifted, ys);
    CHECK(std::abs((b.breakpoint - a.breakpoint) - 5.0) < 1e-9);
    CHECK(std::abs(b.slope_left - a.slope_left) < 1e-9);
    CHECK(std::abs(b.slope_right - a.slope_right) < 1e-9);
}

TEST_CASE("fit_breakpoint input validation") {
    std::vector<double> xs{1, 2, 3, 4, 5, 6, 7};
    std::vector<double> ys{1, 2, 3, 4, 5, 6, 7};
    CHECK_THROWS_AS(fit_breakpoint(xs, ys), FitError); // 7 < 8 points
    std::vector<double> bad_x{1, 2, 2, 4, 5, 6, 7, 8};
    std::vector<double> y8{1, 2, 3, 4, 5, 6, 7, 8};
    CHECK_THROWS_AS(fit_breakpoint(bad_x, y8), FitError);
}

TEST_CASE("fit_loss_curve recovers closed-form loss parameters") {
    const LossParams lp{1.0, 0.1, 0.5, 1.0, 10.0, 1e4, 0.5,
                        TransitionShape::LinearInLogD};
    const ModelParams mp{1000, 1.0, 10, 0, 0};
    std::vector<double> ds, ls;
    for (double d = 1e2; d <= 1.001e6; d *= std::pow(10.0, 0.2)) {
        ds.push_back(d);
        ls.push_back(expected_loss(lp, mp, d));
    }
    const LossCurveFit fit = fit_loss_curve(ds, ls);
    CHECK(std::abs(fit.exponent_hat - 0.5) < 0.01);
    CHECK(std::abs(fit.l_opt_hat - 0.1) < 0.001);
    CHECK(fit.l_opt_hat < ls.back() + fit.rmse);
    CHECK(fit.rmse < 1e-6);
}

TEST_CASE("fit_loss_curve reports degenerate inputs instead of crashing") {
    std::vector<double> ds{1, 10, 100, 1000, 10000, 100000};
    std::vector<double> flat(6, 0.25);
    CHECK_THROWS_AS(fit_loss_curve(ds, flat), FitError);

    std::vector<double> bad_d{-1, 10, 100, 1000, 10000, 100000};
    std::vector<double> ls{6, 5, 4, 3, 2, 1};
    CHECK_THROWS_AS(fit_loss_curve(bad_d, ls), FitError);
}

TEST_CASE("ks_distance: sampling oracle, hand value, validation") {
    const Pmf pmf = steady_state_pmf_powerlaw(0.5, 100);
    const auto samples = draw_from_pmf(pmf, 100000, 71);
    CHECK(ks_distance(samples, pmf) < 0.01);

    // all samples at 1 against uniform on 1..10: gap is 1 - 0.1 at k=1
    const Pmf uniform = steady_state_pmf_powerlaw(1e-12, 10);
    const std::vector<std::uint64_t> ones(100, 1);
    CHECK(ks_distance(ones, uniform) == doctest::Approx(0.9).epsilon(1e-9));

    CHECK_THROWS_AS(ks_distance(std::vector<std::uint64_t>{}, pmf), FitError);
    CHECK_THROWS_AS(ks_distance(std::vector<std::uint64_t>{101}, pmf), FitError);
}
