#include <doctest.h>

#include <cmath>
#include <vector>

#include "urnsim/analytic.hpp"
#include "urnsim/errors.hpp"
#include "urnsim/urn.hpp"

using namespace urnsim;

namespace {

double log_slope(double (*f)(const ModelParams&, double), const ModelParams& p,
                 double log10_d, double h = 1e-4) {
    const double lo = f(p, std::pow(10.0, log10_d - h));
    const double hi = f(p, std::pow(10.0, log10_d + h));
    return (std::log10(hi) - std::log10(lo)) / (2 * h);
}

} // namespace

TEST_CASE("k_closed_form: initial condition and limit") {
    const ModelParams p{1000, 1.0, 10, 17.0, 5.0};
    CHECK(k_closed_form(p, 5.0) == doctest::Approx(17.0).epsilon(1e-14));
    CHECK_THROWS_AS(k_closed_form(p, 4.0), DomainError);

    const ModelParams q{1000, 1.0, 10, 0, 0};
    const double far = 1e12 * (q.b * q.n / q.c);
    CHECK(std::abs(k_closed_form(q, far) - q.n) <= 1e-6 * q.n);
}

TEST_CASE("k_closed_form is bounded and increasing") {
    const ModelParams p{5000, 0.5, 7, 100, 10};
    double prev = k_closed_form(p, 10);
    for (double d = 20; d < 1e8; d *= 3) {
        const double k = k_closed_form(p, d);
        CHECK(k >= prev);
        CHECK(k >= p.k0);
        CHECK(k <= p.n);
        prev = k;
    }
}

TEST_CASE("k_closed_form tracks the Monte Carlo mean at desk scale") {
    const std::uint64_t n = 200, c = 5, d = 2000;
    const std::vector<std::uint64_t> sched{100, 500, 2000};
    const int reps = 24;
    UrnConfig cfg;
    cfg.neurons = n;
    cfg.seed_weight = 1.0;
    cfg.budget = c;
    cfg.seed = 99;
    std::vector<std::vector<double>> ks(sched.size());
    for (int r = 0; r < reps; ++r) {
        const Trajectory t = simulate(cfg, d, sched, r);
        for (std::size_t i = 0; i < sched.size(); ++i)
            ks[i].push_back(static_cast<double>(t.checkpoints[i].working));
    }
    const ModelParams p{static_cast<double>(n), 1.0, static_cast<double>(c), 0, 0};
    for (std::size_t i = 0; i < sched.size(); ++i) {
        double mean = 0;
        for (double v : ks[i]) mean += v;
        mean /= reps;
        double ss = 0;
        for (double v : ks[i]) ss += (v - mean) * (v - mean);
        const double se = std::sqrt(ss / (reps - 1)) / std::sqrt(double(reps));
        const double theory = k_closed_form(p, static_cast<double>(sched[i]));
        CHECK(std::abs(mean - theory) <= 3 * se + 1e-9);
    }
}

TEST_CASE("k_large_limit: zero at D=0 and identical to the closed form") {
    const ModelParams p{1e11, 1e3, 1e5, 0, 0};
    CHECK(k_large_limit(p, 0) == 0.0);
    for (double d = 1; d <= 1e12; d *= 10) {
        const double a = k_large_limit(p, d);
        const double b = k_closed_form(p, d);
        CHECK(std::abs(a - b) <= 1e-12 * std::max(std::abs(a), 1.0));
    }
}

TEST_CASE("k_large_limit log-log slope: 1 deep in growth, 0 deep in saturation") {
    // Unit slope needs c*D well below N (two-plus decades of margin); the
    // knee parameter b*N/c marks where saturation is complete only for
    // b = O(1). Deep on each side the slopes are clean.
    const ModelParams fig{1e11, 1e3, 1e5, 0, 0};
    CHECK(std::abs(log_slope(&k_large_limit, fig, 3.0) - 1.0) < 0.01);

    const ModelParams b1{1e11, 1.0, 1e5, 0, 0}; // knee log10(bN/c) = 6
    CHECK(std::abs(log_slope(&k_large_limit, b1, 3.5) - 1.0) < 0.01);
    CHECK(std::abs(log_slope(&k_large_limit, b1, 8.5)) < 0.01);
}

TEST_CASE("k_ode: initial condition, closed-form agreement, convergence") {
    const ModelParams p{1e4, 2.0, 10, 0, 0};
    CHECK(k_ode(p, 0.0, 10) == doctest::Approx(0.0));

    const double closed = k_closed_form(p, 1e6);
    const double ode = k_ode(p, 1e6, 30000);
    CHECK(std::abs(ode - closed) / closed < 1e-6);

    // halving the step size moves the answer by < 1e-8 relative
    const double fine = k_ode(p, 1e6, 60000);
    CHECK(std::abs(fine - ode) / closed < 1e-8);
}

TEST_CASE("k_ode rejects a step count too small for the stiffness") {
    const ModelParams p{1e4, 50.0, 1, 0, 0};
    CHECK_THROWS_AS(k_ode(p, 1e10, 3), DomainError);
}

TEST_CASE("regime_classify: knee value and band membership") {
    const ModelParams fig{1e11, 1e3, 1e5, 0, 0};
    const RegimeReport r = regime_classify(fig, 5.0, 0.5);
    CHECK(r.breakpoint_log10 == doctest::Approx(9.0).epsilon(1e-12));
    CHECK(r.regime == Regime::Linear);

    CHECK(regime_classify(fig, 9.0, 0.5).regime == Regime::Transition);
    CHECK(regime_classify(fig, 8.5, 0.5).regime == Regime::Linear);   // boundary inclusive
    CHECK(regime_classify(fig, 9.5, 0.5).regime == Regime::Constant); // boundary inclusive
    CHECK(regime_classify(fig, 12.0, 0.5).regime == Regime::Constant);
    CHECK_THROWS_AS(regime_classify(fig, 5.0, 0.0), DomainError);
}

TEST_CASE("regimes carry the expected slopes well away from the knee") {
    // 2.5 decades of margin puts the numerical slope within 1% of 1 and 0;
    // one decade is not enough for any b (the slope there is ~0.91).
    const ModelParams p{1e11, 1.0, 1e5, 0, 0};
    const double knee = std::log10(p.b * p.n / p.c);
    CHECK(regime_classify(p, knee - 2.5, 2.5).regime == Regime::Linear);
    CHECK(std::abs(log_slope(&k_large_limit, p, knee - 2.5) - 1.0) <= 0.01);
    CHECK(regime_classify(p, knee + 2.5, 2.5).regime == Regime::Constant);
    CHECK(log_slope(&k_large_limit, p, knee + 2.5) >= 0.0);
    CHECK(log_slope(&k_large_limit, p, knee + 2.5) <= 0.01);
}

TEST_CASE("compressibility_ratio: one at zero, exact functional form, N-scaling") {
    const ModelParams p{1e6, 2.0, 100, 0, 0};
    CHECK(compressibility_ratio(p, 0) == 1.0);

    const double c1 = (p.b / p.c) * p.n;
    double prev = 2.0;
    for (double d = 1; d <= 1e12; d *= 100) {
        const double r = compressibility_ratio(p, d);
        CHECK(r == std::pow(c1 / (d + c1), p.b)); // same expression, bit-exact
        CHECK(r <= prev);
        prev = r;
    }

    // scaling N up at fixed D strictly increases the free fraction
    for (double d = 10; d <= 1e10; d *= 10) {
        ModelParams big = p;
        big.n = 10 * p.n;
        CHECK(compressibility_ratio(big, d) > compressibility_ratio(p, d));
    }
}

TEST_CASE("compressibility_ratio complements k_large_limit") {
    const ModelParams p{1e8, 4.0, 1000, 0, 0};
    for (double d = 1; d <= 1e10; d *= 10) {
        const double complement = k_large_limit(p, d) + p.n * compressibility_ratio(p, d);
        CHECK(std::abs(complement - p.n) <= 1e-12 * p.n);
    }
}

TEST_CASE("avg_samples_per_working: asymptotics and coupling") {
    // huge D with c=1: K -> N, ratio -> D/N
    const ModelParams p{1000, 1.0, 1, 0, 0};
    const double d = 1e9 * p.n;
    CHECK(avg_samples_per_working(p, d) ==
          doctest::Approx(d / p.n).epsilon(1e-6));

    // N tied to D (N = D, b = 1, c = 100): the ratio stays within 2x of c
    for (double dd = 1e3; dd <= 1e7; dd *= 10) {
        const ModelParams q{dd, 1.0, 100, 0, 0};
        const double ratio = avg_samples_per_working(q, dd);
        CHECK(ratio > 100.0 / 2);
        CHECK(ratio < 100.0 * 2);
    }

    // N fixed, D growing: unbounded growth
    const ModelParams r{1e4, 1.0, 10, 0, 0};
    CHECK(avg_samples_per_working(r, 1e10) > 100 * avg_samples_per_working(r, 1e6));

    CHECK_THROWS_AS(avg_samples_per_working(r, 0.0), DomainError);
    const ModelParams zero_k{1e4, 1.0, 10, 0, 5.0};
    CHECK_THROWS_AS(avg_samples_per_working(zero_k, 5.0), DomainError);
}

TEST_CASE("d_max_estimate: small-D limit, monotonicity, MC order of magnitude") {
    const ModelParams p{1000, 1.0, 10, 50, 0};
    CHECK(d_max_estimate(p, 1e-9) == doctest::Approx(10 * 1e-9 / 50).epsilon(1e-6));

    const ModelParams q{1000, 1.0, 10, 0, 0};
    double prev = 0;
    for (double d = 1; d <= 1e10; d *= 10) {
        const double est = d_max_estimate(q, d);
        CHECK(est >= prev);
        prev = est;
    }

    // observed max count within a factor 10 of the estimate
    UrnConfig cfg;
    cfg.neurons = 1000;
    cfg.seed_weight = 1.0;
    cfg.budget = 10;
    cfg.seed = 17;
    const Trajectory t = simulate(cfg, 100000, std::vector<std::uint64_t>{100000});
    const double observed_max =
        static_cast<double>(t.checkpoints.back().histogram.rbegin()->first);
    const double est = d_max_estimate(q, 1e5);
    CHECK(observed_max < 10 * est);
    CHECK(observed_max > est / 10);
}
