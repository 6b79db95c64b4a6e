#include "urnsim/analytic.hpp"

#include <cmath>

#include "urnsim/errors.hpp"

namespace urnsim {

void ModelParams::validate() const {
    if (!(n >= 1.0) || !std::isfinite(n))
        throw ConfigError("model params: N must be >= 1");
    if (!(b > 0.0) || !std::isfinite(b))
        throw ConfigError("model params: b must be a positive finite real");
    if (!(c >= 1.0) || c > n)
        throw ConfigError("model params: c must satisfy 1 <= c <= N");
    if (!(k0 >= 0.0) || k0 > n)
        throw ConfigError("model params: K0 must satisfy 0 <= K0 <= N");
    if (!(d0 >= 0.0) || !std::isfinite(d0))
        throw ConfigError("model params: D0 must be >= 0");
}

std::string to_string(Regime r) {
    switch (r) {
        case Regime::Linear: return "linear";
        case Regime::Constant: return "constant";
        case Regime::Transition: return "transition";
    }
    return "?";
}

double k_closed_form(const ModelParams& p, double d) {
    p.validate();
    if (d < p.d0) throw DomainError("k_closed_form: D must be >= D0");
    const double m = p.b * p.n / p.c;
    // K = K0 + (N - K0)(1 - ((D0+m)/(D+m))^b), with the growth factor
    // 1 - r^b evaluated through expm1/log1p: the direct form cancels
    // catastrophically while K << N
    const double q = (d - p.d0) / (d + m);
    const double growth = -std::expm1(p.b * std::log1p(-q));
    return p.k0 + (p.n - p.k0) * growth;
}

double k_large_limit(const ModelParams& p, double d) {
    p.validate();
    if (d < 0.0) throw DomainError("k_large_limit: D must be >= 0");
    const double q = p.c * d / (p.c * d + p.b * p.n);
    return p.n * -std::expm1(p.b * std::log1p(-q));
}

double k_ode(const ModelParams& p, double d, std::uint64_t step_count) {
    p.validate();
    if (d < p.d0) throw DomainError("k_ode: D must be >= D0");
    if (step_count < 1) throw DomainError("k_ode: step_count must be >= 1");

    const double m = p.b * p.n / p.c;
    const double u0 = std::log(p.d0 + m);
    const double u1 = std::log(d + m);

    // In u = ln(D + m) the right-hand side b (N - K)/(D + m) becomes
    // b (N - K); one RK4 step of width h in u.
    const auto integrate = [&](std::uint64_t steps) {
        const double h = (u1 - u0) / static_cast<double>(steps);
        double k = p.k0;
        const auto f = [&](double kk) { return p.b * (p.n - kk); };
        for (std::uint64_t i = 0; i < steps; ++i) {
            const double k1 = f(k);
            const double k2 = f(k + 0.5 * h * k1);
            const double k3 = f(k + 0.5 * h * k2);
            const double k4 = f(k + h * k3);
            k += h * (k1 + 2.0 * (k2 + k3) + k4) / 6.0;
        }
        return k;
    };

    const double coarse = integrate(step_count);
    const double fine = integrate(2 * step_count);
    const double scale = std::max(std::abs(fine), 1e-300);
    if (std::abs(fine - coarse) / scale > 1e-6)
        throw DomainError("k_ode: step count too small (doubled-step check exceeds 1e-6)");
    return fine;
}

RegimeReport regime_classify(const ModelParams& p, double log10_d, double epsilon) {
    p.validate();
    if (!(epsilon > 0.0)) throw DomainError("regime_classify: epsilon must be > 0");
    RegimeReport r;
    r.breakpoint_log10 = std::log10(p.b * p.n / p.c);
    r.epsilon = epsilon;
    if (log10_d <= r.breakpoint_log10 - epsilon)
        r.regime = Regime::Linear;
    else if (log10_d >= r.breakpoint_log10 + epsilon)
        r.regime = Regime::Constant;
    else
        r.regime = Regime::Transition;
    return r;
}

double compressibility_ratio(const ModelParams& p, double d) {
    p.validate();
    if (d < 0.0) throw DomainError("compressibility_ratio: D must be >= 0");
    const double c1 = (p.b / p.c) * p.n;
    return std::pow(c1 / (d + c1), p.b);
}

double avg_samples_per_working(const ModelParams& p, double d) {
    if (!(d > 0.0)) throw DomainError("avg_samples_per_working: D must be > 0");
    const double k = k_closed_form(p, d);
    if (!(k > 0.0))
        throw DomainError("avg_samples_per_working: K(D) == 0, ratio undefined");
    return p.c * d / k;
}

double d_max_estimate(const ModelParams& p, double d, double fudge) {
    if (!(fudge > 0.0)) throw DomainError("d_max_estimate: fudge must be > 0");
    return fudge * avg_samples_per_working(p, d);
}

} // namespace urnsim
