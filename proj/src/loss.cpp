#include "urnsim/loss.hpp"

#include <algorithm>
#include <cmath>

#include "urnsim/errors.hpp"

namespace urnsim {

std::string to_string(TransitionShape s) {
    switch (s) {
        case TransitionShape::LinearInLogD: return "linear-in-logd";
        case TransitionShape::StepAtBreakpoint: return "step-at-breakpoint";
    }
    return "?";
}

TransitionShape transition_shape_from_string(const std::string& s) {
    if (s == "linear-in-logd") return TransitionShape::LinearInLogD;
    if (s == "step-at-breakpoint") return TransitionShape::StepAtBreakpoint;
    throw ConfigError("unknown transition shape '" + s +
                      "' (expected linear-in-logd or step-at-breakpoint)");
}

void LossParams::validate() const {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw ConfigError("loss params: alpha must lie in (0, 1)");
    if (!(l_opt < l_noise))
        throw ConfigError("loss params: l_opt must be < l_noise");
    if (!(b_sub > 0.0) || !(c_sub > 0.0) || !(n_sub > 0.0))
        throw ConfigError("loss params: b_sub, c_sub, n_sub must be positive");
    if (!(epsilon >= 0.0))
        throw ConfigError("loss params: epsilon must be >= 0");
}

double Pmf::mean() const {
    double m = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i)
        m += static_cast<double>(i + 1) * probs[i];
    return m;
}

namespace {

Pmf normalized(std::vector<double> w) {
    double sum = 0.0;
    for (double v : w) sum += v;
    for (double& v : w) v /= sum;
    return Pmf{std::move(w)};
}

} // namespace

Pmf steady_state_pmf_exact(double b, std::uint64_t d_max) {
    if (!(b > 0.0)) throw DomainError("steady_state_pmf_exact: b must be > 0");
    if (d_max < 1) throw DomainError("steady_state_pmf_exact: d_max must be >= 1");
    std::vector<double> w(d_max);
    for (std::uint64_t k = 1; k <= d_max; ++k)
        w[k - 1] = 1.0 / (static_cast<double>(k) + b);
    return normalized(std::move(w));
}

Pmf steady_state_pmf_powerlaw(double alpha, std::uint64_t d_max) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw DomainError("steady_state_pmf_powerlaw: alpha must lie in (0, 1)");
    if (d_max < 1) throw DomainError("steady_state_pmf_powerlaw: d_max must be >= 1");
    std::vector<double> w(d_max);
    for (std::uint64_t k = 1; k <= d_max; ++k)
        w[k - 1] = std::exp(-alpha * std::log(static_cast<double>(k)));
    return normalized(std::move(w));
}

FiniteMarginal polya_marginal_pmf(double b, std::uint64_t neurons,
                                  std::uint64_t total_activations,
                                  std::uint64_t min_support) {
    if (!(b > 0.0)) throw DomainError("polya_marginal_pmf: b must be > 0");
    if (neurons < 2) throw DomainError("polya_marginal_pmf: need at least 2 neurons");
    if (total_activations < 1)
        throw DomainError("polya_marginal_pmf: need at least 1 activation");
    const double t = static_cast<double>(total_activations);
    const double beta = b * (static_cast<double>(neurons) - 1.0);

    // P(0) = Gamma(T+beta) Gamma(b+beta) / (Gamma(beta) Gamma(T+b+beta)),
    // then the neighbour ratio
    //   P(k+1)/P(k) = (T-k)(k+b) / ((k+1)(T+beta-k-1))
    const double log_p0 = std::lgamma(t + beta) + std::lgamma(b + beta) -
                          std::lgamma(beta) - std::lgamma(t + b + beta);
    FiniteMarginal out;
    out.p_zero = std::exp(log_p0);

    std::vector<double> probs;
    double cum = out.p_zero;
    double p = out.p_zero;
    for (std::uint64_t k = 0; k < total_activations; ++k) {
        const double kk = static_cast<double>(k);
        p *= (t - kk) * (kk + b) / ((kk + 1.0) * (t + beta - kk - 1.0));
        probs.push_back(p);
        cum += p;
        if (1.0 - cum < 1e-12 && probs.size() >= std::max<std::uint64_t>(min_support, 1))
            break;
    }
    double pos_sum = 0.0;
    for (double v : probs) pos_sum += v;
    if (pos_sum <= 0.0) throw DomainError("polya_marginal_pmf: zero positive mass");
    for (double& v : probs) v /= pos_sum;
    out.positive = Pmf{std::move(probs)};
    return out;
}

double per_neuron_loss(double d_i, const LossParams& lp) {
    lp.validate();
    if (d_i < 0.0) throw DomainError("per_neuron_loss: count must be >= 0");
    const double knee = std::log10(lp.breakpoint());
    if (lp.shape == TransitionShape::StepAtBreakpoint)
        return (d_i > 0.0 && std::log10(d_i) >= knee) ? lp.l_opt : lp.l_noise;
    const double lb = knee - lp.epsilon;
    const double ub = knee + lp.epsilon;
    if (d_i <= 0.0) return lp.l_noise;
    const double x = std::log10(d_i);
    if (x <= lb) return lp.l_noise;
    if (x >= ub) return lp.l_opt;
    return lp.l_noise + (lp.l_opt - lp.l_noise) * (x - lb) / (ub - lb);
}

double mixture_loss(const Histogram& histogram, double d, const LossParams& lp,
                    const ModelParams& mp, MixtureWeight weighting) {
    lp.validate();
    mp.validate();
    if (!(d > 0.0)) throw DomainError("mixture_loss: D must be > 0");
    if (histogram.empty())
        throw DomainError("mixture_loss: empty histogram with D > 0");
    double num = 0.0;
    double den = 0.0;
    for (const auto& [k, count] : histogram) {
        if (k == 0) continue;
        const double kd = static_cast<double>(k);
        const double w = (weighting == MixtureWeight::Exact ? kd + mp.b : kd) *
                         static_cast<double>(count);
        num += w * per_neuron_loss(kd, lp);
        den += w;
    }
    if (!(den > 0.0)) throw DomainError("mixture_loss: histogram has no working neurons");
    return num / den;
}

double transition_mass(const LossParams& lp, double d_max) {
    lp.validate();
    const double knee = lp.breakpoint();
    if (!(d_max > knee))
        throw DomainError("transition_mass: d_max must exceed b_sub*n_sub/c_sub");
    const double eps_nat = lp.epsilon * std::log(10.0);
    const double one_m_a = 1.0 - lp.alpha;
    const double mass = std::pow(knee, one_m_a) *
                        (std::exp(eps_nat) - std::exp(-eps_nat)) /
                        std::pow(d_max, one_m_a);
    return std::clamp(mass, 0.0, 1.0);
}

double expected_loss(const LossParams& lp, const ModelParams& mp, double d,
                     double d_max_fudge) {
    lp.validate();
    mp.validate();
    if (!(d_max_fudge > 0.0)) throw DomainError("expected_loss: fudge must be > 0");
    const double d_max = lp.c_sub * d_max_fudge * mp.c * d;
    if (!(d_max >= 1.0))
        throw DomainError("expected_loss: c_sub*c*D must be >= 1");
    const double one_m_a = 1.0 - lp.alpha;
    const double raw = lp.l_opt +
                       (lp.l_noise - lp.l_opt) *
                           (std::pow(lp.b_sub * lp.n_sub, one_m_a) - 1.0) /
                           std::pow(d_max, one_m_a);
    return std::clamp(raw, lp.l_opt, lp.l_noise);
}

} // namespace urnsim
