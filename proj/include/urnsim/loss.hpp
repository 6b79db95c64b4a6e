#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "urnsim/analytic.hpp"
#include "urnsim/urn.hpp"

namespace urnsim {

enum class TransitionShape { LinearInLogD, StepAtBreakpoint };

std::string to_string(TransitionShape s);
TransitionShape transition_shape_from_string(const std::string& s);

// Parameters of the per-neuron loss model. The sub-network configuration
// (b_sub, c_sub, n_sub) plays the same role as (b, c, N) one level down;
// epsilon is the transition half-width in log10 units.
struct LossParams {
    double l_noise = 1.0;
    double l_opt = 0.0;
    double alpha = 0.5; // power-law shape, in (0, 1)
    double b_sub = 1.0;
    double c_sub = 1.0;
    double n_sub = 1.0;
    double epsilon = 0.5;
    TransitionShape shape = TransitionShape::LinearInLogD;

    double breakpoint() const { return b_sub * n_sub / c_sub; }
    void validate() const;
    bool operator==(const LossParams&) const = default;
};

// Distribution over activation counts k = 1..d_max (index k-1).
struct Pmf {
    std::vector<double> probs;

    std::uint64_t d_max() const { return probs.size(); }
    double at(std::uint64_t k) const { return probs[k - 1]; }
    double mean() const;
};

// Exact solution of the balance relation (k+b) P(k) = (k+1+b) P(k+1):
// P(k) proportional to 1/(k+b), normalized over 1..d_max.
Pmf steady_state_pmf_exact(double b, std::uint64_t d_max);

// Power-law form P(k) proportional to k^-alpha over 1..d_max.
Pmf steady_state_pmf_powerlaw(double alpha, std::uint64_t d_max);

// Exact single-neuron marginal of the reinforcement process after `total`
// activations across `neurons` urns with prior weight b each (the counts
// vector is Dirichlet-multinomial). p_zero is the free-neuron mass;
// positive is the distribution conditioned on k >= 1, truncated where the
// tail mass drops below 1e-12 (at least min_support bins). This is the
// reference law the simulator is checked against.
struct FiniteMarginal {
    double p_zero = 0;
    Pmf positive;
};
FiniteMarginal polya_marginal_pmf(double b, std::uint64_t neurons,
                                  std::uint64_t total_activations,
                                  std::uint64_t min_support = 0);

// Loss of one neuron as a function of its activation count: l_noise below
// the knee band, l_opt above, with the configured bridge inside.
double per_neuron_loss(double d_i, const LossParams& lp);

enum class MixtureWeight {
    Exact,      // weight proportional to D_i + b
    Approximate // weight proportional to D_i (the seed term dropped)
};

// Activation-weighted average of per-neuron losses over the working
// neurons in a histogram. Weights are normalized to sum to 1. Throws
// DomainError for an empty histogram with d > 0.
double mixture_loss(const Histogram& histogram, double d, const LossParams& lp,
                    const ModelParams& mp,
                    MixtureWeight weighting = MixtureWeight::Exact);

// Probability mass of the transition band around the knee b_sub n_sub/c_sub
// under the power-law count distribution with cutoff d_max:
//   (b_sub n_sub / c_sub)^(1-alpha) * (e^eps - e^-eps) / d_max^(1-alpha)
// where eps is the band half-width in natural-log units. LossParams.epsilon
// is given in log10 units and is converted internally (eps = epsilon*ln 10).
// Requires d_max above the knee. Clamped to [0, 1].
double transition_mass(const LossParams& lp, double d_max);

// Closed-form loss curve
//   L(D) = l_opt + (l_noise - l_opt) * ((b_sub n_sub)^(1-alpha) - 1)
//                                    / (c_sub * fudge * c * D)^(1-alpha)
// clamped to [l_opt, l_noise]. Strictly decreasing in D away from the
// clamp; log-log slope of (L - l_opt) against D equals -(1-alpha).
double expected_loss(const LossParams& lp, const ModelParams& mp, double d,
                     double d_max_fudge = 1.0);

} // namespace urnsim
