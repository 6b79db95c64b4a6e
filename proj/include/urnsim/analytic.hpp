#pragma once

#include <cstdint>
#include <string>

namespace urnsim {

// Parameters of the growth law. N, c are kept as reals so that model-scale
// values (N = 1e11) stay representable; they are validated as >= 1.
struct ModelParams {
    double n = 0;    // neuron count N
    double b = 1.0;  // seeding constant
    double c = 1.0;  // activations per sample
    double k0 = 0.0; // initial working count
    double d0 = 0.0; // initial sample count

    void validate() const;
    bool operator==(const ModelParams&) const = default;
};

enum class Regime { Linear, Constant, Transition };

std::string to_string(Regime r);

struct RegimeReport {
    double breakpoint_log10 = 0; // log10(b N / c)
    double epsilon = 0.5;        // half-width of the transition band, log10 units
    Regime regime = Regime::Transition;
};

// Expected working-neuron count:
//   K(D) = N + (K0 - N) * ((D0 + (b/c)N) / (D + (b/c)N))^b
// Throws DomainError for D < D0. Value lies in [K0, N].
double k_closed_form(const ModelParams& p, double d);

// Large-model form N * (1 - (bN / (cD + bN))^b); identical to k_closed_form
// with K0 = 0, D0 = 0.
double k_large_limit(const ModelParams& p, double d);

// Fourth-order Runge-Kutta integration of dK/dD = b (N - K) / (D + (b/c)N)
// from (D0, K0), stepping uniformly in ln(D + (b/c)N) so that the step
// count spans decades evenly. Runs the integration twice (step_count and
// 2*step_count); throws DomainError if the two disagree by more than 1e-6
// relative. Returns the finer result.
double k_ode(const ModelParams& p, double d, std::uint64_t step_count);

// Classification against the knee location log10(bN/c).
RegimeReport regime_classify(const ModelParams& p, double log10_d, double epsilon = 0.5);

// Free-neuron fraction (N - K(D))/N = (C1 / (D + C1))^C2 with C1 = (b/c)N,
// C2 = b. Monotone non-increasing in D, equal to 1 at D = 0.
double compressibility_ratio(const ModelParams& p, double d);

// c D / K(D). Throws DomainError when K(D) == 0 (K0 = 0 and D = D0 = 0).
double avg_samples_per_working(const ModelParams& p, double d);

// Scale of the largest activation count, c D / K(D) times a multiplicative
// constant (the growth analysis pins it only up to order).
double d_max_estimate(const ModelParams& p, double d, double fudge = 1.0);

} // namespace urnsim
