#pragma once

#include <cstdint>
#include <span>

#include "urnsim/loss.hpp"

namespace urnsim {

// Discrete maximum-likelihood power-law fit on the tail k >= x_min, with
// x_min chosen by minimizing the Kolmogorov-Smirnov distance between the
// empirical tail and the fitted law (truncated at the largest observation).
struct PowerLawFit {
    double alpha_hat = 0;
    std::uint64_t x_min = 1;
    std::size_t n_tail = 0;
    double ks_distance = 1;
    double log_likelihood = 0;
};

// Two-segment continuous piecewise-linear least squares in (x, y).
struct BreakpointFit {
    double slope_left = 0;
    double slope_right = 0;
    double breakpoint = 0;
    double rmse = 0;
};

// L = l_opt + a * D^(-s) with all three parameters free.
struct LossCurveFit {
    double l_opt_hat = 0;
    double amplitude_hat = 0;
    double exponent_hat = 0;
    double rmse = 0;
};

// Requires >= 10 samples and at least two distinct values. Deterministic.
PowerLawFit fit_power_law(std::span<const std::uint64_t> samples);

// Requires >= 8 points with strictly increasing xs. The breakpoint is
// located by a grid search over interior midpoints followed by golden-
// section refinement; slopes come from the exact least-squares solution at
// the chosen breakpoint. Deterministic.
BreakpointFit fit_breakpoint(std::span<const double> xs, std::span<const double> ys);

// Requires >= 6 points, positive strictly increasing ds. Nested search:
// for a trial l_opt the (amplitude, exponent) pair is a log-space linear
// regression; l_opt itself is found by a one-dimensional search on the
// residual sum of squares. Throws FitError when the search does not
// bracket an interior minimum or the exponent degenerates to zero.
LossCurveFit fit_loss_curve(std::span<const double> ds, std::span<const double> ls);

// Max absolute CDF difference between the sample distribution and pmf.
// Samples must be non-empty and lie within the pmf support.
double ks_distance(std::span<const std::uint64_t> samples, const Pmf& pmf);

} // namespace urnsim
