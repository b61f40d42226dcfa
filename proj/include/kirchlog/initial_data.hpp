#pragma once

#include "kirchlog/grid.hpp"

#include <random>

namespace kirchlog {

/// amplitude * sin(mode pi x / L)
Field sine_mode(const Grid& g, int mode, double amplitude);

/// amplitude * (4 x (L - x) / L^2)^2, peak value at the midpoint.
Field polynomial_bump(const Grid& g, double amplitude);

/// Sum of 1-3 distinct sine modes (from the first four) with random
/// coefficients, rescaled so that max |u| = amplitude.
Field random_smooth(const Grid& g, std::mt19937_64& rng, double amplitude = 1.0);

/// Sum of `modes` sine modes with random coefficients, max |u| = amplitude.
Field random_modes(const Grid& g, std::mt19937_64& rng, int modes, double amplitude);

}  // namespace kirchlog
