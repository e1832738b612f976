#pragma once

#include <cstdint>
#include <random>

#include "geomq/fields.hpp"

namespace geomq {

/// Seeded generator with a platform-independent mapping to [0, 1).
class Rng
{
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
  std::mt19937_64 engine_;
};

/// P proportional to exp(-|x - center|^2 / (2 sigma^2)) (renormalized on the grid), S = p . x.
EnsembleState gaussian_state(const GridSpec & grid, const Point & center, double sigma, const Point & momentum,
  double alpha);

/**
 * @brief Zero-momentum Gaussian packet made periodic by summing images of psi.
 *
 * psi is proportional to the product over axes of sum_n exp(-(x - c - n L)^2 / (4 sigma^2)),
 * so P has no nodes and is smooth across the wrap. Requires a periodic grid.
 */
EnsembleState periodized_gaussian_state(const GridSpec & grid, const Point & center, double sigma, double alpha);

/// P = 1 / V, S = p . x.
EnsembleState uniform_state(const GridSpec & grid, const Point & momentum, double alpha);

/**
 * @brief Smooth random bump that decays far below the node threshold inside the box.
 *
 * sqrt(P) is a Gaussian of width L/20 (shortest axis) times a positive
 * low-order modulation; S is a Gaussian-windowed linear form. Meant for
 * vanishing grids; both fields are negligible at the box edges, so spectral
 * derivatives apply too.
 */
EnsembleState random_compact_state(const GridSpec & grid, std::uint64_t seed, double alpha);

/// P = exp(low-order Fourier series) and S = low-order Fourier series; node-free, periodic.
EnsembleState random_periodic_state(const GridSpec & grid, std::uint64_t seed, double alpha);

/// Smooth complex field with Gaussian envelope and random low-order phase and amplitude; not normalized.
ComplexField random_complex_field(const GridSpec & grid, std::uint64_t seed);

}  // namespace geomq
