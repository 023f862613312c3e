#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gsml/feature_store.hpp"
#include "gsml/gsmlp.hpp"

namespace gsml {

struct SmlcConfig {
  /// Fraction of the negative list mined as hard negatives, in (0, 1].
  double gamma = 0.01;
  /// Drop the owner's own s_ii term from the positive mean.
  bool exclude_self = false;
};

void validate_gamma(double gamma);

struct LossBreakdown {
  double total = 0.0;
  double positive_part = 0.0;
  double negative_part = 0.0;
  CandidateSet hard_negative_indices;
};

/// ceil(gamma * negatives), robust to the rounding error in gamma * negatives.
std::size_t hard_negative_count(double gamma, std::size_t negatives);

/// Negatives (zero bits) sorted by descending similarity, ties by index,
/// truncated to hard_negative_count(). `eligible`, when non-empty, masks out
/// indices that may not be mined (unwritten table rows).
CandidateSet hard_negatives(std::span<const double> s, const MultiLabel& label, double gamma,
                            std::span<const std::uint8_t> eligible = {});

/// Mean squared pull of positives to +1 plus mean squared push of mined
/// negatives to -1.
LossBreakdown smlc_loss(std::span<const double> s, const MultiLabel& label,
                        const SmlcConfig& config, std::span<const std::uint8_t> eligible = {});

inline LossBreakdown smlc_loss(std::span<const double> s, const MultiLabel& label, double gamma) {
  return smlc_loss(s, label, SmlcConfig{gamma, false});
}

struct LossAndGradient {
  LossBreakdown loss;
  std::vector<double> grad;  ///< dL/dz, length d
};

/// Loss of z against the table plus dL/dz, holding the mined set fixed.
LossAndGradient smlc_loss_and_gradient(std::span<const double> z, const LookupTable& table,
                                       const MultiLabel& label, const SmlcConfig& config);

std::vector<double> smlc_gradient(std::span<const double> z, const LookupTable& table,
                                  const MultiLabel& label, double gamma);

/// Mean over positives of the softmax cross-entropy of s / temperature.
double ce_baseline_loss(std::span<const double> s, const MultiLabel& label, double temperature);

/// Cross-entropy baseline loss and its gradient dL/dz through s = table * z.
LossAndGradient ce_loss_and_gradient(std::span<const double> z, const LookupTable& table,
                                     const MultiLabel& label, double temperature);

}  // namespace gsml
