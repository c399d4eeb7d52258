#pragma once

#include <array>
#include <optional>
#include <span>

#include "regionplan/raster.hpp"

namespace regionplan {

/// Per-pixel sum of the eight neighbours; values in [0,8].
using PurityMatrix = Raster<double>;

struct LossConfig {
  /// Added to every purity-difference weight.
  double sigma_smoothing = 1.0;
  /// Purity-loss coefficient; unset means 1 / (8 * H * W) of the input.
  std::optional<double> alpha;
  /// Deep-supervision weights, 2^-(l-1) for l = 1..4.
  std::array<double, 4> beta{1.0, 0.5, 0.25, 0.125};
  /// Log arguments are clamped to [epsilon, 1 - epsilon].
  double epsilon_clamp = 1e-7;

  double alpha_for(int width, int height) const noexcept;
  void validate() const;
};

/// Cross-correlation with the 3x3 all-ones kernel whose centre is zero,
/// zero padding outside the grid.
PurityMatrix purity_matrix(const Raster<double>& grid);
PurityMatrix purity_matrix(const RegionMask& mask);

/// Unweighted BCE summed over pixels, prediction clamped first.
double clamped_bce(const ProbabilityMap& pred, const RegionMask& gt, double epsilon_clamp);

/// BCE summed over pixels with weights |purity(gt) - purity(pred)| + sigma.
double weighted_bce(const ProbabilityMap& pred, const RegionMask& gt, const LossConfig& config);

/// Soft Dice with +1 smoothing in numerator and denominator.
double dice_coefficient(const ProbabilityMap& pred, const RegionMask& gt);
inline double dice_loss(const ProbabilityMap& pred, const RegionMask& gt) {
  return 1.0 - dice_coefficient(pred, gt);
}

/// Sum of absolute purity differences.
double purity_loss(const ProbabilityMap& pred, const RegionMask& gt);

/// Block-max pooling over 2^level squares, level in [1,4].
RegionMask downsample_mask(const RegionMask& gt, int level);

/// Sum over side outputs l = 1..k (k <= 4) of beta_l * (wBCE + Dice) against
/// the gt downsampled to level l. Side output l must be gt size / 2^l.
double supervised_loss(std::span<const ProbabilityMap> side_outputs, const RegionMask& gt,
                       const LossConfig& config);

/// wBCE + Dice + alpha * purity + supervised.
double hybrid_loss(const ProbabilityMap& pred, std::span<const ProbabilityMap> side_outputs,
                   const RegionMask& gt, const LossConfig& config);

struct RegionMetrics {
  double dice = 0.0;
  double wbce = 0.0;
  double purity_loss = 0.0;
  double hybrid = 0.0;
};

/// Metrics for a single full-resolution prediction (no side outputs).
RegionMetrics evaluate_region(const ProbabilityMap& pred, const RegionMask& gt,
                              const LossConfig& config = {});

}  // namespace regionplan
