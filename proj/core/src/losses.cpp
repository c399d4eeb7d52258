#include "regionplan/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace regionplan {

namespace {

void require_same_shape(const ProbabilityMap& pred, const RegionMask& gt) {
  if (!pred.same_shape(gt)) {
    throw Error(ErrorCode::kDimensionMismatch,
                "prediction " + std::to_string(pred.width()) + "x" +
                    std::to_string(pred.height()) + " vs ground truth " +
                    std::to_string(gt.width()) + "x" + std::to_string(gt.height()));
  }
}

Raster<double> as_real(const RegionMask& mask) {
  Raster<double> out(mask.width(), mask.height());
  std::transform(mask.cells().begin(), mask.cells().end(), out.cells().begin(),
                 [](std::uint8_t v) { return v ? 1.0 : 0.0; });
  return out;
}

// Per-pixel BCE terms share this so weighted and unweighted sums agree
// bit-for-bit on each term.
inline double bce_term(double p, bool label, double eps) {
  const double q = std::clamp(p, eps, 1.0 - eps);
  return label ? -std::log(q) : -std::log(1.0 - q);
}

}  // namespace

double LossConfig::alpha_for(int width, int height) const noexcept {
  if (alpha) return *alpha;
  return 1.0 / (8.0 * static_cast<double>(width) * static_cast<double>(height));
}

void LossConfig::validate() const {
  if (!(sigma_smoothing >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "sigma_smoothing must be non-negative");
  }
  if (alpha && !(*alpha >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "alpha must be >= 0");
  if (!(epsilon_clamp > 0.0 && epsilon_clamp < 0.5)) {
    throw Error(ErrorCode::kInvalidArgument, "epsilon_clamp must be in (0, 0.5)");
  }
}

PurityMatrix purity_matrix(const Raster<double>& grid) {
  const int w = grid.width();
  const int h = grid.height();
  PurityMatrix out(w, h, 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if ((dx != 0 || dy != 0) && grid.in_bounds(x + dx, y + dy)) s += grid(x + dx, y + dy);
        }
      }
      out(x, y) = s;
    }
  }
  return out;
}

PurityMatrix purity_matrix(const RegionMask& mask) { return purity_matrix(as_real(mask)); }

double clamped_bce(const ProbabilityMap& pred, const RegionMask& gt, double epsilon_clamp) {
  require_same_shape(pred, gt);
  double total = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    total += bce_term(pred.cells()[i], gt.cells()[i] != 0, epsilon_clamp);
  }
  return total;
}

double weighted_bce(const ProbabilityMap& pred, const RegionMask& gt, const LossConfig& config) {
  require_same_shape(pred, gt);
  const PurityMatrix psi = purity_matrix(gt);
  const PurityMatrix psi_hat = purity_matrix(pred);
  double total = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double w = std::abs(psi.cells()[i] - psi_hat.cells()[i]) + config.sigma_smoothing;
    total += w * bce_term(pred.cells()[i], gt.cells()[i] != 0, config.epsilon_clamp);
  }
  return total;
}

double dice_coefficient(const ProbabilityMap& pred, const RegionMask& gt) {
  require_same_shape(pred, gt);
  double intersection = 0.0;
  double pred_sum = 0.0;
  double gt_sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double g = gt.cells()[i] ? 1.0 : 0.0;
    intersection += pred.cells()[i] * g;
    pred_sum += pred.cells()[i];
    gt_sum += g;
  }
  return (2.0 * intersection + 1.0) / (pred_sum + gt_sum + 1.0);
}

double purity_loss(const ProbabilityMap& pred, const RegionMask& gt) {
  require_same_shape(pred, gt);
  const PurityMatrix psi = purity_matrix(gt);
  const PurityMatrix psi_hat = purity_matrix(pred);
  double total = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    total += std::abs(psi.cells()[i] - psi_hat.cells()[i]);
  }
  return total;
}

RegionMask downsample_mask(const RegionMask& gt, int level) {
  if (level < 1 || level > 4) {
    throw Error(ErrorCode::kInvalidArgument, "downsample level must be in [1,4]");
  }
  const int block = 1 << level;
  if (gt.width() % block != 0 || gt.height() % block != 0) {
    throw Error(ErrorCode::kDimensionMismatch,
                "dimensions not divisible by " + std::to_string(block));
  }
  RegionMask out(gt.width() / block, gt.height() / block, 0);
  for (int y = 0; y < gt.height(); ++y) {
    for (int x = 0; x < gt.width(); ++x) {
      if (gt(x, y)) out(x / block, y / block) = 1;
    }
  }
  return out;
}

double supervised_loss(std::span<const ProbabilityMap> side_outputs, const RegionMask& gt,
                       const LossConfig& config) {
  if (side_outputs.size() > config.beta.size()) {
    throw Error(ErrorCode::kInvalidArgument, "at most four side outputs are supervised");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < side_outputs.size(); ++i) {
    const int level = static_cast<int>(i) + 1;
    const RegionMask target = downsample_mask(gt, level);
    const ProbabilityMap& side = side_outputs[i];
    if (!side.same_shape(target)) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "side output " + std::to_string(level) + " has the wrong shape");
    }
    total += config.beta[i] * (weighted_bce(side, target, config) + dice_loss(side, target));
  }
  return total;
}

double hybrid_loss(const ProbabilityMap& pred, std::span<const ProbabilityMap> side_outputs,
                   const RegionMask& gt, const LossConfig& config) {
  const double alpha = config.alpha_for(gt.width(), gt.height());
  return weighted_bce(pred, gt, config) + dice_loss(pred, gt) + alpha * purity_loss(pred, gt) +
         supervised_loss(side_outputs, gt, config);
}

RegionMetrics evaluate_region(const ProbabilityMap& pred, const RegionMask& gt,
                              const LossConfig& config) {
  config.validate();
  RegionMetrics m;
  m.dice = dice_coefficient(pred, gt);
  m.wbce = weighted_bce(pred, gt, config);
  m.purity_loss = purity_loss(pred, gt);
  m.hybrid = m.wbce + (1.0 - m.dice) + config.alpha_for(gt.width(), gt.height()) * m.purity_loss;
  return m;
}

}  // namespace regionplan
