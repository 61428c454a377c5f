// Position error metrics.
#pragma once

#include <Eigen/Dense>

#include <vector>

namespace sor {

/// A position track, one 2D point per step.
using PositionSeries = std::vector<Eigen::Vector2d>;

struct RmseResult {
    std::vector<double> per_step; ///< sqrt(mean over runs of squared position error)
    double aggregate = 0.0;       ///< mean of per_step over steps
};

/// RMSE_pos(k) = sqrt( mean_r [ (a_hat - a)^2 + (b_hat - b)^2 ] ), aggregate =
/// mean over k. `estimates[r]` and `truths[r]` are the tracks of run r. Throws
/// std::invalid_argument on mismatched lengths.
RmseResult rmse_pos(const std::vector<PositionSeries>& estimates, const std::vector<PositionSeries>& truths);

} // namespace sor
