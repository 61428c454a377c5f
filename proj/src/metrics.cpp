#include "sor/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace sor {

RmseResult rmse_pos(const std::vector<PositionSeries>& estimates, const std::vector<PositionSeries>& truths)
{
    if (estimates.size() != truths.size()) {
        throw std::invalid_argument("rmse_pos: run counts differ");
    }
    RmseResult out;
    if (estimates.empty()) {
        return out;
    }
    const std::size_t steps = estimates.front().size();
    for (std::size_t r = 0; r < estimates.size(); ++r) {
        if (estimates[r].size() != steps || truths[r].size() != steps) {
            throw std::invalid_argument("rmse_pos: series lengths differ");
        }
    }
    out.per_step.assign(steps, 0.0);
    for (std::size_t k = 0; k < steps; ++k) {
        double acc = 0.0;
        for (std::size_t r = 0; r < estimates.size(); ++r) {
            acc += (estimates[r][k] - truths[r][k]).squaredNorm();
        }
        out.per_step[k] = std::sqrt(acc / static_cast<double>(estimates.size()));
    }
    double sum = 0.0;
    for (double v : out.per_step) {
        sum += v;
    }
    out.aggregate = steps > 0 ? sum / static_cast<double>(steps) : 0.0;
    return out;
}

} // namespace sor
