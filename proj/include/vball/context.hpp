#pragma once

#include <vector>

#include "vball/geometry.hpp"
#include "vball/segmentation.hpp"

namespace vball::context {

// Court-plane occupancy map: mean player-appearance probability per bin,
// row-major (iy outer, ix inner), values in [0,1].
struct ScDescriptor {
    int bins_x = 0;
    int bins_y = 0;
    std::vector<double> bins;

    double at(int ix, int iy) const {  // 1-based indices
        return bins[static_cast<std::size_t>(iy - 1) * bins_x + (ix - 1)];
    }
};

// Court-plane activity map: per-class average classification score over the
// k-frame window, stored class-major ([class][iy][ix]).
struct AcDescriptor {
    int bins_x = 0;
    int bins_y = 0;
    int num_classes = 0;
    int k = 0;
    std::vector<double> bins;

    double at(int ix, int iy, int cls) const {
        return bins[(static_cast<std::size_t>(cls) * bins_y + (iy - 1)) * bins_x + (ix - 1)];
    }
};

struct ScoredDetection {
    segmentation::PlayerDetection detection;
    std::vector<double> scores;  // calibrated, one per activity class
};

// Mean player probability over the rectangle: clipped sum divided by the
// unclipped area.
double fill_percentage(const segmentation::ProbabilityMap& p_player,
                       const geometry::ImageRect& rect);

ScDescriptor sc_descriptor(const segmentation::ProbabilityMap& p_player,
                           const geometry::Homography& h,
                           const geometry::CourtGrid& grid,
                           double player_width_m = 0.8, double player_height_m = 1.9);

// history is ordered oldest to newest; the last min(k, size) frames are used
// with the denominator fixed at k (missing leading frames contribute zero).
// Multiple detections in one bin within a frame are averaged first.
AcDescriptor ac_descriptor(const std::vector<std::vector<ScoredDetection>>& history,
                           const geometry::CourtGrid& grid, int k, int num_classes);

std::vector<double> flatten(const ScDescriptor& sc);
std::vector<double> flatten(const AcDescriptor& ac);

// P5 export for visual debugging; AC emits one graymap per class channel.
Image sc_to_image(const ScDescriptor& sc);
Image ac_channel_to_image(const AcDescriptor& ac, int cls);

}  // namespace vball::context
