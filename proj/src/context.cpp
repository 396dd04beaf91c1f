#include "vball/context.hpp"

#include <algorithm>
#include <cmath>

namespace vball::context {

using geometry::ImageRect;
using segmentation::ProbabilityMap;

double fill_percentage(const ProbabilityMap& p_player, const ImageRect& rect) {
    if (rect.w <= 0 || rect.h <= 0) throw ZeroArea("fill_percentage");
    const ImageRect c = rect.clipped(p_player.width, p_player.height);
    double sum = 0.0;
    for (int y = c.y; y < c.y + c.h; ++y) {
        for (int x = c.x; x < c.x + c.w; ++x) {
            sum += p_player.at(x, y);
        }
    }
    return sum / static_cast<double>(rect.area());
}

namespace {

// summed-area table, (w+1)x(h+1)
std::vector<double> build_sat(const ProbabilityMap& p) {
    const int w = p.width, h = p.height;
    std::vector<double> s(static_cast<std::size_t>(w + 1) * (h + 1), 0.0);
    for (int y = 0; y < h; ++y) {
        double row = 0.0;
        for (int x = 0; x < w; ++x) {
            row += p.at(x, y);
            s[static_cast<std::size_t>(y + 1) * (w + 1) + (x + 1)] =
                s[static_cast<std::size_t>(y) * (w + 1) + (x + 1)] + row;
        }
    }
    return s;
}

double sat_rect_sum(const std::vector<double>& s, int sat_w, const ImageRect& c) {
    const std::size_t stride = sat_w + 1;
    const int x0 = c.x, y0 = c.y, x1 = c.x + c.w, y1 = c.y + c.h;
    return s[static_cast<std::size_t>(y1) * stride + x1] -
           s[static_cast<std::size_t>(y0) * stride + x1] -
           s[static_cast<std::size_t>(y1) * stride + x0] +
           s[static_cast<std::size_t>(y0) * stride + x0];
}

}  // namespace

ScDescriptor sc_descriptor(const ProbabilityMap& p_player, const geometry::Homography& h,
                           const geometry::CourtGrid& grid,
                           double player_width_m, double player_height_m) {
    if (grid.points.empty() || grid.bin_count() <= 0) throw EmptyGrid("sc_descriptor");
    ScDescriptor sc;
    sc.bins_x = grid.bins_x;
    sc.bins_y = grid.bins_y;
    sc.bins.assign(static_cast<std::size_t>(grid.bin_count()), 0.0);
    std::vector<int> counts(sc.bins.size(), 0);
    const auto sat = build_sat(p_player);
    for (const auto& q : grid.points) {
        const ImageRect rect = geometry::scaled_rect(h, q, player_width_m, player_height_m);
        const ImageRect c = rect.clipped(p_player.width, p_player.height);
        double fill = 0.0;
        if (c.w > 0 && c.h > 0) {
            fill = sat_rect_sum(sat, p_player.width, c) / static_cast<double>(rect.area());
        }
        const int bin = grid.bin_flat(q);
        sc.bins[bin] += fill;
        ++counts[bin];
    }
    for (std::size_t i = 0; i < sc.bins.size(); ++i) {
        if (counts[i] > 0) sc.bins[i] /= counts[i];
    }
    return sc;
}

AcDescriptor ac_descriptor(const std::vector<std::vector<ScoredDetection>>& history,
                           const geometry::CourtGrid& grid, int k, int num_classes) {
    if (grid.bin_count() <= 0) throw EmptyGrid("ac_descriptor");
    if (history.empty()) throw ConfigInvalid("ac_descriptor: history must be non-empty");
    if (k < 1) throw ConfigInvalid("ac_descriptor: k must be >= 1");
    AcDescriptor ac;
    ac.bins_x = grid.bins_x;
    ac.bins_y = grid.bins_y;
    ac.num_classes = num_classes;
    ac.k = k;
    const std::size_t nb = static_cast<std::size_t>(grid.bin_count());
    ac.bins.assign(nb * num_classes, 0.0);

    const std::size_t use = std::min<std::size_t>(k, history.size());
    std::vector<double> frame_sum(nb * num_classes);
    std::vector<int> frame_count(nb);
    for (std::size_t f = history.size() - use; f < history.size(); ++f) {
        std::fill(frame_sum.begin(), frame_sum.end(), 0.0);
        std::fill(frame_count.begin(), frame_count.end(), 0);
        for (const auto& sd : history[f]) {
            if (static_cast<int>(sd.scores.size()) != num_classes)
                throw DimensionMismatch("ac_descriptor: score vector width");
            const int bin = grid.bin_flat(sd.detection.court_position);
            for (int a = 0; a < num_classes; ++a) {
                frame_sum[static_cast<std::size_t>(a) * nb + bin] += sd.scores[a];
            }
            ++frame_count[bin];
        }
        // within-frame average keeps multi-detection bins in [0,1]
        for (std::size_t bin = 0; bin < nb; ++bin) {
            if (frame_count[bin] == 0) continue;
            for (int a = 0; a < num_classes; ++a) {
                ac.bins[static_cast<std::size_t>(a) * nb + bin] +=
                    frame_sum[static_cast<std::size_t>(a) * nb + bin] / frame_count[bin];
            }
        }
    }
    for (double& v : ac.bins) v /= k;
    return ac;
}

std::vector<double> flatten(const ScDescriptor& sc) { return sc.bins; }
std::vector<double> flatten(const AcDescriptor& ac) { return ac.bins; }

Image sc_to_image(const ScDescriptor& sc) {
    Image img(sc.bins_x, sc.bins_y, 1);
    for (std::size_t i = 0; i < sc.bins.size(); ++i)
        img.data[i] = static_cast<float>(std::clamp(sc.bins[i], 0.0, 1.0));
    return img;
}

Image ac_channel_to_image(const AcDescriptor& ac, int cls) {
    Image img(ac.bins_x, ac.bins_y, 1);
    const std::size_t nb = static_cast<std::size_t>(ac.bins_x) * ac.bins_y;
    for (std::size_t i = 0; i < nb; ++i)
        img.data[i] = static_cast<float>(std::clamp(ac.bins[cls * nb + i], 0.0, 1.0));
    return img;
}

}  // namespace vball::context
