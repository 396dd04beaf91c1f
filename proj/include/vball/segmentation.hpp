#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "vball/geometry.hpp"
#include "vball/image.hpp"

namespace vball::segmentation {

using Frame = Image;            // 3-channel, values in [0,1]
using BackgroundModel = Image;  // per-pixel, per-channel temporal median

enum class MapKind { Pfg, Pbg, Mdyn, Pplayer };

// Per-pixel scalar field in [0,1], double precision so oracle comparisons are
// independent of storage rounding.
struct ProbabilityMap {
    MapKind kind = MapKind::Mdyn;
    int width = 0;
    int height = 0;
    std::vector<double> v;

    ProbabilityMap() = default;
    ProbabilityMap(MapKind k, int w, int h)
        : kind(k), width(w), height(h), v(static_cast<std::size_t>(w) * h, 0.0) {}

    double& at(int x, int y) { return v[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return v[static_cast<std::size_t>(y) * width + x]; }

    Image to_image() const;  // for P5 export
};

enum class ColorRole { Foreground, Background };

struct GmmComponent {
    double weight = 0.0;
    std::array<double, 3> mean{};
    std::array<double, 3> var{};  // diagonal covariance, floored at 1e-6
};

struct ColorModel {
    ColorRole role = ColorRole::Foreground;
    std::vector<GmmComponent> components;
    std::string provenance;  // hash of the training sample source

    // Mixture density at Mahalanobis radius 1; the reference point of the
    // density -> probability squashing d / (d + d0).
    double reference_density() const;
    double density(const std::array<double, 3>& rgb) const;
};

struct GmmFit {
    ColorModel model;
    std::vector<double> log_likelihoods;  // one entry per EM iteration
};

struct PlayerDetection {
    geometry::Vec2 court_position;
    geometry::ImageRect image_blob;
    double mass = 0.0;
};

// Per-pixel, per-channel temporal median (lower median for even counts).
BackgroundModel build_background(const std::vector<Frame>& frames);

// Eq-style channel-max absolute difference between background and frame.
ProbabilityMap dynamic_similarity(const BackgroundModel& bg, const Frame& f);

// EM with k-means++ initialization; deterministic given seed.
GmmFit fit_gmm(const std::vector<std::array<double, 3>>& pixels, int k,
               std::uint64_t seed, ColorRole role = ColorRole::Foreground);

ProbabilityMap gmm_likelihood(const ColorModel& model, const Frame& f);

// Posterior map: P_fg * M_dyn / (P_fg + P_bg), clamped to [0,1].
ProbabilityMap player_probability(const ProbabilityMap& p_fg,
                                  const ProbabilityMap& p_bg,
                                  const ProbabilityMap& m_dyn);

// Threshold, 8-connected components, mass filter; court position is the
// projection of the blob's bottom-center (feet). Detections projecting
// outside court+margin are dropped; result sorted by mass descending.
std::vector<PlayerDetection> localize_players(const ProbabilityMap& p,
                                              const geometry::Homography& h,
                                              const geometry::CourtModel& court,
                                              double threshold, double min_mass);

std::string color_model_to_json(const ColorModel& m);
ColorModel color_model_from_json(const std::string& json_text);

}  // namespace vball::segmentation
