#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "vball/geometry.hpp"
#include "vball/image.hpp"

namespace vball::features {

struct HogParams {
    int patch_w = 64;
    int patch_h = 128;
    int cell = 8;
    int cells_per_block = 2;
    int bins = 9;  // unsigned orientations over [0, 180)

    void validate() const;
    int cells_x() const { return patch_w / cell; }
    int cells_y() const { return patch_h / cell; }
    int blocks_x() const { return cells_x() - cells_per_block + 1; }
    int blocks_y() const { return cells_y() - cells_per_block + 1; }
    std::size_t descriptor_size(int bins_per_cell) const {
        return static_cast<std::size_t>(blocks_x()) * blocks_y() *
               cells_per_block * cells_per_block * bins_per_cell;
    }
};

// Motion histograms share the patch geometry but use signed full-circle
// orientations plus a per-cell no-motion bin.
struct HofParams {
    HogParams geometry{64, 128, 8, 2, 8};
    double still_threshold_px = 0.5;
};

struct FlowField {
    int width = 0;
    int height = 0;
    std::vector<float> dx;
    std::vector<float> dy;
    std::vector<std::uint8_t> valid;  // structure tensor well-conditioned

    FlowField() = default;
    FlowField(int w, int h)
        : width(w), height(h),
          dx(static_cast<std::size_t>(w) * h, 0.0f),
          dy(static_cast<std::size_t>(w) * h, 0.0f),
          valid(static_cast<std::size_t>(w) * h, 0) {}
    std::size_t idx(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
};

// Gradient-orientation histogram per cell, magnitude-weighted bilinear votes
// between neighboring bin centers, overlapping blocks with L2-hys
// normalization (clip 0.2, renormalize). Patch must already be grayscale at
// (patch_w, patch_h).
std::vector<double> hog(const Image& patch, const HogParams& p);

// Pyramidal local least-squares flow, coarse to fine. Pixels whose averaged
// structure tensor has min eigenvalue < 1e-4 are left invalid with zero flow.
FlowField dense_flow(const Image& prev, const Image& cur, int levels = 3, int window = 9);

std::vector<double> hof(const FlowField& flow_patch, const HofParams& p);

// Patch extraction: bbox content resampled to a fixed size.
Image extract_gray_patch(const Image& frame, const geometry::ImageRect& rect,
                         int out_w, int out_h);
FlowField extract_flow_patch(const FlowField& flow, const geometry::ImageRect& rect,
                             int out_w, int out_h);

// Feet point of a bbox: bottom-center in pixel-center coordinates.
geometry::Vec2 rect_feet_point(const geometry::ImageRect& rect);

// Normalized real-world position of the bbox feet point over the court+margin
// domain. Not clamped: airborne players legitimately project outside.
std::array<double, 2> rwpc(const geometry::Homography& h, const geometry::ImageRect& bbox,
                           const geometry::CourtModel& court);

enum class Block { HOG, HOF, RWPC, SC, AC };

const char* block_name(Block b);
Block block_from_name(const std::string& name);

struct BlockSpan {
    Block block;
    std::size_t offset = 0;
    std::size_t length = 0;
};

struct FeatureVector {
    std::vector<double> values;
    std::vector<BlockSpan> layout;
};

// Concatenates the masked blocks in the fixed order HOG, HOF, RWPC, SC, AC.
FeatureVector assemble(const std::map<Block, std::vector<double>>& blocks,
                       const std::set<Block>& mask);

std::string layout_hash(const std::vector<BlockSpan>& layout);

struct Normalizer {
    std::vector<double> mean;
    std::vector<double> scale;  // 1.0 for zero-variance dims (centered pass-through)
    std::string provenance;
};

Normalizer fit_normalizer(const std::vector<std::vector<double>>& rows);
std::vector<double> apply_normalizer(const Normalizer& n, const std::vector<double>& v);

}  // namespace vball::features
