#include "vball/features.hpp"

#include <algorithm>
#include <cmath>

#include "vball/hash.hpp"

namespace vball::features {

void HogParams::validate() const {
    if (patch_w <= 0 || patch_h <= 0 || cell <= 0 || bins <= 0)
        throw ConfigInvalid("hog params must be positive");
    if (patch_w % cell != 0 || patch_h % cell != 0)
        throw ConfigInvalid("patch dimensions must be divisible by cell size");
    if (cells_per_block < 1 || cells_per_block > cells_x() || cells_per_block > cells_y())
        throw ConfigInvalid("cells_per_block exceeds cells per side");
}

namespace {

// L2-hys over one block: normalize, clip at 0.2, renormalize.
void l2hys(std::vector<double>& block) {
    constexpr double kEps = 1e-10;
    double sq = 0.0;
    for (double v : block) sq += v * v;
    double norm = std::sqrt(sq + kEps * kEps);
    for (double& v : block) v = std::min(v / norm, 0.2);
    sq = 0.0;
    for (double v : block) sq += v * v;
    norm = std::sqrt(sq + kEps * kEps);
    for (double& v : block) v /= norm;
}

// Cell histograms -> overlapping blocks (stride one cell), L2-hys each.
std::vector<double> blocks_from_cells(const std::vector<double>& cells,
                                      const HogParams& p, int bins_per_cell) {
    std::vector<double> out;
    out.reserve(p.descriptor_size(bins_per_cell));
    std::vector<double> block(static_cast<std::size_t>(p.cells_per_block) *
                              p.cells_per_block * bins_per_cell);
    for (int by = 0; by < p.blocks_y(); ++by) {
        for (int bx = 0; bx < p.blocks_x(); ++bx) {
            std::size_t o = 0;
            for (int cy = 0; cy < p.cells_per_block; ++cy) {
                for (int cx = 0; cx < p.cells_per_block; ++cx) {
                    const std::size_t cell_idx =
                        (static_cast<std::size_t>(by + cy) * p.cells_x() + (bx + cx)) *
                        bins_per_cell;
                    for (int b = 0; b < bins_per_cell; ++b) block[o++] = cells[cell_idx + b];
                }
            }
            l2hys(block);
            out.insert(out.end(), block.begin(), block.end());
        }
    }
    return out;
}

// Vote mag into the circular histogram with bin centers at i*bin_width.
void vote(std::vector<double>& cells, std::size_t cell_base, double angle,
          double mag, int bins, double bin_width) {
    double b = angle / bin_width;
    int b0 = static_cast<int>(std::floor(b));
    const double frac = b - b0;
    const int i0 = ((b0 % bins) + bins) % bins;
    const int i1 = (i0 + 1) % bins;
    cells[cell_base + i0] += (1.0 - frac) * mag;
    cells[cell_base + i1] += frac * mag;
}

}  // namespace

std::vector<double> hog(const Image& patch, const HogParams& p) {
    p.validate();
    if (patch.width != p.patch_w || patch.height != p.patch_h || patch.channels != 1)
        throw EmptyPatch("hog patch must be grayscale at (patch_w, patch_h)");
    const int cx = p.cells_x(), cy = p.cells_y();
    std::vector<double> cells(static_cast<std::size_t>(cx) * cy * p.bins, 0.0);
    const double bin_width = M_PI / p.bins;
    for (int y = 0; y < p.patch_h; ++y) {
        const int ym = std::max(y - 1, 0), yp = std::min(y + 1, p.patch_h - 1);
        for (int x = 0; x < p.patch_w; ++x) {
            const int xm = std::max(x - 1, 0), xp = std::min(x + 1, p.patch_w - 1);
            const double gx = patch.at(xp, y) - patch.at(xm, y);
            const double gy = patch.at(x, yp) - patch.at(x, ym);
            const double mag = std::hypot(gx, gy);
            if (mag == 0.0) continue;
            double angle = std::atan2(gy, gx);  // (-pi, pi]
            if (angle < 0.0) angle += M_PI;     // unsigned
            if (angle >= M_PI) angle -= M_PI;
            const std::size_t cell_base =
                (static_cast<std::size_t>(y / p.cell) * cx + (x / p.cell)) * p.bins;
            vote(cells, cell_base, angle, mag, p.bins, bin_width);
        }
    }
    return blocks_from_cells(cells, p, p.bins);
}

namespace {

Image downsample_half(const Image& src) {
    const int w = std::max(1, src.width / 2), h = std::max(1, src.height / 2);
    Image out(w, h, 1);
    for (int y = 0; y < h; ++y) {
        const int y1 = std::min(2 * y + 1, src.height - 1);
        for (int x = 0; x < w; ++x) {
            const int x1 = std::min(2 * x + 1, src.width - 1);
            out.at(x, y) = 0.25f * (src.at(2 * x, 2 * y) + src.at(x1, 2 * y) +
                                    src.at(2 * x, y1) + src.at(x1, y1));
        }
    }
    return out;
}

// summed-area table with one row/col zero padding
std::vector<double> sat(const std::vector<float>& v, int w, int h) {
    std::vector<double> s(static_cast<std::size_t>(w + 1) * (h + 1), 0.0);
    for (int y = 0; y < h; ++y) {
        double row = 0.0;
        for (int x = 0; x < w; ++x) {
            row += v[static_cast<std::size_t>(y) * w + x];
            s[static_cast<std::size_t>(y + 1) * (w + 1) + (x + 1)] =
                s[static_cast<std::size_t>(y) * (w + 1) + (x + 1)] + row;
        }
    }
    return s;
}

double sat_sum(const std::vector<double>& s, int w, int x0, int y0, int x1, int y1) {
    // inclusive box
    const std::size_t stride = w + 1;
    return s[static_cast<std::size_t>(y1 + 1) * stride + (x1 + 1)] -
           s[static_cast<std::size_t>(y0) * stride + (x1 + 1)] -
           s[static_cast<std::size_t>(y1 + 1) * stride + x0] +
           s[static_cast<std::size_t>(y0) * stride + x0];
}

}  // namespace

FlowField dense_flow(const Image& prev, const Image& cur, int levels, int window) {
    require_same_shape(prev, cur, "dense_flow");
    if (levels < 1) throw ConfigInvalid("dense_flow: levels must be >= 1");
    if (window < 3 || window % 2 == 0) throw ConfigInvalid("dense_flow: window must be odd >= 3");
    const Image prev_g = to_gray(prev);
    const Image cur_g = to_gray(cur);

    std::vector<Image> pyr_prev{prev_g}, pyr_cur{cur_g};
    for (int l = 1; l < levels; ++l) {
        if (pyr_prev.back().width < 2 * window || pyr_prev.back().height < 2 * window) break;
        pyr_prev.push_back(downsample_half(pyr_prev.back()));
        pyr_cur.push_back(downsample_half(pyr_cur.back()));
    }

    const int rad = window / 2;
    const double win_area = static_cast<double>(window) * window;
    constexpr double kMinEig = 1e-4;
    constexpr int kItersPerLevel = 2;

    FlowField flow;
    for (int l = static_cast<int>(pyr_prev.size()) - 1; l >= 0; --l) {
        const Image& a = pyr_prev[l];
        const Image& b = pyr_cur[l];
        const int w = a.width, h = a.height;
        FlowField next(w, h);
        if (flow.width > 0) {
            // upsample previous level's flow, doubling the displacements
            for (int y = 0; y < h; ++y) {
                for (int x = 0; x < w; ++x) {
                    const float sx = x * (static_cast<float>(flow.width) / w);
                    const float sy = y * (static_cast<float>(flow.height) / h);
                    const int ix = std::min(static_cast<int>(sx), flow.width - 1);
                    const int iy = std::min(static_cast<int>(sy), flow.height - 1);
                    next.dx[next.idx(x, y)] = 2.0f * flow.dx[flow.idx(ix, iy)];
                    next.dy[next.idx(x, y)] = 2.0f * flow.dy[flow.idx(ix, iy)];
                }
            }
        }

        const std::size_t n = static_cast<std::size_t>(w) * h;
        std::vector<float> ix_v(n), iy_v(n), it_v(n);
        for (int y = 0; y < h; ++y) {
            const int ym = std::max(y - 1, 0), yp = std::min(y + 1, h - 1);
            for (int x = 0; x < w; ++x) {
                const int xm = std::max(x - 1, 0), xp = std::min(x + 1, w - 1);
                ix_v[next.idx(x, y)] = 0.5f * (a.at(xp, y) - a.at(xm, y));
                iy_v[next.idx(x, y)] = 0.5f * (a.at(x, yp) - a.at(x, ym));
            }
        }
        std::vector<float> ixx(n), ixy(n), iyy(n), ixt(n), iyt(n);
        for (std::size_t i = 0; i < n; ++i) {
            ixx[i] = ix_v[i] * ix_v[i];
            ixy[i] = ix_v[i] * iy_v[i];
            iyy[i] = iy_v[i] * iy_v[i];
        }
        const auto s_xx = sat(ixx, w, h);
        const auto s_xy = sat(ixy, w, h);
        const auto s_yy = sat(iyy, w, h);

        for (int iter = 0; iter < kItersPerLevel; ++iter) {
            for (int y = 0; y < h; ++y) {
                for (int x = 0; x < w; ++x) {
                    const std::size_t i = next.idx(x, y);
                    const float warped = sample_bilinear(b, x + next.dx[i], y + next.dy[i], 0);
                    it_v[i] = warped - a.at(x, y);
                    ixt[i] = ix_v[i] * it_v[i];
                    iyt[i] = iy_v[i] * it_v[i];
                }
            }
            const auto s_xt = sat(ixt, w, h);
            const auto s_yt = sat(iyt, w, h);
            for (int y = 0; y < h; ++y) {
                const int y0 = std::max(y - rad, 0), y1 = std::min(y + rad, h - 1);
                for (int x = 0; x < w; ++x) {
                    const int x0 = std::max(x - rad, 0), x1 = std::min(x + rad, w - 1);
                    const double gxx = sat_sum(s_xx, w, x0, y0, x1, y1) / win_area;
                    const double gxy = sat_sum(s_xy, w, x0, y0, x1, y1) / win_area;
                    const double gyy = sat_sum(s_yy, w, x0, y0, x1, y1) / win_area;
                    const double tr = gxx + gyy;
                    const double det_part = std::sqrt(std::max(
                        (gxx - gyy) * (gxx - gyy) + 4.0 * gxy * gxy, 0.0));
                    const double min_eig = 0.5 * (tr - det_part);
                    const std::size_t i = next.idx(x, y);
                    if (min_eig < kMinEig) {
                        if (l == 0 && iter == kItersPerLevel - 1) {
                            next.dx[i] = 0.0f;
                            next.dy[i] = 0.0f;
                            next.valid[i] = 0;
                        }
                        continue;
                    }
                    const double bx = -sat_sum(s_xt, w, x0, y0, x1, y1) / win_area;
                    const double by = -sat_sum(s_yt, w, x0, y0, x1, y1) / win_area;
                    const double det = gxx * gyy - gxy * gxy;
                    next.dx[i] += static_cast<float>((gyy * bx - gxy * by) / det);
                    next.dy[i] += static_cast<float>((gxx * by - gxy * bx) / det);
                    next.valid[i] = 1;
                }
            }
        }
        flow = std::move(next);
    }
    return flow;
}

std::vector<double> hof(const FlowField& flow_patch, const HofParams& p) {
    const HogParams& g = p.geometry;
    g.validate();
    if (flow_patch.width != g.patch_w || flow_patch.height != g.patch_h)
        throw EmptyPatch("hof flow patch must be sized (patch_w, patch_h)");
    const int cx = g.cells_x(), cy = g.cells_y();
    const int bins_per_cell = g.bins + 1;  // + no-motion bin
    std::vector<double> cells(static_cast<std::size_t>(cx) * cy * bins_per_cell, 0.0);
    const double bin_width = 2.0 * M_PI / g.bins;
    for (int y = 0; y < g.patch_h; ++y) {
        for (int x = 0; x < g.patch_w; ++x) {
            const std::size_t i = flow_patch.idx(x, y);
            const double u = flow_patch.dx[i], v = flow_patch.dy[i];
            const double mag = std::hypot(u, v);
            const std::size_t cell_base =
                (static_cast<std::size_t>(y / g.cell) * cx + (x / g.cell)) * bins_per_cell;
            if (mag < p.still_threshold_px) {
                cells[cell_base + g.bins] += 1.0;
                continue;
            }
            double angle = std::atan2(v, u);
            if (angle < 0.0) angle += 2.0 * M_PI;
            vote(cells, cell_base, angle, mag, g.bins, bin_width);
        }
    }
    return blocks_from_cells(cells, g, bins_per_cell);
}

Image extract_gray_patch(const Image& frame, const geometry::ImageRect& rect,
                         int out_w, int out_h) {
    if (rect.w <= 0 || rect.h <= 0) throw EmptyPatch("extract_gray_patch");
    const Image gray = to_gray(frame);
    return resample_rect(gray, rect.x, rect.y, rect.w, rect.h, out_w, out_h);
}

FlowField extract_flow_patch(const FlowField& flow, const geometry::ImageRect& rect,
                             int out_w, int out_h) {
    if (rect.w <= 0 || rect.h <= 0) throw EmptyPatch("extract_flow_patch");
    Image fx(flow.width, flow.height, 1), fy(flow.width, flow.height, 1);
    std::copy(flow.dx.begin(), flow.dx.end(), fx.data.begin());
    std::copy(flow.dy.begin(), flow.dy.end(), fy.data.begin());
    const Image rx = resample_rect(fx, rect.x, rect.y, rect.w, rect.h, out_w, out_h);
    const Image ry = resample_rect(fy, rect.x, rect.y, rect.w, rect.h, out_w, out_h);
    FlowField out(out_w, out_h);
    std::copy(rx.data.begin(), rx.data.end(), out.dx.begin());
    std::copy(ry.data.begin(), ry.data.end(), out.dy.begin());
    std::fill(out.valid.begin(), out.valid.end(), 1);
    return out;
}

geometry::Vec2 rect_feet_point(const geometry::ImageRect& rect) {
    return {rect.x + (rect.w - 1) / 2.0, static_cast<double>(rect.y + rect.h - 1)};
}

std::array<double, 2> rwpc(const geometry::Homography& h, const geometry::ImageRect& bbox,
                           const geometry::CourtModel& court) {
    const geometry::Vec2 q = geometry::project(h, rect_feet_point(bbox));
    return {(q.x - court.domain_min_x()) / court.domain_extent_x(),
            (q.y - court.domain_min_y()) / court.domain_extent_y()};
}

const char* block_name(Block b) {
    switch (b) {
        case Block::HOG: return "hog";
        case Block::HOF: return "hof";
        case Block::RWPC: return "rwpc";
        case Block::SC: return "sc";
        case Block::AC: return "ac";
    }
    return "?";
}

Block block_from_name(const std::string& name) {
    if (name == "hog") return Block::HOG;
    if (name == "hof") return Block::HOF;
    if (name == "rwpc") return Block::RWPC;
    if (name == "sc") return Block::SC;
    if (name == "ac") return Block::AC;
    throw UnknownBlock(name);
}

FeatureVector assemble(const std::map<Block, std::vector<double>>& blocks,
                       const std::set<Block>& mask) {
    if (mask.empty()) throw EmptyMask("assemble");
    FeatureVector fv;
    for (Block b : {Block::HOG, Block::HOF, Block::RWPC, Block::SC, Block::AC}) {
        if (!mask.count(b)) continue;
        const auto it = blocks.find(b);
        if (it == blocks.end())
            throw UnknownBlock(std::string("assemble: no data for block ") + block_name(b));
        fv.layout.push_back({b, fv.values.size(), it->second.size()});
        fv.values.insert(fv.values.end(), it->second.begin(), it->second.end());
    }
    return fv;
}

std::string layout_hash(const std::vector<BlockSpan>& layout) {
    Fnv1a64 h;
    for (const auto& span : layout) {
        h.update(block_name(span.block));
        h.update_value(span.offset);
        h.update_value(span.length);
    }
    return h.hex();
}

Normalizer fit_normalizer(const std::vector<std::vector<double>>& rows) {
    if (rows.size() < 2) throw InsufficientData("fit_normalizer needs >= 2 vectors");
    const std::size_t dim = rows.front().size();
    for (const auto& r : rows)
        if (r.size() != dim) throw DimensionMismatch("fit_normalizer row widths differ");
    Normalizer n;
    n.mean.assign(dim, 0.0);
    n.scale.assign(dim, 1.0);
    for (const auto& r : rows) {
        for (std::size_t d = 0; d < dim; ++d) n.mean[d] += r[d];
    }
    for (double& m : n.mean) m /= rows.size();
    std::vector<double> var(dim, 0.0);
    for (const auto& r : rows) {
        for (std::size_t d = 0; d < dim; ++d) {
            const double diff = r[d] - n.mean[d];
            var[d] += diff * diff;
        }
    }
    for (std::size_t d = 0; d < dim; ++d) {
        var[d] /= rows.size();
        if (var[d] > 0.0) n.scale[d] = std::sqrt(var[d]);
    }
    return n;
}

std::vector<double> apply_normalizer(const Normalizer& n, const std::vector<double>& v) {
    if (v.size() != n.mean.size()) throw DimensionMismatch("apply_normalizer");
    std::vector<double> out(v.size());
    for (std::size_t d = 0; d < v.size(); ++d) out[d] = (v[d] - n.mean[d]) / n.scale[d];
    return out;
}

}  // namespace vball::features
