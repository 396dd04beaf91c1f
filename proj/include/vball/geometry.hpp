#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "vball/errors.hpp"

namespace vball::geometry {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

// Court frame: origin at the near-left court corner, x across the court,
// y along it (away from the camera side). The margin is the run-out zone
// included in the grid domain on every side.
struct CourtModel {
    double length_m = 18.0;
    double width_m = 9.0;
    double margin_m = 1.5;
    double net_y = 9.0;

    void validate() const;

    double domain_min_x() const { return -margin_m; }
    double domain_min_y() const { return -margin_m; }
    double domain_extent_x() const { return width_m + 2.0 * margin_m; }
    double domain_extent_y() const { return length_m + 2.0 * margin_m; }
    bool in_domain(const Vec2& q) const {
        return q.x >= domain_min_x() && q.x <= domain_min_x() + domain_extent_x() &&
               q.y >= domain_min_y() && q.y <= domain_min_y() + domain_extent_y();
    }
};

// Projective map image -> court, normalized so h(2,2) = 1. The inverse is
// cached at construction; instances are immutable.
class Homography {
public:
    static Homography identity();
    static Homography from_matrix(const Eigen::Matrix3d& m);

    const Eigen::Matrix3d& matrix() const { return h_; }
    const Eigen::Matrix3d& inverse_matrix() const { return h_inv_; }
    Homography inverse() const { return Homography(h_inv_, h_); }

private:
    Homography(const Eigen::Matrix3d& h, const Eigen::Matrix3d& h_inv)
        : h_(h), h_inv_(h_inv) {}
    Eigen::Matrix3d h_;
    Eigen::Matrix3d h_inv_;
};

struct HomographyFit {
    Homography h;
    double rmse = 0.0;  // reprojection residual in court units
};

// Normalized DLT (Hartley conditioning on both point sets), least-squares over
// all correspondences. Needs >= 4 pairs in general position.
HomographyFit fit_homography(const std::vector<std::pair<Vec2, Vec2>>& pairs);

Vec2 project(const Homography& h, const Vec2& image_point);
Vec2 unproject(const Homography& h, const Vec2& court_point);

// Integer pixel rectangle, top-left anchored.
struct ImageRect {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    long long area() const { return static_cast<long long>(w) * h; }
    ImageRect clipped(int frame_w, int frame_h) const;
};

// Body-sized rectangle standing on the court point: width spans
// player_width_m of court at that depth, height uses the same local
// pixels-per-meter factor. Nearer positions give larger rectangles.
ImageRect scaled_rect(const Homography& h, const Vec2& court_point,
                      double player_width_m = 0.8, double player_height_m = 1.9);

struct BinIndex {
    int ix = 0;  // 1-based
    int iy = 0;
};

// Dense lattice of court points over court+margin with the bin layout used by
// the spatial descriptors.
struct CourtGrid {
    CourtModel court;
    double spacing_x_m = 0.0;
    double spacing_y_m = 0.0;
    int bins_x = 0;
    int bins_y = 0;
    std::vector<Vec2> points;  // row-major: y-major, x fastest

    BinIndex bin_index(const Vec2& q) const;
    int bin_flat(const Vec2& q) const {
        const BinIndex b = bin_index(q);
        return (b.iy - 1) * bins_x + (b.ix - 1);
    }
    int bin_count() const { return bins_x * bins_y; }
};

CourtGrid make_grid(const CourtModel& court, double spacing_m, int bins_x, int bins_y);

// Calibration file: one correspondence per line "u v X Y" (pixels, meters),
// '#' comments. Homography cache: 9 decimal numbers row-major.
std::vector<std::pair<Vec2, Vec2>> load_calibration_pairs(const std::string& path);
void save_homography(const std::string& path, const Homography& h);
Homography load_homography(const std::string& path);

}  // namespace vball::geometry
