#include "vball/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace vball::geometry {

namespace {
constexpr double kHorizonEps = 1e-12;

Vec2 apply(const Eigen::Matrix3d& m, const Vec2& p) {
    const double wp = m(2, 0) * p.x + m(2, 1) * p.y + m(2, 2);
    if (std::abs(wp) < kHorizonEps) throw PointAtHorizon("homogeneous depth ~ 0");
    return {(m(0, 0) * p.x + m(0, 1) * p.y + m(0, 2)) / wp,
            (m(1, 0) * p.x + m(1, 1) * p.y + m(1, 2)) / wp};
}

// Hartley conditioning: centroid to origin, mean distance sqrt(2).
Eigen::Matrix3d conditioning_transform(const std::vector<Vec2>& pts) {
    double cx = 0.0, cy = 0.0;
    for (const auto& p : pts) {
        cx += p.x;
        cy += p.y;
    }
    cx /= pts.size();
    cy /= pts.size();
    double mean_dist = 0.0;
    for (const auto& p : pts) {
        mean_dist += std::hypot(p.x - cx, p.y - cy);
    }
    mean_dist /= pts.size();
    if (mean_dist < 1e-15) throw DegenerateConfiguration("coincident points");
    const double s = std::sqrt(2.0) / mean_dist;
    Eigen::Matrix3d t;
    t << s, 0, -s * cx, 0, s, -s * cy, 0, 0, 1;
    return t;
}
}  // namespace

void CourtModel::validate() const {
    if (length_m <= 0 || width_m <= 0 || margin_m < 0)
        throw ConfigInvalid("court dimensions must be positive, margin non-negative");
    if (net_y <= 0 || net_y >= length_m)
        throw ConfigInvalid("net_y must lie strictly inside the court length");
}

Homography Homography::identity() {
    return Homography(Eigen::Matrix3d::Identity(), Eigen::Matrix3d::Identity());
}

Homography Homography::from_matrix(const Eigen::Matrix3d& m) {
    const double det = m.determinant();
    if (std::abs(det) < 1e-15) throw DegenerateConfiguration("singular homography");
    if (std::abs(m(2, 2)) < 1e-15)
        throw DegenerateConfiguration("cannot normalize h22 = 0");
    Eigen::Matrix3d h = m / m(2, 2);
    Eigen::Matrix3d inv = h.inverse();
    inv /= inv(2, 2);
    return Homography(h, inv);
}

HomographyFit fit_homography(const std::vector<std::pair<Vec2, Vec2>>& pairs) {
    if (pairs.size() < 4)
        throw DegenerateConfiguration("need at least 4 correspondences");
    std::vector<Vec2> src(pairs.size()), dst(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        src[i] = pairs[i].first;
        dst[i] = pairs[i].second;
    }
    const Eigen::Matrix3d ts = conditioning_transform(src);
    const Eigen::Matrix3d td = conditioning_transform(dst);

    Eigen::MatrixXd a(2 * pairs.size(), 9);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const Vec2 p = apply(ts, src[i]);
        const Vec2 q = apply(td, dst[i]);
        a.row(2 * i) << -p.x, -p.y, -1, 0, 0, 0, q.x * p.x, q.x * p.y, q.x;
        a.row(2 * i + 1) << 0, 0, 0, -p.x, -p.y, -1, q.y * p.x, q.y * p.y, q.y;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    // rank must be exactly 8: a second vanishing singular value means the
    // configuration does not pin down a unique H
    if (sv(7) < 1e-9 * sv(0))
        throw DegenerateConfiguration("design matrix rank-deficient");
    Eigen::Matrix3d hn;
    const Eigen::VectorXd v = svd.matrixV().col(8);
    hn << v(0), v(1), v(2), v(3), v(4), v(5), v(6), v(7), v(8);
    const Eigen::Matrix3d h = td.inverse() * hn * ts;
    Homography result = Homography::from_matrix(h);

    double sq_sum = 0.0;
    for (const auto& [img, court] : pairs) {
        const Vec2 p = project(result, img);
        sq_sum += (p.x - court.x) * (p.x - court.x) + (p.y - court.y) * (p.y - court.y);
    }
    return {result, std::sqrt(sq_sum / pairs.size())};
}

Vec2 project(const Homography& h, const Vec2& image_point) {
    return apply(h.matrix(), image_point);
}

Vec2 unproject(const Homography& h, const Vec2& court_point) {
    return apply(h.inverse_matrix(), court_point);
}

ImageRect ImageRect::clipped(int frame_w, int frame_h) const {
    const int x0 = std::max(x, 0);
    const int y0 = std::max(y, 0);
    const int x1 = std::min(x + w, frame_w);
    const int y1 = std::min(y + h, frame_h);
    return {x0, y0, std::max(0, x1 - x0), std::max(0, y1 - y0)};
}

ImageRect scaled_rect(const Homography& h, const Vec2& court_point,
                      double player_width_m, double player_height_m) {
    const Vec2 feet = unproject(h, court_point);
    const Vec2 left = unproject(h, {court_point.x - player_width_m / 2.0, court_point.y});
    const Vec2 right = unproject(h, {court_point.x + player_width_m / 2.0, court_point.y});
    const double width_px = std::hypot(right.x - left.x, right.y - left.y);
    const double px_per_m = width_px / player_width_m;
    const double height_px = player_height_m * px_per_m;
    const int w = std::max(1, static_cast<int>(std::lround(width_px)));
    const int hh = std::max(1, static_cast<int>(std::lround(height_px)));
    const int x = static_cast<int>(std::lround(feet.x - width_px / 2.0));
    const int y = static_cast<int>(std::lround(feet.y - height_px));
    return {x, y, w, hh};
}

BinIndex CourtGrid::bin_index(const Vec2& q) const {
    const double nx = (q.x - court.domain_min_x()) / court.domain_extent_x();
    const double ny = (q.y - court.domain_min_y()) / court.domain_extent_y();
    // normalized coordinate exactly 1.0 clamps into the top bin
    int ix = static_cast<int>(std::floor(nx * bins_x)) + 1;
    int iy = static_cast<int>(std::floor(ny * bins_y)) + 1;
    ix = std::clamp(ix, 1, bins_x);
    iy = std::clamp(iy, 1, bins_y);
    return {ix, iy};
}

CourtGrid make_grid(const CourtModel& court, double spacing_m, int bins_x, int bins_y) {
    court.validate();
    if (spacing_m <= 0.0) throw ConfigInvalid("grid spacing must be positive");
    if (bins_x <= 0 || bins_y <= 0) throw ConfigInvalid("bin counts must be positive");
    const double ex = court.domain_extent_x() / bins_x;
    const double ey = court.domain_extent_y() / bins_y;
    constexpr double kTol = 1e-9;
    if (ex < 0.5 - kTol || ex > 1.0 + kTol || ey < 0.5 - kTol || ey > 1.0 + kTol) {
        std::ostringstream msg;
        msg << "bin extents " << ex << "m x " << ey << "m outside [0.5, 1.0]m";
        throw BinExtentOutOfRange(msg.str());
    }
    CourtGrid grid;
    grid.court = court;
    grid.spacing_x_m = spacing_m;
    grid.spacing_y_m = spacing_m;
    grid.bins_x = bins_x;
    grid.bins_y = bins_y;
    const int nx = std::max(1, static_cast<int>(std::floor(court.domain_extent_x() / spacing_m + 1e-9)));
    const int ny = std::max(1, static_cast<int>(std::floor(court.domain_extent_y() / spacing_m + 1e-9)));
    // lattice centered in the domain so the leftover margin is symmetric
    const double x0 = court.domain_min_x() + (court.domain_extent_x() - (nx - 1) * spacing_m) / 2.0;
    const double y0 = court.domain_min_y() + (court.domain_extent_y() - (ny - 1) * spacing_m) / 2.0;
    grid.points.reserve(static_cast<std::size_t>(nx) * ny);
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            grid.points.push_back({x0 + ix * spacing_m, y0 + iy * spacing_m});
        }
    }
    return grid;
}

std::vector<std::pair<Vec2, Vec2>> load_calibration_pairs(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<std::pair<Vec2, Vec2>> pairs;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        double u, v, cx, cy;
        if (ss >> u >> v >> cx >> cy) {
            pairs.push_back({{u, v}, {cx, cy}});
        } else if (!line.empty() && line.find_first_not_of(" \t\r") != std::string::npos) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": expected 'u v X Y'");
        }
    }
    return pairs;
}

void save_homography(const std::string& path, const Homography& h) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << std::setprecision(17);
    const auto& m = h.matrix();
    for (int r = 0; r < 3; ++r) {
        out << m(r, 0) << " " << m(r, 1) << " " << m(r, 2) << "\n";
    }
}

Homography load_homography(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    Eigen::Matrix3d m;
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            if (!(in >> m(r, c))) throw ParseError(path + ": expected 9 numbers");
        }
    }
    return Homography::from_matrix(m);
}

}  // namespace vball::geometry
