#include "vball/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "vball/hash.hpp"
#include "vball/parallel.hpp"
#include "vball/rng.hpp"
#include "vball/svm.hpp"
#include "json.hpp"

namespace vball::synthgen {

namespace fs = std::filesystem;
using geometry::Homography;
using geometry::ImageRect;
using geometry::Vec2;

namespace {

constexpr int kStand = 0, kService = 1, kReception = 2, kSetting = 3;
constexpr int kAttack = 4, kBlock = 5, kDefenseMove = 6;

// deterministic per-pixel value noise for static textures
double pixel_hash(std::uint32_t x, std::uint32_t y, std::uint32_t salt) {
    std::uint32_t h = x * 374761393u + y * 668265263u + salt * 2246822519u;
    h = (h ^ (h >> 13)) * 1274126177u;
    h ^= h >> 16;
    return (h & 0xffffff) / static_cast<double>(0x1000000);
}

struct Rgb {
    double r, g, b;
};

Rgb mix(const Rgb& a, const Rgb& b, double t) {
    return {a.r + (b.r - a.r) * t, a.g + (b.g - a.g) * t, a.b + (b.b - a.b) * t};
}

// per-frame, per-player rendering state
struct RenderState {
    Vec2 feet_image;     // rendered ground contact, jump included
    double width_px = 0;
    double height_px = 0;
    bool rear = false;
    int player = 0;
    double limb_angle = -10.0;  // radians; < -9 means no limb
    double limb_len = 0.0;      // fraction of body height
};

Homography court_to_image_homography(const SceneConfig& cfg) {
    const CameraParams& cam = cfg.camera;
    const double f = cam.focal_px * cfg.image_w / 480.0;
    const Eigen::Vector3d eye(cfg.court.width_m / 2.0 + cam.lateral_m, -cam.behind_m,
                              cam.height_m);
    const Eigen::Vector3d target(cfg.court.width_m / 2.0, cfg.court.length_m / 2.0, 0.0);
    Eigen::Vector3d fwd = (target - eye).normalized();
    Eigen::Vector3d right = fwd.cross(Eigen::Vector3d(0, 0, 1)).normalized();
    Eigen::Vector3d down = fwd.cross(right);
    Eigen::Matrix3d rot;
    rot.row(0) = right;
    rot.row(1) = down;
    rot.row(2) = fwd;
    Eigen::Matrix3d k;
    k << f, 0, cfg.image_w / 2.0, 0, f, cfg.image_h / 2.0, 0, 0, 1;
    const Eigen::Vector3d t = -rot * eye;
    Eigen::Matrix3d h;  // court plane (z=0) -> image
    h.col(0) = rot.col(0);
    h.col(1) = rot.col(1);
    h.col(2) = t;
    return Homography::from_matrix(k * h);
}

}  // namespace

void SceneConfig::validate() const {
    court.validate();
    if (image_w < 64 || image_h < 64) throw ConfigInvalid("image size too small");
    if (players_per_team < 1) throw ConfigInvalid("players_per_team must be >= 1");
    if (noise_sigma < 0.0) throw ConfigInvalid("noise sigma must be >= 0");
    if (keyframe_stride < 1) throw ConfigInvalid("keyframe stride must be >= 1");
    for (const auto& step : rally_script) {
        if (step.duration < 1) throw ConfigInvalid("script step duration must be >= 1");
        if (step.activity < 0 || step.activity >= classifier::kNumClasses)
            throw ConfigInvalid("script step activity out of range");
    }
}

void append_default_rallies(SceneConfig& cfg, int rallies) {
    const double w = cfg.court.width_m;
    const double l = cfg.court.length_m;
    const double net = cfg.court.net_y;
    // front-half laws, mirroring Fig-1-style clusters: serve at the baseline,
    // reception/dig mid court (deliberately overlapping), set and attack near
    // the net, block at the net
    const PositionLaw serve{{w * 0.78, 0.7}, {0.6, 0.35}};
    const PositionLaw reception{{w * 0.5, 3.9}, {1.7, 1.1}};
    const PositionLaw setting{{w * 0.52, net - 1.0}, {0.55, 0.4}};
    const PositionLaw attack{{w * 0.32, net - 1.3}, {0.8, 0.5}};
    const PositionLaw block{{w * 0.5, net - 0.55}, {1.1, 0.18}};
    const PositionLaw dig{{w * 0.5, 4.3}, {1.9, 1.3}};
    // far-half laws for the opponent actors
    const PositionLaw r_serve{{w * 0.25, l - 0.7}, {0.6, 0.35}};
    const PositionLaw r_receive{{w * 0.5, l - 4.0}, {1.6, 1.0}};
    const PositionLaw r_set{{w * 0.45, net + 1.0}, {0.55, 0.4}};
    const PositionLaw r_attack{{w * 0.6, net + 1.3}, {0.8, 0.5}};
    const PositionLaw r_block{{w * 0.5, net + 0.55}, {1.1, 0.18}};

    for (int r = 0; r < rallies; ++r) {
        if (r % 2 == 0) {
            // front team serves; opponents run the counter, front blocks and digs
            cfg.rally_script.push_back({kService, 24, serve, false});
            cfg.rally_script.push_back({kReception, 18, r_receive, true});
            cfg.rally_script.push_back({kSetting, 15, r_set, true});
            cfg.rally_script.push_back({kAttack, 16, r_attack, true});
            cfg.rally_script.push_back({kBlock, 16, block, false});
            cfg.rally_script.push_back({kDefenseMove, 20, dig, false});
        } else {
            // opponents serve; front receives, sets and attacks
            cfg.rally_script.push_back({kService, 24, r_serve, true});
            cfg.rally_script.push_back({kReception, 20, reception, false});
            cfg.rally_script.push_back({kSetting, 15, setting, false});
            cfg.rally_script.push_back({kAttack, 16, attack, false});
            cfg.rally_script.push_back({kBlock, 14, r_block, true});
            cfg.rally_script.push_back({kDefenseMove, 16, dig, false});
        }
    }
}

namespace {

struct PlayerMotion {
    Vec2 position;
    double jump = 0.0;
    double squash = 1.0;
    double limb_angle = -10.0;
    double limb_len = 0.0;
};

// Activity motion model, phase in [0,1).
PlayerMotion activity_motion(int activity, double phase, const Vec2& from, const Vec2& to,
                             double sway_phase) {
    PlayerMotion m;
    // approach: close the gap over the first 30% of the step
    const double approach = std::min(phase / 0.3, 1.0);
    m.position = {from.x + (to.x - from.x) * approach, from.y + (to.y - from.y) * approach};
    switch (activity) {
        case kStand:
            m.position.x += 0.02 * std::sin(sway_phase);
            break;
        case kService:
            if (phase > 0.55) {
                m.limb_angle = -M_PI / 2.0 + (phase - 0.55) * 4.0;
                m.limb_len = 0.45;
            }
            break;
        case kReception:
            m.squash = 0.74;
            m.position.x += 0.28 * std::sin(sway_phase * 1.7);
            break;
        case kSetting:
            m.limb_angle = -M_PI / 2.0;
            m.limb_len = 0.3;
            break;
        case kAttack: {
            if (phase >= 0.35 && phase < 0.75) {
                const double jp = (phase - 0.35) / 0.4;  // parabolic hop
                m.jump = 0.3 * 4.0 * jp * (1.0 - jp);
                m.limb_angle = -M_PI / 2.0 + jp * 2.2;
                m.limb_len = 0.5;
            }
            break;
        }
        case kBlock: {
            if (phase >= 0.3 && phase < 0.7) {
                const double jp = (phase - 0.3) / 0.4;
                m.jump = 0.3 * 4.0 * jp * (1.0 - jp);
            }
            m.limb_angle = -M_PI / 2.0;
            m.limb_len = 0.4;
            break;
        }
        case kDefenseMove:
            m.squash = 0.86;
            // continued drift instead of settling
            m.position.x += 0.5 * std::sin(sway_phase * 0.9);
            m.position.y += 0.35 * std::sin(sway_phase * 0.6 + 1.3);
            break;
        default:
            break;
    }
    return m;
}

}  // namespace

Scene::Scene(const SceneConfig& config) : cfg_(config) {
    cfg_.validate();
    const Homography c2i = court_to_image_homography(cfg_);
    h_ = c2i.inverse();

    const double w = cfg_.court.width_m, l = cfg_.court.length_m;
    // calibration correspondences: court corners, net ends, attack-line marks
    const std::vector<Vec2> marks = {
        {0, 0}, {w, 0}, {0, l}, {w, l}, {0, cfg_.court.net_y}, {w, cfg_.court.net_y},
        {w / 2, 3.0}, {w / 2, l - 3.0}, {1.0, 6.0}, {w - 1.0, l - 6.0}};
    for (const auto& q : marks) {
        calibration_.push_back({geometry::unproject(h_, q), q});
    }

    // --- expand the script into per-player tracklets ---
    Rng script_rng = Rng(cfg_.seed).split(1);
    const int n = cfg_.players_per_team;
    std::vector<Vec2> front_pos(n), rear_pos(n);
    for (int p = 0; p < n; ++p) {
        front_pos[p] = {w * (p + 0.5) / n, 4.5 + 1.5 * script_rng.uniform()};
        rear_pos[p] = {w * (p + 0.5) / n, l - 4.5 - 1.5 * script_rng.uniform()};
    }

    frame_count_ = 0;
    for (const auto& step : cfg_.rally_script) frame_count_ += step.duration;
    gt_.resize(frame_count_);

    int next_tracklet = 0;
    int frame = 0;
    int front_rr = 0, rear_rr = 0;  // round-robin actor selection

    auto sample_anchor = [&](const PositionLaw& law, const std::vector<Vec2>& taken) {
        for (int attempt = 0; attempt < 12; ++attempt) {
            Vec2 q{script_rng.normal(law.mean.x, law.sigma.x),
                   script_rng.normal(law.mean.y, law.sigma.y)};
            q.x = std::clamp(q.x, 0.3, w - 0.3);
            q.y = std::clamp(q.y, 0.3, l - 0.3);
            bool clear = true;
            for (const auto& o : taken) {
                if (std::hypot(q.x - o.x, q.y - o.y) < 1.2) {
                    clear = false;
                    break;
                }
            }
            if (clear) return q;
        }
        return Vec2{law.mean.x, law.mean.y};
    };

    struct StepAssign {
        int player;
        bool rear;
        int activity;
        Vec2 from, to;
        bool annotated;
        int tracklet_id;
        double sway_seed;
    };

    for (const auto& step : cfg_.rally_script) {
        std::vector<StepAssign> assigns;
        std::vector<Vec2> taken;

        auto add_assign = [&](int player, bool rear, int activity, const Vec2& to,
                              bool annotated) {
            auto& pos = rear ? rear_pos[player] : front_pos[player];
            StepAssign a{player, rear, activity, pos, to, annotated, -1,
                         script_rng.uniform(0.0, 2.0 * M_PI)};
            if (annotated) {
                a.tracklet_id = next_tracklet++;
                tracklets_.push_back(
                    {a.tracklet_id, player, activity, frame, step.duration, to});
            }
            taken.push_back(to);
            assigns.push_back(a);
            pos = to;  // players stay where the step leaves them
        };

        const PositionLaw stand_law{{w / 2.0, 5.0}, {2.6, 1.6}};
        const PositionLaw rear_stand_law{{w / 2.0, l - 5.0}, {2.6, 1.6}};

        if (step.rear_actor) {
            const int actor = rear_rr++ % n;
            add_assign(actor, true, step.activity, sample_anchor(step.law, taken), false);
        } else {
            const int actor = front_rr++ % n;
            add_assign(actor, false, step.activity, sample_anchor(step.law, taken), true);
            // blocks often come in pairs
            if (step.activity == kBlock && n >= 2 && script_rng.uniform() < 0.5) {
                const int mate = (actor + 1) % n;
                Vec2 q = sample_anchor(step.law, taken);
                add_assign(mate, false, kBlock, q, true);
            }
        }
        // idle front players: mostly stand, sometimes reposition; one of them
        // may be annotated so the generic classes occur in every phase
        bool filler_annotated = false;
        for (int p = 0; p < n; ++p) {
            bool used = false;
            for (const auto& a : assigns) {
                if (!a.rear && a.player == p) used = true;
            }
            if (used) continue;
            const bool moves = script_rng.uniform() < 0.3;
            const int activity = moves ? kDefenseMove : kStand;
            Vec2 to = moves ? sample_anchor({stand_law.mean, {2.0, 1.4}}, taken)
                            : sample_anchor({front_pos[p], {0.35, 0.3}}, taken);
            const bool annotate = !filler_annotated && script_rng.uniform() < 0.45;
            if (annotate) filler_annotated = true;
            add_assign(p, false, activity, to, annotate);
        }
        // idle rear players drift around their half
        for (int p = 0; p < n; ++p) {
            bool used = false;
            for (const auto& a : assigns) {
                if (a.rear && a.player == p) used = true;
            }
            if (used) continue;
            const bool moves = script_rng.uniform() < 0.25;
            Vec2 to = moves ? sample_anchor(rear_stand_law, taken)
                            : sample_anchor({rear_pos[p], {0.3, 0.25}}, taken);
            add_assign(p, true, moves ? kDefenseMove : kStand, to, false);
        }

        // expand this step's frames
        for (int f = 0; f < step.duration; ++f, ++frame) {
            auto& frame_gt = gt_[frame];
            for (const auto& a : assigns) {
                const double phase = static_cast<double>(f) / step.duration;
                const PlayerMotion m = activity_motion(
                    a.activity, phase, a.from, a.to, a.sway_seed + f * 0.35);
                GroundTruthPlayer g;
                g.tracklet_id = a.tracklet_id;
                g.player = a.player + (a.rear ? n : 0);
                g.activity = a.activity;
                g.rear = a.rear;
                g.court_position = m.position;
                g.jump_m = m.jump;
                g.limb_angle = m.limb_angle;
                g.limb_len = m.limb_len;
                const ImageRect body = geometry::scaled_rect(
                    h_, m.position, cfg_.player_width_m, cfg_.player_height_m);
                const double vpx_per_m = body.h / cfg_.player_height_m;
                const double jump_px = m.jump * vpx_per_m;
                const double height_px = body.h * m.squash;
                const Vec2 floor_feet = geometry::unproject(h_, m.position);
                g.feet_image = {floor_feet.x, floor_feet.y - jump_px};
                g.bbox = {static_cast<int>(std::lround(g.feet_image.x - body.w / 2.0)),
                          static_cast<int>(std::lround(g.feet_image.y - height_px)),
                          body.w, std::max(1, static_cast<int>(std::lround(height_px)))};
                frame_gt.push_back(g);
            }
            // painter's order: far players first
            std::stable_sort(frame_gt.begin(), frame_gt.end(),
                             [](const GroundTruthPlayer& x, const GroundTruthPlayer& y) {
                                 return x.feet_image.y < y.feet_image.y;
                             });
        }
    }

    // keyframe annotations from the ground truth
    for (const auto& t : tracklets_) {
        for (int f = 0; f < t.duration; f += cfg_.keyframe_stride) {
            const int frame_id = t.start_frame + f;
            for (const auto& g : gt_[frame_id]) {
                if (g.tracklet_id == t.id) {
                    keyframes_.push_back({frame_id, t.id, t.activity, g.bbox});
                    break;
                }
            }
        }
    }
    std::stable_sort(keyframes_.begin(), keyframes_.end(),
                     [](const KeyframeAnnotation& a, const KeyframeAnnotation& b) {
                         if (a.frame_id != b.frame_id) return a.frame_id < b.frame_id;
                         return a.tracklet_id < b.tracklet_id;
                     });

    // --- static background (floor, lines, net) ---
    background_ = Image(cfg_.image_w, cfg_.image_h, 3);
    const double net_y = cfg_.court.net_y;
    for (int y = 0; y < cfg_.image_h; ++y) {
        for (int x = 0; x < cfg_.image_w; ++x) {
            Rgb c{0.24, 0.22, 0.27};  // stands / out of bounds
            Vec2 q;
            bool on_plane = true;
            try {
                q = geometry::project(h_, {static_cast<double>(x), static_cast<double>(y)});
            } catch (const PointAtHorizon&) {
                on_plane = false;
            }
            // points "behind" the camera plane unproject with negative depth;
            // treat anything far outside the domain as stands
            if (on_plane && cfg_.court.in_domain(q)) {
                const bool in_court = q.x >= 0 && q.x <= w && q.y >= 0 && q.y <= l;
                c = in_court ? Rgb{0.72, 0.55, 0.38} : Rgb{0.58, 0.45, 0.33};
                // court lines, 5 cm wide
                const double dx_line = std::min({std::abs(q.x), std::abs(q.x - w)});
                const double dy_line =
                    std::min({std::abs(q.y), std::abs(q.y - l), std::abs(q.y - 3.0),
                              std::abs(q.y - (l - 3.0)), std::abs(q.y - net_y)});
                if ((dx_line < 0.025 && q.y >= -0.05 && q.y <= l + 0.05) ||
                    (dy_line < 0.025 && q.x >= -0.05 && q.x <= w + 0.05)) {
                    c = {0.92, 0.92, 0.9};
                }
            }
            const double tex = (pixel_hash(x, y, 11) - 0.5) * 0.06;
            background_.at(x, y, 0) = static_cast<float>(std::clamp(c.r + tex, 0.0, 1.0));
            background_.at(x, y, 1) = static_cast<float>(std::clamp(c.g + tex, 0.0, 1.0));
            background_.at(x, y, 2) = static_cast<float>(std::clamp(c.b + tex, 0.0, 1.0));
        }
    }
    // net: straight band between the projected end posts
    const Vec2 net_l = geometry::unproject(h_, {0.0, net_y});
    const Vec2 net_r = geometry::unproject(h_, {w, net_y});
    const ImageRect at_l = geometry::scaled_rect(h_, {0.0, net_y}, cfg_.player_width_m,
                                                 cfg_.player_height_m);
    const ImageRect at_r = geometry::scaled_rect(h_, {w, net_y}, cfg_.player_width_m,
                                                 cfg_.player_height_m);
    const double net_h_l = at_l.h / cfg_.player_height_m * 1.0;  // 1 m visible band
    const double net_h_r = at_r.h / cfg_.player_height_m * 1.0;
    const int x0 = std::max(0, static_cast<int>(std::floor(std::min(net_l.x, net_r.x))));
    const int x1 = std::min(cfg_.image_w - 1,
                            static_cast<int>(std::ceil(std::max(net_l.x, net_r.x))));
    for (int x = x0; x <= x1; ++x) {
        const double t = (net_r.x == net_l.x) ? 0.0 : (x - net_l.x) / (net_r.x - net_l.x);
        const double base = net_l.y + (net_r.y - net_l.y) * t;
        const double top = base - (net_h_l + (net_h_r - net_h_l) * t);
        for (int y = std::max(0, static_cast<int>(std::lround(top)));
             y <= std::min(cfg_.image_h - 1, static_cast<int>(std::lround(base))); ++y) {
            for (int ch = 0; ch < 3; ++ch) {
                const float behind = background_.at(x, y, ch);
                const float mesh = static_cast<float>(
                    0.16 + 0.05 * pixel_hash(x, y, 77));
                background_.at(x, y, ch) = 0.45f * behind + 0.55f * mesh;
            }
        }
    }
    // quantize the cached background so sigma=0 frames equal their files
    for (auto& v : background_.data) {
        v = std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f) / 255.0f;
    }
}

Image Scene::render_frame(int frame_id) const {
    if (frame_id < 0 || frame_id >= frame_count_)
        throw ConfigInvalid("render_frame: frame id out of range");
    Image img = background_;
    const Rgb front_a{0.82, 0.16, 0.18}, front_b{0.95, 0.9, 0.88};
    const Rgb rear_a{0.16, 0.22, 0.72}, rear_b{0.82, 0.86, 0.95};
    const Rgb shorts{0.12, 0.12, 0.15}, skin{0.88, 0.72, 0.58};

    for (const auto& g : gt_[frame_id]) {
        const double cx = g.feet_image.x;
        const double bottom = g.feet_image.y;
        const double hpx = g.bbox.h;
        const double wpx = g.bbox.w;
        const double cy = bottom - hpx / 2.0;
        const double ax = wpx * 0.34, ay = hpx * 0.5;
        if (ax < 0.5 || ay < 0.5) continue;
        const Rgb base = g.rear ? rear_a : front_a;
        const Rgb alt = g.rear ? rear_b : front_b;
        const int px0 = std::max(0, static_cast<int>(std::floor(cx - ax)));
        const int px1 = std::min(background_.width - 1, static_cast<int>(std::ceil(cx + ax)));
        const int py0 = std::max(0, static_cast<int>(std::floor(cy - ay)));
        const int py1 = std::min(background_.height - 1, static_cast<int>(std::ceil(cy + ay)));
        for (int y = py0; y <= py1; ++y) {
            for (int x = px0; x <= px1; ++x) {
                const double nx = (x - cx) / ax;
                const double ny = (y - cy) / ay;
                if (nx * nx + ny * ny > 1.0) continue;
                const double body_frac = (y - (cy - ay)) / (2.0 * ay);  // 0 head, 1 feet
                Rgb c;
                if (body_frac < 0.14) {
                    c = skin;
                } else if (body_frac > 0.62) {
                    c = body_frac > 0.8 ? skin : shorts;
                } else {
                    // jersey stripes give the appearance features texture
                    const int stripe = static_cast<int>(body_frac * 14.0 +
                                                        0.001 * g.player) % 2;
                    c = stripe == 0 ? base : alt;
                }
                const double tex = (pixel_hash(x * 7 + g.player, y, 131) - 0.5) * 0.08;
                img.at(x, y, 0) = static_cast<float>(std::clamp(c.r + tex, 0.0, 1.0));
                img.at(x, y, 1) = static_cast<float>(std::clamp(c.g + tex, 0.0, 1.0));
                img.at(x, y, 2) = static_cast<float>(std::clamp(c.b + tex, 0.0, 1.0));
            }
        }
    }
    // limbs second pass so they draw over bodies
    for (const auto& g : gt_[frame_id]) {
        if (g.limb_len <= 0.0 || g.limb_angle < -9.0) continue;
        const double hpx = g.bbox.h;
        const double top_y = g.feet_image.y - hpx * 0.82;
        const double sx = g.feet_image.x;
        const double len = g.limb_len * hpx;
        const Rgb limb = skin;
        const int steps = std::max(2, static_cast<int>(len));
        for (int s = 0; s <= steps; ++s) {
            const double t = static_cast<double>(s) / steps;
            const int x = static_cast<int>(std::lround(sx + std::cos(g.limb_angle) * len * t));
            const int y = static_cast<int>(std::lround(top_y + std::sin(g.limb_angle) * len * t));
            if (x < 1 || y < 1 || x >= img.width - 1 || y >= img.height - 1) continue;
            for (int dx = 0; dx < 2; ++dx) {
                img.at(x + dx, y, 0) = static_cast<float>(limb.r);
                img.at(x + dx, y, 1) = static_cast<float>(limb.g);
                img.at(x + dx, y, 2) = static_cast<float>(limb.b);
            }
        }
    }

    // sensor noise, then 8-bit quantization (files round-trip losslessly)
    if (cfg_.noise_sigma > 0.0) {
        Rng noise = Rng(cfg_.seed).split(1000 + static_cast<std::uint64_t>(frame_id));
        for (auto& v : img.data) {
            v = static_cast<float>(v + noise.normal(0.0, cfg_.noise_sigma));
        }
    }
    for (auto& v : img.data) {
        v = std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f) / 255.0f;
    }
    return img;
}

std::string emit_dataset(const Scene& scene, const std::string& directory, int workers) {
    fs::create_directories(directory);
    const fs::path dir(directory);

    std::vector<std::string> frame_hashes(scene.frame_count());
    parallel_for(scene.frame_count(), workers, [&](std::size_t i) {
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%06zu.ppm", i);
        const fs::path p = dir / name;
        save_ppm(p.string(), scene.render_frame(static_cast<int>(i)));
        frame_hashes[i] = hash_file_hex(p.string());
    });

    {
        std::ofstream out(dir / "annotations.csv");
        if (!out) throw IoError("cannot write annotations.csv");
        for (const auto& a : scene.keyframes()) {
            out << a.frame_id << "," << a.tracklet_id << ","
                << classifier::kClassNames[a.activity] << "," << a.bbox.x << ","
                << a.bbox.y << "," << a.bbox.w << "," << a.bbox.h << "\n";
        }
    }
    {
        std::ofstream out(dir / "calibration.txt");
        if (!out) throw IoError("cannot write calibration.txt");
        out << "# image_u image_v court_x court_y\n";
        out.precision(17);
        for (const auto& [img_pt, court_pt] : scene.calibration_pairs()) {
            out << img_pt.x << " " << img_pt.y << " " << court_pt.x << " " << court_pt.y
                << "\n";
        }
    }
    {
        nlohmann::json j;
        j["seed"] = scene.config().seed;
        j["frames"] = scene.frame_count();
        j["image_w"] = scene.config().image_w;
        j["image_h"] = scene.config().image_h;
        const auto& m = scene.image_to_court().matrix();
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) j["homography_image_to_court"].push_back(m(r, c));
        for (int f = 0; f < scene.frame_count(); ++f) {
            nlohmann::json jf = nlohmann::json::array();
            for (const auto& g : scene.ground_truth()[f]) {
                jf.push_back({{"tracklet", g.tracklet_id},
                              {"player", g.player},
                              {"activity", g.activity},
                              {"rear", g.rear},
                              {"court", {g.court_position.x, g.court_position.y}},
                              {"feet_image", {g.feet_image.x, g.feet_image.y}},
                              {"bbox", {g.bbox.x, g.bbox.y, g.bbox.w, g.bbox.h}},
                              {"jump_m", g.jump_m}});
            }
            j["tracks"].push_back(std::move(jf));
        }
        std::ofstream out(dir / "ground_truth.json");
        if (!out) throw IoError("cannot write ground_truth.json");
        out << j.dump();
    }

    nlohmann::json manifest;
    manifest["frame_count"] = scene.frame_count();
    for (int f = 0; f < scene.frame_count(); ++f) {
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%06d.ppm", f);
        manifest["files"][name] = frame_hashes[f];
    }
    for (const char* name : {"annotations.csv", "calibration.txt", "ground_truth.json"}) {
        manifest["files"][name] = hash_file_hex((dir / name).string());
    }
    const std::string text = manifest.dump(2);
    std::ofstream out(dir / "manifest.json");
    if (!out) throw IoError("cannot write manifest.json");
    out << text;
    return text;
}

}  // namespace vball::synthgen
