#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vball/geometry.hpp"
#include "vball/image.hpp"

namespace vball::synthgen {

// Gaussian position cluster on the court plane.
struct PositionLaw {
    geometry::Vec2 mean;
    geometry::Vec2 sigma;
};

// One scripted activity: the principal actor performs `activity` for
// `duration` frames at a position drawn from `law`. Rear-actor steps drive an
// opponent player (rendered, never annotated).
struct ScriptStep {
    int activity = 0;  // classifier class index
    int duration = 1;
    PositionLaw law;
    bool rear_actor = false;
};

struct CameraParams {
    double height_m = 6.5;       // elevation above the floor
    double behind_m = 9.0;       // distance behind the near baseline
    double focal_px = 450.0;     // focal surrogate, scales with image width
    double lateral_m = 0.0;      // offset from the court midline
};

struct SceneConfig {
    std::uint64_t seed = 1;
    geometry::CourtModel court;
    CameraParams camera;
    int image_w = 480;
    int image_h = 270;
    int players_per_team = 4;
    double noise_sigma = 2.0 / 255.0;
    int keyframe_stride = 5;
    double player_width_m = 0.8;
    double player_height_m = 1.9;
    std::vector<ScriptStep> rally_script;

    void validate() const;
};

// Fills config.rally_script with alternating serve/receive rallies. The
// front-team activity sequence follows real rotation structure: reception
// only ever follows an opponent serve, digs follow blocks, idle players
// stand or reposition at random.
void append_default_rallies(SceneConfig& config, int rallies);

struct GroundTruthPlayer {
    int tracklet_id = -1;  // -1 for unannotated players
    int player = 0;
    int activity = 0;
    bool rear = false;
    geometry::Vec2 court_position;  // ground contact point (jump excluded)
    geometry::Vec2 feet_image;      // rendered feet pixel (jump included)
    geometry::ImageRect bbox;
    double jump_m = 0.0;
    double limb_angle = -10.0;  // arm bar animation; < -9 means none
    double limb_len = 0.0;
};

// One scripted activity clip of one player.
struct TrackletInfo {
    int id = 0;
    int player = 0;
    int activity = 0;
    int start_frame = 0;
    int duration = 0;
    geometry::Vec2 anchor;  // position sampled from the step's law
};

// Keyframe annotation as written to the dataset file.
struct KeyframeAnnotation {
    int frame_id = 0;
    int tracklet_id = 0;
    int activity = 0;
    geometry::ImageRect bbox;
};

// Fully expanded scene. Frames render deterministically on demand, so large
// sequences never need to be held in memory.
class Scene {
public:
    explicit Scene(const SceneConfig& config);

    const SceneConfig& config() const { return cfg_; }
    int frame_count() const { return frame_count_; }
    const geometry::Homography& image_to_court() const { return h_; }
    const std::vector<std::pair<geometry::Vec2, geometry::Vec2>>& calibration_pairs() const {
        return calibration_;
    }
    const std::vector<KeyframeAnnotation>& keyframes() const { return keyframes_; }
    const std::vector<std::vector<GroundTruthPlayer>>& ground_truth() const { return gt_; }
    const std::vector<TrackletInfo>& tracklets() const { return tracklets_; }

    // 8-bit quantized frame, byte-identical for identical seeds.
    Image render_frame(int frame_id) const;
    const Image& clean_background() const { return background_; }

private:
    SceneConfig cfg_;
    geometry::Homography h_ = geometry::Homography::identity();
    int frame_count_ = 0;
    Image background_;
    std::vector<std::pair<geometry::Vec2, geometry::Vec2>> calibration_;
    std::vector<KeyframeAnnotation> keyframes_;
    std::vector<std::vector<GroundTruthPlayer>> gt_;
    std::vector<TrackletInfo> tracklets_;
};

// Writes frames, annotations, calibration, ground truth and a content-hash
// manifest; returns the manifest JSON text.
std::string emit_dataset(const Scene& scene, const std::string& directory, int workers = 1);

}  // namespace vball::synthgen
