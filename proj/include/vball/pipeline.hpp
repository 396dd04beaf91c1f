#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vball/context.hpp"
#include "vball/features.hpp"
#include "vball/geometry.hpp"
#include "vball/segmentation.hpp"
#include "vball/svm.hpp"
#include "vball/synthgen.hpp"

namespace vball::pipeline {

// Sub-pixel bounding box; interpolation stays exactly linear, rounding to
// pixels happens only at patch extraction.
struct BBox {
    double x = 0.0, y = 0.0, w = 0.0, h = 0.0;
    geometry::ImageRect to_rect() const;
};

struct AnnotationRecord {
    int frame_id = 0;
    int tracklet_id = 0;
    int class_id = 0;
    BBox bbox;
};

// File format: frame_id,tracklet_id,class,x,y,w,h
std::vector<AnnotationRecord> load_annotations(const std::string& path);
void save_annotations(const std::string& path, const std::vector<AnnotationRecord>& records);

// Linear bbox interpolation between consecutive keyframes of each tracklet;
// no extrapolation beyond the first/last keyframe.
std::vector<AnnotationRecord> interpolate(const std::vector<AnnotationRecord>& keyframes);

struct Split {
    std::set<int> train_tracklets;
    std::set<int> test_tracklets;
    double ratio = 0.5;
    std::uint64_t seed = 0;
    std::vector<std::string> warnings;

    bool in_train(int tracklet_id) const { return train_tracklets.count(tracklet_id) > 0; }
    std::set<int> train_frames(const std::vector<AnnotationRecord>& records) const;
    std::set<int> test_frames(const std::vector<AnnotationRecord>& records) const;
};

// Stratified per class over tracklets; single-tracklet classes go to training
// with a warning.
Split split_by_tracklet(const std::vector<AnnotationRecord>& records, double ratio,
                        std::uint64_t seed);

struct EvaluationReport {
    std::array<std::array<int, classifier::kNumClasses>, classifier::kNumClasses>
        confusion{};                                       // row = truth
    std::array<double, classifier::kNumClasses> per_class{};  // percent
    double macro7 = 0.0;
    double macro5 = 0.0;  // the five volleyball-specific classes
    int total = 0;
};

EvaluationReport evaluate_predictions(const std::vector<int>& truth,
                                      const std::vector<int>& predicted);
std::string report_to_json(const EvaluationReport& r);
std::string report_confusion_csv(const EvaluationReport& r);
std::string report_svg(const EvaluationReport& r);

// Frame ingestion: numbered PPM files or lazily rendered synthetic scenes.
class FrameSource {
public:
    virtual ~FrameSource() = default;
    virtual int count() const = 0;
    virtual Image frame(int index) const = 0;
};

class DirectoryFrameSource : public FrameSource {
public:
    explicit DirectoryFrameSource(const std::string& directory);
    int count() const override { return static_cast<int>(paths_.size()); }
    Image frame(int index) const override { return load_ppm(paths_.at(index)); }

private:
    std::vector<std::string> paths_;
};

class SceneFrameSource : public FrameSource {
public:
    explicit SceneFrameSource(const synthgen::Scene& scene) : scene_(scene) {}
    int count() const override { return scene_.frame_count(); }
    Image frame(int index) const override { return scene_.render_frame(index); }

private:
    const synthgen::Scene& scene_;
};

struct PipelineConfig {
    geometry::CourtModel court;
    features::HogParams hog;
    int hof_bins = 8;
    double player_width_m = 0.8;
    double player_height_m = 1.9;
    double grid_spacing_m = 0.25;
    int grid_bx = 15;
    int grid_by = 24;
    int gmm_components = 5;
    std::size_t gmm_max_samples = 12000;
    int background_samples = 25;
    double detect_threshold = 0.30;
    double detect_min_mass = 25.0;
    int flow_levels = 3;
    int flow_window = 9;
    int ac_k = 40;
    double split_ratio = 0.5;
    std::uint64_t seed = 1;
    int workers = 1;
    std::set<features::Block> stage1_mask{features::Block::HOG, features::Block::HOF,
                                          features::Block::RWPC, features::Block::SC};
    classifier::SvmConfig svm;

    PipelineConfig();
};

// Scene-level fitted models: homography, background, color models, grid.
// Everything is fitted from training-split data only and carries a
// provenance stamp of the training tracklet set.
struct SceneModels {
    geometry::Homography homography = geometry::Homography::identity();
    geometry::CourtGrid grid;
    segmentation::BackgroundModel background;
    segmentation::ColorModel fg_model;
    segmentation::ColorModel bg_model;
    std::string provenance;
};

std::string tracklet_set_hash(const std::set<int>& tracklets);

SceneModels fit_scene_models(const FrameSource& source,
                             const std::vector<AnnotationRecord>& interpolated,
                             const Split& split, const geometry::Homography& h,
                             const PipelineConfig& cfg);

// One detected, described player: features in stage-1 block layout.
struct DetectionFeatures {
    segmentation::PlayerDetection detection;
    std::vector<double> features;
};

// Output of the single streaming pass over the frames.
struct ExtractedFeatures {
    std::vector<AnnotationRecord> rows;             // interpolated annotations
    std::vector<std::vector<double>> row_features;  // stage-1 blocks per row
    std::vector<features::BlockSpan> layout;        // layout of row_features
    std::vector<std::vector<DetectionFeatures>> detections;  // per frame
};

ExtractedFeatures extract_features(const FrameSource& source,
                                   const std::vector<AnnotationRecord>& interpolated,
                                   const SceneModels& models, const PipelineConfig& cfg);

// Scored detection histories for AC assembly.
using ScoredFrames = std::vector<std::vector<context::ScoredDetection>>;

ScoredFrames score_detections(const classifier::MulticlassModel& model,
                              const std::vector<std::vector<DetectionFeatures>>& detections,
                              const std::set<features::Block>& mask,
                              const std::vector<features::BlockSpan>& layout);

// AC block for each row: Eq-6 window over the frames before the row's frame.
std::vector<std::vector<double>> build_ac_rows(const ScoredFrames& history,
                                               const std::vector<AnnotationRecord>& rows,
                                               const geometry::CourtGrid& grid, int k);

struct TrainOutcome {
    classifier::MulticlassModel stage1;
    std::optional<classifier::MulticlassModel> stage2;
    std::optional<classifier::GridSearchResult> grid;
    Split split;
    SceneModels models;
    PipelineConfig config;
    EvaluationReport stage1_train_report;  // on training rows, sanity only
};

struct TrainOptions {
    bool run_grid_search = false;
    std::vector<classifier::GridCell> grid_cells;  // used when run_grid_search
    bool with_stage2 = true;
};

// The two-stage protocol end to end. AC features for training rows come from
// two cross-fitted stage-1 models so no row is scored by a model that saw it.
TrainOutcome run_training(const FrameSource& source,
                          const std::vector<AnnotationRecord>& keyframes,
                          const geometry::Homography& h, const PipelineConfig& cfg,
                          const TrainOptions& options);

struct EvalOutcome {
    EvaluationReport stage1;
    std::optional<EvaluationReport> stage2;
    std::vector<int> truth;
    std::vector<int> stage1_predictions;
    std::vector<int> stage2_predictions;
};

EvalOutcome run_evaluation(const FrameSource& source,
                           const std::vector<AnnotationRecord>& keyframes,
                           const TrainOutcome& trained);

// Model bundle persistence (model.json + background.ppm + scene JSON pieces).
void save_bundle(const std::string& directory, const TrainOutcome& outcome);
TrainOutcome load_bundle(const std::string& directory);

std::string grid_results_csv(const classifier::GridSearchResult& grid);

}  // namespace vball::pipeline
