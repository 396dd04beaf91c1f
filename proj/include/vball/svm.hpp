#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vball/features.hpp"

namespace vball::classifier {

inline constexpr int kNumClasses = 7;
inline constexpr std::array<const char*, kNumClasses> kClassNames = {
    "stand", "service", "reception", "setting", "attack", "block", "defense_move"};

int class_index(const std::string& name);  // throws UnknownClass

enum class KernelKind { Linear, Rbf, Polynomial, Sigmoid };

struct KernelSpec {
    KernelKind kind = KernelKind::Rbf;
    double gamma = 1.0;
    int degree = 3;
    double coef0 = 0.0;

    void validate() const;
    std::string describe() const;
};

KernelKind kernel_from_name(const std::string& name);
const char* kernel_name(KernelKind k);

double kernel_eval(const KernelSpec& spec, const std::vector<double>& x,
                   const std::vector<double>& y);

struct BinarySvm {
    KernelSpec kernel;
    double c = 1.0;
    std::vector<std::vector<double>> support_vectors;
    std::vector<double> alpha_y;  // dual coefficient alpha_i * y_i per support vector
    double bias = 0.0;
    double dual_objective = 0.0;
    int iterations = 0;
};

// SMO over the dual, working pair by maximal KKT violation, eta clipped for
// indefinite (sigmoid) kernels. Deterministic given seed.
BinarySvm train_binary(const std::vector<std::vector<double>>& x,
                       const std::vector<int>& y, double c, const KernelSpec& spec,
                       double tol = 1e-3, std::uint64_t seed = 0,
                       double pos_weight = 1.0, double neg_weight = 1.0);

double decision(const BinarySvm& svm, const std::vector<double>& x);
int predict(const BinarySvm& svm, const std::vector<double>& x);  // ties -> +1

struct SigmoidCalibrator {
    double a = -1.0;
    double b = 0.0;
    std::string provenance;
};

// Platt scaling: regularized maximum likelihood on validation decision values.
// Degenerate (single-class) validation falls back to a = -1, b = 0.
SigmoidCalibrator calibrate(const BinarySvm& svm,
                            const std::vector<std::vector<double>>& x,
                            const std::vector<int>& y);
SigmoidCalibrator calibrate_decisions(const std::vector<double>& decisions,
                                      const std::vector<int>& y);
double calibrated_score(const SigmoidCalibrator& cal, double decision_value);

struct SvmConfig {
    KernelSpec kernel;
    double c = 1.0;
    double tol = 1e-3;
    std::uint64_t seed = 0;
    bool class_weights = false;  // inverse-frequency weighting, off by default
};

struct MulticlassModel {
    std::vector<BinarySvm> machines;  // one-vs-rest, class order of kClassNames
    std::vector<SigmoidCalibrator> calibrators;
    features::Normalizer normalizer;
    std::vector<features::BlockSpan> layout;
    std::string layout_hash;
    SvmConfig config;
    std::string provenance;
};

MulticlassModel train_multiclass(const std::vector<std::vector<double>>& x,
                                 const std::vector<int>& labels, const SvmConfig& cfg,
                                 const std::vector<features::BlockSpan>& layout = {});

std::array<double, kNumClasses> predict_scores(const MulticlassModel& m,
                                               const std::vector<double>& x);
int predict_class(const MulticlassModel& m, const std::vector<double>& x);

// Batched variants (one kernel GEMM per machine instead of per-row loops).
std::vector<std::array<double, kNumClasses>> predict_scores_batch(
    const MulticlassModel& m, const std::vector<std::vector<double>>& rows);
std::vector<int> predict_class_batch(const MulticlassModel& m,
                                     const std::vector<std::vector<double>>& rows);

struct GridCell {
    KernelSpec kernel;
    double c = 1.0;
    std::set<features::Block> mask;
};

struct GridResultRow {
    GridCell cell;
    int fold = 0;
    double macro_accuracy = 0.0;
};

struct GridSearchResult {
    GridCell best;
    double best_mean_macro = 0.0;
    std::vector<GridResultRow> table;
    std::string provenance;
};

// Stratified 3-fold cross-validation over the given rows (grouped so rows
// sharing a group id never straddle folds); best cell by mean macro accuracy.
GridSearchResult grid_search(const std::vector<std::vector<double>>& x,
                             const std::vector<int>& labels,
                             const std::vector<features::BlockSpan>& layout,
                             const std::vector<GridCell>& cells, std::uint64_t seed,
                             const std::vector<int>& group_ids = {},
                             double tol = 1e-3);

// Column selection for a mask, using the recorded layout.
std::vector<double> select_blocks(const std::vector<double>& row,
                                  const std::vector<features::BlockSpan>& layout,
                                  const std::set<features::Block>& mask);
std::vector<features::BlockSpan> masked_layout(
    const std::vector<features::BlockSpan>& layout,
    const std::set<features::Block>& mask);

std::string multiclass_to_json(const MulticlassModel& m);
MulticlassModel multiclass_from_json(const std::string& text);

}  // namespace vball::classifier
