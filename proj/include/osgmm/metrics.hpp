#pragma once

#include "osgmm/detection.hpp"
#include "osgmm/types.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace osgmm {

/// Intersection over union of two valid boxes; 0 when they do not overlap.
double iou(const Box& a, const Box& b);

/// Localisation threshold used for categorisation and mAP.
inline constexpr double kMatchIou = 0.5;

enum class DetectionCategory {
    correct,           // D_c
    closed_set_error,  // D_CSE
    open_set_error,    // D_OSE
};

std::string_view to_string(DetectionCategory category);

struct CategorisedDetection {
    std::size_t detection_index = 0;
    DetectionCategory category = DetectionCategory::closed_set_error;
    /// Index into the ground-truth list of the truth the detection localised, if any.
    std::optional<std::size_t> matched_gt;
    double matched_iou = 0.0;
    /// Method name to confidence (higher means keep).
    std::map<std::string, double> uncertainty_scores;
};

/// Splits detections into correct, closed-set errors and open-set errors.
///
/// Detections are visited in descending max-score order. Each one takes the
/// highest-IoU truth in its image with IoU >= 0.5, skipping known truths that
/// an earlier detection already claimed as correct. A known truth of the
/// predicted class makes the detection correct and is consumed; a held-out
/// truth makes it an open-set error (held-out truths are never consumed);
/// anything else is a closed-set error.
std::vector<CategorisedDetection> categorise(const std::vector<Detection>& detections,
                                             const std::vector<GroundTruthObject>& ground_truth,
                                             double iou_threshold = kMatchIou);

struct RocPoint {
    double threshold = 0.0;
    double tpr = 0.0;
    double osr = 0.0;
    std::size_t tp_count = 0;
    std::size_t ose_count = 0;
};

/// Points ordered by ascending threshold. The first point accepts everything
/// (threshold -inf, TPR = OSR = 1); a detection counts as accepted at a point
/// when its score is strictly above the threshold.
struct RocCurve {
    std::vector<RocPoint> points;
    std::size_t n_correct = 0;
    std::size_t n_ose = 0;
};

RocCurve roc_curve(std::span<const double> correct_scores, std::span<const double> ose_scores);

/// Trapezoidal area under the (OSR, TPR) curve.
double auroc(const RocCurve& curve);

struct OperatingPoint {
    double level = 0.0;
    double tpr = 0.0;
    double osr = 0.0;
    double threshold = 0.0;
    std::size_t tp_count = 0;
    std::size_t ose_count = 0;
};

/// For each level, the curve point with the highest TPR among those with OSR <= level.
std::vector<OperatingPoint> tpr_at_osr(const RocCurve& curve, std::span<const double> levels);

/// All-point interpolated average precision of a ranked list of hit/miss flags.
double average_precision(const std::vector<bool>& ranked_hits, std::size_t n_truths);

struct MapResult {
    double map_percent = 0.0;
    std::map<ClassId, double> ap;
    /// Classes without any ground-truth instance; left out of the mean.
    std::vector<ClassId> excluded;
};

/// Mean average precision over known classes 0..n_classes-1 at the given IoU.
MapResult map_at_iou(const std::vector<Detection>& detections, const std::vector<GroundTruthObject>& ground_truth,
                     int n_classes, double iou_threshold = kMatchIou);

struct BaselineScores {
    double score = 0.0;
    /// Shannon entropy in nats of the (renormalised) class scores.
    double entropy = 0.0;
    /// -entropy, so that higher means keep.
    double entropy_confidence = 0.0;
};

BaselineScores baseline_uncertainties(const Detection& detection);

}  // namespace osgmm
