#pragma once

#include "osgmm/detection.hpp"
#include "osgmm/metrics.hpp"

#include <json.hpp>

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace osgmm {

/// The low-OSR operating points reported for every method.
inline constexpr std::array<double, 3> kReportedOsrLevels{0.05, 0.10, 0.20};

/// Confidence (higher = keep) of one detection under an uncertainty method:
/// "gmm" (max log-likelihood), "score" (max class score) or "entropy" (negated entropy).
double method_confidence(const DetectionRecord& record, std::string_view method);

struct MethodReport {
    std::string method;
    double auroc = 0.0;
    std::vector<OperatingPoint> operating_points;
    RocCurve curve;
};

/// How often the score-based and likelihood-based classes disagree, split by outcome.
struct MismatchDiagnostic {
    std::size_t flagged_correct = 0;
    std::size_t flagged_errors = 0;
    std::size_t total_correct = 0;
    std::size_t total_errors = 0;
};

struct EvalReport {
    std::size_t total = 0;
    std::size_t n_correct = 0;
    std::size_t n_closed_set = 0;
    std::size_t n_open_set = 0;
    std::vector<CategorisedDetection> categorised;
    std::vector<MethodReport> methods;
    MapResult map;
    std::optional<MismatchDiagnostic> mismatch;
};

/// Categorises the detections and computes ROC, AUROC and TPR at the given
/// OSR levels for each method (correct vs open-set errors), plus mAP@0.5.
/// Throws DataError when there are no correct or no open-set detections.
EvalReport evaluate(const std::vector<DetectionRecord>& records, const std::vector<GroundTruthObject>& ground_truth,
                    int n_classes, const std::vector<std::string>& methods,
                    std::span<const double> osr_levels = kReportedOsrLevels);

nlohmann::json to_json(const EvalReport& report);
/// One row per method and metric: method,metric,value.
std::string metrics_csv(const EvalReport& report);
std::string roc_csv(const MethodReport& method);

}  // namespace osgmm
