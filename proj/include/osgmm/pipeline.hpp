#pragma once

#include "osgmm/detection.hpp"
#include "osgmm/gmm.hpp"
#include "osgmm/report.hpp"
#include "osgmm/toy_data.hpp"
#include "osgmm/toy_head.hpp"

#include <map>
#include <optional>
#include <vector>

namespace osgmm {

/// Validation detections used to choose the component count: correctly
/// classified ones and known-class misclassifications that still localised a truth.
struct ValidationProxies {
    std::vector<LabelledLogit> correct;
    std::vector<LabelledLogit> misclassified;
};

ValidationProxies validation_proxies(const std::vector<Detection>& detections,
                                     const std::vector<GroundTruthObject>& ground_truth);

/// Attaches the uncertainty vector to every record and, when theta_ose is
/// given, the accept/reject decision.
std::vector<DetectionRecord> score_detections(const GmmSet& models, std::vector<DetectionRecord> records,
                                              std::optional<double> theta_ose = std::nullopt);

/// AUROC of correct vs open-set detections when ranked by the max
/// log-likelihood under the given models.
double gmm_open_set_auroc(const GmmSet& models, const std::vector<DetectionRecord>& records,
                          const std::vector<GroundTruthObject>& ground_truth);

struct ToyPipelineConfig {
    ToyDataConfig data;
    ToyHeadConfig head;
    EmConfig em;
    std::vector<int> candidate_counts{1, 2, 3, 4, 5, 6};
    double theta_iou = 0.6;
    double theta_conf = 0.7;
};

struct ToyPipelineResult {
    ToyTrainingResult training;
    ComponentSelection selection;
    /// Test-split evaluation with the selected models.
    EvalReport report;
    /// Test-split GMM AUROC for every candidate count that could be fitted.
    std::map<int, double> test_auroc_by_count;

    double auroc_spread() const;
};

/// Trains the toy head, fits class GMMs on the train split, selects the
/// component count on the val split and evaluates on the test split.
ToyPipelineResult run_toy_pipeline(const ToyPipelineConfig& config);

}  // namespace osgmm
