#include "osgmm/pipeline.hpp"

#include "osgmm/errors.hpp"
#include "osgmm/extraction.hpp"
#include "osgmm/metrics.hpp"

#include <algorithm>

namespace osgmm {

ValidationProxies validation_proxies(const std::vector<Detection>& detections,
                                     const std::vector<GroundTruthObject>& ground_truth) {
    ValidationProxies out;
    for (const auto& c : categorise(detections, ground_truth)) {
        const Detection& det = detections[c.detection_index];
        if (c.category == DetectionCategory::correct) {
            out.correct.push_back({det.logits, det.predicted_class});
        } else if (c.category == DetectionCategory::closed_set_error && c.matched_gt) {
            out.misclassified.push_back({det.logits, det.predicted_class});
        }
    }
    return out;
}

std::vector<DetectionRecord> score_detections(const GmmSet& models, std::vector<DetectionRecord> records,
                                              std::optional<double> theta_ose) {
    for (auto& r : records) {
        if (r.detection.logits.size() != models.dim()) {
            throw DataError("detection logits have dimension " + std::to_string(r.detection.logits.size()) +
                            " but the models expect " + std::to_string(models.dim()));
        }
        r.uncertainty = uncertainty_vector(models, r.detection.logits);
        if (theta_ose) {
            r.accepted = r.uncertainty->max_loglik >= *theta_ose;
        } else {
            r.accepted.reset();
        }
    }
    return records;
}

double gmm_open_set_auroc(const GmmSet& models, const std::vector<DetectionRecord>& records,
                          const std::vector<GroundTruthObject>& ground_truth) {
    std::vector<Detection> detections;
    detections.reserve(records.size());
    for (const auto& r : records) {
        detections.push_back(r.detection);
    }
    std::vector<double> correct;
    std::vector<double> open_set;
    for (const auto& c : categorise(detections, ground_truth)) {
        if (c.category == DetectionCategory::closed_set_error) {
            continue;
        }
        const double s = models.log_likelihoods(detections[c.detection_index].logits).maxCoeff();
        (c.category == DetectionCategory::correct ? correct : open_set).push_back(s);
    }
    return auroc(roc_curve(correct, open_set));
}

double ToyPipelineResult::auroc_spread() const {
    if (test_auroc_by_count.empty()) {
        return 0.0;
    }
    const auto [lo, hi] = std::minmax_element(test_auroc_by_count.begin(), test_auroc_by_count.end(),
                                              [](const auto& a, const auto& b) { return a.second < b.second; });
    return hi->second - lo->second;
}

ToyPipelineResult run_toy_pipeline(const ToyPipelineConfig& config) {
    const ToyDataset data = make_toy_dataset(config.data);
    ToyHeadConfig head_config = config.head;
    head_config.input_dim = config.data.input_dim;
    head_config.n_classes = config.data.n_known;

    ToyPipelineResult result;
    result.training = train_toy_head(labelled_inputs(data.train, config.data.n_known), head_config);
    const ToyHead& head = result.training.head;

    const auto first_val = static_cast<std::int64_t>(data.train.size()) + 1;
    const auto first_test = first_val + static_cast<std::int64_t>(data.val.size());
    const ToyArtifacts train = toy_artifacts(data.train, head, data, 1);
    const ToyArtifacts val = toy_artifacts(data.val, head, data, first_val);
    const ToyArtifacts test = toy_artifacts(data.test, head, data, first_test);
    const auto known = data.known_names();

    const LogitSets sets =
        build_training_logit_sets(train.detections.detections(), ground_truth_objects(train.ground_truth, known),
                                  config.data.n_known, config.theta_iou, config.theta_conf);
    const ValidationProxies proxies =
        validation_proxies(val.detections.detections(), ground_truth_objects(val.ground_truth, known));
    result.selection =
        select_components(config.candidate_counts, sets.sets, proxies.correct, proxies.misclassified, config.em);

    GmmSet models = *result.selection.selected_models;
    GmmSetMeta meta = models.meta();
    meta.theta_iou = config.theta_iou;
    meta.theta_conf = config.theta_conf;
    meta.class_names = known;
    models.set_meta(meta);

    const auto test_truth = ground_truth_objects(test.ground_truth, known);
    const auto scored = score_detections(models, test.detections.records);
    result.report = evaluate(scored, test_truth, config.data.n_known, {"gmm", "score", "entropy"});

    for (const int count : config.candidate_counts) {
        if (result.selection.skipped.count(count) != 0) {
            continue;
        }
        const GmmSet candidate = count == result.selection.selected ? models : fit_all(sets.sets, count, config.em);
        result.test_auroc_by_count[count] = gmm_open_set_auroc(candidate, test.detections.records, test_truth);
    }
    return result;
}

}  // namespace osgmm
