#include "osgmm/extraction.hpp"

#include "osgmm/errors.hpp"
#include "osgmm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <unordered_map>

namespace osgmm {

LogitSets build_training_logit_sets(const std::vector<Detection>& detections,
                                    const std::vector<GroundTruthObject>& ground_truth, int n_classes,
                                    double theta_iou, double theta_conf) {
    if (!(theta_iou > 0.0 && theta_iou <= 1.0)) {
        throw ContractViolation("theta_iou must lie in (0, 1]");
    }
    if (!(theta_conf > 0.0 && theta_conf <= 1.0)) {
        throw ContractViolation("theta_conf must lie in (0, 1]");
    }
    std::unordered_map<std::string, std::vector<std::size_t>> by_image;
    for (std::size_t g = 0; g < ground_truth.size(); ++g) {
        by_image[ground_truth[g].image_id].push_back(g);
    }

    LogitSets out;
    for (const Detection& det : detections) {
        const auto it = by_image.find(det.image_id);
        if (it == by_image.end()) {
            continue;
        }
        const GroundTruthObject* best = nullptr;
        double best_iou = 0.0;
        for (const std::size_t g : it->second) {
            const double overlap = iou(det.bbox, ground_truth[g].bbox);
            if (overlap > best_iou) {
                best_iou = overlap;
                best = &ground_truth[g];
            }
        }
        if (best == nullptr || !best->known || best_iou < theta_iou) {
            continue;
        }
        const ClassId cls = best->class_id;
        if (cls < 0 || cls >= n_classes || cls >= det.scores.size()) {
            throw ContractViolation("ground-truth class " + std::to_string(cls) + " is not a known class index");
        }
        if (det.scores[cls] >= theta_conf) {
            out.sets[cls].push_back(det.logits);
        }
    }
    for (ClassId c = 0; c < n_classes; ++c) {
        if (out.sets[c].empty()) {
            out.empty_classes.push_back(c);
        }
    }
    return out;
}

UncertaintyVector uncertainty_vector(const GmmSet& models, const Eigen::Ref<const Eigen::VectorXd>& logit) {
    UncertaintyVector u;
    u.log_likelihoods = models.log_likelihoods(logit);
    u.argmax_class = argmax_lowest(u.log_likelihoods);
    u.max_loglik = u.log_likelihoods[u.argmax_class];
    return u;
}

RejectionSplit reject(std::span<const UncertaintyVector> scored, double theta_ose) {
    RejectionSplit split;
    for (std::size_t i = 0; i < scored.size(); ++i) {
        (scored[i].max_loglik >= theta_ose ? split.accepted : split.rejected).push_back(i);
    }
    return split;
}

bool flag_class_mismatch(const Detection& detection, const UncertaintyVector& uncertainty) {
    return detection.predicted_class != uncertainty.argmax_class;
}

double select_theta_ose(std::span<const double> negative_scores, double target_rate) {
    if (negative_scores.empty()) {
        throw DataError("threshold selection needs at least one proxy-negative score");
    }
    if (!(target_rate >= 0.0 && target_rate <= 1.0)) {
        throw ContractViolation("target error rate must lie in [0, 1]");
    }
    std::vector<double> sorted(negative_scores.begin(), negative_scores.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    // Largest count whose accepted fraction, computed as the evaluator would, stays within the target.
    const auto n = static_cast<double>(sorted.size());
    auto allowed = static_cast<std::size_t>(std::floor(target_rate * n));
    while (allowed > 0 && static_cast<double>(allowed) / n > target_rate) {
        --allowed;
    }
    while (allowed < sorted.size() && static_cast<double>(allowed + 1) / n <= target_rate) {
        ++allowed;
    }
    if (allowed >= sorted.size()) {
        return -std::numeric_limits<double>::infinity();
    }
    // Anything at or below the (allowed+1)-th largest score must be rejected.
    return std::nextafter(sorted[allowed], std::numeric_limits<double>::infinity());
}

}  // namespace osgmm
