#pragma once

#include "osgmm/detection.hpp"
#include "osgmm/gmm.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace osgmm {

inline constexpr double kDefaultThetaIou = 0.6;
inline constexpr double kDefaultThetaConf = 0.7;

struct LogitSets {
    TrainingSets sets;
    /// Known classes that received no logit vector.
    std::vector<ClassId> empty_classes;
};

/// Collects the training logits of each known class.
///
/// Every detection is assigned to the truth in its image with the highest IoU
/// (ties to the earlier annotation). Its logit vector joins the set of that
/// truth's class i when the truth is known, IoU >= theta_iou and the
/// normalised score s_i >= theta_conf.
LogitSets build_training_logit_sets(const std::vector<Detection>& detections,
                                    const std::vector<GroundTruthObject>& ground_truth, int n_classes,
                                    double theta_iou = kDefaultThetaIou, double theta_conf = kDefaultThetaConf);

UncertaintyVector uncertainty_vector(const GmmSet& models, const Eigen::Ref<const Eigen::VectorXd>& logit);

struct RejectionSplit {
    std::vector<std::size_t> accepted;
    std::vector<std::size_t> rejected;
};

/// Accepts detection i iff its max log-likelihood is >= theta_ose.
RejectionSplit reject(std::span<const UncertaintyVector> scored, double theta_ose);

/// True when the score-based class and the most likely GMM class disagree.
bool flag_class_mismatch(const Detection& detection, const UncertaintyVector& uncertainty);

/// Lowest threshold at which at most `target_rate` of the proxy-negative
/// scores are still accepted (accept means score >= threshold).
double select_theta_ose(std::span<const double> negative_scores, double target_rate);

}  // namespace osgmm
