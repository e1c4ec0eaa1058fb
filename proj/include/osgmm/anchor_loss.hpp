#pragma once

#include "osgmm/types.hpp"

#include <vector>

namespace osgmm {

inline constexpr double kDefaultAlpha = 10.0;
inline constexpr double kDefaultLambda = 0.1;

/// Fixed class centre points in logit space: centre y holds +alpha at index y
/// and -alpha everywhere else.
class CentreSet {
public:
    CentreSet(int n_classes, double alpha);

    int n_classes() const { return static_cast<int>(centres_.size()); }
    double alpha() const { return alpha_; }
    const Eigen::VectorXd& centre(ClassId label) const;
    const std::vector<Eigen::VectorXd>& centres() const { return centres_; }

private:
    double alpha_;
    std::vector<Eigen::VectorXd> centres_;
};

CentreSet class_centres(int n_classes, double alpha = kDefaultAlpha);

/// Unsquared Euclidean distance from the logit vector to its class centre.
double anchor_loss(const Eigen::Ref<const Eigen::VectorXd>& logit, ClassId label, const CentreSet& centres);

/// Unit vector from the centre towards the logit; the zero vector at the centre itself.
Eigen::VectorXd anchor_loss_grad(const Eigen::Ref<const Eigen::VectorXd>& logit, ClassId label,
                                 const CentreSet& centres);

double cross_entropy(const Eigen::Ref<const Eigen::VectorXd>& logit, ClassId label);
Eigen::VectorXd cross_entropy_grad(const Eigen::Ref<const Eigen::VectorXd>& logit, ClassId label);

/// One-vs-all sigmoid focal loss as used by one-stage detectors.
struct FocalParams {
    double gamma = 2.0;
    double alpha = 0.25;
};

double sigmoid_focal_loss(const Eigen::Ref<const Eigen::VectorXd>& logit, ClassId label, const FocalParams& params);
Eigen::VectorXd sigmoid_focal_loss_grad(const Eigen::Ref<const Eigen::VectorXd>& logit, ClassId label,
                                        const FocalParams& params);

enum class ClassificationLoss { cross_entropy, focal };

struct LossTerms {
    double total = 0.0;
    double classification = 0.0;
    double anchor = 0.0;
    Eigen::VectorXd grad;
};

/// Classification loss plus lambda times the anchor loss, with the matching gradient.
LossTerms combined_loss(const Eigen::Ref<const Eigen::VectorXd>& logit, ClassId label, const CentreSet& centres,
                        double lambda, ClassificationLoss kind = ClassificationLoss::cross_entropy,
                        const FocalParams& focal = {});

}  // namespace osgmm
