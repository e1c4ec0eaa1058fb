#include "osgmm/anchor_loss.hpp"

#include "osgmm/errors.hpp"

#include <cmath>
#include <string>

namespace osgmm {

namespace {

void check_label(ClassId label, Eigen::Index n, const char* where) {
    if (label < 0 || label >= n) {
        throw ContractViolation(std::string(where) + ": label " + std::to_string(label) + " outside [0, " +
                                std::to_string(n) + ")");
    }
}

double log_sigmoid(double z) { return z >= 0.0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z)); }

double sigmoid(double z) { return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z)); }

}  // namespace

CentreSet::CentreSet(int n_classes, double alpha) : alpha_(alpha) {
    if (n_classes < 2) {
        throw ContractViolation("class centres need at least two classes");
    }
    if (!(alpha > 0.0)) {
        throw ContractViolation("centre magnitude alpha must be positive");
    }
    centres_.reserve(static_cast<std::size_t>(n_classes));
    for (int y = 0; y < n_classes; ++y) {
        Eigen::VectorXd c = Eigen::VectorXd::Constant(n_classes, -alpha);
        c[y] = alpha;
        centres_.push_back(std::move(c));
    }
}

const Eigen::VectorXd& CentreSet::centre(ClassId label) const {
    check_label(label, n_classes(), "class centre");
    return centres_[static_cast<std::size_t>(label)];
}

CentreSet class_centres(int n_classes, double alpha) { return CentreSet(n_classes, alpha); }

double anchor_loss(const Eigen::Ref<const Eigen::VectorXd>& logit, ClassId label, const CentreSet& centres) {
    if (logit.size() != centres.n_classes()) {
        throw ContractViolation("anchor loss: logit dimension does not match the centre set");
    }
    return (logit - centres.centre(label)).norm();
}

Eigen::VectorXd anchor_loss_grad(const Eigen::Ref<const Eigen::VectorXd>& logit, ClassId label,
                                 const CentreSet& centres) {
    if (logit.size() != centres.n_classes()) {
        throw ContractViolation("anchor loss: logit dimension does not match the centre set");
    }
    Eigen::VectorXd diff = logit - centres.centre(label);
    const double norm = diff.norm();
    if (norm == 0.0) {
        return Eigen::VectorXd::Zero(logit.size());
    }
    return diff / norm;
}

double cross_entropy(const Eigen::Ref<const Eigen::VectorXd>& logit, ClassId label) {
    check_label(label, logit.size(), "cross entropy");
    const double m = logit.maxCoeff();
    return m + std::log((logit.array() - m).exp().sum()) - logit[label];
}

Eigen::VectorXd cross_entropy_grad(const Eigen::Ref<const Eigen::VectorXd>& logit, ClassId label) {
    check_label(label, logit.size(), "cross entropy");
    Eigen::VectorXd p = (logit.array() - logit.maxCoeff()).exp();
    p /= p.sum();
    p[label] -= 1.0;
    return p;
}

// Per class k with target t_k: -a_t (1 - p_t)^gamma log p_t, where p_t = p for
// t = 1 and 1 - p otherwise, a_t = alpha for positives and 1 - alpha for negatives.
double sigmoid_focal_loss(const Eigen::Ref<const Eigen::VectorXd>& logit, ClassId label, const FocalParams& params) {
    check_label(label, logit.size(), "focal loss");
    double loss = 0.0;
    for (Eigen::Index k = 0; k < logit.size(); ++k) {
        const bool positive = k == label;
        const double z = positive ? logit[k] : -logit[k];
        const double pt = sigmoid(z);
        const double at = positive ? params.alpha : 1.0 - params.alpha;
        loss -= at * std::pow(1.0 - pt, params.gamma) * log_sigmoid(z);
    }
    return loss;
}

Eigen::VectorXd sigmoid_focal_loss_grad(const Eigen::Ref<const Eigen::VectorXd>& logit, ClassId label,
                                        const FocalParams& params) {
    check_label(label, logit.size(), "focal loss");
    Eigen::VectorXd grad(logit.size());
    for (Eigen::Index k = 0; k < logit.size(); ++k) {
        const bool positive = k == label;
        const double sign = positive ? 1.0 : -1.0;
        const double z = sign * logit[k];
        const double pt = sigmoid(z);
        const double q = 1.0 - pt;
        const double at = positive ? params.alpha : 1.0 - params.alpha;
        // d/dz of -(1-pt)^g log pt, using dpt/dz = pt (1 - pt).
        const double dz = at * (params.gamma * std::pow(q, params.gamma) * pt * log_sigmoid(z) -
                                std::pow(q, params.gamma + 1.0));
        grad[k] = sign * dz;
    }
    return grad;
}

LossTerms combined_loss(const Eigen::Ref<const Eigen::VectorXd>& logit, ClassId label, const CentreSet& centres,
                        double lambda, ClassificationLoss kind, const FocalParams& focal) {
    if (!(lambda >= 0.0)) {
        throw ContractViolation("anchor weight lambda must be non-negative");
    }
    LossTerms out;
    if (kind == ClassificationLoss::cross_entropy) {
        out.classification = cross_entropy(logit, label);
        out.grad = cross_entropy_grad(logit, label);
    } else {
        out.classification = sigmoid_focal_loss(logit, label, focal);
        out.grad = sigmoid_focal_loss_grad(logit, label, focal);
    }
    out.anchor = anchor_loss(logit, label, centres);
    out.total = out.classification + lambda * out.anchor;
    out.grad += lambda * anchor_loss_grad(logit, label, centres);
    return out;
}

}  // namespace osgmm
