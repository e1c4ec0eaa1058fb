#pragma once

#include "osgmm/anchor_loss.hpp"
#include "osgmm/types.hpp"

#include <cstdint>
#include <vector>

namespace osgmm {

/// Settings for the small fully connected classification head used to
/// demonstrate how the anchor term shapes the logit space.
struct ToyHeadConfig {
    int input_dim = 32;
    std::vector<int> hidden_dims{64};
    int n_classes = 10;
    double lambda = kDefaultLambda;
    double alpha = kDefaultAlpha;
    double learning_rate = 0.05;
    int epochs = 100;
    int batch_size = 64;
    std::uint64_t seed = 0;
    ClassificationLoss loss = ClassificationLoss::cross_entropy;
    FocalParams focal;

    void validate() const;
};

struct LabelledInput {
    Eigen::VectorXd input;
    ClassId label = 0;
};

/// ReLU multilayer perceptron producing raw logits.
class ToyHead {
public:
    struct Layer {
        Eigen::MatrixXd weights;
        Eigen::VectorXd bias;
    };

    ToyHead() = default;
    explicit ToyHead(std::vector<Layer> layers) : layers_(std::move(layers)) {}

    int input_dim() const { return static_cast<int>(layers_.front().weights.cols()); }
    int n_classes() const { return static_cast<int>(layers_.back().weights.rows()); }
    const std::vector<Layer>& layers() const { return layers_; }
    std::vector<Layer>& layers() { return layers_; }

    LogitVector logits(const Eigen::Ref<const Eigen::VectorXd>& input) const;
    /// One column per input.
    Eigen::MatrixXd logits(const Eigen::MatrixXd& inputs) const;

private:
    std::vector<Layer> layers_;
};

struct EpochStats {
    int epoch = 0;
    double mean_total = 0.0;
    double mean_classification = 0.0;
    double mean_anchor = 0.0;
};

struct ToyTrainingResult {
    ToyHead head;
    /// history[0] is the untrained head; history[e] is measured after epoch e.
    std::vector<EpochStats> history;
    /// Logits of the training inputs under the final head, in input order.
    std::vector<LogitVector> train_logits;
};

/// Mini-batch gradient descent on the combined classification + anchor loss.
/// Deterministic for a fixed seed.
ToyTrainingResult train_toy_head(const std::vector<LabelledInput>& data, const ToyHeadConfig& config);

/// Mean Euclidean distance between logits and their class centres.
double mean_distance_to_centre(const std::vector<LogitVector>& logits, const std::vector<ClassId>& labels,
                               const CentreSet& centres);

}  // namespace osgmm
