#include "osgmm/toy_head.hpp"

#include "osgmm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace osgmm {

void ToyHeadConfig::validate() const {
    if (input_dim < 1) {
        throw ContractViolation("toy head input_dim must be positive");
    }
    for (const int h : hidden_dims) {
        if (h < 1) {
            throw ContractViolation("toy head hidden layer sizes must be positive");
        }
    }
    if (n_classes < 2) {
        throw ContractViolation("toy head needs at least two classes");
    }
    if (!(lambda >= 0.0)) {
        throw ContractViolation("lambda must be non-negative");
    }
    if (!(alpha > 0.0)) {
        throw ContractViolation("alpha must be positive");
    }
    if (!(learning_rate > 0.0)) {
        throw ContractViolation("learning rate must be positive");
    }
    if (epochs < 1 || batch_size < 1) {
        throw ContractViolation("epochs and batch size must be positive");
    }
}

LogitVector ToyHead::logits(const Eigen::Ref<const Eigen::VectorXd>& input) const {
    Eigen::MatrixXd single = input;
    return logits(single).col(0);
}

Eigen::MatrixXd ToyHead::logits(const Eigen::MatrixXd& inputs) const {
    if (layers_.empty()) {
        throw ContractViolation("toy head has no layers");
    }
    if (inputs.rows() != input_dim()) {
        throw ContractViolation("toy head input has dimension " + std::to_string(inputs.rows()) + ", expected " +
                                std::to_string(input_dim()));
    }
    Eigen::MatrixXd a = inputs;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        Eigen::MatrixXd z = (layers_[l].weights * a).colwise() + layers_[l].bias;
        if (l + 1 < layers_.size()) {
            z = z.cwiseMax(0.0);
        }
        a = std::move(z);
    }
    return a;
}

namespace {

ToyHead init_head(const ToyHeadConfig& config, std::mt19937_64& rng) {
    std::vector<int> sizes{config.input_dim};
    sizes.insert(sizes.end(), config.hidden_dims.begin(), config.hidden_dims.end());
    sizes.push_back(config.n_classes);
    std::vector<ToyHead::Layer> layers;
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        const int fan_in = sizes[l];
        const double scale = std::sqrt(2.0 / fan_in);  // He initialisation
        ToyHead::Layer layer;
        layer.weights.resize(sizes[l + 1], fan_in);
        for (Eigen::Index i = 0; i < layer.weights.size(); ++i) {
            layer.weights.data()[i] = scale * normal(rng);
        }
        layer.bias = Eigen::VectorXd::Zero(sizes[l + 1]);
        layers.push_back(std::move(layer));
    }
    return ToyHead(std::move(layers));
}

EpochStats evaluate(const ToyHead& head, const Eigen::MatrixXd& inputs, const std::vector<ClassId>& labels,
                    const CentreSet& centres, const ToyHeadConfig& config, int epoch) {
    const Eigen::MatrixXd logits = head.logits(inputs);
    EpochStats stats;
    stats.epoch = epoch;
    for (Eigen::Index i = 0; i < logits.cols(); ++i) {
        const auto terms = combined_loss(logits.col(i), labels[static_cast<std::size_t>(i)], centres, config.lambda,
                                         config.loss, config.focal);
        stats.mean_total += terms.total;
        stats.mean_classification += terms.classification;
        stats.mean_anchor += terms.anchor;
    }
    const auto n = static_cast<double>(logits.cols());
    stats.mean_total /= n;
    stats.mean_classification /= n;
    stats.mean_anchor /= n;
    return stats;
}

}  // namespace

ToyTrainingResult train_toy_head(const std::vector<LabelledInput>& data, const ToyHeadConfig& config) {
    config.validate();
    std::vector<std::size_t> per_class(static_cast<std::size_t>(config.n_classes), 0);
    Eigen::MatrixXd inputs(config.input_dim, static_cast<Eigen::Index>(data.size()));
    std::vector<ClassId> labels;
    labels.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto& sample = data[i];
        if (sample.label < 0 || sample.label >= config.n_classes) {
            throw ContractViolation("training label " + std::to_string(sample.label) + " outside [0, " +
                                    std::to_string(config.n_classes) + ")");
        }
        if (sample.input.size() != config.input_dim) {
            throw ContractViolation("training input " + std::to_string(i) + " has the wrong dimension");
        }
        ++per_class[static_cast<std::size_t>(sample.label)];
        inputs.col(static_cast<Eigen::Index>(i)) = sample.input;
        labels.push_back(sample.label);
    }
    for (std::size_t c = 0; c < per_class.size(); ++c) {
        if (per_class[c] == 0) {
            throw DataError("class " + std::to_string(c) + " has no training samples");
        }
    }

    const CentreSet centres(config.n_classes, config.alpha);
    std::mt19937_64 rng(config.seed);
    ToyTrainingResult result;
    result.head = init_head(config, rng);
    auto& layers = result.head.layers();
    result.history.push_back(evaluate(result.head, inputs, labels, centres, config, 0));

    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t n_layers = layers.size();
    std::vector<Eigen::MatrixXd> activations(n_layers + 1);

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch_size)) {
            const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
            const auto batch = static_cast<Eigen::Index>(stop - start);
            Eigen::MatrixXd& a0 = activations[0];
            a0.resize(config.input_dim, batch);
            for (Eigen::Index b = 0; b < batch; ++b) {
                a0.col(b) = inputs.col(static_cast<Eigen::Index>(order[start + static_cast<std::size_t>(b)]));
            }
            for (std::size_t l = 0; l < n_layers; ++l) {
                Eigen::MatrixXd z = (layers[l].weights * activations[l]).colwise() + layers[l].bias;
                if (l + 1 < n_layers) {
                    z = z.cwiseMax(0.0);
                }
                activations[l + 1] = std::move(z);
            }

            Eigen::MatrixXd delta(config.n_classes, batch);
            for (Eigen::Index b = 0; b < batch; ++b) {
                const ClassId y = labels[order[start + static_cast<std::size_t>(b)]];
                delta.col(b) = combined_loss(activations[n_layers].col(b), y, centres, config.lambda, config.loss,
                                             config.focal)
                                   .grad;
            }
            delta /= static_cast<double>(batch);

            for (std::size_t l = n_layers; l-- > 0;) {
                const Eigen::MatrixXd grad_w = delta * activations[l].transpose();
                const Eigen::VectorXd grad_b = delta.rowwise().sum();
                if (l > 0) {
                    Eigen::MatrixXd back = layers[l].weights.transpose() * delta;
                    // ReLU derivative: activations[l] holds post-ReLU values.
                    delta = (activations[l].array() > 0.0).select(back, 0.0);
                }
                layers[l].weights -= config.learning_rate * grad_w;
                layers[l].bias -= config.learning_rate * grad_b;
            }
        }
        result.history.push_back(evaluate(result.head, inputs, labels, centres, config, epoch));
    }

    const Eigen::MatrixXd final_logits = result.head.logits(inputs);
    result.train_logits.reserve(data.size());
    for (Eigen::Index i = 0; i < final_logits.cols(); ++i) {
        result.train_logits.push_back(final_logits.col(i));
    }
    return result;
}

double mean_distance_to_centre(const std::vector<LogitVector>& logits, const std::vector<ClassId>& labels,
                               const CentreSet& centres) {
    if (logits.size() != labels.size() || logits.empty()) {
        throw ContractViolation("mean distance needs one label per logit vector");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        sum += anchor_loss(logits[i], labels[i], centres);
    }
    return sum / static_cast<double>(logits.size());
}

}  // namespace osgmm
