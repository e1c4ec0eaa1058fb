#include "osgmm/toy_data.hpp"

#include "osgmm/errors.hpp"

#include <random>

namespace osgmm {

void ToyDataConfig::validate() const {
    if (input_dim < 1 || n_known < 2 || n_unknown < 0 || modes_per_class < 1) {
        throw ContractViolation("toy data needs input_dim >= 1, n_known >= 2, n_unknown >= 0, modes >= 1");
    }
    if (!(class_spread >= 0.0 && unknown_spread >= 0.0 && mode_spread >= 0.0 && noise > 0.0)) {
        throw ContractViolation("toy data spreads must be non-negative and noise positive");
    }
    if (train_per_class < 1 || val_per_class < 0 || test_per_class < 0) {
        throw ContractViolation("toy data sample counts must be non-negative (train positive)");
    }
}

std::vector<std::string> ToyDataset::known_names() const {
    return {class_names.begin(), class_names.begin() + config.n_known};
}

ToyDataset make_toy_dataset(const ToyDataConfig& config) {
    config.validate();
    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    auto gaussian = [&](double scale) {
        Eigen::VectorXd v(config.input_dim);
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            v[i] = scale * normal(rng);
        }
        return v;
    };

    const int n_total = config.n_known + config.n_unknown;
    ToyDataset data;
    data.config = config;
    std::vector<std::vector<Eigen::VectorXd>> modes(static_cast<std::size_t>(n_total));
    for (int c = 0; c < n_total; ++c) {
        data.class_names.push_back((c < config.n_known ? "known_" : "unknown_") +
                                   std::to_string(c < config.n_known ? c : c - config.n_known));
        const Eigen::VectorXd centre = gaussian(c < config.n_known ? config.class_spread : config.unknown_spread);
        for (int m = 0; m < config.modes_per_class; ++m) {
            modes[static_cast<std::size_t>(c)].push_back(centre + gaussian(config.mode_spread));
        }
    }

    std::uniform_int_distribution<int> pick_mode(0, config.modes_per_class - 1);
    auto draw = [&](int c, int count, std::vector<ToySample>& out) {
        for (int i = 0; i < count; ++i) {
            const auto& mode = modes[static_cast<std::size_t>(c)][static_cast<std::size_t>(pick_mode(rng))];
            out.push_back({mode + gaussian(config.noise), c});
        }
    };
    for (int c = 0; c < config.n_known; ++c) {
        draw(c, config.train_per_class, data.train);
    }
    for (int c = 0; c < config.n_known; ++c) {
        draw(c, config.val_per_class, data.val);
    }
    for (int c = 0; c < n_total; ++c) {
        draw(c, config.test_per_class, data.test);
    }
    return data;
}

std::vector<LabelledInput> labelled_inputs(const std::vector<ToySample>& samples, int n_known) {
    std::vector<LabelledInput> out;
    out.reserve(samples.size());
    for (const auto& s : samples) {
        if (s.class_index < n_known) {
            out.push_back({s.input, s.class_index});
        }
    }
    return out;
}

ToyArtifacts toy_artifacts(const std::vector<ToySample>& samples, const ToyHead& head, const ToyDataset& data,
                           std::int64_t first_image_id) {
    ToyArtifacts out;
    out.detections.normalisation = Normalisation::softmax;
    out.detections.classes = data.known_names();
    for (std::size_t c = 0; c < data.class_names.size(); ++c) {
        Category cat;
        cat.id = static_cast<std::int64_t>(c + 1);
        cat.name = data.class_names[c];
        out.ground_truth.categories.push_back(std::move(cat));
    }
    if (samples.empty()) {
        return out;
    }

    Eigen::MatrixXd inputs(head.input_dim(), static_cast<Eigen::Index>(samples.size()));
    for (std::size_t i = 0; i < samples.size(); ++i) {
        inputs.col(static_cast<Eigen::Index>(i)) = samples[i].input;
    }
    const Eigen::MatrixXd logits = head.logits(inputs);
    const Box unit{0.0, 0.0, 1.0, 1.0};
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const std::int64_t image_id = first_image_id + static_cast<std::int64_t>(i);
        ImageInfo img;
        img.id = image_id;
        img.width = 1;
        img.height = 1;
        img.file_name = "toy_" + std::to_string(image_id);
        out.ground_truth.images.push_back(std::move(img));

        Annotation ann;
        ann.id = image_id;
        ann.image_id = image_id;
        ann.bbox = unit;
        ann.category_id = samples[i].class_index + 1;
        out.ground_truth.annotations.push_back(std::move(ann));

        out.detections.records.push_back(
            {Detection::from_logits(std::to_string(image_id), unit, logits.col(static_cast<Eigen::Index>(i)),
                                    Normalisation::softmax),
             std::nullopt, std::nullopt});
    }
    return out;
}

}  // namespace osgmm
