#pragma once

#include "osgmm/dataset.hpp"
#include "osgmm/detection.hpp"
#include "osgmm/toy_head.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace osgmm {

/// Synthetic open-set classification data standing in for detector features.
///
/// Every class (known or held-out) is a mixture of `modes_per_class` Gaussian
/// blobs in input space. Train and val splits contain known classes only;
/// the test split adds the held-out classes.
struct ToyDataConfig {
    int input_dim = 32;
    int n_known = 10;
    int n_unknown = 3;
    int modes_per_class = 2;
    /// Standard deviation of class centres around the origin, per coordinate.
    double class_spread = 0.4;
    /// Same for held-out class centres; larger values put them off the known-class manifold.
    double unknown_spread = 2.0;
    /// Standard deviation of each mode around its class centre, per coordinate.
    double mode_spread = 0.3;
    double noise = 1.0;
    int train_per_class = 200;
    int val_per_class = 100;
    int test_per_class = 100;
    std::uint64_t seed = 0;

    void validate() const;
};

struct ToySample {
    Eigen::VectorXd input;
    /// Indices >= n_known denote held-out classes.
    int class_index = 0;
};

struct ToyDataset {
    ToyDataConfig config;
    /// Known classes first, then held-out classes.
    std::vector<std::string> class_names;
    std::vector<ToySample> train;
    std::vector<ToySample> val;
    std::vector<ToySample> test;

    std::vector<std::string> known_names() const;
};

ToyDataset make_toy_dataset(const ToyDataConfig& config);

/// Known-class samples as trainer input.
std::vector<LabelledInput> labelled_inputs(const std::vector<ToySample>& samples, int n_known);

/// One image per sample, each holding a single unit box.
struct ToyArtifacts {
    DetectionFile detections;
    AnnotationSet ground_truth;
};

/// Runs the head over `samples` and packages the logits as detections plus
/// matching COCO-style ground truth. Image ids start at `first_image_id`.
ToyArtifacts toy_artifacts(const std::vector<ToySample>& samples, const ToyHead& head, const ToyDataset& data,
                           std::int64_t first_image_id);

}  // namespace osgmm
