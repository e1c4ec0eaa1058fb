#pragma once

#include "osgmm/types.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace osgmm {

/// How a detector turns logits into class scores: two-stage heads use
/// softmax, one-stage focal heads use per-class sigmoids.
enum class Normalisation { softmax, sigmoid };

std::string_view to_string(Normalisation mode);
Normalisation parse_normalisation(std::string_view text);

/// Softmax (max-subtracted) or elementwise logistic sigmoid.
Eigen::VectorXd normalise_scores(const Eigen::Ref<const Eigen::VectorXd>& logits, Normalisation mode);

/// Index of the largest entry; ties resolve to the lowest index.
ClassId argmax_lowest(const Eigen::Ref<const Eigen::VectorXd>& values);

struct Detection {
    std::string image_id;
    Box bbox;
    LogitVector logits;
    Eigen::VectorXd scores;
    ClassId predicted_class = 0;

    /// Builds a detection whose scores and predicted class are derived from `logits`.
    static Detection from_logits(std::string image_id, Box bbox, LogitVector logits, Normalisation mode);

    double max_score() const { return scores[predicted_class]; }
};

/// A labelled object. `class_id` is the known-class index when `known` is
/// true, otherwise the dataset category id of the held-out class.
struct GroundTruthObject {
    std::string image_id;
    Box bbox;
    int class_id = 0;
    bool known = true;
    std::string label;
};

/// Per-class GMM log-likelihoods of one logit vector plus their maximum.
struct UncertaintyVector {
    Eigen::VectorXd log_likelihoods;
    double max_loglik = 0.0;
    ClassId argmax_class = 0;
};

/// One entry of a detection file. Scored files additionally carry the
/// uncertainty vector and, when a rejection threshold was applied, the verdict.
struct DetectionRecord {
    Detection detection;
    std::optional<UncertaintyVector> uncertainty;
    std::optional<bool> accepted;
};

/// In-memory form of the detection interchange JSON document.
struct DetectionFile {
    static constexpr int kVersion = 1;

    Normalisation normalisation = Normalisation::softmax;
    std::vector<std::string> classes;
    std::vector<DetectionRecord> records;
    /// Free-form provenance (parameters, input hashes); written as "meta" when non-null.
    nlohmann::json meta;

    std::vector<Detection> detections() const;
};

/// Maximum tolerated gap between recorded scores and recomputed normalised logits.
inline constexpr double kScoreConsistencyTol = 1e-5;

DetectionFile detection_file_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const DetectionFile& file);

DetectionFile read_detection_file(const std::filesystem::path& path);
void write_detection_file(const DetectionFile& file, const std::filesystem::path& path);

}  // namespace osgmm
