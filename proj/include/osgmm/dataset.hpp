#pragma once

#include "osgmm/detection.hpp"
#include "osgmm/types.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace osgmm {

// COCO-style records. `raw` keeps the original JSON object so fields this
// library does not interpret (segmentation, licenses, ...) survive a rewrite.

struct ImageInfo {
    std::int64_t id = 0;
    int width = 0;
    int height = 0;
    std::string file_name;
    nlohmann::json raw = nlohmann::json::object();
};

struct Annotation {
    std::int64_t id = 0;
    std::int64_t image_id = 0;
    Box bbox;
    std::int64_t category_id = 0;
    nlohmann::json raw = nlohmann::json::object();
};

struct Category {
    std::int64_t id = 0;
    std::string name;
    nlohmann::json raw = nlohmann::json::object();
};

struct AnnotationSet {
    std::vector<ImageInfo> images;
    std::vector<Annotation> annotations;
    std::vector<Category> categories;
    /// Top-level keys other than images/annotations/categories.
    nlohmann::json extra = nlohmann::json::object();

    /// Every annotation must reference an existing image and category.
    void validate() const;
    /// Category names in dataset order.
    std::vector<std::string> class_names() const;
};

AnnotationSet annotation_set_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const AnnotationSet& set);
AnnotationSet read_coco(const std::filesystem::path& path);
void write_coco(const AnnotationSet& set, const std::filesystem::path& path);

/// The 20 Pascal VOC classes in their conventional order.
const std::vector<std::string>& voc_class_names();

/// Imports a directory of VOC XML annotation files. Categories follow
/// `class_order` (ids 1..n); images are numbered in filename order.
AnnotationSet read_voc_directory(const std::filesystem::path& dir,
                                 const std::vector<std::string>& class_order = voc_class_names());

/// Either "the first n classes" or an explicit list of known class names.
using KnownSpec = std::variant<std::size_t, std::vector<std::string>>;

struct ClassSplit {
    std::vector<std::string> known;
    std::vector<std::string> unknown;
};

ClassSplit split_classes(const std::vector<std::string>& all_classes, const KnownSpec& known_spec);

/// Drops every image containing an object of a held-out class, together with
/// all of that image's annotations. Categories shrink to the remaining classes.
AnnotationSet filter_images(const AnnotationSet& dataset, const std::vector<std::string>& unknown_classes);

struct InstanceRatio {
    std::string name;
    std::size_t original = 0;
    std::size_t retained = 0;
    double ratio = 0.0;
    bool flagged = false;
};

struct RatioReport {
    /// |K_K| / |K|; known classes below it are flagged.
    double floor = 0.0;
    std::vector<InstanceRatio> classes;

    std::vector<std::string> flagged() const;
};

/// Audits how many training instances of each known class survive filtering.
/// Never fails; low ratios are only flagged.
RatioReport check_instance_ratio(const AnnotationSet& original, const AnnotationSet& filtered,
                                  const std::vector<std::string>& known_classes, std::size_t n_all_classes);

struct TrainValSplit {
    AnnotationSet train;
    AnnotationSet val;
};

/// Deterministic split: an image goes to val when a SHA-256 derived value of
/// (seed, image id) falls below val_fraction.
TrainValSplit split_train_val(const AnnotationSet& dataset, double val_fraction, std::uint64_t seed);

/// Flattens annotations into ground-truth objects. Categories named in
/// `known_classes` get their index there; all others are marked unknown.
std::vector<GroundTruthObject> ground_truth_objects(const AnnotationSet& dataset,
                                                    const std::vector<std::string>& known_classes);

}  // namespace osgmm
