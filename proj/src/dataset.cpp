#include "osgmm/dataset.hpp"

#include "osgmm/errors.hpp"
#include "osgmm/hashing.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace osgmm {

using nlohmann::json;

void AnnotationSet::validate() const {
    std::unordered_set<std::int64_t> image_ids;
    for (const auto& img : images) {
        if (!image_ids.insert(img.id).second) {
            throw DataError("duplicate image id " + std::to_string(img.id));
        }
    }
    std::unordered_set<std::int64_t> category_ids;
    for (const auto& cat : categories) {
        if (!category_ids.insert(cat.id).second) {
            throw DataError("duplicate category id " + std::to_string(cat.id));
        }
    }
    for (const auto& ann : annotations) {
        if (!image_ids.contains(ann.image_id)) {
            throw DataError("annotation " + std::to_string(ann.id) + " references missing image " +
                            std::to_string(ann.image_id));
        }
        if (!category_ids.contains(ann.category_id)) {
            throw DataError("annotation " + std::to_string(ann.id) + " references missing category " +
                            std::to_string(ann.category_id));
        }
        if (!ann.bbox.valid()) {
            throw DataError("annotation " + std::to_string(ann.id) + " has a degenerate box");
        }
    }
}

std::vector<std::string> AnnotationSet::class_names() const {
    std::vector<std::string> names;
    names.reserve(categories.size());
    for (const auto& c : categories) {
        names.push_back(c.name);
    }
    return names;
}

AnnotationSet annotation_set_from_json(const json& doc) {
    try {
        AnnotationSet set;
        for (const auto& [key, value] : doc.items()) {
            if (key != "images" && key != "annotations" && key != "categories") {
                set.extra[key] = value;
            }
        }
        for (const auto& item : doc.at("images")) {
            ImageInfo img;
            img.id = item.at("id").get<std::int64_t>();
            img.width = item.value("width", 0);
            img.height = item.value("height", 0);
            img.file_name = item.value("file_name", std::string());
            img.raw = item;
            set.images.push_back(std::move(img));
        }
        for (const auto& item : doc.at("categories")) {
            Category cat;
            cat.id = item.at("id").get<std::int64_t>();
            cat.name = item.at("name").get<std::string>();
            cat.raw = item;
            set.categories.push_back(std::move(cat));
        }
        for (const auto& item : doc.at("annotations")) {
            Annotation ann;
            ann.id = item.value("id", std::int64_t{0});
            ann.image_id = item.at("image_id").get<std::int64_t>();
            ann.category_id = item.at("category_id").get<std::int64_t>();
            const auto& b = item.at("bbox");
            if (!b.is_array() || b.size() != 4) {
                throw DataError("annotation " + std::to_string(ann.id) + ": bbox must be [x, y, w, h]");
            }
            const double x = b[0].get<double>();
            const double y = b[1].get<double>();
            ann.bbox = Box{x, y, x + b[2].get<double>(), y + b[3].get<double>()};
            ann.raw = item;
            set.annotations.push_back(std::move(ann));
        }
        set.validate();
        return set;
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed COCO annotation file: ") + e.what());
    }
}

json to_json(const AnnotationSet& set) {
    json doc = set.extra;
    json images = json::array();
    for (const auto& img : set.images) {
        json item = img.raw;
        item["id"] = img.id;
        if (!item.contains("width")) {
            item["width"] = img.width;
        }
        if (!item.contains("height")) {
            item["height"] = img.height;
        }
        if (!item.contains("file_name")) {
            item["file_name"] = img.file_name;
        }
        images.push_back(std::move(item));
    }
    json annotations = json::array();
    for (const auto& ann : set.annotations) {
        json item = ann.raw;
        item["id"] = ann.id;
        item["image_id"] = ann.image_id;
        item["category_id"] = ann.category_id;
        // Keep the original [x, y, w, h] numbers when present; corner/size
        // conversion does not round-trip exactly in floating point.
        if (!item.contains("bbox")) {
            item["bbox"] = {ann.bbox.x_min, ann.bbox.y_min, ann.bbox.width(), ann.bbox.height()};
        }
        if (!item.contains("area")) {
            item["area"] = ann.bbox.area();
        }
        if (!item.contains("iscrowd")) {
            item["iscrowd"] = 0;
        }
        annotations.push_back(std::move(item));
    }
    json categories = json::array();
    for (const auto& cat : set.categories) {
        json item = cat.raw;
        item["id"] = cat.id;
        item["name"] = cat.name;
        categories.push_back(std::move(item));
    }
    doc["images"] = std::move(images);
    doc["annotations"] = std::move(annotations);
    doc["categories"] = std::move(categories);
    return doc;
}

AnnotationSet read_coco(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open annotation file " + path.string());
    }
    try {
        return annotation_set_from_json(json::parse(in));
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

void write_coco(const AnnotationSet& set, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    out << to_json(set).dump(1) << '\n';
}

const std::vector<std::string>& voc_class_names() {
    static const std::vector<std::string> names{
        "aeroplane",   "bicycle", "bird",  "boat",      "bottle", "bus",         "car",
        "cat",         "chair",   "cow",   "diningtable", "dog",  "horse",       "motorbike",
        "person",      "pottedplant", "sheep", "sofa",  "train",  "tvmonitor"};
    return names;
}

AnnotationSet read_voc_directory(const std::filesystem::path& dir, const std::vector<std::string>& class_order) {
    namespace pt = boost::property_tree;
    if (!std::filesystem::is_directory(dir)) {
        throw DataError(dir.string() + " is not a directory");
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".xml") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());

    AnnotationSet set;
    std::unordered_map<std::string, std::int64_t> category_id;
    for (std::size_t i = 0; i < class_order.size(); ++i) {
        Category cat;
        cat.id = static_cast<std::int64_t>(i + 1);
        cat.name = class_order[i];
        category_id[cat.name] = cat.id;
        set.categories.push_back(std::move(cat));
    }

    std::int64_t next_annotation = 1;
    std::int64_t next_image = 1;
    for (const auto& file : files) {
        pt::ptree tree;
        try {
            pt::read_xml(file.string(), tree);
        } catch (const pt::xml_parser_error& e) {
            throw DataError(file.string() + ": " + e.what());
        }
        try {
            const auto& root = tree.get_child("annotation");
            ImageInfo img;
            img.id = next_image++;
            img.file_name = root.get<std::string>("filename", file.stem().string());
            img.width = root.get<int>("size.width", 0);
            img.height = root.get<int>("size.height", 0);
            for (const auto& [tag, node] : root) {
                if (tag != "object") {
                    continue;
                }
                const auto name = node.get<std::string>("name");
                const auto it = category_id.find(name);
                if (it == category_id.end()) {
                    throw DataError(file.string() + ": unknown VOC class '" + name + "'");
                }
                Annotation ann;
                ann.id = next_annotation++;
                ann.image_id = img.id;
                ann.category_id = it->second;
                ann.bbox = Box{node.get<double>("bndbox.xmin"), node.get<double>("bndbox.ymin"),
                               node.get<double>("bndbox.xmax"), node.get<double>("bndbox.ymax")};
                ann.raw["difficult"] = node.get<int>("difficult", 0);
                set.annotations.push_back(std::move(ann));
            }
            set.images.push_back(std::move(img));
        } catch (const pt::ptree_error& e) {
            throw DataError(file.string() + ": " + e.what());
        }
    }
    set.validate();
    return set;
}

ClassSplit split_classes(const std::vector<std::string>& all_classes, const KnownSpec& known_spec) {
    ClassSplit split;
    if (const auto* prefix = std::get_if<std::size_t>(&known_spec)) {
        if (*prefix == 0 || *prefix >= all_classes.size()) {
            throw ContractViolation("known-class prefix must leave at least one known and one unknown class (got " +
                                    std::to_string(*prefix) + " of " + std::to_string(all_classes.size()) + ")");
        }
        split.known.assign(all_classes.begin(), all_classes.begin() + static_cast<std::ptrdiff_t>(*prefix));
        split.unknown.assign(all_classes.begin() + static_cast<std::ptrdiff_t>(*prefix), all_classes.end());
        return split;
    }
    const auto& names = std::get<std::vector<std::string>>(known_spec);
    const std::set<std::string> wanted(names.begin(), names.end());
    const std::set<std::string> available(all_classes.begin(), all_classes.end());
    for (const auto& n : wanted) {
        if (!available.contains(n)) {
            throw ContractViolation("known class '" + n + "' is not in the dataset");
        }
    }
    for (const auto& c : all_classes) {
        (wanted.contains(c) ? split.known : split.unknown).push_back(c);
    }
    if (split.known.empty() || split.unknown.empty()) {
        throw ContractViolation("class split must leave at least one known and one unknown class");
    }
    return split;
}

AnnotationSet filter_images(const AnnotationSet& dataset, const std::vector<std::string>& unknown_classes) {
    const std::set<std::string> unknown(unknown_classes.begin(), unknown_classes.end());
    std::unordered_set<std::int64_t> unknown_ids;
    AnnotationSet out;
    out.extra = dataset.extra;
    for (const auto& cat : dataset.categories) {
        if (unknown.contains(cat.name)) {
            unknown_ids.insert(cat.id);
        } else {
            out.categories.push_back(cat);
        }
    }
    std::unordered_set<std::int64_t> dropped;
    for (const auto& ann : dataset.annotations) {
        if (unknown_ids.contains(ann.category_id)) {
            dropped.insert(ann.image_id);
        }
    }
    for (const auto& img : dataset.images) {
        if (!dropped.contains(img.id)) {
            out.images.push_back(img);
        }
    }
    for (const auto& ann : dataset.annotations) {
        if (!dropped.contains(ann.image_id)) {
            out.annotations.push_back(ann);
        }
    }
    return out;
}

std::vector<std::string> RatioReport::flagged() const {
    std::vector<std::string> out;
    for (const auto& c : classes) {
        if (c.flagged) {
            out.push_back(c.name);
        }
    }
    return out;
}

RatioReport check_instance_ratio(const AnnotationSet& original, const AnnotationSet& filtered,
                                 const std::vector<std::string>& known_classes, std::size_t n_all_classes) {
    if (n_all_classes == 0) {
        throw ContractViolation("instance ratio audit needs a non-empty class list");
    }
    auto count_by_name = [](const AnnotationSet& set) {
        std::unordered_map<std::int64_t, std::string> names;
        for (const auto& c : set.categories) {
            names[c.id] = c.name;
        }
        std::map<std::string, std::size_t> counts;
        for (const auto& a : set.annotations) {
            if (const auto it = names.find(a.category_id); it != names.end()) {
                ++counts[it->second];
            }
        }
        return counts;
    };
    const auto before = count_by_name(original);
    const auto after = count_by_name(filtered);

    RatioReport report;
    report.floor = static_cast<double>(known_classes.size()) / static_cast<double>(n_all_classes);
    for (const auto& name : known_classes) {
        InstanceRatio r;
        r.name = name;
        if (const auto it = before.find(name); it != before.end()) {
            r.original = it->second;
        }
        if (const auto it = after.find(name); it != after.end()) {
            r.retained = it->second;
        }
        r.ratio = r.original == 0 ? 0.0 : static_cast<double>(r.retained) / static_cast<double>(r.original);
        r.flagged = r.ratio < report.floor;
        report.classes.push_back(std::move(r));
    }
    return report;
}

TrainValSplit split_train_val(const AnnotationSet& dataset, double val_fraction, std::uint64_t seed) {
    if (!(val_fraction > 0.0 && val_fraction < 1.0)) {
        throw ContractViolation("validation fraction must lie in (0, 1)");
    }
    TrainValSplit split;
    split.train.categories = split.val.categories = dataset.categories;
    split.train.extra = split.val.extra = dataset.extra;
    std::unordered_set<std::int64_t> val_ids;
    for (const auto& img : dataset.images) {
        if (stable_unit_interval(seed, std::to_string(img.id)) < val_fraction) {
            val_ids.insert(img.id);
            split.val.images.push_back(img);
        } else {
            split.train.images.push_back(img);
        }
    }
    for (const auto& ann : dataset.annotations) {
        (val_ids.contains(ann.image_id) ? split.val : split.train).annotations.push_back(ann);
    }
    return split;
}

std::vector<GroundTruthObject> ground_truth_objects(const AnnotationSet& dataset,
                                                    const std::vector<std::string>& known_classes) {
    std::unordered_map<std::string, int> known_index;
    for (std::size_t i = 0; i < known_classes.size(); ++i) {
        known_index[known_classes[i]] = static_cast<int>(i);
    }
    std::unordered_map<std::int64_t, const Category*> categories;
    for (const auto& c : dataset.categories) {
        categories[c.id] = &c;
    }
    std::vector<GroundTruthObject> out;
    out.reserve(dataset.annotations.size());
    for (const auto& ann : dataset.annotations) {
        const auto cat = categories.find(ann.category_id);
        if (cat == categories.end()) {
            throw DataError("annotation " + std::to_string(ann.id) + " references missing category");
        }
        GroundTruthObject g;
        g.image_id = std::to_string(ann.image_id);
        g.bbox = ann.bbox;
        g.label = cat->second->name;
        if (const auto k = known_index.find(g.label); k != known_index.end()) {
            g.class_id = k->second;
            g.known = true;
        } else {
            g.class_id = static_cast<int>(ann.category_id);
            g.known = false;
        }
        out.push_back(std::move(g));
    }
    return out;
}

}  // namespace osgmm
