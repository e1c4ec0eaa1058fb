#include "osgmm/detection.hpp"

#include "osgmm/errors.hpp"

#include <cmath>
#include <fstream>

namespace osgmm {

using nlohmann::json;

std::string_view to_string(Normalisation mode) {
    return mode == Normalisation::softmax ? "softmax" : "sigmoid";
}

Normalisation parse_normalisation(std::string_view text) {
    if (text == "softmax") {
        return Normalisation::softmax;
    }
    if (text == "sigmoid") {
        return Normalisation::sigmoid;
    }
    throw DataError("unknown normalisation '" + std::string(text) + "' (expected softmax or sigmoid)");
}

Eigen::VectorXd normalise_scores(const Eigen::Ref<const Eigen::VectorXd>& logits, Normalisation mode) {
    if (!logits.allFinite()) {
        throw ContractViolation("cannot normalise non-finite logits");
    }
    if (mode == Normalisation::softmax) {
        Eigen::VectorXd e = (logits.array() - logits.maxCoeff()).exp();
        return e / e.sum();
    }
    Eigen::VectorXd out(logits.size());
    for (Eigen::Index i = 0; i < logits.size(); ++i) {
        const double z = logits[i];
        // Split by sign so exp never overflows.
        out[i] = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
    }
    return out;
}

ClassId argmax_lowest(const Eigen::Ref<const Eigen::VectorXd>& values) {
    if (values.size() == 0) {
        throw ContractViolation("argmax of an empty vector");
    }
    ClassId best = 0;
    for (Eigen::Index i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) {
            best = static_cast<ClassId>(i);
        }
    }
    return best;
}

Detection Detection::from_logits(std::string image_id, Box bbox, LogitVector logits, Normalisation mode) {
    require_valid(bbox, "detection");
    Detection d;
    d.image_id = std::move(image_id);
    d.bbox = bbox;
    d.scores = normalise_scores(logits, mode);
    d.logits = std::move(logits);
    d.predicted_class = argmax_lowest(d.scores);
    return d;
}

std::vector<Detection> DetectionFile::detections() const {
    std::vector<Detection> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        out.push_back(r.detection);
    }
    return out;
}

namespace {

Eigen::VectorXd vector_from_json(const json& arr, const std::string& what) {
    if (!arr.is_array()) {
        throw DataError(what + " must be an array");
    }
    Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_number()) {
            throw DataError(what + " must contain numbers");
        }
        v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
    }
    return v;
}

json vector_to_json(const Eigen::VectorXd& v) {
    return json(std::vector<double>(v.data(), v.data() + v.size()));
}

std::string image_id_from_json(const json& value) {
    if (value.is_string()) {
        return value.get<std::string>();
    }
    if (value.is_number_integer()) {
        return std::to_string(value.get<std::int64_t>());
    }
    throw DataError("image_id must be a string or integer");
}

}  // namespace

DetectionFile detection_file_from_json(const json& doc) {
    try {
        if (doc.value("version", 0) != DetectionFile::kVersion) {
            throw DataError("unsupported detection file version");
        }
        DetectionFile file;
        file.normalisation = parse_normalisation(doc.at("normalisation").get<std::string>());
        file.classes = doc.at("classes").get<std::vector<std::string>>();
        if (file.classes.empty()) {
            throw DataError("detection file lists no classes");
        }
        if (doc.contains("meta")) {
            file.meta = doc.at("meta");
        }
        const auto n = static_cast<Eigen::Index>(file.classes.size());
        const auto& dets = doc.at("detections");
        file.records.reserve(dets.size());
        for (std::size_t i = 0; i < dets.size(); ++i) {
            const json& item = dets[i];
            const std::string where = "detection " + std::to_string(i);
            const auto& b = item.at("bbox");
            if (!b.is_array() || b.size() != 4) {
                throw DataError(where + ": bbox must be [x1, y1, x2, y2]");
            }
            Box box{b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()};
            if (!box.valid()) {
                throw DataError(where + ": degenerate bbox");
            }
            LogitVector logits = vector_from_json(item.at("logits"), where + " logits");
            if (logits.size() != n) {
                throw DataError(where + ": expected " + std::to_string(n) + " logits, found " +
                                std::to_string(logits.size()));
            }
            if (!logits.allFinite()) {
                throw DataError(where + ": non-finite logits");
            }
            DetectionRecord record{Detection::from_logits(image_id_from_json(item.at("image_id")), box,
                                                          std::move(logits), file.normalisation),
                                   std::nullopt, std::nullopt};
            if (item.contains("scores")) {
                const Eigen::VectorXd recorded = vector_from_json(item.at("scores"), where + " scores");
                if (recorded.size() != n) {
                    throw DataError(where + ": score vector has the wrong length");
                }
                const double gap = (recorded - record.detection.scores).cwiseAbs().maxCoeff();
                if (gap > kScoreConsistencyTol) {
                    throw DataError(where + ": recorded scores differ from normalised logits by " +
                                    std::to_string(gap));
                }
            }
            if (item.contains("gmm")) {
                const json& g = item.at("gmm");
                UncertaintyVector u;
                u.log_likelihoods = vector_from_json(g.at("loglik"), where + " loglik");
                if (u.log_likelihoods.size() != n) {
                    throw DataError(where + ": loglik vector has the wrong length");
                }
                u.max_loglik = u.log_likelihoods.maxCoeff();
                u.argmax_class = argmax_lowest(u.log_likelihoods);
                record.uncertainty = std::move(u);
            }
            if (item.contains("accepted")) {
                record.accepted = item.at("accepted").get<bool>();
            }
            file.records.push_back(std::move(record));
        }
        return file;
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed detection file: ") + e.what());
    }
}

json to_json(const DetectionFile& file) {
    json doc;
    doc["version"] = DetectionFile::kVersion;
    doc["normalisation"] = std::string(to_string(file.normalisation));
    doc["classes"] = file.classes;
    json dets = json::array();
    for (const auto& r : file.records) {
        const Detection& d = r.detection;
        json item;
        item["image_id"] = d.image_id;
        item["bbox"] = {d.bbox.x_min, d.bbox.y_min, d.bbox.x_max, d.bbox.y_max};
        item["logits"] = vector_to_json(d.logits);
        item["scores"] = vector_to_json(d.scores);
        if (r.uncertainty) {
            item["gmm"] = {{"loglik", vector_to_json(r.uncertainty->log_likelihoods)},
                           {"max_loglik", r.uncertainty->max_loglik},
                           {"argmax_class", r.uncertainty->argmax_class},
                           {"class_mismatch", r.uncertainty->argmax_class != d.predicted_class}};
        }
        if (r.accepted) {
            item["accepted"] = *r.accepted;
        }
        dets.push_back(std::move(item));
    }
    doc["detections"] = std::move(dets);
    if (!file.meta.is_null()) {
        doc["meta"] = file.meta;
    }
    return doc;
}

DetectionFile read_detection_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open detection file " + path.string());
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }
    return detection_file_from_json(doc);
}

void write_detection_file(const DetectionFile& file, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    out << to_json(file).dump(1) << '\n';
}

}  // namespace osgmm
