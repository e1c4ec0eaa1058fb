#include "osgmm/metrics.hpp"

#include "osgmm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <unordered_map>

namespace osgmm {

namespace {

// Detection indices sorted by descending max score; equal scores keep input order.
std::vector<std::size_t> score_order(const std::vector<Detection>& detections) {
    std::vector<std::size_t> order(detections.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return detections[a].max_score() > detections[b].max_score();
    });
    return order;
}

std::unordered_map<std::string, std::vector<std::size_t>> index_by_image(
    const std::vector<GroundTruthObject>& ground_truth) {
    std::unordered_map<std::string, std::vector<std::size_t>> by_image;
    for (std::size_t i = 0; i < ground_truth.size(); ++i) {
        by_image[ground_truth[i].image_id].push_back(i);
    }
    return by_image;
}

void check_scores(std::span<const double> scores, const char* name) {
    for (const double s : scores) {
        if (std::isnan(s)) {
            throw DataError(std::string("NaN in ") + name + " scores");
        }
    }
}

}  // namespace

void require_valid(const Box& box, const std::string& context) {
    if (!box.valid()) {
        throw ContractViolation(context + ": degenerate box [" + std::to_string(box.x_min) + ", " +
                                std::to_string(box.y_min) + ", " + std::to_string(box.x_max) + ", " +
                                std::to_string(box.y_max) + "]");
    }
}

double iou(const Box& a, const Box& b) {
    require_valid(a, "iou");
    require_valid(b, "iou");
    const double w = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
    const double h = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
    if (w <= 0.0 || h <= 0.0) {
        return 0.0;
    }
    const double inter = w * h;
    return inter / (a.area() + b.area() - inter);
}

std::string_view to_string(DetectionCategory category) {
    switch (category) {
        case DetectionCategory::correct:
            return "correct";
        case DetectionCategory::closed_set_error:
            return "closed_set_error";
        case DetectionCategory::open_set_error:
            return "open_set_error";
    }
    return "unknown";
}

std::vector<CategorisedDetection> categorise(const std::vector<Detection>& detections,
                                             const std::vector<GroundTruthObject>& ground_truth,
                                             double iou_threshold) {
    const auto by_image = index_by_image(ground_truth);
    std::vector<bool> claimed(ground_truth.size(), false);
    std::vector<CategorisedDetection> out(detections.size());

    for (const std::size_t d : score_order(detections)) {
        const Detection& det = detections[d];
        CategorisedDetection& result = out[d];
        result.detection_index = d;

        std::optional<std::size_t> best;
        double best_iou = -1.0;
        if (const auto it = by_image.find(det.image_id); it != by_image.end()) {
            for (const std::size_t g : it->second) {
                if (claimed[g]) {
                    continue;
                }
                const double overlap = iou(det.bbox, ground_truth[g].bbox);
                if (overlap >= iou_threshold && overlap > best_iou) {
                    best_iou = overlap;
                    best = g;
                }
            }
        }
        if (!best) {
            result.category = DetectionCategory::closed_set_error;
            continue;
        }
        result.matched_gt = best;
        result.matched_iou = best_iou;
        const GroundTruthObject& truth = ground_truth[*best];
        if (!truth.known) {
            result.category = DetectionCategory::open_set_error;
        } else if (truth.class_id == det.predicted_class) {
            result.category = DetectionCategory::correct;
            claimed[*best] = true;
        } else {
            result.category = DetectionCategory::closed_set_error;
        }
    }
    return out;
}

RocCurve roc_curve(std::span<const double> correct_scores, std::span<const double> ose_scores) {
    if (correct_scores.empty() || ose_scores.empty()) {
        throw DataError("ROC curve needs at least one correct and one open-set detection");
    }
    check_scores(correct_scores, "correct");
    check_scores(ose_scores, "open-set");

    std::vector<double> pos(correct_scores.begin(), correct_scores.end());
    std::vector<double> neg(ose_scores.begin(), ose_scores.end());
    std::sort(pos.begin(), pos.end());
    std::sort(neg.begin(), neg.end());

    std::vector<double> thresholds;
    thresholds.reserve(pos.size() + neg.size());
    std::merge(pos.begin(), pos.end(), neg.begin(), neg.end(), std::back_inserter(thresholds));
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

    RocCurve curve;
    curve.n_correct = pos.size();
    curve.n_ose = neg.size();
    const auto np = static_cast<double>(pos.size());
    const auto nn = static_cast<double>(neg.size());
    curve.points.reserve(thresholds.size() + 1);
    curve.points.push_back({-std::numeric_limits<double>::infinity(), 1.0, 1.0, pos.size(), neg.size()});

    // Both lists are sorted, so the counts strictly above each threshold fall out of two cursors.
    std::size_t ip = 0;
    std::size_t in = 0;
    for (const double t : thresholds) {
        while (ip < pos.size() && pos[ip] <= t) {
            ++ip;
        }
        while (in < neg.size() && neg[in] <= t) {
            ++in;
        }
        const std::size_t tp = pos.size() - ip;
        const std::size_t fp = neg.size() - in;
        curve.points.push_back({t, static_cast<double>(tp) / np, static_cast<double>(fp) / nn, tp, fp});
    }
    return curve;
}

double auroc(const RocCurve& curve) {
    if (curve.points.size() < 2 || curve.n_correct == 0 || curve.n_ose == 0) {
        throw ContractViolation("AUROC needs a curve with at least two points");
    }
    // Twice the area in count units, kept integral so rational results are exact.
    std::uint64_t twice_area = 0;
    for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
        const auto& a = curve.points[i];
        const auto& b = curve.points[i + 1];
        twice_area += static_cast<std::uint64_t>(a.ose_count - b.ose_count) * (a.tp_count + b.tp_count);
    }
    const auto& last = curve.points.back();
    twice_area += static_cast<std::uint64_t>(last.ose_count) * last.tp_count;  // close to (0, 0)
    return static_cast<double>(twice_area) /
           (2.0 * static_cast<double>(curve.n_correct) * static_cast<double>(curve.n_ose));
}

std::vector<OperatingPoint> tpr_at_osr(const RocCurve& curve, std::span<const double> levels) {
    std::vector<OperatingPoint> out;
    out.reserve(levels.size());
    for (const double level : levels) {
        if (!(level > 0.0 && level < 1.0)) {
            throw ContractViolation("OSR level must lie in (0, 1), got " + std::to_string(level));
        }
        const RocPoint* best = nullptr;
        for (const auto& p : curve.points) {
            if (p.osr > level) {
                continue;
            }
            if (best == nullptr || p.tpr > best->tpr || (p.tpr == best->tpr && p.osr < best->osr)) {
                best = &p;
            }
        }
        if (best == nullptr) {
            throw ContractViolation("ROC curve has no point at or below the requested OSR");
        }
        out.push_back({level, best->tpr, best->osr, best->threshold, best->tp_count, best->ose_count});
    }
    return out;
}

double average_precision(const std::vector<bool>& ranked_hits, std::size_t n_truths) {
    if (n_truths == 0) {
        throw ContractViolation("average precision needs at least one ground-truth instance");
    }
    const std::size_t n = ranked_hits.size();
    if (n == 0) {
        return 0.0;
    }
    std::vector<double> precision(n);
    std::vector<double> recall(n);
    std::size_t tp = 0;
    for (std::size_t i = 0; i < n; ++i) {
        tp += ranked_hits[i] ? 1 : 0;
        precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
        recall[i] = static_cast<double>(tp) / static_cast<double>(n_truths);
    }
    // Precision envelope: best precision at any recall at or beyond this rank.
    for (std::size_t i = n - 1; i-- > 0;) {
        precision[i] = std::max(precision[i], precision[i + 1]);
    }
    double ap = 0.0;
    double previous_recall = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (recall[i] > previous_recall) {
            ap += (recall[i] - previous_recall) * precision[i];
            previous_recall = recall[i];
        }
    }
    return ap;
}

MapResult map_at_iou(const std::vector<Detection>& detections, const std::vector<GroundTruthObject>& ground_truth,
                     int n_classes, double iou_threshold) {
    MapResult result;
    const auto order = score_order(detections);
    double sum = 0.0;
    for (ClassId c = 0; c < n_classes; ++c) {
        std::unordered_map<std::string, std::vector<std::size_t>> truths;
        std::size_t n_truths = 0;
        for (std::size_t g = 0; g < ground_truth.size(); ++g) {
            if (ground_truth[g].known && ground_truth[g].class_id == c) {
                truths[ground_truth[g].image_id].push_back(g);
                ++n_truths;
            }
        }
        if (n_truths == 0) {
            result.excluded.push_back(c);
            continue;
        }
        std::vector<bool> matched(ground_truth.size(), false);
        std::vector<bool> hits;
        for (const std::size_t d : order) {
            const Detection& det = detections[d];
            if (det.predicted_class != c) {
                continue;
            }
            std::optional<std::size_t> best;
            double best_iou = -1.0;
            if (const auto it = truths.find(det.image_id); it != truths.end()) {
                for (const std::size_t g : it->second) {
                    const double overlap = iou(det.bbox, ground_truth[g].bbox);
                    if (overlap > best_iou) {
                        best_iou = overlap;
                        best = g;
                    }
                }
            }
            const bool hit = best && best_iou >= iou_threshold && !matched[*best];
            if (hit) {
                matched[*best] = true;
            }
            hits.push_back(hit);
        }
        const double ap = average_precision(hits, n_truths);
        result.ap[c] = ap;
        sum += ap;
    }
    if (!result.ap.empty()) {
        result.map_percent = 100.0 * sum / static_cast<double>(result.ap.size());
    }
    return result;
}

BaselineScores baseline_uncertainties(const Detection& detection) {
    if (detection.scores.size() == 0) {
        throw ContractViolation("baseline uncertainties need a non-empty score vector");
    }
    BaselineScores out;
    out.score = detection.scores.maxCoeff();
    const double total = detection.scores.sum();
    if (!(total > 0.0)) {
        throw DataError("class scores sum to zero");
    }
    double h = 0.0;
    for (Eigen::Index i = 0; i < detection.scores.size(); ++i) {
        const double p = detection.scores[i] / total;
        if (p > 0.0) {
            h -= p * std::log(p);
        }
    }
    out.entropy = h;
    out.entropy_confidence = -h;
    return out;
}

}  // namespace osgmm
