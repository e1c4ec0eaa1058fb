#include "osgmm/report.hpp"

#include "osgmm/errors.hpp"
#include "osgmm/extraction.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

namespace osgmm {

using nlohmann::json;

namespace {

std::string format_double(double v) {
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    std::ostringstream os;
    os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
    return os.str();
}

std::string percent_label(double level) {
    std::ostringstream os;
    os << std::lround(level * 100.0);
    return os.str();
}

json number_or_string(double v) {
    if (std::isfinite(v)) {
        return v;
    }
    return format_double(v);
}

}  // namespace

double method_confidence(const DetectionRecord& record, std::string_view method) {
    if (method == "gmm") {
        if (!record.uncertainty) {
            throw DataError("method 'gmm' needs scored detections (run the score command first)");
        }
        return record.uncertainty->max_loglik;
    }
    if (method == "score") {
        return baseline_uncertainties(record.detection).score;
    }
    if (method == "entropy") {
        return baseline_uncertainties(record.detection).entropy_confidence;
    }
    throw ContractViolation("unknown uncertainty method '" + std::string(method) + "'");
}

EvalReport evaluate(const std::vector<DetectionRecord>& records, const std::vector<GroundTruthObject>& ground_truth,
                    int n_classes, const std::vector<std::string>& methods, std::span<const double> osr_levels) {
    if (methods.empty()) {
        throw ContractViolation("evaluation needs at least one uncertainty method");
    }
    std::vector<Detection> detections;
    detections.reserve(records.size());
    for (const auto& r : records) {
        detections.push_back(r.detection);
    }

    EvalReport report;
    report.total = records.size();
    report.categorised = categorise(detections, ground_truth);
    for (const auto& c : report.categorised) {
        switch (c.category) {
            case DetectionCategory::correct:
                ++report.n_correct;
                break;
            case DetectionCategory::closed_set_error:
                ++report.n_closed_set;
                break;
            case DetectionCategory::open_set_error:
                ++report.n_open_set;
                break;
        }
    }
    if (report.n_correct == 0) {
        throw DataError("no correct detections to evaluate");
    }
    if (report.n_open_set == 0) {
        throw DataError("no open-set errors among the detections; open-set metrics are undefined");
    }

    for (const auto& method : methods) {
        std::vector<double> correct;
        std::vector<double> open_set;
        for (auto& c : report.categorised) {
            const double confidence = method_confidence(records[c.detection_index], method);
            c.uncertainty_scores[method] = confidence;
            if (c.category == DetectionCategory::correct) {
                correct.push_back(confidence);
            } else if (c.category == DetectionCategory::open_set_error) {
                open_set.push_back(confidence);
            }
        }
        MethodReport m;
        m.method = method;
        m.curve = roc_curve(correct, open_set);
        m.auroc = auroc(m.curve);
        m.operating_points = tpr_at_osr(m.curve, osr_levels);
        report.methods.push_back(std::move(m));
    }

    bool all_scored = !records.empty();
    for (const auto& r : records) {
        all_scored = all_scored && r.uncertainty.has_value();
    }
    if (all_scored) {
        MismatchDiagnostic diag;
        for (const auto& c : report.categorised) {
            const auto& r = records[c.detection_index];
            const bool flagged = flag_class_mismatch(r.detection, *r.uncertainty);
            if (c.category == DetectionCategory::correct) {
                ++diag.total_correct;
                diag.flagged_correct += flagged ? 1 : 0;
            } else {
                ++diag.total_errors;
                diag.flagged_errors += flagged ? 1 : 0;
            }
        }
        report.mismatch = diag;
    }

    report.map = map_at_iou(detections, ground_truth, n_classes);
    return report;
}

json to_json(const EvalReport& report) {
    json doc;
    doc["counts"] = {{"total", report.total},
                     {"correct", report.n_correct},
                     {"closed_set_error", report.n_closed_set},
                     {"open_set_error", report.n_open_set}};
    json methods = json::array();
    for (const auto& m : report.methods) {
        json points = json::array();
        for (const auto& p : m.operating_points) {
            points.push_back({{"osr_level", p.level},
                              {"tpr", p.tpr},
                              {"osr", p.osr},
                              {"threshold", number_or_string(p.threshold)},
                              {"tp_count", p.tp_count},
                              {"ose_count", p.ose_count}});
        }
        methods.push_back({{"method", m.method}, {"auroc", m.auroc}, {"tpr_at_osr", std::move(points)}});
    }
    doc["methods"] = std::move(methods);
    json ap = json::object();
    for (const auto& [cls, value] : report.map.ap) {
        ap[std::to_string(cls)] = value;
    }
    doc["map50"] = {{"map_percent", report.map.map_percent}, {"ap", std::move(ap)}, {"excluded", report.map.excluded}};
    if (report.mismatch) {
        const auto& d = *report.mismatch;
        const std::size_t flagged = d.flagged_correct + d.flagged_errors;
        doc["class_mismatch"] = {
            {"flagged_correct", d.flagged_correct},
            {"flagged_errors", d.flagged_errors},
            {"rate_among_correct", d.total_correct ? double(d.flagged_correct) / double(d.total_correct) : 0.0},
            {"rate_among_errors", d.total_errors ? double(d.flagged_errors) / double(d.total_errors) : 0.0},
            {"error_fraction_of_flagged", flagged ? double(d.flagged_errors) / double(flagged) : 0.0}};
    }
    return doc;
}

std::string metrics_csv(const EvalReport& report) {
    std::ostringstream os;
    os << "method,metric,value\n";
    for (const auto& m : report.methods) {
        os << m.method << ",auroc," << format_double(m.auroc) << '\n';
        for (const auto& p : m.operating_points) {
            const std::string tag = percent_label(p.level);
            os << m.method << ",tpr_at_" << tag << "_osr," << format_double(p.tpr) << '\n';
            os << m.method << ",tp_count_at_" << tag << "_osr," << p.tp_count << '\n';
            os << m.method << ",ose_count_at_" << tag << "_osr," << p.ose_count << '\n';
        }
    }
    os << "all,map50_percent," << format_double(report.map.map_percent) << '\n';
    os << "all,total," << report.total << '\n';
    os << "all,correct," << report.n_correct << '\n';
    os << "all,closed_set_error," << report.n_closed_set << '\n';
    os << "all,open_set_error," << report.n_open_set << '\n';
    return os.str();
}

std::string roc_csv(const MethodReport& method) {
    std::ostringstream os;
    os << "threshold,tpr,osr,tp_count,ose_count\n";
    for (const auto& p : method.curve.points) {
        os << format_double(p.threshold) << ',' << format_double(p.tpr) << ',' << format_double(p.osr) << ','
           << p.tp_count << ',' << p.ose_count << '\n';
    }
    return os.str();
}

}  // namespace osgmm
