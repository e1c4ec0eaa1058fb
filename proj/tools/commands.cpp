#include "commands.hpp"

#include "osgmm/dataset.hpp"
#include "osgmm/detection.hpp"
#include "osgmm/errors.hpp"
#include "osgmm/extraction.hpp"
#include "osgmm/gmm.hpp"
#include "osgmm/gmm_io.hpp"
#include "osgmm/hashing.hpp"
#include "osgmm/pipeline.hpp"
#include "osgmm/report.hpp"
#include "osgmm/toy_data.hpp"
#include "osgmm/toy_head.hpp"
#include "osgmm/version.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace osgmm::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json input_entry(const fs::path& path) {
    if (!fs::is_regular_file(path)) {
        throw DataError("input file not found: " + path.string());
    }
    return {{"path", path.string()}, {"sha256", file_sha256(path)}};
}

json provenance(std::string_view command, json parameters, json inputs) {
    return {{"tool", std::string(kToolName)},
            {"version", std::string(kToolVersion)},
            {"command", std::string(command)},
            {"parameters", std::move(parameters)},
            {"inputs", std::move(inputs)}};
}

void ensure_directory(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw DataError("cannot create output directory " + dir.string() + ": " + ec.message());
    }
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    out << text;
    if (!out) {
        throw DataError("write failed for " + path.string());
    }
}

void write_json(const fs::path& path, const json& doc) { write_text(path, doc.dump(1) + "\n"); }

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
    return os.str();
}

std::vector<GroundTruthObject> load_truth(const fs::path& path, const std::vector<std::string>& known_classes) {
    return ground_truth_objects(read_coco(path), known_classes);
}

struct SplitOptions {
    std::string annotations;
    std::string voc_dir;
    std::size_t known_count = 0;
    std::vector<std::string> known_classes;
    double val_fraction = 0.2;
    std::uint64_t seed = 0;
    std::string out_dir;
};

void cmd_split_dataset(const SplitOptions& o) {
    if (o.annotations.empty() == o.voc_dir.empty()) {
        throw ContractViolation("give exactly one of --annotations or --voc-dir");
    }
    if (!(o.val_fraction >= 0.0 && o.val_fraction < 1.0)) {
        throw ContractViolation("--val-fraction must lie in [0, 1)");
    }
    AnnotationSet original;
    json inputs = json::array();
    if (!o.annotations.empty()) {
        inputs.push_back(input_entry(o.annotations));
        original = read_coco(o.annotations);
    } else {
        original = read_voc_directory(o.voc_dir);
        inputs.push_back({{"path", o.voc_dir}, {"sha256", sha256_hex(to_json(original).dump())}});
    }

    const auto all_classes = original.class_names();
    const KnownSpec spec = o.known_classes.empty() ? KnownSpec{o.known_count} : KnownSpec{o.known_classes};
    const ClassSplit split = split_classes(all_classes, spec);
    const AnnotationSet filtered = filter_images(original, split.unknown);
    const RatioReport ratios = check_instance_ratio(original, filtered, split.known, all_classes.size());

    const fs::path out(o.out_dir);
    ensure_directory(out);
    std::size_t n_train = filtered.images.size();
    std::size_t n_val = 0;
    if (o.val_fraction > 0.0) {
        const TrainValSplit tv = split_train_val(filtered, o.val_fraction, o.seed);
        write_coco(tv.train, out / "train.json");
        write_coco(tv.val, out / "val.json");
        n_train = tv.train.images.size();
        n_val = tv.val.images.size();
    } else {
        write_coco(filtered, out / "train.json");
    }

    json ratio_doc = json::array();
    for (const auto& r : ratios.classes) {
        ratio_doc.push_back({{"class", r.name},
                             {"original", r.original},
                             {"retained", r.retained},
                             {"ratio", r.ratio},
                             {"flagged", r.flagged}});
    }
    const json parameters = {{"known_count", o.known_classes.empty() ? json(o.known_count) : json(nullptr)},
                             {"known_classes", o.known_classes},
                             {"val_fraction", o.val_fraction},
                             {"seed", o.seed}};
    json manifest = {{"known", split.known},
                     {"unknown", split.unknown},
                     {"seed", o.seed},
                     {"counts",
                      {{"original_images", original.images.size()},
                       {"retained_images", filtered.images.size()},
                       {"removed_images", original.images.size() - filtered.images.size()},
                       {"train_images", n_train},
                       {"val_images", n_val},
                       {"retained_annotations", filtered.annotations.size()}}},
                     {"instance_ratio", {{"floor", ratios.floor}, {"classes", std::move(ratio_doc)}}},
                     {"provenance", provenance("split-dataset", parameters, inputs)}};
    write_json(out / "manifest.json", manifest);

    std::cout << "known " << split.known.size() << ", unknown " << split.unknown.size() << "; kept "
              << filtered.images.size() << " of " << original.images.size() << " images (" << n_train << " train, "
              << n_val << " val)\n";
    for (const auto& name : ratios.flagged()) {
        std::cerr << "warning: class '" << name << "' keeps fewer instances than the ratio floor "
                  << format_double(ratios.floor) << "\n";
    }
}

struct FitOptions {
    std::string detections;
    std::string ground_truth;
    std::string val_detections;
    std::string val_ground_truth;
    std::vector<int> components{1, 2, 3, 4, 5, 6};
    double theta_iou = kDefaultThetaIou;
    double theta_conf = kDefaultThetaConf;
    int max_iterations = 200;
    double tolerance = 1e-5;
    double regulariser = 1e-6;
    int restarts = 3;
    std::uint64_t seed = 0;
    std::string out;
};

void cmd_fit(const FitOptions& o) {
    EmConfig em;
    em.max_iterations = o.max_iterations;
    em.convergence_tol = o.tolerance;
    em.covariance_regulariser = o.regulariser;
    em.n_restarts = o.restarts;
    em.seed = o.seed;
    em.validate();
    if (o.components.empty()) {
        throw ContractViolation("--components needs at least one count");
    }
    const bool selecting = o.components.size() > 1;
    if (selecting && (o.val_detections.empty() || o.val_ground_truth.empty())) {
        throw ContractViolation("choosing among several component counts needs --val-detections and --val-ground-truth");
    }

    json inputs = json::array({input_entry(o.detections), input_entry(o.ground_truth)});
    const DetectionFile train = read_detection_file(o.detections);
    const int n_classes = static_cast<int>(train.classes.size());
    const LogitSets sets = build_training_logit_sets(train.detections(), load_truth(o.ground_truth, train.classes),
                                                     n_classes, o.theta_iou, o.theta_conf);

    json selection_doc;
    std::optional<GmmSet> models;
    if (selecting) {
        inputs.push_back(input_entry(o.val_detections));
        inputs.push_back(input_entry(o.val_ground_truth));
        const DetectionFile val = read_detection_file(o.val_detections);
        if (val.classes != train.classes) {
            throw DataError("validation detections use a different class list from the training detections");
        }
        const ValidationProxies proxies =
            validation_proxies(val.detections(), load_truth(o.val_ground_truth, val.classes));
        ComponentSelection sel = select_components(o.components, sets.sets, proxies.correct, proxies.misclassified, em);
        json auroc = json::object();
        for (const auto& [count, value] : sel.auroc) {
            auroc[std::to_string(count)] = value;
        }
        json skipped = json::object();
        for (const auto& [count, why] : sel.skipped) {
            skipped[std::to_string(count)] = why;
        }
        selection_doc = {{"selected", sel.selected},
                         {"validation_auroc", std::move(auroc)},
                         {"skipped", std::move(skipped)},
                         {"n_val_correct", proxies.correct.size()},
                         {"n_val_misclassified", proxies.misclassified.size()}};
        models = std::move(sel.selected_models);
    } else {
        models = fit_all(sets.sets, o.components.front(), em);
        selection_doc = {{"selected", o.components.front()}};
    }

    GmmSetMeta meta = models->meta();
    meta.theta_iou = o.theta_iou;
    meta.theta_conf = o.theta_conf;
    meta.class_names = train.classes;
    models->set_meta(meta);

    json set_sizes = json::object();
    for (const auto& [cls, logits] : sets.sets) {
        set_sizes[std::to_string(cls)] = logits.size();
    }
    const json parameters = {{"components", o.components},       {"theta_iou", o.theta_iou},
                             {"theta_conf", o.theta_conf},       {"max_iterations", o.max_iterations},
                             {"tolerance", o.tolerance},         {"regulariser", o.regulariser},
                             {"restarts", o.restarts},           {"seed", o.seed}};
    const json extra = {{"selection", selection_doc},
                        {"training_set_sizes", std::move(set_sizes)},
                        {"provenance", provenance("fit", parameters, inputs)}};
    write_gmm_set(*models, o.out, extra);
    std::cout << "fitted " << models->n_classes() << " class GMMs with " << meta.n_components
              << " component(s) each -> " << o.out << "\n";
}

struct ScoreOptions {
    std::string gmm;
    std::string detections;
    std::optional<double> theta_ose;
    std::string out;
};

void cmd_score(const ScoreOptions& o) {
    const json inputs = json::array({input_entry(o.gmm), input_entry(o.detections)});
    const GmmSet models = read_gmm_set(o.gmm);
    DetectionFile file = read_detection_file(o.detections);
    if (!models.meta().class_names.empty() && models.meta().class_names != file.classes) {
        throw DataError("detections use a different class list from the GMM file");
    }
    file.records = score_detections(models, std::move(file.records), o.theta_ose);

    std::size_t accepted = 0;
    for (const auto& r : file.records) {
        accepted += r.accepted.value_or(false) ? 1 : 0;
    }
    const json parameters = {{"theta_ose", o.theta_ose ? json(*o.theta_ose) : json(nullptr)}};
    json meta = {{"provenance", provenance("score", parameters, inputs)}};
    if (!file.meta.is_null()) {
        meta["source"] = file.meta;
    }
    file.meta = std::move(meta);
    write_detection_file(file, o.out);

    std::cout << "scored " << file.records.size() << " detections";
    if (o.theta_ose) {
        std::cout << "; accepted " << accepted << ", rejected " << file.records.size() - accepted;
    }
    std::cout << " -> " << o.out << "\n";
}

struct EvalOptions {
    std::string detections;
    std::string ground_truth;
    std::vector<std::string> methods{"gmm", "score", "entropy"};
    std::vector<double> osr_levels{kReportedOsrLevels.begin(), kReportedOsrLevels.end()};
    std::string out_dir;
};

void cmd_eval(const EvalOptions& o) {
    const json inputs = json::array({input_entry(o.detections), input_entry(o.ground_truth)});
    const DetectionFile file = read_detection_file(o.detections);
    const auto truth = load_truth(o.ground_truth, file.classes);
    const EvalReport report =
        evaluate(file.records, truth, static_cast<int>(file.classes.size()), o.methods, o.osr_levels);

    const fs::path out(o.out_dir);
    ensure_directory(out);
    json doc = to_json(report);
    doc["provenance"] = provenance("eval", {{"methods", o.methods}, {"osr_levels", o.osr_levels}}, inputs);
    write_json(out / "report.json", doc);
    write_text(out / "metrics.csv", metrics_csv(report));
    for (const auto& m : report.methods) {
        write_text(out / ("roc_" + m.method + ".csv"), roc_csv(m));
    }

    std::cout << "detections " << report.total << ": correct " << report.n_correct << ", closed-set errors "
              << report.n_closed_set << ", open-set errors " << report.n_open_set << "\n";
    for (const auto& m : report.methods) {
        std::cout << m.method << " AUROC " << format_double(m.auroc);
        for (const auto& p : m.operating_points) {
            std::cout << "  TPR@" << format_double(p.level * 100.0) << "%OSR " << format_double(p.tpr);
        }
        std::cout << "\n";
    }
    std::cout << "mAP@0.5 " << format_double(report.map.map_percent) << "%\n";
}

struct TrainToyOptions {
    ToyDataConfig data;
    ToyHeadConfig head;
    std::string loss = "cross_entropy";
    std::uint64_t seed = 0;
    std::string out_dir;
};

void cmd_train_toy(const TrainToyOptions& o) {
    ToyDataConfig data_config = o.data;
    data_config.seed = o.seed;
    ToyHeadConfig head_config = o.head;
    head_config.seed = o.seed;
    head_config.input_dim = data_config.input_dim;
    head_config.n_classes = data_config.n_known;
    if (o.loss == "cross_entropy") {
        head_config.loss = ClassificationLoss::cross_entropy;
    } else if (o.loss == "focal") {
        head_config.loss = ClassificationLoss::focal;
    } else {
        throw ContractViolation("--loss must be cross_entropy or focal");
    }
    data_config.validate();
    head_config.validate();

    const ToyDataset data = make_toy_dataset(data_config);
    const ToyTrainingResult trained = train_toy_head(labelled_inputs(data.train, data_config.n_known), head_config);

    const json parameters = {{"seed", o.seed},
                             {"input_dim", data_config.input_dim},
                             {"n_known", data_config.n_known},
                             {"n_unknown", data_config.n_unknown},
                             {"modes_per_class", data_config.modes_per_class},
                             {"class_spread", data_config.class_spread},
                             {"unknown_spread", data_config.unknown_spread},
                             {"mode_spread", data_config.mode_spread},
                             {"noise", data_config.noise},
                             {"train_per_class", data_config.train_per_class},
                             {"val_per_class", data_config.val_per_class},
                             {"test_per_class", data_config.test_per_class},
                             {"hidden", head_config.hidden_dims},
                             {"lambda", head_config.lambda},
                             {"alpha", head_config.alpha},
                             {"learning_rate", head_config.learning_rate},
                             {"epochs", head_config.epochs},
                             {"batch_size", head_config.batch_size},
                             {"loss", o.loss}};
    const json prov = provenance("train-toy", parameters, json::array());

    const fs::path out(o.out_dir);
    ensure_directory(out);
    std::int64_t next_image = 1;
    const std::vector<std::pair<std::string, const std::vector<ToySample>*>> splits = {
        {"train", &data.train}, {"val", &data.val}, {"test", &data.test}};
    for (const auto& [name, samples] : splits) {
        ToyArtifacts artifacts = toy_artifacts(*samples, trained.head, data, next_image);
        next_image += static_cast<std::int64_t>(samples->size());
        artifacts.detections.meta = {{"split", name}, {"provenance", prov}};
        artifacts.ground_truth.extra["info"] = {{"split", name}, {"provenance", prov}};
        write_detection_file(artifacts.detections, out / (name + "_detections.json"));
        write_coco(artifacts.ground_truth, out / (name + "_gt.json"));
    }

    std::ostringstream curve;
    curve << "epoch,total,classification,anchor\n";
    for (const auto& e : trained.history) {
        curve << e.epoch << ',' << format_double(e.mean_total) << ',' << format_double(e.mean_classification) << ','
              << format_double(e.mean_anchor) << '\n';
    }
    write_text(out / "loss_curve.csv", curve.str());

    const auto& first = trained.history.front();
    const auto& last = trained.history.back();
    std::cout << "trained " << head_config.epochs << " epochs; anchor loss " << format_double(first.mean_anchor)
              << " -> " << format_double(last.mean_anchor) << ", classification loss "
              << format_double(first.mean_classification) << " -> " << format_double(last.mean_classification)
              << "\n";
}

struct ReportOptions {
    std::vector<std::string> reports;
    std::string out;
};

void cmd_report(const ReportOptions& o) {
    std::ostringstream table;
    table << "report,method,auroc";
    bool header_done = false;
    std::ostringstream rows;
    std::vector<double> levels;
    for (const auto& path : o.reports) {
        const json doc = read_json(path);
        try {
            const auto& counts = doc.at("counts");
            const double map = doc.at("map50").at("map_percent").get<double>();
            for (const auto& m : doc.at("methods")) {
                const auto& points = m.at("tpr_at_osr");
                if (!header_done) {
                    for (const auto& p : points) {
                        levels.push_back(p.at("osr_level").get<double>());
                        table << ",tpr_at_" << format_double(levels.back() * 100.0) << "_osr";
                    }
                    table << ",map50_percent,total,correct,closed_set_error,open_set_error\n";
                    header_done = true;
                }
                if (points.size() != levels.size()) {
                    throw DataError(path + ": OSR levels differ from the first report");
                }
                rows << path << ',' << m.at("method").get<std::string>() << ','
                     << format_double(m.at("auroc").get<double>());
                for (std::size_t i = 0; i < points.size(); ++i) {
                    if (points[i].at("osr_level").get<double>() != levels[i]) {
                        throw DataError(path + ": OSR levels differ from the first report");
                    }
                    rows << ',' << format_double(points[i].at("tpr").get<double>());
                }
                rows << ',' << format_double(map) << ',' << counts.at("total").get<std::size_t>() << ','
                     << counts.at("correct").get<std::size_t>() << ','
                     << counts.at("closed_set_error").get<std::size_t>() << ','
                     << counts.at("open_set_error").get<std::size_t>() << '\n';
            }
        } catch (const json::exception& e) {
            throw DataError(path + ": not an evaluation report (" + e.what() + ")");
        }
    }
    if (!header_done) {
        throw DataError("the reports contain no methods");
    }
    const std::string text = table.str() + rows.str();
    if (o.out.empty()) {
        std::cout << text;
    } else {
        write_text(o.out, text);
    }
}

}  // namespace

void register_commands(CLI::App& app) {
    app.require_subcommand(1);
    app.set_config("--config", "", "TOML config file; command-line flags take precedence");

    {
        auto o = std::make_shared<SplitOptions>();
        auto* sub = app.add_subcommand("split-dataset", "Build an open-set split by removing images with unknown objects");
        auto* coco = sub->add_option("--annotations", o->annotations, "COCO-format annotation JSON");
        auto* voc = sub->add_option("--voc-dir", o->voc_dir, "Directory of VOC XML annotation files");
        coco->excludes(voc);
        auto* count = sub->add_option("--known", o->known_count, "Number of leading classes that are known");
        auto* names = sub->add_option("--known-classes", o->known_classes, "Explicit known class names")
                          ->delimiter(',');
        count->excludes(names);
        sub->add_option("--val-fraction", o->val_fraction, "Fraction of retained images moved to val")
            ->capture_default_str();
        sub->add_option("--seed", o->seed, "Seed of the train/val split")->capture_default_str();
        sub->add_option("--out-dir", o->out_dir, "Output directory")->required();
        sub->callback([o] { cmd_split_dataset(*o); });
    }
    {
        auto o = std::make_shared<FitOptions>();
        auto* sub = app.add_subcommand("fit", "Fit per-class GMMs on training logits");
        sub->add_option("--detections", o->detections, "Training detections (interchange JSON)")->required();
        sub->add_option("--ground-truth", o->ground_truth, "Training ground truth (COCO JSON)")->required();
        sub->add_option("--val-detections", o->val_detections, "Validation detections for component selection");
        sub->add_option("--val-ground-truth", o->val_ground_truth, "Validation ground truth (COCO JSON)");
        sub->add_option("--components", o->components, "Candidate component counts")
            ->delimiter(',')
            ->capture_default_str();
        sub->add_option("--theta-iou", o->theta_iou, "IoU threshold for training logits")->capture_default_str();
        sub->add_option("--theta-conf", o->theta_conf, "Score threshold for training logits")->capture_default_str();
        sub->add_option("--max-iterations", o->max_iterations, "EM iteration cap")->capture_default_str();
        sub->add_option("--tolerance", o->tolerance, "EM relative log-likelihood tolerance")->capture_default_str();
        sub->add_option("--regulariser", o->regulariser, "Covariance diagonal regulariser")->capture_default_str();
        sub->add_option("--restarts", o->restarts, "EM restarts per fit")->capture_default_str();
        sub->add_option("--seed", o->seed, "Seed of the EM initialisation")->capture_default_str();
        sub->add_option("--out", o->out, "Output GMM JSON")->required();
        sub->callback([o] { cmd_fit(*o); });
    }
    {
        auto o = std::make_shared<ScoreOptions>();
        auto* sub = app.add_subcommand("score", "Attach GMM log-likelihoods to detections");
        sub->add_option("--gmm", o->gmm, "GMM JSON from fit")->required();
        sub->add_option("--detections", o->detections, "Detections (interchange JSON)")->required();
        sub->add_option("--theta-ose", o->theta_ose, "Reject detections whose max log-likelihood is below this");
        sub->add_option("--out", o->out, "Output scored detections")->required();
        sub->callback([o] { cmd_score(*o); });
    }
    {
        auto o = std::make_shared<EvalOptions>();
        auto* sub = app.add_subcommand("eval", "Categorise detections and compute open-set metrics");
        sub->add_option("--detections", o->detections, "Detections, scored for the gmm method")->required();
        sub->add_option("--ground-truth", o->ground_truth, "Ground truth (COCO JSON) with known and unknown classes")
            ->required();
        sub->add_option("--methods", o->methods, "Uncertainty methods: gmm, score, entropy")
            ->delimiter(',')
            ->capture_default_str();
        sub->add_option("--osr-levels", o->osr_levels, "OSR levels for the TPR operating points")
            ->delimiter(',')
            ->capture_default_str();
        sub->add_option("--out-dir", o->out_dir, "Output directory")->required();
        sub->callback([o] { cmd_eval(*o); });
    }
    {
        auto o = std::make_shared<TrainToyOptions>();
        auto* sub = app.add_subcommand("train-toy", "Train the toy classification head and export its logits");
        sub->add_option("--seed", o->seed, "Seed for data and training")->capture_default_str();
        sub->add_option("--lambda", o->head.lambda, "Anchor loss weight")->capture_default_str();
        sub->add_option("--alpha", o->head.alpha, "Anchor magnitude")->capture_default_str();
        sub->add_option("--learning-rate", o->head.learning_rate, "SGD step size")->capture_default_str();
        sub->add_option("--epochs", o->head.epochs, "Training epochs")->capture_default_str();
        sub->add_option("--batch-size", o->head.batch_size, "Mini-batch size")->capture_default_str();
        sub->add_option("--hidden", o->head.hidden_dims, "Hidden layer sizes")->delimiter(',')->capture_default_str();
        sub->add_option("--loss", o->loss, "Classification loss: cross_entropy or focal")->capture_default_str();
        sub->add_option("--input-dim", o->data.input_dim, "Input dimension")->capture_default_str();
        sub->add_option("--n-known", o->data.n_known, "Known classes")->capture_default_str();
        sub->add_option("--n-unknown", o->data.n_unknown, "Held-out classes")->capture_default_str();
        sub->add_option("--modes", o->data.modes_per_class, "Blobs per class")->capture_default_str();
        sub->add_option("--class-spread", o->data.class_spread, "Spread of known class centres")
            ->capture_default_str();
        sub->add_option("--unknown-spread", o->data.unknown_spread, "Spread of held-out class centres")
            ->capture_default_str();
        sub->add_option("--mode-spread", o->data.mode_spread, "Spread of blobs around their class centre")
            ->capture_default_str();
        sub->add_option("--noise", o->data.noise, "Sample noise")->capture_default_str();
        sub->add_option("--train-per-class", o->data.train_per_class, "Train samples per known class")
            ->capture_default_str();
        sub->add_option("--val-per-class", o->data.val_per_class, "Val samples per known class")
            ->capture_default_str();
        sub->add_option("--test-per-class", o->data.test_per_class, "Test samples per class")->capture_default_str();
        sub->add_option("--out-dir", o->out_dir, "Output directory")->required();
        sub->callback([o] { cmd_train_toy(*o); });
    }
    {
        auto o = std::make_shared<ReportOptions>();
        auto* sub = app.add_subcommand("report", "Tabulate one or more evaluation reports as CSV");
        sub->add_option("reports", o->reports, "report.json files written by eval")->required();
        sub->add_option("--out", o->out, "Write the table here instead of stdout");
        sub->callback([o] { cmd_report(*o); });
    }
}

int run(int argc, char** argv) {
    CLI::App app{"Open-set detection uncertainty with class-conditional GMMs", std::string(kToolName)};
    register_commands(app);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(ErrorKind::validation);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(ErrorKind::data);
    }
    return 0;
}

}  // namespace osgmm::cli
