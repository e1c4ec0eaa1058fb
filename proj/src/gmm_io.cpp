#include "osgmm/gmm_io.hpp"

#include "osgmm/errors.hpp"

#include <fstream>

namespace osgmm {

using nlohmann::json;

json to_json(const GmmSet& models, const json& extra_meta) {
    json doc;
    doc["version"] = kGmmFormatVersion;
    doc["dim"] = models.dim();
    json classes = json::array();
    for (const auto& model : models.models()) {
        json entry;
        entry["class_id"] = model.class_id();
        json weights = json::array();
        json means = json::array();
        json covariances = json::array();
        for (const auto& c : model.components()) {
            weights.push_back(c.weight());
            means.push_back(std::vector<double>(c.mean().data(), c.mean().data() + c.mean().size()));
            json rows = json::array();
            for (Eigen::Index r = 0; r < c.covariance().rows(); ++r) {
                std::vector<double> row(static_cast<std::size_t>(c.covariance().cols()));
                for (Eigen::Index k = 0; k < c.covariance().cols(); ++k) {
                    row[static_cast<std::size_t>(k)] = c.covariance()(r, k);
                }
                rows.push_back(std::move(row));
            }
            covariances.push_back(std::move(rows));
        }
        entry["weights"] = std::move(weights);
        entry["means"] = std::move(means);
        entry["covariances"] = std::move(covariances);
        entry["fit"] = {{"log_likelihood", model.fit_stats().log_likelihood},
                        {"iterations", model.fit_stats().iterations},
                        {"converged", model.fit_stats().converged},
                        {"restart", model.fit_stats().restart}};
        classes.push_back(std::move(entry));
    }
    doc["classes"] = std::move(classes);

    json meta = extra_meta.is_object() ? extra_meta : json::object();
    meta["theta_iou"] = models.meta().theta_iou;
    meta["theta_conf"] = models.meta().theta_conf;
    meta["n_components"] = models.meta().n_components;
    meta["class_names"] = models.meta().class_names;
    doc["meta"] = std::move(meta);
    return doc;
}

GmmSet gmm_set_from_json(const json& doc) {
    try {
        if (doc.at("version").get<int>() != kGmmFormatVersion) {
            throw DataError("unsupported GMM file version");
        }
        const int dim = doc.at("dim").get<int>();
        std::vector<ClassGmm> models;
        for (const auto& entry : doc.at("classes")) {
            const ClassId id = entry.at("class_id").get<int>();
            const auto weights = entry.at("weights").get<std::vector<double>>();
            const auto& means = entry.at("means");
            const auto& covs = entry.at("covariances");
            if (means.size() != weights.size() || covs.size() != weights.size()) {
                throw DataError("class " + std::to_string(id) + ": weights, means and covariances disagree in count");
            }
            std::vector<GaussianComponent> components;
            for (std::size_t j = 0; j < weights.size(); ++j) {
                const auto mean_values = means[j].get<std::vector<double>>();
                const auto cov_rows = covs[j].get<std::vector<std::vector<double>>>();
                if (static_cast<int>(mean_values.size()) != dim || static_cast<int>(cov_rows.size()) != dim) {
                    throw DataError("class " + std::to_string(id) + ": component " + std::to_string(j) +
                                    " has the wrong dimension");
                }
                Eigen::VectorXd mean = Eigen::Map<const Eigen::VectorXd>(mean_values.data(), dim);
                Eigen::MatrixXd cov(dim, dim);
                for (int r = 0; r < dim; ++r) {
                    if (static_cast<int>(cov_rows[static_cast<std::size_t>(r)].size()) != dim) {
                        throw DataError("class " + std::to_string(id) + ": ragged covariance");
                    }
                    for (int k = 0; k < dim; ++k) {
                        cov(r, k) = cov_rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)];
                    }
                }
                components.emplace_back(std::move(mean), std::move(cov), weights[j]);
            }
            FitStats stats;
            if (entry.contains("fit")) {
                const auto& fit = entry.at("fit");
                stats.log_likelihood = fit.value("log_likelihood", 0.0);
                stats.iterations = fit.value("iterations", 0);
                stats.converged = fit.value("converged", false);
                stats.restart = fit.value("restart", 0);
            }
            models.emplace_back(id, std::move(components), std::move(stats));
        }
        GmmSetMeta meta;
        if (doc.contains("meta")) {
            const auto& m = doc.at("meta");
            meta.theta_iou = m.value("theta_iou", meta.theta_iou);
            meta.theta_conf = m.value("theta_conf", meta.theta_conf);
            meta.n_components = m.value("n_components", meta.n_components);
            meta.class_names = m.value("class_names", std::vector<std::string>{});
        }
        GmmSet set(std::move(models), std::move(meta));
        if (set.dim() != dim) {
            throw DataError("GMM file declares dim " + std::to_string(dim) + " but models have " +
                            std::to_string(set.dim()));
        }
        return set;
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed GMM file: ") + e.what());
    } catch (const ContractViolation& e) {
        throw DataError(std::string("invalid GMM file: ") + e.what());
    }
}

void write_gmm_set(const GmmSet& models, const std::filesystem::path& path, const json& extra_meta) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    out << to_json(models, extra_meta).dump(1) << '\n';
}

GmmSet read_gmm_set(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open GMM file " + path.string());
    }
    try {
        return gmm_set_from_json(json::parse(in));
    } catch (const json::parse_error& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

}  // namespace osgmm
