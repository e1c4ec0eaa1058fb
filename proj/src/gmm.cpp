#include "osgmm/gmm.hpp"

#include "osgmm/errors.hpp"
#include "osgmm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <string>

namespace osgmm {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;  // log(2 pi)
constexpr double kSymmetryTol = 1e-9;
constexpr double kWeightSumTol = 1e-9;

std::string component_label(int j) { return "component " + std::to_string(j); }

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream_a, std::uint64_t stream_b) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream_a), static_cast<std::uint32_t>(stream_b)};
    return std::mt19937_64(seq);
}

double log_sum_exp(const Eigen::Ref<const Eigen::VectorXd>& v) {
    const double m = v.maxCoeff();
    if (!std::isfinite(m)) {
        return m;
    }
    return m + std::log((v.array() - m).exp().sum());
}

struct EmRun {
    std::vector<GaussianComponent> components;
    FitStats stats;
};

// k-means++ seeding: first mean uniform, the rest drawn proportional to squared
// distance from the nearest mean already chosen.
Eigen::MatrixXd seed_means(const Eigen::MatrixXd& x, int k, std::mt19937_64& rng) {
    const Eigen::Index n = x.cols();
    Eigen::MatrixXd means(x.rows(), k);
    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    means.col(0) = x.col(pick(rng));

    Eigen::VectorXd nearest = (x.colwise() - means.col(0)).colwise().squaredNorm().transpose();
    for (int j = 1; j < k; ++j) {
        const double total = nearest.sum();
        Eigen::Index chosen = 0;
        if (total > 0.0 && std::isfinite(total)) {
            std::uniform_real_distribution<double> u(0.0, total);
            const double target = u(rng);
            double acc = 0.0;
            chosen = n - 1;
            for (Eigen::Index i = 0; i < n; ++i) {
                acc += nearest[i];
                if (acc >= target && nearest[i] > 0.0) {
                    chosen = i;
                    break;
                }
            }
        } else {
            chosen = pick(rng);
        }
        means.col(j) = x.col(chosen);
        nearest = nearest.cwiseMin((x.colwise() - means.col(j)).colwise().squaredNorm().transpose());
    }
    return means;
}

Eigen::MatrixXd regularised(Eigen::MatrixXd cov, double reg) {
    cov = 0.5 * (cov + cov.transpose());
    cov.diagonal().array() += reg;
    return cov;
}

GaussianComponent make_component(Eigen::VectorXd mean, Eigen::MatrixXd cov, double weight, int j) {
    try {
        return GaussianComponent(std::move(mean), std::move(cov), weight);
    } catch (const NumericalError& e) {
        throw NumericalError(component_label(j) + ": " + e.what());
    }
}

EmRun run_em(const Eigen::MatrixXd& x, int k, const EmConfig& config, std::mt19937_64& rng) {
    const Eigen::Index n = x.cols();
    const double reg = config.covariance_regulariser;

    const Eigen::VectorXd sample_mean = x.rowwise().mean();
    const Eigen::MatrixXd centred = x.colwise() - sample_mean;
    const Eigen::MatrixXd sample_cov = regularised(centred * centred.transpose() / static_cast<double>(n), reg);

    const Eigen::MatrixXd init_means = seed_means(x, k, rng);
    std::vector<GaussianComponent> components;
    components.reserve(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) {
        components.push_back(make_component(init_means.col(j), sample_cov, 1.0 / k, j));
    }

    Eigen::MatrixXd log_resp(k, n);
    Eigen::MatrixXd resp(k, n);
    FitStats stats;
    int iteration = 0;
    double previous = -std::numeric_limits<double>::infinity();

    while (true) {
        // E-step
        for (int j = 0; j < k; ++j) {
            const auto& c = components[static_cast<std::size_t>(j)];
            log_resp.row(j) = (std::log(c.weight()) + c.log_normaliser()) - 0.5 * c.squared_mahalanobis(x).array();
        }
        double total = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double lse = log_sum_exp(log_resp.col(i));
            if (std::isfinite(lse)) {
                resp.col(i) = (log_resp.col(i).array() - lse).exp();
                total += lse;
            } else {
                // Every responsibility underflowed: hand the point to the nearest mean.
                int nearest = 0;
                double best = std::numeric_limits<double>::infinity();
                for (int j = 0; j < k; ++j) {
                    const double dist = (x.col(i) - components[static_cast<std::size_t>(j)].mean()).squaredNorm();
                    if (dist < best) {
                        best = dist;
                        nearest = j;
                    }
                }
                resp.col(i).setZero();
                resp(nearest, i) = 1.0;
                total += log_resp(nearest, i);
            }
        }
        stats.trace.push_back(total);

        if (iteration > 0) {
            const double improvement = total - previous;
            if (improvement < config.convergence_tol * std::abs(previous)) {
                stats.converged = true;
                break;
            }
        }
        if (iteration >= config.max_iterations) {
            break;
        }
        previous = total;

        // M-step
        std::vector<GaussianComponent> updated;
        updated.reserve(static_cast<std::size_t>(k));
        for (int j = 0; j < k; ++j) {
            const Eigen::VectorXd r = resp.row(j).transpose();
            const double nk = r.sum();
            if (!(nk > std::numeric_limits<double>::epsilon() * static_cast<double>(n))) {
                throw NumericalError(component_label(j) + ": collapsed (no responsibility mass)");
            }
            const Eigen::VectorXd mean = x * r / nk;
            const Eigen::MatrixXd diff = x.colwise() - mean;
            const Eigen::MatrixXd weighted = diff.array().rowwise() * r.transpose().array();
            Eigen::MatrixXd cov = regularised(weighted * diff.transpose() / nk, reg);
            updated.push_back(make_component(mean, std::move(cov), nk / static_cast<double>(n), j));
        }
        components = std::move(updated);
        ++iteration;
    }

    stats.iterations = iteration;
    stats.log_likelihood = stats.trace.back();
    return {std::move(components), std::move(stats)};
}

}  // namespace

void EmConfig::validate() const {
    if (max_iterations < 1) {
        throw ContractViolation("EM max_iterations must be >= 1");
    }
    if (!(convergence_tol > 0.0)) {
        throw ContractViolation("EM convergence_tol must be > 0");
    }
    if (!(covariance_regulariser >= 0.0)) {
        throw ContractViolation("EM covariance_regulariser must be >= 0");
    }
    if (n_restarts < 1) {
        throw ContractViolation("EM n_restarts must be >= 1");
    }
}

GaussianComponent::GaussianComponent(Eigen::VectorXd mean, Eigen::MatrixXd covariance, double weight)
    : mean_(std::move(mean)), covariance_(std::move(covariance)), weight_(weight) {
    const Eigen::Index d = mean_.size();
    if (d == 0 || covariance_.rows() != d || covariance_.cols() != d) {
        throw ContractViolation("Gaussian component: mean/covariance dimension mismatch");
    }
    if (!(weight_ > 0.0) || weight_ > 1.0 + kWeightSumTol) {
        throw ContractViolation("Gaussian component: weight must lie in (0, 1], got " + std::to_string(weight_));
    }
    if (!mean_.allFinite() || !covariance_.allFinite()) {
        throw NumericalError("Gaussian component: non-finite parameters");
    }
    if ((covariance_ - covariance_.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol) {
        throw ContractViolation("Gaussian component: covariance is not symmetric");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(covariance_);
    if (llt.info() != Eigen::Success || !(llt.matrixL().toDenseMatrix().diagonal().array() > 0.0).all()) {
        throw NumericalError("covariance is not positive-definite after regularisation");
    }
    chol_lower_ = llt.matrixL();
    const double log_det = 2.0 * chol_lower_.diagonal().array().log().sum();
    log_weight_ = std::log(weight_);
    log_normaliser_ = -0.5 * (static_cast<double>(d) * kLog2Pi + log_det);
}

double GaussianComponent::log_density(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    Eigen::VectorXd scratch;
    return log_weighted_density(x, scratch) - log_weight_;
}

double GaussianComponent::log_weighted_density(const Eigen::Ref<const Eigen::VectorXd>& x,
                                               Eigen::VectorXd& scratch) const {
    if (x.size() != mean_.size()) {
        throw ContractViolation("log density: query has dimension " + std::to_string(x.size()) + ", model has " +
                                std::to_string(mean_.size()));
    }
    scratch = x - mean_;
    chol_lower_.triangularView<Eigen::Lower>().solveInPlace(scratch);
    return log_weight_ + log_normaliser_ - 0.5 * scratch.squaredNorm();
}

Eigen::VectorXd GaussianComponent::squared_mahalanobis(const Eigen::MatrixXd& points) const {
    Eigen::MatrixXd diff = points.colwise() - mean_;
    chol_lower_.triangularView<Eigen::Lower>().solveInPlace(diff);
    return diff.colwise().squaredNorm().transpose();
}

ClassGmm::ClassGmm(ClassId class_id, std::vector<GaussianComponent> components, FitStats stats)
    : class_id_(class_id), components_(std::move(components)), stats_(std::move(stats)) {
    if (components_.empty()) {
        throw ContractViolation("class " + std::to_string(class_id_) + ": mixture needs at least one component");
    }
    double weight_sum = 0.0;
    for (const auto& c : components_) {
        if (c.dim() != components_.front().dim()) {
            throw ContractViolation("class " + std::to_string(class_id_) + ": components differ in dimension");
        }
        weight_sum += c.weight();
    }
    if (std::abs(weight_sum - 1.0) > kWeightSumTol) {
        throw ContractViolation("class " + std::to_string(class_id_) + ": component weights sum to " +
                                std::to_string(weight_sum));
    }
}

double ClassGmm::log_likelihood(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    Eigen::VectorXd scratch;
    return log_likelihood(x, scratch);
}

double ClassGmm::log_likelihood(const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::VectorXd& scratch) const {
    if (components_.size() == 1) {
        return components_.front().log_weighted_density(x, scratch);
    }
    double terms[64];
    std::vector<double> spill;
    double* t = terms;
    if (components_.size() > std::size(terms)) {
        spill.resize(components_.size());
        t = spill.data();
    }
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < components_.size(); ++j) {
        t[j] = components_[j].log_weighted_density(x, scratch);
        m = std::max(m, t[j]);
    }
    if (!std::isfinite(m)) {
        return m;
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < components_.size(); ++j) {
        sum += std::exp(t[j] - m);
    }
    return m + std::log(sum);
}

GmmSet::GmmSet(std::vector<ClassGmm> models, GmmSetMeta meta) : models_(std::move(models)), meta_(std::move(meta)) {
    if (models_.empty()) {
        throw ContractViolation("GMM set needs at least one class model");
    }
    dim_ = models_.front().dim();
    if (static_cast<int>(models_.size()) != dim_) {
        throw ContractViolation("GMM set has " + std::to_string(models_.size()) + " class models for " +
                                std::to_string(dim_) + "-dimensional logits");
    }
    for (std::size_t i = 0; i < models_.size(); ++i) {
        if (models_[i].class_id() != static_cast<ClassId>(i)) {
            throw ContractViolation("GMM set: model at position " + std::to_string(i) + " is for class " +
                                    std::to_string(models_[i].class_id()));
        }
        if (models_[i].dim() != dim_) {
            throw ContractViolation("GMM set: class " + std::to_string(i) + " has the wrong dimension");
        }
    }
    if (!meta_.class_names.empty() && static_cast<int>(meta_.class_names.size()) != dim_) {
        throw ContractViolation("GMM set: class name count does not match the number of models");
    }
}

Eigen::VectorXd GmmSet::log_likelihoods(const Eigen::Ref<const Eigen::VectorXd>& logit) const {
    if (logit.size() != dim_) {
        throw ContractViolation("logit has dimension " + std::to_string(logit.size()) + ", GMM set expects " +
                                std::to_string(dim_));
    }
    Eigen::VectorXd out(dim_);
    Eigen::VectorXd scratch(dim_);
    for (int i = 0; i < dim_; ++i) {
        out[i] = models_[static_cast<std::size_t>(i)].log_likelihood(logit, scratch);
    }
    return out;
}

ClassGmm fit_gmm(const std::vector<LogitVector>& samples, int n_components, const EmConfig& config, ClassId class_id) {
    config.validate();
    if (n_components < 1) {
        throw ContractViolation("n_components must be >= 1");
    }
    if (samples.empty()) {
        throw FitError("no training samples");
    }
    if (static_cast<int>(samples.size()) < n_components) {
        throw FitError(std::to_string(samples.size()) + " samples cannot support " + std::to_string(n_components) +
                       " components");
    }
    const Eigen::Index d = samples.front().size();
    Eigen::MatrixXd x(d, static_cast<Eigen::Index>(samples.size()));
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].size() != d) {
            throw ContractViolation("sample " + std::to_string(i) + " has dimension " +
                                    std::to_string(samples[i].size()) + ", expected " + std::to_string(d));
        }
        if (!samples[i].allFinite()) {
            throw DataError("sample " + std::to_string(i) + " is not finite");
        }
        x.col(static_cast<Eigen::Index>(i)) = samples[i];
    }

    std::optional<EmRun> best;
    std::optional<NumericalError> last_error;
    for (int r = 0; r < config.n_restarts; ++r) {
        auto rng = make_rng(config.seed, static_cast<std::uint64_t>(class_id), static_cast<std::uint64_t>(r));
        try {
            EmRun run = run_em(x, n_components, config, rng);
            run.stats.restart = r;
            if (!best || run.stats.log_likelihood > best->stats.log_likelihood) {
                best = std::move(run);
            }
        } catch (const NumericalError& e) {
            last_error = e;
        }
    }
    if (!best) {
        throw *last_error;
    }
    return ClassGmm(class_id, std::move(best->components), std::move(best->stats));
}

GmmSet fit_all(const TrainingSets& training_sets, int n_components, const EmConfig& config) {
    int dim = -1;
    for (const auto& [cls, samples] : training_sets) {
        if (!samples.empty()) {
            dim = static_cast<int>(samples.front().size());
            break;
        }
    }
    if (dim <= 0) {
        throw FitError("class 0: no training samples");
    }
    std::vector<ClassGmm> models;
    models.reserve(static_cast<std::size_t>(dim));
    for (ClassId c = 0; c < dim; ++c) {
        const auto it = training_sets.find(c);
        if (it == training_sets.end() || it->second.empty()) {
            throw FitError("class " + std::to_string(c) + ": no training samples");
        }
        try {
            models.push_back(fit_gmm(it->second, n_components, config, c));
        } catch (const FitError& e) {
            throw FitError("class " + std::to_string(c) + ": " + e.what());
        } catch (const NumericalError& e) {
            throw NumericalError("class " + std::to_string(c) + ": " + e.what());
        } catch (const ContractViolation& e) {
            throw ContractViolation("class " + std::to_string(c) + ": " + e.what());
        } catch (const DataError& e) {
            throw DataError("class " + std::to_string(c) + ": " + e.what());
        }
    }
    for (const auto& [cls, samples] : training_sets) {
        if (cls < 0 || cls >= dim) {
            throw ContractViolation("training set for class " + std::to_string(cls) + " is outside [0, " +
                                    std::to_string(dim) + ")");
        }
    }
    GmmSetMeta meta;
    meta.n_components = n_components;
    return GmmSet(std::move(models), std::move(meta));
}

ComponentSelection select_components(std::vector<int> candidate_counts, const TrainingSets& training_sets,
                                     const std::vector<LabelledLogit>& val_correct,
                                     const std::vector<LabelledLogit>& val_misclassified, const EmConfig& config) {
    if (candidate_counts.empty()) {
        throw ContractViolation("component selection needs at least one candidate count");
    }
    if (val_correct.empty() || val_misclassified.empty()) {
        throw DataError("component selection needs correct and misclassified validation detections");
    }
    std::sort(candidate_counts.begin(), candidate_counts.end());
    candidate_counts.erase(std::unique(candidate_counts.begin(), candidate_counts.end()), candidate_counts.end());
    if (candidate_counts.front() < 1) {
        throw ContractViolation("component counts must be positive");
    }

    ComponentSelection result;
    double best_auroc = -1.0;
    std::optional<Error> last_failure;
    for (const int count : candidate_counts) {
        try {
            GmmSet models = fit_all(training_sets, count, config);
            auto max_loglik = [&](const std::vector<LabelledLogit>& set) {
                std::vector<double> scores;
                scores.reserve(set.size());
                for (const auto& item : set) {
                    scores.push_back(models.log_likelihoods(item.logit).maxCoeff());
                }
                return scores;
            };
            const double area = auroc(roc_curve(max_loglik(val_correct), max_loglik(val_misclassified)));
            result.auroc[count] = area;
            // Candidates ascend, so only a strictly better area displaces the current pick.
            const double tie_tol = 4.0 * std::numeric_limits<double>::epsilon();
            if (area > best_auroc + tie_tol) {
                best_auroc = area;
                result.selected = count;
                result.selected_models = std::move(models);
            }
        } catch (const ContractViolation&) {
            throw;
        } catch (const Error& e) {
            result.skipped[count] = e.what();
            last_failure = e;
        }
    }
    if (!result.selected_models) {
        throw FitError("every candidate component count failed; last error: " +
                       std::string(last_failure ? last_failure->what() : "unknown"));
    }
    auto meta = result.selected_models->meta();
    meta.n_components = result.selected;
    result.selected_models->set_meta(std::move(meta));
    return result;
}

}  // namespace osgmm
