#pragma once

#include "osgmm/types.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace osgmm {

/// Expectation-maximisation settings shared by every class model.
struct EmConfig {
    int max_iterations = 200;
    /// Stop when the relative improvement of the total log-likelihood drops below this.
    double convergence_tol = 1e-5;
    /// Added to every covariance diagonal after each M-step.
    double covariance_regulariser = 1e-6;
    int n_restarts = 3;
    std::uint64_t seed = 0;

    void validate() const;
};

/// One full-covariance Gaussian with its mixture weight.
///
/// The Cholesky factor of the covariance is computed once at construction, so
/// density evaluation is a triangular solve. Construction fails with a
/// NumericalError when the covariance is not symmetric positive-definite.
class GaussianComponent {
public:
    GaussianComponent(Eigen::VectorXd mean, Eigen::MatrixXd covariance, double weight);

    const Eigen::VectorXd& mean() const { return mean_; }
    const Eigen::MatrixXd& covariance() const { return covariance_; }
    double weight() const { return weight_; }
    int dim() const { return static_cast<int>(mean_.size()); }

    /// log N(x; mean, covariance), without the mixture weight.
    double log_density(const Eigen::Ref<const Eigen::VectorXd>& x) const;

    /// log(weight) + log N(x; mean, covariance). `scratch` is resized as needed.
    double log_weighted_density(const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::VectorXd& scratch) const;

    /// Squared Mahalanobis distance for every column of `points`.
    Eigen::VectorXd squared_mahalanobis(const Eigen::MatrixXd& points) const;

    double log_normaliser() const { return log_normaliser_; }

private:
    Eigen::VectorXd mean_;
    Eigen::MatrixXd covariance_;
    double weight_;
    Eigen::MatrixXd chol_lower_;
    double log_weight_;
    double log_normaliser_;
};

struct FitStats {
    double log_likelihood = 0.0;
    int iterations = 0;
    bool converged = false;
    int restart = 0;
    /// Total training log-likelihood after each E-step of the winning run.
    std::vector<double> trace;
};

/// Mixture model for one known class.
class ClassGmm {
public:
    ClassGmm(ClassId class_id, std::vector<GaussianComponent> components, FitStats stats = {});

    ClassId class_id() const { return class_id_; }
    int dim() const { return components_.front().dim(); }
    int n_components() const { return static_cast<int>(components_.size()); }
    const std::vector<GaussianComponent>& components() const { return components_; }
    const FitStats& fit_stats() const { return stats_; }

    /// log sum_j weight_j N(x; mean_j, cov_j), accumulated in the log domain.
    double log_likelihood(const Eigen::Ref<const Eigen::VectorXd>& x) const;
    double log_likelihood(const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::VectorXd& scratch) const;

private:
    ClassId class_id_;
    std::vector<GaussianComponent> components_;
    FitStats stats_;
};

struct GmmSetMeta {
    double theta_iou = 0.6;
    double theta_conf = 0.7;
    int n_components = 1;
    std::vector<std::string> class_names;
};

/// One mixture per known class; class i lives at index i. Immutable once built.
class GmmSet {
public:
    GmmSet(std::vector<ClassGmm> models, GmmSetMeta meta);

    int dim() const { return dim_; }
    int n_classes() const { return static_cast<int>(models_.size()); }
    const ClassGmm& model(ClassId class_id) const { return models_.at(static_cast<std::size_t>(class_id)); }
    const std::vector<ClassGmm>& models() const { return models_; }
    const GmmSetMeta& meta() const { return meta_; }
    void set_meta(GmmSetMeta meta) { meta_ = std::move(meta); }

    /// Per-class log-likelihoods of one logit vector.
    Eigen::VectorXd log_likelihoods(const Eigen::Ref<const Eigen::VectorXd>& logit) const;

private:
    std::vector<ClassGmm> models_;
    GmmSetMeta meta_;
    int dim_;
};

/// Fits one mixture with EM, keeping the best of `config.n_restarts` runs.
ClassGmm fit_gmm(const std::vector<LogitVector>& samples, int n_components, const EmConfig& config,
                 ClassId class_id = 0);

using TrainingSets = std::map<ClassId, std::vector<LogitVector>>;

/// Fits every class independently. Classes 0..N-1 must all be present, N being the logit dimension.
GmmSet fit_all(const TrainingSets& training_sets, int n_components, const EmConfig& config);

struct LabelledLogit {
    LogitVector logit;
    ClassId class_id = 0;
};

struct ComponentSelection {
    int selected = 0;
    std::map<int, double> auroc;
    std::map<int, std::string> skipped;
    std::optional<GmmSet> selected_models;
};

/// Picks the component count whose models best separate correctly classified
/// from misclassified validation detections (AUROC of the max log-likelihood).
/// Ties go to the smaller count.
ComponentSelection select_components(std::vector<int> candidate_counts, const TrainingSets& training_sets,
                                     const std::vector<LabelledLogit>& val_correct,
                                     const std::vector<LabelledLogit>& val_misclassified, const EmConfig& config);

}  // namespace osgmm
