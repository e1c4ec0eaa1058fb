#include "osgmm/errors.hpp"
#include "osgmm/gmm.hpp"
#include "osgmm/gmm_io.hpp"

#include "test_support.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace osgmm;
using osgmm::test::vec;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<LogitVector> shifted(const std::vector<LogitVector>& xs, const Eigen::VectorXd& by) {
    std::vector<LogitVector> out;
    for (const auto& x : xs) {
        out.push_back(x + by);
    }
    return out;
}

// Component whose mean lies closest to `target`.
const GaussianComponent& nearest(const ClassGmm& model, const Eigen::VectorXd& target) {
    const GaussianComponent* best = &model.components().front();
    for (const auto& c : model.components()) {
        if ((c.mean() - target).norm() < (best->mean() - target).norm()) {
            best = &c;
        }
    }
    return *best;
}

}  // namespace

TEST_CASE("component rejects invalid parameters", "[gmm]") {
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
    CHECK_THROWS_AS(GaussianComponent(vec({0, 0}), id, 0.0), ContractViolation);
    CHECK_THROWS_AS(GaussianComponent(vec({0, 0}), id, 1.5), ContractViolation);
    CHECK_THROWS_AS(GaussianComponent(vec({0, 0, 0}), id, 1.0), ContractViolation);
    Eigen::MatrixXd asym = id;
    asym(0, 1) = 0.1;
    CHECK_THROWS_AS(GaussianComponent(vec({0, 0}), asym, 1.0), ContractViolation);
    Eigen::MatrixXd singular = Eigen::MatrixXd::Zero(2, 2);
    CHECK_THROWS_AS(GaussianComponent(vec({0, 0}), singular, 1.0), NumericalError);
}

TEST_CASE("class model checks its weights and dimensions", "[gmm]") {
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
    CHECK_THROWS_AS(ClassGmm(0, {}), ContractViolation);
    CHECK_THROWS_AS(ClassGmm(0, {GaussianComponent(vec({0, 0}), id, 0.5)}), ContractViolation);
    CHECK_THROWS_AS(ClassGmm(0, {GaussianComponent(vec({0, 0}), id, 0.5),
                                 GaussianComponent(vec({0, 0, 0}), Eigen::MatrixXd::Identity(3, 3), 0.5)}),
                    ContractViolation);
    const ClassGmm ok(0, {GaussianComponent(vec({0, 0}), id, 0.5), GaussianComponent(vec({1, 1}), id, 0.5)});
    CHECK(ok.n_components() == 2);
    CHECK_THROWS_AS(ok.log_likelihood(vec({0, 0, 0})), ContractViolation);
}

TEST_CASE("log-likelihood hand cases", "[gmm]") {
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
    const double log_2pi = std::log(2.0 * std::numbers::pi);
    const ClassGmm single(0, {GaussianComponent(vec({0, 0}), id, 1.0)});
    CHECK_THAT(single.log_likelihood(vec({0, 0})), WithinAbs(-log_2pi, 1e-12));
    CHECK_THAT(single.log_likelihood(vec({0, 0})), WithinAbs(-1.837877, 1e-6));
    CHECK_THAT(single.log_likelihood(vec({1, 0})), WithinAbs(-2.337877, 1e-6));

    // Direct summation of both component densities at the origin.
    const ClassGmm pair(0, {GaussianComponent(vec({-5, 0}), id, 0.5), GaussianComponent(vec({5, 0}), id, 0.5)});
    const double density = std::exp(-log_2pi - 12.5);
    const double oracle = std::log(0.5 * density + 0.5 * density);
    CHECK_THAT(pair.log_likelihood(vec({0, 0})), WithinAbs(oracle, 1e-12));
    CHECK_THAT(pair.log_likelihood(vec({0, 0})), WithinAbs(-14.337877, 1e-6));
}

TEST_CASE("single component equals the closed-form normal density", "[gmm][property]") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> normal(0.0, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
        const int dim = 1 + trial % 8;
        Eigen::VectorXd mean(dim);
        for (int k = 0; k < dim; ++k) {
            mean[k] = normal(rng);
        }
        const Eigen::MatrixXd cov = test::random_spd(dim, rng);
        const ClassGmm model(0, {GaussianComponent(mean, cov, 1.0)});
        for (int q = 0; q < 20; ++q) {
            Eigen::VectorXd x(dim);
            for (int k = 0; k < dim; ++k) {
                x[k] = normal(rng);
            }
            const double expected = test::normal_logpdf(x, mean, cov);
            CHECK_THAT(model.log_likelihood(x), WithinAbs(expected, 1e-9));
        }
    }
}

TEST_CASE("log-domain accumulation matches linear summation", "[gmm][property]") {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const int dim = 2 + trial % 4;
        const int m = 1 + trial % 5;
        std::vector<GaussianComponent> comps;
        std::vector<double> weights(static_cast<std::size_t>(m));
        double total = 0.0;
        for (auto& w : weights) {
            w = 0.1 + std::abs(normal(rng));
            total += w;
        }
        for (int j = 0; j < m; ++j) {
            Eigen::VectorXd mean(dim);
            for (int k = 0; k < dim; ++k) {
                mean[k] = 2.0 * normal(rng);
            }
            comps.emplace_back(mean, test::random_spd(dim, rng), weights[static_cast<std::size_t>(j)] / total);
        }
        const ClassGmm model(0, comps);
        for (int q = 0; q < 20; ++q) {
            Eigen::VectorXd x(dim);
            for (int k = 0; k < dim; ++k) {
                x[k] = 2.0 * normal(rng);
            }
            double linear = 0.0;
            for (const auto& c : comps) {
                linear += c.weight() * std::exp(test::normal_logpdf(x, c.mean(), c.covariance()));
            }
            REQUIRE(linear > 0.0);
            CHECK_THAT(model.log_likelihood(x), WithinRel(std::log(linear), 1e-9));
        }
    }
}

TEST_CASE("log-likelihood stays finite far from every component", "[gmm]") {
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
    const ClassGmm model(0, {GaussianComponent(vec({-5, 0}), id, 0.5), GaussianComponent(vec({5, 0}), id, 0.5)});
    const double far = model.log_likelihood(vec({1e4, 1e4}));
    CHECK(std::isfinite(far));
    CHECK(far < -1e7);
}

TEST_CASE("fit recovers a single 2-D Gaussian", "[gmm][fit]") {
    std::mt19937_64 rng(1);
    const auto xs = test::sample_gaussian(vec({3, -3}), Eigen::MatrixXd::Identity(2, 2), 500, rng);
    const ClassGmm model = fit_gmm(xs, 1, EmConfig{});
    REQUIRE(model.n_components() == 1);
    CHECK_THAT(model.components()[0].mean()[0], WithinAbs(3.0, 0.2));
    CHECK_THAT(model.components()[0].mean()[1], WithinAbs(-3.0, 0.2));
    CHECK_THAT(model.components()[0].weight(), WithinAbs(1.0, 1e-12));
}

TEST_CASE("fit recovers two separated Gaussians", "[gmm][fit]") {
    std::mt19937_64 rng(2);
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
    auto xs = test::sample_gaussian(vec({-10, 0}), id, 500, rng);
    const auto right = test::sample_gaussian(vec({10, 0}), id, 500, rng);
    xs.insert(xs.end(), right.begin(), right.end());
    const ClassGmm model = fit_gmm(xs, 2, EmConfig{});
    for (const double x0 : {-10.0, 10.0}) {
        const auto& c = nearest(model, vec({x0, 0}));
        CHECK_THAT(c.mean()[0], WithinAbs(x0, 0.3));
        CHECK_THAT(c.mean()[1], WithinAbs(0.0, 0.3));
        CHECK_THAT(c.weight(), WithinAbs(0.5, 0.05));
    }
    double total = 0.0;
    for (const auto& c : model.components()) {
        total += c.weight();
    }
    CHECK_THAT(total, WithinAbs(1.0, 1e-9));
}

TEST_CASE("identical samples fit the regulariser covariance", "[gmm][fit]") {
    const std::vector<LogitVector> xs(3, vec({1.5, -2.0, 0.25}));
    EmConfig config;
    const ClassGmm model = fit_gmm(xs, 1, config);
    const auto& c = model.components()[0];
    CHECK((c.mean() - xs[0]).cwiseAbs().maxCoeff() < 1e-12);
    const Eigen::MatrixXd expected = config.covariance_regulariser * Eigen::MatrixXd::Identity(3, 3);
    CHECK((c.covariance() - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("fit preconditions", "[gmm][fit]") {
    const std::vector<LogitVector> two(2, vec({0, 0}));
    CHECK_THROWS_AS(fit_gmm(two, 3, EmConfig{}), FitError);
    CHECK_THROWS_AS(fit_gmm({}, 1, EmConfig{}), FitError);
    CHECK_THROWS_AS(fit_gmm({vec({0, 0}), vec({0, 0, 0})}, 1, EmConfig{}), ContractViolation);
    EmConfig bad;
    bad.n_restarts = 0;
    CHECK_THROWS_AS(fit_gmm(two, 1, bad), ContractViolation);
    bad = EmConfig{};
    bad.convergence_tol = 0.0;
    CHECK_THROWS_AS(bad.validate(), ContractViolation);
}

TEST_CASE("collapsed components surface as a numerical error naming the component", "[gmm][fit]") {
    const std::vector<LogitVector> xs(4, vec({1, 1}));
    EmConfig config;
    config.covariance_regulariser = 0.0;
    try {
        (void)fit_gmm(xs, 1, config);
        FAIL("expected a numerical error");
    } catch (const NumericalError& e) {
        CHECK(std::string(e.what()).find("component 0") != std::string::npos);
    }
}

TEST_CASE("EM never lowers the training log-likelihood", "[gmm][property]") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<LogitVector> xs;
        for (int m = 0; m < 3; ++m) {
            Eigen::VectorXd mean = Eigen::VectorXd::Constant(3, 3.0 * m);
            const auto part = test::sample_gaussian(mean, test::random_spd(3, rng), 100, rng);
            xs.insert(xs.end(), part.begin(), part.end());
        }
        EmConfig config;
        config.seed = static_cast<std::uint64_t>(trial);
        const ClassGmm model = fit_gmm(xs, 1 + trial % 4, config);
        const auto& trace = model.fit_stats().trace;
        REQUIRE(trace.size() >= 1);
        for (std::size_t i = 1; i < trace.size(); ++i) {
            CHECK(trace[i] >= trace[i - 1] - config.convergence_tol * std::abs(trace[i - 1]));
        }
        CHECK(model.fit_stats().log_likelihood == trace.back());
    }
}

TEST_CASE("translating the data translates the fit", "[gmm][property]") {
    std::mt19937_64 rng(4);
    auto xs = test::sample_gaussian(vec({0, 0, 0}), test::random_spd(3, rng), 150, rng);
    const auto other = test::sample_gaussian(vec({6, -4, 2}), test::random_spd(3, rng), 150, rng);
    xs.insert(xs.end(), other.begin(), other.end());
    const Eigen::VectorXd shift = vec({5.5, -3.25, 7.0});
    const ClassGmm base = fit_gmm(xs, 2, EmConfig{});
    const ClassGmm moved = fit_gmm(shifted(xs, shift), 2, EmConfig{});
    for (const auto& c : base.components()) {
        const auto& m = nearest(moved, c.mean() + shift);
        CHECK((m.mean() - c.mean() - shift).cwiseAbs().maxCoeff() < 1e-6);
    }
    for (const auto& q : {vec({0, 0, 0}), vec({3, -2, 1}), vec({-1, 4, 2})}) {
        CHECK_THAT(moved.log_likelihood(q + shift), WithinAbs(base.log_likelihood(q), 1e-6));
    }
}

TEST_CASE("fit_all builds one model per class near its centre", "[gmm][fit]") {
    std::mt19937_64 rng(5);
    TrainingSets sets;
    for (int c = 0; c < 3; ++c) {
        Eigen::VectorXd centre = Eigen::VectorXd::Constant(3, -10.0);
        centre[c] = 10.0;
        sets[c] = test::sample_gaussian(centre, Eigen::MatrixXd::Identity(3, 3), 200, rng);
    }
    const GmmSet models = fit_all(sets, 1, EmConfig{});
    REQUIRE(models.n_classes() == 3);
    REQUIRE(models.dim() == 3);
    for (int c = 0; c < 3; ++c) {
        Eigen::VectorXd centre = Eigen::VectorXd::Constant(3, -10.0);
        centre[c] = 10.0;
        CHECK(models.model(c).class_id() == c);
        CHECK((models.model(c).components()[0].mean() - centre).cwiseAbs().maxCoeff() < 0.3);
    }
}

TEST_CASE("fit_all names the class that cannot be fitted", "[gmm][fit]") {
    std::mt19937_64 rng(6);
    TrainingSets sets;
    for (int c = 0; c < 3; ++c) {
        sets[c] = test::sample_gaussian(Eigen::VectorXd::Constant(3, c), Eigen::MatrixXd::Identity(3, 3), 50, rng);
    }
    sets[2].clear();
    try {
        (void)fit_all(sets, 1, EmConfig{});
        FAIL("expected a fit error");
    } catch (const FitError& e) {
        CHECK(std::string(e.what()).find("class 2") != std::string::npos);
    }
    sets.erase(2);
    CHECK_THROWS_AS(fit_all(sets, 1, EmConfig{}), FitError);
}

TEST_CASE("fitting is deterministic and serialises exactly", "[gmm][fit]") {
    std::mt19937_64 rng(7);
    TrainingSets sets;
    for (int c = 0; c < 2; ++c) {
        Eigen::VectorXd m = Eigen::VectorXd::Zero(2);
        m[c] = 4.0;
        auto a = test::sample_gaussian(m, test::random_spd(2, rng), 80, rng);
        const auto b = test::sample_gaussian(-m, test::random_spd(2, rng), 80, rng);
        a.insert(a.end(), b.begin(), b.end());
        sets[c] = a;
    }
    const GmmSet first = fit_all(sets, 2, EmConfig{});
    const GmmSet second = fit_all(sets, 2, EmConfig{});
    CHECK(to_json(first).dump() == to_json(second).dump());

    const GmmSet loaded = gmm_set_from_json(nlohmann::json::parse(to_json(first).dump()));
    for (int c = 0; c < 2; ++c) {
        const auto& a = first.model(c).components();
        const auto& b = loaded.model(c).components();
        REQUIRE(a.size() == b.size());
        for (std::size_t j = 0; j < a.size(); ++j) {
            CHECK(a[j].weight() == b[j].weight());
            CHECK(a[j].mean() == b[j].mean());
            CHECK(a[j].covariance() == b[j].covariance());
        }
    }
    CHECK(to_json(loaded).dump() == to_json(first).dump());
}

TEST_CASE("malformed GMM documents are data errors", "[gmm][io]") {
    CHECK_THROWS_AS(gmm_set_from_json(nlohmann::json::parse(R"({"version":2})")), DataError);
    CHECK_THROWS_AS(gmm_set_from_json(nlohmann::json::parse(R"({"version":1,"dim":1})")), DataError);
    const auto bad_weight = nlohmann::json::parse(
        R"({"version":1,"dim":2,"classes":[
              {"class_id":0,"weights":[0.4],"means":[[0,0]],"covariances":[[[1,0],[0,1]]]},
              {"class_id":1,"weights":[1.0],"means":[[0,0]],"covariances":[[[1,0],[0,1]]]}]})");
    CHECK_THROWS_AS(gmm_set_from_json(bad_weight), DataError);
}

TEST_CASE("component selection prefers two components for bimodal classes", "[gmm][selection]") {
    std::mt19937_64 rng(8);
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(3, 3) * 0.25;
    TrainingSets sets;
    std::vector<LabelledLogit> correct;
    std::vector<LabelledLogit> misclassified;
    for (int c = 0; c < 3; ++c) {
        Eigen::VectorXd offset = Eigen::VectorXd::Zero(3);
        offset[c] = 8.0;
        Eigen::VectorXd base = Eigen::VectorXd::Zero(3);
        base[(c + 1) % 3] = 20.0 * (c + 1);
        auto a = test::sample_gaussian(base + offset, id, 150, rng);
        const auto b = test::sample_gaussian(base - offset, id, 150, rng);
        for (const auto& x : test::sample_gaussian(base + offset, id, 20, rng)) {
            correct.push_back({x, c});
        }
        for (const auto& x : test::sample_gaussian(base - offset, id, 20, rng)) {
            correct.push_back({x, c});
        }
        // Between the two modes: likely under one wide Gaussian, unlikely under the true mixture.
        for (const auto& x : test::sample_gaussian(base, id, 20, rng)) {
            misclassified.push_back({x, c});
        }
        a.insert(a.end(), b.begin(), b.end());
        sets[c] = a;
    }

    const ComponentSelection sel = select_components({3, 1, 2}, sets, correct, misclassified, EmConfig{});
    REQUIRE(sel.auroc.size() == 3);
    CHECK(sel.selected == 2);
    REQUIRE(sel.selected_models.has_value());
    CHECK(sel.selected_models->meta().n_components == 2);
    // Exhaustive oracle: the selected count holds the best AUROC and nothing smaller ties it.
    double best = 0.0;
    for (const auto& [count, value] : sel.auroc) {
        best = std::max(best, value);
    }
    CHECK(sel.auroc.at(2) == best);
    CHECK(sel.auroc.at(1) < best);
}

TEST_CASE("component selection edge cases", "[gmm][selection]") {
    std::mt19937_64 rng(9);
    TrainingSets sets;
    std::vector<LabelledLogit> correct;
    std::vector<LabelledLogit> misclassified;
    for (int c = 0; c < 2; ++c) {
        Eigen::VectorXd m = Eigen::VectorXd::Zero(2);
        m[c] = 5.0;
        sets[c] = test::sample_gaussian(m, Eigen::MatrixXd::Identity(2, 2), 100, rng);
        correct.push_back({m, c});
        misclassified.push_back({m + vec({40.0, 40.0}), c});
    }

    const ComponentSelection only = select_components({4}, sets, correct, misclassified, EmConfig{});
    CHECK(only.selected == 4);
    CHECK(only.auroc.size() == 1);

    // Perfect separation for every count: equal AUROCs, the smaller count wins.
    const ComponentSelection tie = select_components({2, 1}, sets, correct, misclassified, EmConfig{});
    CHECK(tie.auroc.at(1) == tie.auroc.at(2));
    CHECK(tie.selected == 1);

    // A count that cannot be fitted is skipped, not fatal.
    const ComponentSelection skip = select_components({1, 500}, sets, correct, misclassified, EmConfig{});
    CHECK(skip.selected == 1);
    CHECK(skip.skipped.count(500) == 1);

    CHECK_THROWS_AS(select_components({500}, sets, correct, misclassified, EmConfig{}), FitError);
    CHECK_THROWS_AS(select_components({}, sets, correct, misclassified, EmConfig{}), ContractViolation);
    CHECK_THROWS(select_components({1}, sets, {}, misclassified, EmConfig{}));
}
