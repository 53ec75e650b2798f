#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "dffls/oracle.hpp"
#include "dffls/scenario.hpp"
#include "helpers.hpp"

using namespace dffls;
using namespace dffls::test;

TEST_CASE("observation identity holds exactly for stored values") {
    const Scenario s = basic_scenario(3, 2, 0.95, 50, 17, 0.3);
    for (const StepData& step : replay(s)) {
        for (int i = 0; i < s.n; ++i) {
            CHECK(step.y(i) == step.phi[static_cast<size_t>(i)].dot(step.theta) + step.w(i));
        }
    }
}

TEST_CASE("noise-free constant theta gives y = phi^T theta exactly") {
    const Scenario s = basic_scenario(2, 3, 0.95, 20, 5, 0.0);
    for (const StepData& step : replay(s)) {
        for (int i = 0; i < s.n; ++i) {
            CHECK(step.w(i) == 0.0);
            CHECK(step.y(i) == step.phi[static_cast<size_t>(i)].dot(step.theta));
        }
        CHECK(step.delta_theta.isZero(0.0));
    }
}

TEST_CASE("zero regressors give y = w") {
    Scenario s = basic_scenario(2, 2, 0.95, 20, 5, 0.4);
    for (auto& r : s.regressors) {
        r.kind = RegressorSpec::Kind::Constant;
        r.value = Eigen::VectorXd::Zero(s.m);
    }
    for (const StepData& step : replay(s)) {
        for (int i = 0; i < s.n; ++i) CHECK(step.y(i) == step.w(i));
    }
}

TEST_CASE("masked subspace support and rank structure") {
    Scenario s = basic_scenario(3, 3, 0.95, 40, 9, 0.1);
    for (int i = 0; i < 3; ++i) {
        auto& r = s.regressors[static_cast<size_t>(i)];
        r.kind = RegressorSpec::Kind::MaskedSubspace;
        r.coords = {i};
        r.scale = 1.0;
    }
    const auto data = replay(s);
    std::vector<Eigen::MatrixXd> gram(3, Eigen::MatrixXd::Zero(3, 3));
    Eigen::MatrixXd network = Eigen::MatrixXd::Zero(3, 3);
    for (const StepData& step : data) {
        for (int i = 0; i < 3; ++i) {
            const Eigen::VectorXd& phi = step.phi[static_cast<size_t>(i)];
            int nonzero = 0;
            for (int j = 0; j < 3; ++j) {
                if (j != i) CHECK(phi(j) == 0.0);
                if (phi(j) != 0.0) ++nonzero;
            }
            CHECK(nonzero == 1);
            const Eigen::MatrixXd outer = phi * phi.transpose() / (1.0 + phi.squaredNorm());
            gram[static_cast<size_t>(i)] += outer;
            network += outer;
        }
    }
    // each sensor alone spans a single coordinate; the network spans all three
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    for (int i = 0; i < 3; ++i) {
        es.compute(gram[static_cast<size_t>(i)]);
        CHECK(std::abs(es.eigenvalues().minCoeff()) < 1e-12);
    }
    es.compute(network);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("arx feedback regressor structure") {
    Scenario s = basic_scenario(1, 4, 0.95, 30, 21, 0.2);
    auto& r = s.regressors[0];
    r.kind = RegressorSpec::Kind::ArxFeedback;
    r.p = 1;
    r.q = 1;  // p + q + 2 == 4
    const auto data = replay(s);
    // phi_t = [y_t, y_{t-1}, u_t, u_{t-1}]; outputs before the run are zero
    CHECK(data[0].phi[0](0) == 0.0);
    CHECK(data[0].phi[0](1) == 0.0);
    for (size_t t = 1; t < data.size(); ++t) {
        CHECK(data[t].phi[0](0) == data[t - 1].y(0));
        if (t >= 2) CHECK(data[t].phi[0](1) == data[t - 1].phi[0](0));
        CHECK(data[t].phi[0](3) == data[t - 1].phi[0](2));
        CHECK(std::abs(data[t].phi[0](2)) <= 1.0);
    }
}

TEST_CASE("replay determinism") {
    const Scenario s = basic_scenario(2, 2, 0.9, 25, 1234, 0.5);
    const auto a = replay(s);
    const auto b = replay(s);
    REQUIRE(a.size() == b.size());
    for (size_t t = 0; t < a.size(); ++t) {
        CHECK(a[t].y == b[t].y);
        CHECK(a[t].w == b[t].w);
        CHECK(a[t].theta == b[t].theta);
        for (int i = 0; i < s.n; ++i) {
            CHECK(a[t].phi[static_cast<size_t>(i)] == b[t].phi[static_cast<size_t>(i)]);
        }
    }

    Scenario s2 = s;
    s2.seed = 4321;
    const auto c = replay(s2);
    CHECK(a[0].w != c[0].w);
}

TEST_CASE("replications use disjoint substreams") {
    const Scenario s = basic_scenario(2, 2, 0.9, 10, 77, 0.5);
    const auto r0 = replay(s, 0);
    const auto r1 = replay(s, 1);
    CHECK(r0[0].w != r1[0].w);
}

TEST_CASE("horizon zero yields empty trajectory") {
    const Scenario s = basic_scenario(2, 2, 0.9, 0, 1, 0.5);
    CHECK(replay(s).empty());
}

TEST_CASE("random walk parameter moves, constant does not") {
    Scenario s = basic_scenario(1, 2, 0.95, 10, 3, 0.0);
    s.parameter.kind = ParameterProcess::Kind::RandomWalk;
    s.parameter.sigma_delta = 0.5;
    const auto data = replay(s);
    bool moved = false;
    for (const auto& step : data) moved = moved || !step.delta_theta.isZero(0.0);
    CHECK(moved);
    for (size_t t = 1; t < data.size(); ++t) {
        CHECK(data[t].theta == Eigen::VectorXd(data[t - 1].theta + data[t - 1].delta_theta));
    }
}

TEST_CASE("sinusoid parameter follows the sine curve") {
    Scenario s = basic_scenario(1, 1, 0.95, 12, 3, 0.0);
    s.parameter.kind = ParameterProcess::Kind::Sinusoid;
    s.parameter.amplitude = 2.0;
    s.parameter.period = 8.0;
    s.parameter.theta0 = Eigen::VectorXd::Zero(1);
    const auto data = replay(s);
    for (size_t t = 0; t < data.size(); ++t) {
        const double expected = 2.0 * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / 8.0);
        CHECK(data[t].theta(0) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("validation reports field paths") {
    Scenario s = basic_scenario(2, 2, 0.95, 10, 1, 0.1);

    s.alpha = 1.5;
    CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("scenario.alpha"), ConfigInvalid);
    s.alpha = 1.0;
    CHECK_THROWS_AS(s.validate(), ConfigInvalid);  // alpha == 1 needs ls_mode
    s.ls_mode = true;
    CHECK_NOTHROW(s.validate());
    s.ls_mode = false;
    s.alpha = 0.95;

    s.p0_scale = 0.0;
    CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("scenario.p0_scale"), ConfigInvalid);
    s.p0_scale = 100.0;

    s.regressors.pop_back();
    CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("scenario.regressors"), ConfigInvalid);
    s.regressors.push_back(s.regressors[0]);

    s.regressors[1].kind = RegressorSpec::Kind::ArxFeedback;
    s.regressors[1].p = 1;
    s.regressors[1].q = 1;  // p + q + 2 = 4 != m = 2
    CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("scenario.regressors[1]"), ConfigInvalid);
}
