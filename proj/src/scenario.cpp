#include "dffls/scenario.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace dffls {

namespace {

void fail(const std::string& field, const std::string& msg) {
    throw ConfigInvalid(field + ": " + msg);
}

}  // namespace

void Scenario::validate() const {
    if (n < 1) fail("scenario.n", "sensor count must be positive");
    if (m < 1) fail("scenario.m", "parameter dimension must be positive");
    if (horizon < 0) fail("scenario.horizon", "horizon must be nonnegative");
    if (alpha <= 0.0 || alpha > 1.0) fail("scenario.alpha", "forgetting factor must lie in (0,1]");
    if (alpha == 1.0 && !ls_mode) {
        fail("scenario.alpha", "alpha = 1 requires ls_mode (distributed-LS reduction)");
    }
    if (p0_scale <= 0.0) fail("scenario.p0_scale", "initial covariance scale must be positive");
    if (excitation_window < 1) fail("scenario.excitation_window", "window length h must be >= 1");
    if (noise.sigma_w < 0.0) fail("scenario.noise.sigma_w", "noise std must be nonnegative");

    if (parameter.theta0.size() != m) fail("scenario.parameter.theta0", "must have dimension m");
    if (parameter.kind == ParameterProcess::Kind::RandomWalk && parameter.sigma_delta < 0.0) {
        fail("scenario.parameter.sigma_delta", "must be nonnegative");
    }
    if (parameter.kind == ParameterProcess::Kind::Sinusoid && parameter.period <= 0.0) {
        fail("scenario.parameter.period", "must be positive");
    }
    if (theta_hat0 && theta_hat0->size() != m) {
        fail("scenario.theta_hat0", "must have dimension m");
    }

    if (static_cast<int>(regressors.size()) != n) {
        fail("scenario.regressors", "need one spec per sensor");
    }
    for (int i = 0; i < n; ++i) {
        const auto& r = regressors[static_cast<size_t>(i)];
        std::ostringstream field;
        field << "scenario.regressors[" << i << "]";
        switch (r.kind) {
            case RegressorSpec::Kind::GaussianIid:
                if (r.covariance.rows() != m || r.covariance.cols() != m) {
                    fail(field.str() + ".covariance", "must be m x m");
                }
                break;
            case RegressorSpec::Kind::MaskedSubspace:
                if (r.coords.empty()) fail(field.str() + ".coords", "support set must be nonempty");
                for (int c : r.coords) {
                    if (c < 0 || c >= m) fail(field.str() + ".coords", "coordinate out of range");
                }
                if (r.scale <= 0.0) fail(field.str() + ".scale", "must be positive");
                break;
            case RegressorSpec::Kind::ArxFeedback:
                if (r.p < 0 || r.q < 0) fail(field.str(), "lags must be nonnegative");
                if (r.p + r.q + 2 != m) fail(field.str(), "arx_feedback requires p + q + 2 == m");
                break;
            case RegressorSpec::Kind::Constant:
                if (r.value.size() != m) fail(field.str() + ".value", "must have dimension m");
                break;
        }
    }

    const int topo_n = is_switching() ? markov().sensor_count() : fixed_graph().size();
    if (topo_n != n) fail("topology", "vertex count must equal scenario.n");
}

ScenarioGenerator::ScenarioGenerator(const Scenario& scenario, std::uint64_t replication)
    : scenario_(scenario),
      theta_(scenario.parameter.theta0),
      param_rng_(make_stream(scenario.seed, replication, kNetworkStream, StreamRole::Parameter)) {
    const int n = scenario_.n;
    noise_rng_.reserve(static_cast<size_t>(n));
    regressor_rng_.reserve(static_cast<size_t>(n));
    input_rng_.reserve(static_cast<size_t>(n));
    gaussian_chol_.resize(static_cast<size_t>(n));
    y_history_.resize(static_cast<size_t>(n));
    u_history_.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        const auto si = static_cast<std::uint64_t>(i);
        noise_rng_.push_back(make_stream(scenario_.seed, replication, si, StreamRole::Noise));
        regressor_rng_.push_back(make_stream(scenario_.seed, replication, si, StreamRole::Regressor));
        input_rng_.push_back(make_stream(scenario_.seed, replication, si, StreamRole::Input));
        const auto& spec = scenario_.regressors[static_cast<size_t>(i)];
        if (spec.kind == RegressorSpec::Kind::GaussianIid) {
            gaussian_chol_[static_cast<size_t>(i)].compute(spec.covariance);
            if (gaussian_chol_[static_cast<size_t>(i)].info() != Eigen::Success) {
                std::ostringstream os;
                os << "scenario.regressors[" << i << "].covariance: not positive definite";
                throw ConfigInvalid(os.str());
            }
        }
    }
}

Eigen::VectorXd ScenarioGenerator::next_theta() {
    const int m = scenario_.m;
    const auto& pp = scenario_.parameter;
    switch (pp.kind) {
        case ParameterProcess::Kind::Constant:
            return Eigen::VectorXd::Zero(m);
        case ParameterProcess::Kind::RandomWalk: {
            std::normal_distribution<double> gauss(0.0, pp.sigma_delta);
            Eigen::VectorXd d(m);
            for (int j = 0; j < m; ++j) d(j) = gauss(param_rng_);
            return d;
        }
        case ParameterProcess::Kind::Sinusoid: {
            const double two_pi = 2.0 * std::numbers::pi;
            const double cur = pp.amplitude * std::sin(two_pi * t_ / pp.period);
            const double nxt = pp.amplitude * std::sin(two_pi * (t_ + 1) / pp.period);
            return Eigen::VectorXd::Constant(m, nxt - cur);
        }
    }
    return Eigen::VectorXd::Zero(m);
}

Eigen::VectorXd ScenarioGenerator::make_regressor(int sensor) {
    const int m = scenario_.m;
    const auto& spec = scenario_.regressors[static_cast<size_t>(sensor)];
    auto& rng = regressor_rng_[static_cast<size_t>(sensor)];
    switch (spec.kind) {
        case RegressorSpec::Kind::GaussianIid: {
            std::normal_distribution<double> gauss(0.0, 1.0);
            Eigen::VectorXd z(m);
            for (int j = 0; j < m; ++j) z(j) = gauss(rng);
            return gaussian_chol_[static_cast<size_t>(sensor)].matrixL() * z;
        }
        case RegressorSpec::Kind::MaskedSubspace: {
            std::normal_distribution<double> gauss(0.0, spec.scale);
            Eigen::VectorXd phi = Eigen::VectorXd::Zero(m);
            for (int c : spec.coords) phi(c) = gauss(rng);
            return phi;
        }
        case RegressorSpec::Kind::ArxFeedback: {
            std::uniform_real_distribution<double> unif(-1.0, 1.0);
            const double u_t = unif(input_rng_[static_cast<size_t>(sensor)]);
            auto& ys = y_history_[static_cast<size_t>(sensor)];
            auto& us = u_history_[static_cast<size_t>(sensor)];
            us.push_front(u_t);
            Eigen::VectorXd phi = Eigen::VectorXd::Zero(m);
            // phi = [y_t, ..., y_{t-p}, u_t, ..., u_{t-q}]; entries before
            // the start of the run are zero.
            for (int k = 0; k <= spec.p; ++k) {
                if (k < static_cast<int>(ys.size())) phi(k) = ys[static_cast<size_t>(k)];
            }
            for (int k = 0; k <= spec.q; ++k) {
                if (k < static_cast<int>(us.size())) phi(spec.p + 1 + k) = us[static_cast<size_t>(k)];
            }
            while (static_cast<int>(us.size()) > spec.q + 1) us.pop_back();
            return phi;
        }
        case RegressorSpec::Kind::Constant:
            return spec.value;
    }
    return Eigen::VectorXd::Zero(m);
}

StepData ScenarioGenerator::generate_step() {
    const int n = scenario_.n;
    StepData step;
    step.theta = theta_;
    step.phi.reserve(static_cast<size_t>(n));
    step.w.resize(n);
    step.y.resize(n);
    for (int i = 0; i < n; ++i) {
        step.phi.push_back(make_regressor(i));
        std::normal_distribution<double> gauss(0.0, scenario_.noise.sigma_w);
        step.w(i) = scenario_.noise.sigma_w > 0.0 ? gauss(noise_rng_[static_cast<size_t>(i)]) : 0.0;
        step.y(i) = step.phi.back().dot(step.theta) + step.w(i);
        auto& ys = y_history_[static_cast<size_t>(i)];
        ys.push_front(step.y(i));
        const auto& spec = scenario_.regressors[static_cast<size_t>(i)];
        const int keep = spec.kind == RegressorSpec::Kind::ArxFeedback ? spec.p + 1 : 0;
        while (static_cast<int>(ys.size()) > keep) ys.pop_back();
    }
    step.delta_theta = next_theta();
    theta_ += step.delta_theta;
    ++t_;
    return step;
}

std::vector<StepData> replay(const Scenario& scenario, std::uint64_t replication) {
    scenario.validate();
    ScenarioGenerator gen(scenario, replication);
    std::vector<StepData> out;
    out.reserve(static_cast<size_t>(scenario.horizon));
    for (int t = 0; t < scenario.horizon; ++t) out.push_back(gen.generate_step());
    return out;
}

}  // namespace dffls
