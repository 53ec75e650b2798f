#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "dffls/errors.hpp"
#include "dffls/graph.hpp"
#include "dffls/rng.hpp"

namespace dffls {

// Law of the unknown parameter process theta_t.
struct ParameterProcess {
    enum class Kind { Constant, RandomWalk, Sinusoid };
    Kind kind = Kind::Constant;
    Eigen::VectorXd theta0;
    double sigma_delta = 0.0;  // random walk: per-coordinate std of the increment
    double amplitude = 0.0;    // sinusoid
    double period = 1.0;       // sinusoid, in steps
};

// Per-sensor regressor law.
struct RegressorSpec {
    enum class Kind { GaussianIid, MaskedSubspace, ArxFeedback, Constant };
    Kind kind = Kind::GaussianIid;
    Eigen::MatrixXd covariance;   // gaussian_iid: m x m covariance
    std::vector<int> coords;      // masked_subspace: supported coordinate set S_i
    double scale = 1.0;           // masked_subspace: std of the nonzero coordinates
    int p = 0;                    // arx_feedback: output lags (p + q + 2 == m)
    int q = 0;                    // arx_feedback: input lags
    Eigen::VectorXd value;        // constant: the fixed regressor
};

struct NoiseProcess {
    double sigma_w = 0.0;  // gaussian iid per sensor per step
};

// Full generative specification of one experiment.
struct Scenario {
    int n = 1;
    int m = 1;
    double alpha = 0.98;
    int horizon = 0;
    bool ls_mode = false;  // permits alpha == 1 (distributed-LS reduction)
    std::variant<WeightedDigraph, MarkovTopology> topology{
        WeightedDigraph(Eigen::MatrixXd::Identity(1, 1))};
    ParameterProcess parameter;
    std::vector<RegressorSpec> regressors;  // one per sensor
    NoiseProcess noise;
    double p0_scale = 100.0;
    std::optional<Eigen::VectorXd> theta_hat0;  // defaults to zero
    int excitation_window = 1;                  // h, recorded here for metrics
    std::uint64_t seed = 0;

    bool is_switching() const { return std::holds_alternative<MarkovTopology>(topology); }
    const WeightedDigraph& fixed_graph() const { return std::get<WeightedDigraph>(topology); }
    const MarkovTopology& markov() const { return std::get<MarkovTopology>(topology); }
    Eigen::VectorXd initial_estimate() const {
        return theta_hat0 ? *theta_hat0 : Eigen::VectorXd::Zero(m);
    }

    // Throws ConfigInvalid (with a field path) on any violated invariant.
    void validate() const;
};

// One generated step: y_{t+1,i} = phi_{t,i}^T theta_t + w_{t+1,i}.
struct StepData {
    Eigen::VectorXd theta;             // theta_t
    std::vector<Eigen::VectorXd> phi;  // phi_{t,i}
    Eigen::VectorXd w;                 // w_{t+1,i}
    Eigen::VectorXd y;                 // y_{t+1,i}
    Eigen::VectorXd delta_theta;       // theta_{t+1} - theta_t
};

// Stateful generator for one replication. Single-threaded within a
// replication; distinct replications use disjoint substreams.
class ScenarioGenerator {
public:
    ScenarioGenerator(const Scenario& scenario, std::uint64_t replication = 0);

    // Generates step t (the internal clock advances by one).
    StepData generate_step();

    int time() const { return t_; }
    const Eigen::VectorXd& theta() const { return theta_; }

private:
    Eigen::VectorXd next_theta();
    Eigen::VectorXd make_regressor(int sensor);

    const Scenario& scenario_;
    int t_ = 0;
    Eigen::VectorXd theta_;
    std::mt19937_64 param_rng_;
    std::vector<std::mt19937_64> noise_rng_;
    std::vector<std::mt19937_64> regressor_rng_;
    std::vector<std::mt19937_64> input_rng_;
    std::vector<Eigen::LLT<Eigen::MatrixXd>> gaussian_chol_;
    std::vector<std::deque<double>> y_history_;  // arx: most recent first
    std::vector<std::deque<double>> u_history_;
};

// Deterministic replay of all generated quantities for `scenario.horizon`
// steps. Identical scenarios yield identical trajectories bit-for-bit.
std::vector<StepData> replay(const Scenario& scenario, std::uint64_t replication = 0);

}  // namespace dffls
