#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "dffls/ffls.hpp"
#include "dffls/scenario.hpp"

namespace dffls {

// Which index of the adjacency matrix supplies sensor i's combine weights:
// Row uses a_ij (row i), Column uses a_ji (column i). Defaults: row for a
// fixed graph, column for Markovian switching.
enum class WeightOrientation { Row, Column };

struct EngineOptions {
    bool snapshots = false;  // record dense per-step matrices (O(T (mn)^2) memory)
    std::optional<WeightOrientation> orientation;  // overrides the topology default
    std::uint64_t replication = 0;
};

WeightOrientation default_orientation(const Scenario& scenario);

// Dense per-step state recorded when snapshots are on; everything the
// error-recursion and transition-product diagnostics need.
struct StepSnapshot {
    std::vector<Eigen::VectorXd> phi;    // n regressors
    Eigen::VectorXd w;                   // w_{t+1}
    Eigen::VectorXd y;                   // y_{t+1}
    Eigen::VectorXd delta_theta;         // theta_{t+1} - theta_t
    std::vector<Eigen::MatrixXd> P_bar_inv;  // n, time t+1
    std::vector<Eigen::VectorXd> gain;   // n, L_{t,i}
    Eigen::MatrixXd weights;             // n x n effective combine matrix at step t
};

// Full log of one replication. Row t of the scalar series describes time t;
// there are horizon + 1 rows (row 0 is the initialization).
struct TrajectoryRecord {
    int n = 0;
    int m = 0;
    int horizon = 0;
    double alpha = 1.0;
    WeightOrientation orientation = WeightOrientation::Row;
    std::vector<Eigen::VectorXd> theta;                   // T+1
    std::vector<std::vector<Eigen::VectorXd>> estimates;  // T+1 x n
    std::vector<std::vector<double>> err_sq;              // T+1 x n, |theta - est|^2
    std::vector<double> mse;                              // T+1, mean over sensors
    std::vector<int> topo_index;                          // T+1, zero-based (0 when fixed)
    std::vector<double> noise_norm;                       // T, |W_{t+1}|
    std::vector<double> dtheta_norm;                      // T, |delta theta_t|

    bool has_snapshots = false;
    std::vector<std::vector<Eigen::MatrixXd>> P;  // T+1 x n (snapshots only)
    std::vector<StepSnapshot> steps;              // T (snapshots only)

    // Stacked error col(theta_t - est_{t,i}) at row t.
    Eigen::VectorXd stacked_error(int t) const;
    // Block diagonal of the recorded per-sensor P at row t (snapshots only).
    Eigen::MatrixXd block_P(int t) const;
};

// Runs the full simulation: per-step generate, adapt, exchange, combine,
// for fixed or Markovian switching topology. Deterministic given the seed.
TrajectoryRecord run(const Scenario& scenario, const EngineOptions& options = {});

// The state transition matrix of the homogeneous error dynamics over
// [k, t], computed two independent ways.
struct TransitionProduct {
    int k = 0;
    int t = 0;
    Eigen::MatrixXd Psi;          // iterated product of alpha P_{j+1} (A (x) I) P_j^{-1}
    Eigen::MatrixXd Psi_closed;   // alpha^{t-k} P_t (A (x) I)^{t-k} P_k^{-1}
};

// Requires snapshots and a fixed topology. Psi(k, k) = I.
TransitionProduct transition_product(const TrajectoryRecord& record, int k, int t);

// Max over steps of the deviation between the stacked error recursion and
// the direct difference, normalized by 1 + |error|. Requires snapshots.
double consistency_check(const TrajectoryRecord& record);

}  // namespace dffls
