#pragma once

#include <Eigen/Dense>
#include <vector>

#include "dffls/errors.hpp"

namespace dffls {

// Per-sensor memory of the algorithm: the estimate and its (symmetric
// positive definite) covariance-like matrix P.
struct SensorState {
    Eigen::VectorXd theta_hat;
    Eigen::MatrixXd P;
};

// Output of the adapt step, with the cached quantities the combine step
// consumes: the information form P_bar^{-1} and q_bar = P_bar^{-1} theta_bar.
struct IntermediateState {
    Eigen::VectorXd theta_bar;
    Eigen::MatrixXd P_bar;
    Eigen::MatrixXd P_bar_inv;
    Eigen::VectorXd q_bar;
};

// Local update from one observation:
//   theta_bar = theta_hat + P phi (alpha + phi^T P phi)^{-1} (y - phi^T theta_hat)
//   P_bar     = (1/alpha) (P - P phi phi^T P / (alpha + phi^T P phi))
// equivalently P_bar^{-1} = alpha P^{-1} + phi phi^T (rank-one update identity).
// P_bar is symmetrized after the update. Throws NonFiniteInput.
IntermediateState adapt(const SensorState& state, const Eigen::VectorXd& phi, double y,
                        double alpha);

// Convex fusion of neighbors' information quantities:
//   P_new^{-1} = sum_j a_j P_bar_j^{-1},  theta_new = P_new sum_j a_j q_bar_j.
// Weights must be nonnegative and sum to 1 within 1e-12. Throws
// SingularCombination if the weighted information sum is not invertible
// (an internal-consistency failure for PD inputs).
SensorState combine(const std::vector<std::pair<const IntermediateState*, double>>& neighbors);

// Non-cooperative FFLS step: adapt followed by combine with the single
// weight 1 (identity-topology reduction of the diffusion algorithm).
SensorState standard_ffls_step(const SensorState& state, const Eigen::VectorXd& phi, double y,
                               double alpha);

// Block matrices of one network step, as recorded by the engine, for the
// stacked estimation-error recursion.
struct ErrorUpdateContext {
    Eigen::MatrixXd P_t;          // mn x mn block diagonal
    Eigen::MatrixXd P_next;       // mn x mn block diagonal
    Eigen::MatrixXd P_bar_inv;    // mn x mn block diagonal (time t+1)
    Eigen::MatrixXd L;            // mn x n block diagonal of per-sensor gains
    Eigen::MatrixXd weights;      // n x n effective combine weight matrix
    Eigen::VectorXd W_next;       // n
    Eigen::VectorXd delta_Theta;  // mn
};

// One application of the stacked error recursion
//   e_{t+1} = alpha P_{t+1} (A (x) I_m) P_t^{-1} e_t
//           - P_{t+1} (A (x) I_m) P_bar^{-1} (L W_{t+1} - delta_Theta),
// used as a consistency diagnostic against the direct difference. (The
// delta_Theta sign follows from delta_theta = theta_{t+1} - theta_t and the
// per-sensor expansion; it is exact, not an approximation.)
Eigen::VectorXd error_update(const Eigen::VectorXd& prev_errors, const ErrorUpdateContext& ctx,
                             double alpha);

// Kronecker product weights (x) I_m.
Eigen::MatrixXd kron_identity(const Eigen::MatrixXd& weights, int m);

}  // namespace dffls
