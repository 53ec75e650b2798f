#pragma once

#include <Eigen/Dense>
#include <vector>

#include "dffls/engine.hpp"
#include "dffls/oracle.hpp"
#include "dffls/scenario.hpp"

namespace dffls {

// Cooperative excitation diagnostics over windows k in [t h + 1, (t+1) h].
struct ExcitationReport {
    int h = 1;
    int replications = 1;
    int windows = 0;
    bool conditional_estimate = true;  // false for feedback generators: realized only
    std::vector<double> lambda_hat;       // per window, eigenvalue of the MC-averaged matrix
    std::vector<double> lambda_realized;  // per window, replication-0 sample path
    std::vector<std::vector<double>> sensor_lambda_hat;  // [sensor][window], single-sensor analogue
    double min_lambda_hat = 0.0;
    double min_lambda_se = 0.0;  // std error of the per-replication eigenvalue at the argmin window
    double lambda0 = 0.0;        // min_lambda_hat - 2 se; the operational lower bound
    bool network_pass = false;   // sufficient condition: inf_t lambda_t >= lambda0 > 0
    std::vector<bool> sensor_pass;

    // Diagnostic constants of the stability analysis (not acceptance
    // thresholds): a_min = min entry of A^{D_G}, the graph diameter, and the
    // forgetting-factor lower bound lambda^(a_min^2 / (32 p m h (4h + D - 1)))
    // with lambda = 1 - lambda0. For switching topologies D is n s q_0.
    double a_min = 0.0;
    int diameter_or_nsq0 = 0;
    double alpha_lower_bound = 0.0;
};

ExcitationReport excitation_report(const Scenario& scenario, int h, int replications);

// Monte Carlo tracking-error summary across replications.
struct TrackingReport {
    double p = 2.0;
    int replications = 0;
    std::vector<double> lp_norm;  // per time index, (R^-1 sum |err|^p)^(1/p)
    double tail_mean = 0.0;       // mean over the last quarter of the horizon
    double tail_max = 0.0;
    double tail_mean_mse = 0.0;   // network MSE averaged the same way
    double sigma_3p_hat = 0.0;    // sup_t (|W_t|_{L3p} + |dTheta_t|_{L3p}) estimate
};

TrackingReport tracking_report(const Scenario& scenario, double p, int replications,
                               const EngineOptions& base_options = {});

// Least-squares fit of log |Psi(t,0)| against t over the second half of the
// horizon. Negative slope is the empirical form of exponential stability.
struct DecayFit {
    double slope = 0.0;
    double r_squared = 0.0;
};

enum class MatrixNorm { Spectral, Frobenius };

DecayFit decay_fit(const TrajectoryRecord& record, MatrixNorm norm = MatrixNorm::Spectral);

}  // namespace dffls
