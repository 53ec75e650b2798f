#include "dffls/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dffls {

namespace {

double min_eig(const Eigen::MatrixXd& sym) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    return es.eigenvalues().minCoeff();
}

double spectral_norm(const Eigen::MatrixXd& M) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    return svd.singularValues()(0);
}

}  // namespace

ExcitationReport excitation_report(const Scenario& scenario, int h, int replications) {
    scenario.validate();
    if (h < 1) throw PreconditionViolated("excitation window h must be >= 1");
    if (replications < 1) throw PreconditionViolated("need at least one replication");
    const int n = scenario.n;
    // Window t needs phi_k for k in [t h + 1, (t+1) h]; phi exists up to horizon - 1.
    const int windows = scenario.horizon >= 1 ? (scenario.horizon - 1) / h : 0;
    if (windows < 1) {
        throw WindowExceedsHorizon("horizon too short for one excitation window");
    }

    ExcitationReport rep;
    rep.h = h;
    rep.windows = windows;
    rep.conditional_estimate = std::none_of(
        scenario.regressors.begin(), scenario.regressors.end(), [](const RegressorSpec& r) {
            return r.kind == RegressorSpec::Kind::ArxFeedback;
        });
    // Feedback generators close the loop over their own outputs, so averaging
    // across replications does not estimate the conditional expectation;
    // report the realized sample path only.
    const int R = rep.conditional_estimate ? replications : 1;
    rep.replications = R;

    const int m = scenario.m;
    const double net_scale = 1.0 / (static_cast<double>(n) * (1.0 + h));
    const double sensor_scale = 1.0 / (1.0 + h);

    // accumulated window matrices and per-replication eigenvalues
    std::vector<Eigen::MatrixXd> net_sum(static_cast<size_t>(windows),
                                         Eigen::MatrixXd::Zero(m, m));
    std::vector<std::vector<double>> net_eigs(static_cast<size_t>(windows));
    std::vector<std::vector<Eigen::MatrixXd>> sensor_sum(
        static_cast<size_t>(n),
        std::vector<Eigen::MatrixXd>(static_cast<size_t>(windows), Eigen::MatrixXd::Zero(m, m)));
    std::vector<std::vector<std::vector<double>>> sensor_eigs(
        static_cast<size_t>(n), std::vector<std::vector<double>>(static_cast<size_t>(windows)));
    rep.lambda_realized.assign(static_cast<size_t>(windows), 0.0);

    for (int r = 0; r < R; ++r) {
        const auto data = replay(scenario, static_cast<std::uint64_t>(r));
        for (int t = 0; t < windows; ++t) {
            Eigen::MatrixXd net = Eigen::MatrixXd::Zero(m, m);
            for (int i = 0; i < n; ++i) {
                Eigen::MatrixXd per = Eigen::MatrixXd::Zero(m, m);
                for (int k = t * h + 1; k <= (t + 1) * h; ++k) {
                    const Eigen::VectorXd& phi = data[static_cast<size_t>(k)].phi[static_cast<size_t>(i)];
                    per += (phi * phi.transpose()) / (1.0 + phi.squaredNorm());
                }
                net += per;
                sensor_sum[static_cast<size_t>(i)][static_cast<size_t>(t)] += sensor_scale * per;
                sensor_eigs[static_cast<size_t>(i)][static_cast<size_t>(t)].push_back(
                    min_eig(sensor_scale * per));
            }
            const Eigen::MatrixXd realized = net_scale * net;
            net_sum[static_cast<size_t>(t)] += realized;
            net_eigs[static_cast<size_t>(t)].push_back(min_eig(realized));
            if (r == 0) rep.lambda_realized[static_cast<size_t>(t)] = min_eig(realized);
        }
    }

    const auto std_error = [](const std::vector<double>& xs) {
        if (xs.size() < 2) return 0.0;
        const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
        double var = 0.0;
        for (double x : xs) var += (x - mean) * (x - mean);
        var /= static_cast<double>(xs.size() - 1);
        return std::sqrt(var / static_cast<double>(xs.size()));
    };

    rep.lambda_hat.resize(static_cast<size_t>(windows));
    int argmin = 0;
    for (int t = 0; t < windows; ++t) {
        rep.lambda_hat[static_cast<size_t>(t)] = min_eig(net_sum[static_cast<size_t>(t)] / R);
        if (rep.lambda_hat[static_cast<size_t>(t)] < rep.lambda_hat[static_cast<size_t>(argmin)]) {
            argmin = t;
        }
    }
    rep.min_lambda_hat = rep.lambda_hat[static_cast<size_t>(argmin)];
    rep.min_lambda_se = std_error(net_eigs[static_cast<size_t>(argmin)]);
    rep.lambda0 = rep.min_lambda_hat - 2.0 * rep.min_lambda_se;
    rep.network_pass = rep.lambda0 > 0.0;

    rep.sensor_lambda_hat.resize(static_cast<size_t>(n));
    rep.sensor_pass.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        auto& lam = rep.sensor_lambda_hat[static_cast<size_t>(i)];
        lam.resize(static_cast<size_t>(windows));
        int amin = 0;
        for (int t = 0; t < windows; ++t) {
            lam[static_cast<size_t>(t)] =
                min_eig(sensor_sum[static_cast<size_t>(i)][static_cast<size_t>(t)] / R);
            if (lam[static_cast<size_t>(t)] < lam[static_cast<size_t>(amin)]) amin = t;
        }
        const double se = std_error(sensor_eigs[static_cast<size_t>(i)][static_cast<size_t>(amin)]);
        rep.sensor_pass[static_cast<size_t>(i)] = lam[static_cast<size_t>(amin)] - 2.0 * se > 0.0;
    }

    // Diagnostic stability constants (reported, never thresholds).
    const int p_for_bound = 2;
    if (!scenario.is_switching()) {
        const auto& g = scenario.fixed_graph();
        const Eigen::MatrixXd& A = g.adjacency();
        const bool undirected = (A - A.transpose()).cwiseAbs().maxCoeff() <= 1e-12;
        if (undirected && is_connected_undirected(g)) {
            rep.diameter_or_nsq0 = std::max(1, diameter(g));
            rep.a_min = matrix_power_min_entry(g, rep.diameter_or_nsq0);
        }
    } else {
        const auto& mk = scenario.markov();
        const int q0 = markov_positivity_index(mk);
        if (q0 > 0) {
            rep.diameter_or_nsq0 = n * mk.states() * q0;
            double amin = 1.0;
            for (const auto& g : mk.graphs()) {
                for (int i = 0; i < n; ++i) {
                    for (int j = 0; j < n; ++j) {
                        const double a = g.weight(i, j);
                        if (a > 0.0) amin = std::min(amin, a);
                    }
                }
            }
            rep.a_min = amin;
        }
    }
    if (rep.network_pass && rep.a_min > 0.0 && rep.diameter_or_nsq0 > 0) {
        const double lambda = 1.0 - rep.lambda0;
        const double expo = rep.a_min * rep.a_min /
                            (32.0 * p_for_bound * m * h * (4.0 * h + rep.diameter_or_nsq0 - 1.0));
        rep.alpha_lower_bound = std::pow(lambda, expo);
    } else {
        rep.alpha_lower_bound = 1.0;  // not identifiable from this run
    }
    return rep;
}

TrackingReport tracking_report(const Scenario& scenario, double p, int replications,
                               const EngineOptions& base_options) {
    if (replications < 2) throw PreconditionViolated("tracking report needs R >= 2");
    const int T = scenario.horizon;
    TrackingReport rep;
    rep.p = p;
    rep.replications = replications;

    std::vector<double> err_pow(static_cast<size_t>(T) + 1, 0.0);
    std::vector<double> mse_sum(static_cast<size_t>(T) + 1, 0.0);
    std::vector<double> noise_pow(static_cast<size_t>(T), 0.0);
    std::vector<double> dtheta_pow(static_cast<size_t>(T), 0.0);
    for (int r = 0; r < replications; ++r) {
        EngineOptions opt = base_options;
        opt.snapshots = false;
        opt.replication = static_cast<std::uint64_t>(r);
        const TrajectoryRecord rec = run(scenario, opt);
        for (int t = 0; t <= T; ++t) {
            err_pow[static_cast<size_t>(t)] += std::pow(rec.stacked_error(t).norm(), p);
            mse_sum[static_cast<size_t>(t)] += rec.mse[static_cast<size_t>(t)];
        }
        for (int t = 0; t < T; ++t) {
            noise_pow[static_cast<size_t>(t)] +=
                std::pow(rec.noise_norm[static_cast<size_t>(t)], 3.0 * p);
            dtheta_pow[static_cast<size_t>(t)] +=
                std::pow(rec.dtheta_norm[static_cast<size_t>(t)], 3.0 * p);
        }
    }
    rep.lp_norm.resize(static_cast<size_t>(T) + 1);
    for (int t = 0; t <= T; ++t) {
        rep.lp_norm[static_cast<size_t>(t)] =
            std::pow(err_pow[static_cast<size_t>(t)] / replications, 1.0 / p);
    }
    const int tail_start = T - T / 4;
    double tail_sum = 0.0, tail_mse = 0.0;
    rep.tail_max = 0.0;
    int count = 0;
    for (int t = tail_start; t <= T; ++t, ++count) {
        tail_sum += rep.lp_norm[static_cast<size_t>(t)];
        tail_mse += mse_sum[static_cast<size_t>(t)] / replications;
        rep.tail_max = std::max(rep.tail_max, rep.lp_norm[static_cast<size_t>(t)]);
    }
    rep.tail_mean = count > 0 ? tail_sum / count : 0.0;
    rep.tail_mean_mse = count > 0 ? tail_mse / count : 0.0;
    for (int t = 0; t < T; ++t) {
        const double s3p = std::pow(noise_pow[static_cast<size_t>(t)] / replications, 1.0 / (3.0 * p)) +
                           std::pow(dtheta_pow[static_cast<size_t>(t)] / replications, 1.0 / (3.0 * p));
        rep.sigma_3p_hat = std::max(rep.sigma_3p_hat, s3p);
    }
    return rep;
}

DecayFit decay_fit(const TrajectoryRecord& record, MatrixNorm norm) {
    if (!record.has_snapshots) throw SnapshotsMissing("decay fit needs P snapshots");
    const int T = record.horizon;
    if (T < 4) throw PreconditionViolated("decay fit needs a longer horizon");
    for (int j = 1; j < T; ++j) {
        if (!record.steps[static_cast<size_t>(j)].weights.isApprox(record.steps[0].weights)) {
            throw PreconditionViolated("decay fit requires a fixed topology");
        }
    }
    const int mn = record.n * record.m;
    const Eigen::MatrixXd A_kron = kron_identity(record.steps[0].weights, record.m);
    const Eigen::MatrixXd P0_inv = record.block_P(0).inverse();
    const double log_alpha = std::log(record.alpha);

    // log |Psi(t,0)| = t log(alpha) + log |P_t A^t P_0^{-1}|; the split keeps
    // the power of alpha out of floating point.
    Eigen::MatrixXd A_pow = Eigen::MatrixXd::Identity(mn, mn);
    std::vector<double> xs, ys;
    const int start = T / 2;
    for (int t = 1; t <= T; ++t) {
        A_pow = A_pow * A_kron;
        if (t < start) continue;
        const Eigen::MatrixXd core = record.block_P(t) * A_pow * P0_inv;
        const double nrm = norm == MatrixNorm::Spectral ? spectral_norm(core) : core.norm();
        if (nrm <= 0.0) continue;
        xs.push_back(static_cast<double>(t));
        ys.push_back(t * log_alpha + std::log(nrm));
    }
    DecayFit fit;
    const size_t N = xs.size();
    if (N < 2) return fit;
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < N; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
        syy += ys[i] * ys[i];
    }
    const double denom = N * sxx - sx * sx;
    fit.slope = (N * sxy - sx * sy) / denom;
    const double ss_tot = syy - sy * sy / N;
    const double ss_res = ss_tot - fit.slope * (sxy - sx * sy / N);
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

}  // namespace dffls
