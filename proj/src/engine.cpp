#include "dffls/engine.hpp"

#include <cmath>
#include <sstream>

namespace dffls {

WeightOrientation default_orientation(const Scenario& scenario) {
    return scenario.is_switching() ? WeightOrientation::Column : WeightOrientation::Row;
}

Eigen::VectorXd TrajectoryRecord::stacked_error(int t) const {
    Eigen::VectorXd e(n * m);
    for (int i = 0; i < n; ++i) {
        e.segment(i * m, m) =
            theta[static_cast<size_t>(t)] - estimates[static_cast<size_t>(t)][static_cast<size_t>(i)];
    }
    return e;
}

Eigen::MatrixXd TrajectoryRecord::block_P(int t) const {
    if (!has_snapshots) throw SnapshotsMissing("dense P snapshots were not recorded");
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n * m, n * m);
    for (int i = 0; i < n; ++i) {
        out.block(i * m, i * m, m, m) = P[static_cast<size_t>(t)][static_cast<size_t>(i)];
    }
    return out;
}

namespace {

// Effective combine matrix C for the topology in force at step t:
// row i of C holds sensor i's weights.
Eigen::MatrixXd combine_matrix(const Eigen::MatrixXd& A, WeightOrientation orientation) {
    return orientation == WeightOrientation::Row ? A : Eigen::MatrixXd(A.transpose());
}

void record_row(TrajectoryRecord& rec, const Eigen::VectorXd& theta,
                const std::vector<SensorState>& sensors, int topo_index) {
    rec.theta.push_back(theta);
    std::vector<Eigen::VectorXd> ests;
    std::vector<double> errs;
    double mse = 0.0;
    for (const auto& s : sensors) {
        ests.push_back(s.theta_hat);
        const double e = (theta - s.theta_hat).squaredNorm();
        errs.push_back(e);
        mse += e;
    }
    rec.estimates.push_back(std::move(ests));
    rec.err_sq.push_back(std::move(errs));
    rec.mse.push_back(mse / static_cast<double>(sensors.size()));
    rec.topo_index.push_back(topo_index);
}

}  // namespace

TrajectoryRecord run(const Scenario& scenario, const EngineOptions& options) {
    scenario.validate();
    const int n = scenario.n;
    const int m = scenario.m;
    const int T = scenario.horizon;
    const WeightOrientation orientation =
        options.orientation.value_or(default_orientation(scenario));

    TrajectoryRecord rec;
    rec.n = n;
    rec.m = m;
    rec.horizon = T;
    rec.alpha = scenario.alpha;
    rec.orientation = orientation;
    rec.has_snapshots = options.snapshots;

    // Topology path: r(t) for t = 0..T; constant 0 when fixed.
    std::vector<int> path(static_cast<size_t>(T) + 1, 0);
    if (scenario.is_switching()) {
        auto rng = make_stream(scenario.seed, options.replication, kNetworkStream,
                               StreamRole::Markov);
        path = markov_sample_path(scenario.markov(), T + 1, rng);
    }

    std::vector<SensorState> sensors(static_cast<size_t>(n));
    for (auto& s : sensors) {
        s.theta_hat = scenario.initial_estimate();
        s.P = scenario.p0_scale * Eigen::MatrixXd::Identity(m, m);
    }

    ScenarioGenerator gen(scenario, options.replication);
    record_row(rec, gen.theta(), sensors, path[0]);
    if (options.snapshots) {
        std::vector<Eigen::MatrixXd> Ps;
        for (const auto& s : sensors) Ps.push_back(s.P);
        rec.P.push_back(std::move(Ps));
    }

    for (int t = 0; t < T; ++t) {
        const StepData step = gen.generate_step();
        const Eigen::MatrixXd& A = scenario.is_switching()
                                       ? scenario.markov().graph(path[static_cast<size_t>(t)]).adjacency()
                                       : scenario.fixed_graph().adjacency();
        const Eigen::MatrixXd C = combine_matrix(A, orientation);

        std::vector<IntermediateState> bars;
        bars.reserve(static_cast<size_t>(n));
        try {
            for (int i = 0; i < n; ++i) {
                bars.push_back(adapt(sensors[static_cast<size_t>(i)],
                                     step.phi[static_cast<size_t>(i)], step.y(i),
                                     scenario.alpha));
            }
            std::vector<SensorState> next(static_cast<size_t>(n));
            for (int i = 0; i < n; ++i) {
                std::vector<std::pair<const IntermediateState*, double>> neighbors;
                for (int j = 0; j < n; ++j) {
                    if (C(i, j) > 0.0) neighbors.emplace_back(&bars[static_cast<size_t>(j)], C(i, j));
                }
                next[static_cast<size_t>(i)] = combine(neighbors);
            }
            sensors = std::move(next);
        } catch (const Error& e) {
            std::ostringstream os;
            os << "step t=" << t << ": " << e.what();
            throw RuntimeFailure(os.str());
        }

        rec.noise_norm.push_back(step.w.norm());
        rec.dtheta_norm.push_back(step.delta_theta.norm());
        record_row(rec, gen.theta(), sensors, path[static_cast<size_t>(t) + 1]);

        if (options.snapshots) {
            StepSnapshot snap;
            snap.phi = step.phi;
            snap.w = step.w;
            snap.y = step.y;
            snap.delta_theta = step.delta_theta;
            snap.weights = C;
            for (int i = 0; i < n; ++i) {
                snap.P_bar_inv.push_back(bars[static_cast<size_t>(i)].P_bar_inv);
                const auto& P_prev = rec.P.back()[static_cast<size_t>(i)];
                const Eigen::VectorXd& phi = step.phi[static_cast<size_t>(i)];
                const Eigen::VectorXd P_phi = P_prev * phi;
                snap.gain.push_back(P_phi / (scenario.alpha + phi.dot(P_phi)));
            }
            rec.steps.push_back(std::move(snap));
            std::vector<Eigen::MatrixXd> Ps;
            for (const auto& s : sensors) Ps.push_back(s.P);
            rec.P.push_back(std::move(Ps));
        }
    }
    return rec;
}

TransitionProduct transition_product(const TrajectoryRecord& record, int k, int t) {
    if (!record.has_snapshots) throw SnapshotsMissing("transition product needs P snapshots");
    if (k < 0 || t < k || t > record.horizon) {
        throw PreconditionViolated("transition product: need 0 <= k <= t <= horizon");
    }
    const int mn = record.n * record.m;
    for (int j = k; j < t; ++j) {
        if (!record.steps[static_cast<size_t>(j)].weights.isApprox(
                record.steps[static_cast<size_t>(k)].weights)) {
            throw PreconditionViolated("transition product requires a fixed topology");
        }
    }
    TransitionProduct out;
    out.k = k;
    out.t = t;
    out.Psi = Eigen::MatrixXd::Identity(mn, mn);
    if (t == k) {
        out.Psi_closed = out.Psi;
        return out;
    }
    const Eigen::MatrixXd A_kron =
        kron_identity(record.steps[static_cast<size_t>(k)].weights, record.m);
    for (int j = k; j < t; ++j) {
        const Eigen::MatrixXd Pj = record.block_P(j);
        const Eigen::MatrixXd Pj1 = record.block_P(j + 1);
        out.Psi = record.alpha * Pj1 * A_kron * Pj.partialPivLu().solve(out.Psi);
    }
    Eigen::MatrixXd A_pow = Eigen::MatrixXd::Identity(mn, mn);
    for (int j = 0; j < t - k; ++j) A_pow = A_pow * A_kron;
    out.Psi_closed = std::pow(record.alpha, t - k) * record.block_P(t) * A_pow *
                     record.block_P(k).inverse();
    return out;
}

double consistency_check(const TrajectoryRecord& record) {
    if (!record.has_snapshots) throw SnapshotsMissing("consistency check needs snapshots");
    double max_dev = 0.0;
    for (int t = 0; t < record.horizon; ++t) {
        const auto& snap = record.steps[static_cast<size_t>(t)];
        ErrorUpdateContext ctx;
        ctx.P_t = record.block_P(t);
        ctx.P_next = record.block_P(t + 1);
        ctx.weights = snap.weights;
        const int mn = record.n * record.m;
        ctx.P_bar_inv = Eigen::MatrixXd::Zero(mn, mn);
        ctx.L = Eigen::MatrixXd::Zero(mn, record.n);
        for (int i = 0; i < record.n; ++i) {
            ctx.P_bar_inv.block(i * record.m, i * record.m, record.m, record.m) =
                snap.P_bar_inv[static_cast<size_t>(i)];
            ctx.L.block(i * record.m, i, record.m, 1) = snap.gain[static_cast<size_t>(i)];
        }
        ctx.W_next = snap.w;
        Eigen::VectorXd dTheta(mn);
        for (int i = 0; i < record.n; ++i) dTheta.segment(i * record.m, record.m) = snap.delta_theta;
        ctx.delta_Theta = dTheta;

        const Eigen::VectorXd predicted = error_update(record.stacked_error(t), ctx, record.alpha);
        const Eigen::VectorXd direct = record.stacked_error(t + 1);
        const double dev = (predicted - direct).norm() / (1.0 + direct.norm());
        max_dev = std::max(max_dev, dev);
    }
    return max_dev;
}

}  // namespace dffls
