// Command-line harness for diffusion FFLS simulations: run scenarios,
// cross-check the recursion against the batch solution, and produce
// excitation reports.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <nlohmann/json.hpp>
#include <random>

#include "dffls/config.hpp"
#include "dffls/csv.hpp"
#include "dffls/engine.hpp"
#include "dffls/metrics.hpp"
#include "dffls/oracle.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace dffls;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitVerification = 4;

struct CommonArgs {
    std::string config_path;
    std::string manifest_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> replications;
    std::string orientation;
    bool snapshots = false;
    bool allow_unverified = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "scenario configuration file (JSON)");
    cmd->add_option("--from-manifest", args.manifest_path,
                    "re-run the exact configuration recorded in a run manifest");
    cmd->add_option("--seed", args.seed, "override the master seed");
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--replications", args.replications, "override replication count");
    cmd->add_option("--orientation", args.orientation,
                    "combine-weight orientation: row (a_ij) or column (a_ji)");
    cmd->add_flag("--snapshots", args.snapshots, "record dense per-step matrices");
    cmd->add_flag("--allow-unverified-assumptions", args.allow_unverified,
                  "skip balancedness / ergodicity validation");
}

RunConfig resolve(const CommonArgs& args) {
    if (args.config_path.empty() == args.manifest_path.empty()) {
        throw ConfigInvalid("exactly one of --config or --from-manifest is required");
    }
    RunConfig cfg = args.manifest_path.empty() ? load_config(args.config_path)
                                               : load_manifest(args.manifest_path);
    if (args.seed) cfg.scenario.seed = *args.seed;
    if (args.replications) cfg.replications = *args.replications;
    if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
    if (args.snapshots) cfg.snapshots = true;
    if (!args.orientation.empty()) cfg.orientation = parse_orientation(args.orientation);
    validate_assumptions(cfg, args.allow_unverified);
    return cfg;
}

void ensure_out_dir(const RunConfig& cfg) {
    fs::create_directories(cfg.out_dir);
}

int cmd_simulate(const CommonArgs& args) {
    const RunConfig cfg = resolve(args);
    EngineOptions opt;
    opt.snapshots = cfg.snapshots;
    opt.orientation = cfg.orientation;
    const TrajectoryRecord rec = run(cfg.scenario, opt);
    ensure_out_dir(cfg);
    const fs::path dir(cfg.out_dir);
    if (cfg.write_csv) write_trajectory_csv(rec, (dir / "trajectory.csv").string());
    if (cfg.write_json) {
        write_text_file((dir / "manifest.json").string(),
                        make_manifest(cfg, rec.orientation).dump(2) + "\n");
    }
    std::cout << "wrote " << (rec.horizon + 1) << " rows (n=" << rec.n << ", m=" << rec.m
              << ", orientation=" << orientation_name(rec.orientation)
              << ") to " << cfg.out_dir << "\n";
    std::cout << "final mse " << rec.mse.back() << "\n";
    return kExitOk;
}

double relative_dev(const Eigen::MatrixXd& a, const Eigen::MatrixXd& ref) {
    return (a - ref).norm() / (1.0 + ref.norm());
}

int cmd_verify(const CommonArgs& args) {
    RunConfig cfg = resolve(args);
    if (cfg.scenario.is_switching()) {
        throw ConfigInvalid("verify: batch cross-check requires a fixed topology");
    }
    if (cfg.scenario.horizon > 50) {
        throw ConfigInvalid(
            "verify: horizon capped at 50 (the batch solution costs O(T^2))");
    }
    EngineOptions opt;
    opt.snapshots = true;
    opt.orientation = cfg.orientation;
    const TrajectoryRecord rec = run(cfg.scenario, opt);
    const auto data = replay(cfg.scenario);
    const Eigen::MatrixXd& A = cfg.scenario.fixed_graph().adjacency();
    const Eigen::MatrixXd C =
        rec.orientation == WeightOrientation::Row ? A : Eigen::MatrixXd(A.transpose());

    double batch_dev = 0.0;
    for (int t = 1; t <= cfg.scenario.horizon; ++t) {
        const BatchSolution sol = batch_solve(cfg.scenario, data, C, t);
        for (int i = 0; i < cfg.scenario.n; ++i) {
            batch_dev = std::max(
                batch_dev, relative_dev(rec.estimates[static_cast<size_t>(t)][static_cast<size_t>(i)],
                                        sol.theta_hat[static_cast<size_t>(i)]));
            batch_dev = std::max(batch_dev,
                                 relative_dev(rec.P[static_cast<size_t>(t)][static_cast<size_t>(i)],
                                              sol.P[static_cast<size_t>(i)]));
        }
    }

    const double consistency_dev = consistency_check(rec);

    // rank-one update identity on random positive definite inputs
    std::mt19937_64 rng(cfg.scenario.seed ^ 0x5eedULL);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif_alpha(0.1, 1.0);
    double rank_one_dev = 0.0;
    const int m = cfg.scenario.m;
    for (int trial = 0; trial < 200; ++trial) {
        Eigen::MatrixXd G(m, m);
        for (int r = 0; r < m; ++r)
            for (int c = 0; c < m; ++c) G(r, c) = gauss(rng);
        const Eigen::MatrixXd P =
            G * G.transpose() + 0.1 * Eigen::MatrixXd::Identity(m, m);
        Eigen::VectorXd phi(m);
        for (int r = 0; r < m; ++r) phi(r) = gauss(rng);
        const double alpha = unif_alpha(rng);
        SensorState st{Eigen::VectorXd::Zero(m), P};
        const IntermediateState bar = adapt(st, phi, 0.0, alpha);
        const Eigen::MatrixXd direct =
            (alpha * P.inverse() + phi * phi.transpose()).inverse();
        rank_one_dev = std::max(rank_one_dev, (bar.P_bar - direct).norm() / direct.norm());
    }

    double telescope_dev = 0.0;
    const int window = std::min(10, cfg.scenario.horizon);
    for (int k = 0; k + window <= cfg.scenario.horizon; k += window) {
        const TransitionProduct tp = transition_product(rec, k, k + window);
        telescope_dev =
            std::max(telescope_dev, (tp.Psi - tp.Psi_closed).norm() / (1.0 + tp.Psi_closed.norm()));
    }

    struct Check {
        const char* name;
        double value;
        double tol;
    };
    const Check checks[] = {
        {"batch-vs-recursive", batch_dev, 1e-9},
        {"error-recursion-consistency", consistency_dev, 1e-6},
        {"rank-one-identity", rank_one_dev, 1e-8},
        {"telescoping-identity", telescope_dev, 1e-8},
    };
    bool ok = true;
    for (const auto& c : checks) {
        const bool pass = c.value <= c.tol;
        ok = ok && pass;
        std::cout << (pass ? "PASS" : "FAIL") << "  " << c.name << "  max deviation "
                  << c.value << "  (tolerance " << c.tol << ")\n";
    }
    return ok ? kExitOk : kExitVerification;
}

json excitation_to_json(const ExcitationReport& rep) {
    json j;
    j["h"] = rep.h;
    j["replications"] = rep.replications;
    j["windows"] = rep.windows;
    j["conditional_estimate"] = rep.conditional_estimate;
    j["lambda_hat"] = rep.lambda_hat;
    j["lambda_realized"] = rep.lambda_realized;
    j["min_lambda_hat"] = rep.min_lambda_hat;
    j["min_lambda_se"] = rep.min_lambda_se;
    j["lambda0"] = rep.lambda0;
    j["network_pass"] = rep.network_pass;
    json sensors = json::array();
    for (size_t i = 0; i < rep.sensor_pass.size(); ++i) {
        sensors.push_back({{"pass", static_cast<bool>(rep.sensor_pass[i])},
                           {"lambda_hat", rep.sensor_lambda_hat[i]}});
    }
    j["sensors"] = sensors;
    j["a_min"] = rep.a_min;
    j["diameter_or_nsq0"] = rep.diameter_or_nsq0;
    j["alpha_lower_bound"] = rep.alpha_lower_bound;
    return j;
}

int cmd_excitation(const CommonArgs& args) {
    const RunConfig cfg = resolve(args);
    const ExcitationReport rep = excitation_report(cfg.scenario, cfg.h, cfg.replications);
    ensure_out_dir(cfg);
    const fs::path dir(cfg.out_dir);
    write_text_file((dir / "excitation.json").string(), excitation_to_json(rep).dump(2) + "\n");
    write_text_file((dir / "excitation.csv").string(), excitation_csv(rep));
    std::cout << "network excitation: " << (rep.network_pass ? "pass" : "fail")
              << " (lambda0 = " << rep.lambda0 << " over " << rep.windows << " windows)\n";
    for (size_t i = 0; i < rep.sensor_pass.size(); ++i) {
        std::cout << "sensor " << i << ": " << (rep.sensor_pass[i] ? "pass" : "fail") << "\n";
    }
    if (!rep.network_pass) {
        std::cout << "excitation condition not satisfied; stability guarantees do not apply\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"diffusion forgetting-factor least squares simulator"};
    app.require_subcommand(1);

    CommonArgs sim_args, ver_args, exc_args;
    CLI::App* sim = app.add_subcommand("simulate", "run a scenario and write trajectory CSV");
    add_common(sim, sim_args);
    CLI::App* ver = app.add_subcommand(
        "verify", "cross-check the recursion against independent closed forms");
    add_common(ver, ver_args);
    CLI::App* exc = app.add_subcommand("excitation", "cooperative excitation report");
    add_common(exc, exc_args);

    CLI11_PARSE(app, argc, argv);
    try {
        if (sim->parsed()) return cmd_simulate(sim_args);
        if (ver->parsed()) return cmd_verify(ver_args);
        if (exc->parsed()) return cmd_excitation(exc_args);
    } catch (const ConfigInvalid& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}
