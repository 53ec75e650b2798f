#include "dffls/config.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

namespace dffls {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& msg) {
    throw ConfigInvalid(field + ": " + msg);
}

const json& require(const json& j, const std::string& key, const std::string& path) {
    if (!j.contains(key)) fail(path + "." + key, "missing required field");
    return j.at(key);
}

double number_at(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

int int_at(const json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<int>();
}

Eigen::VectorXd vector_at(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of numbers");
    Eigen::VectorXd v(j.size());
    for (size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number_at(j[i], path);
    return v;
}

Eigen::MatrixXd matrix_at(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "expected a nested array (matrix)");
    const size_t rows = j.size();
    const size_t cols = j[0].is_array() ? j[0].size() : 0;
    if (cols == 0) fail(path, "expected a nested array (matrix)");
    Eigen::MatrixXd M(rows, cols);
    for (size_t i = 0; i < rows; ++i) {
        if (!j[i].is_array() || j[i].size() != cols) fail(path, "ragged matrix rows");
        for (size_t k = 0; k < cols; ++k) {
            M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
                number_at(j[i][k], path);
        }
    }
    return M;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

json matrix_to_json(const Eigen::MatrixXd& M) {
    json out = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
        out.push_back(row);
    }
    return out;
}

ParameterProcess parse_parameter(const json& j, int m) {
    ParameterProcess pp;
    const std::string kind = require(j, "kind", "scenario.parameter").get<std::string>();
    if (j.contains("theta0")) {
        pp.theta0 = vector_at(j.at("theta0"), "scenario.parameter.theta0");
    } else {
        pp.theta0 = Eigen::VectorXd::Zero(m);
    }
    if (kind == "constant") {
        pp.kind = ParameterProcess::Kind::Constant;
    } else if (kind == "random_walk") {
        pp.kind = ParameterProcess::Kind::RandomWalk;
        pp.sigma_delta = number_at(require(j, "sigma_delta", "scenario.parameter"),
                                   "scenario.parameter.sigma_delta");
    } else if (kind == "sinusoid") {
        pp.kind = ParameterProcess::Kind::Sinusoid;
        pp.amplitude = number_at(require(j, "amplitude", "scenario.parameter"),
                                 "scenario.parameter.amplitude");
        pp.period =
            number_at(require(j, "period", "scenario.parameter"), "scenario.parameter.period");
    } else {
        fail("scenario.parameter.kind", "unknown kind '" + kind + "'");
    }
    return pp;
}

RegressorSpec parse_regressor(const json& j, int m, const std::string& path) {
    RegressorSpec r;
    const std::string kind = require(j, "kind", path).get<std::string>();
    if (kind == "gaussian_iid") {
        r.kind = RegressorSpec::Kind::GaussianIid;
        if (j.contains("covariance")) {
            r.covariance = matrix_at(j.at("covariance"), path + ".covariance");
        } else if (j.contains("variance")) {
            r.covariance = number_at(j.at("variance"), path + ".variance") *
                           Eigen::MatrixXd::Identity(m, m);
        } else {
            r.covariance = Eigen::MatrixXd::Identity(m, m);
        }
    } else if (kind == "masked_subspace") {
        r.kind = RegressorSpec::Kind::MaskedSubspace;
        const json& coords = require(j, "coords", path);
        if (!coords.is_array()) fail(path + ".coords", "expected an array of indices");
        for (const auto& c : coords) r.coords.push_back(int_at(c, path + ".coords"));
        r.scale = j.contains("scale") ? number_at(j.at("scale"), path + ".scale") : 1.0;
    } else if (kind == "arx_feedback") {
        r.kind = RegressorSpec::Kind::ArxFeedback;
        r.p = int_at(require(j, "p", path), path + ".p");
        r.q = int_at(require(j, "q", path), path + ".q");
    } else if (kind == "constant") {
        r.kind = RegressorSpec::Kind::Constant;
        r.value = vector_at(require(j, "value", path), path + ".value");
    } else {
        fail(path + ".kind", "unknown kind '" + kind + "'");
    }
    return r;
}

json regressor_to_json(const RegressorSpec& r) {
    json j;
    switch (r.kind) {
        case RegressorSpec::Kind::GaussianIid:
            j["kind"] = "gaussian_iid";
            j["covariance"] = matrix_to_json(r.covariance);
            break;
        case RegressorSpec::Kind::MaskedSubspace:
            j["kind"] = "masked_subspace";
            j["coords"] = r.coords;
            j["scale"] = r.scale;
            break;
        case RegressorSpec::Kind::ArxFeedback:
            j["kind"] = "arx_feedback";
            j["p"] = r.p;
            j["q"] = r.q;
            break;
        case RegressorSpec::Kind::Constant:
            j["kind"] = "constant";
            j["value"] = vector_to_json(r.value);
            break;
    }
    return j;
}

json parameter_to_json(const ParameterProcess& pp) {
    json j;
    j["theta0"] = vector_to_json(pp.theta0);
    switch (pp.kind) {
        case ParameterProcess::Kind::Constant:
            j["kind"] = "constant";
            break;
        case ParameterProcess::Kind::RandomWalk:
            j["kind"] = "random_walk";
            j["sigma_delta"] = pp.sigma_delta;
            break;
        case ParameterProcess::Kind::Sinusoid:
            j["kind"] = "sinusoid";
            j["amplitude"] = pp.amplitude;
            j["period"] = pp.period;
            break;
    }
    return j;
}

}  // namespace

RunConfig parse_config(const json& j) {
    RunConfig cfg;
    const json& sc = require(j, "scenario", "");
    Scenario& s = cfg.scenario;
    s.n = int_at(require(sc, "n", "scenario"), "scenario.n");
    s.m = int_at(require(sc, "m", "scenario"), "scenario.m");
    s.alpha = number_at(require(sc, "alpha", "scenario"), "scenario.alpha");
    s.horizon = int_at(require(sc, "horizon", "scenario"), "scenario.horizon");
    s.seed = sc.contains("seed") ? sc.at("seed").get<std::uint64_t>() : 0;
    s.ls_mode = sc.contains("ls_mode") && sc.at("ls_mode").get<bool>();
    s.p0_scale = sc.contains("p0_scale")
                     ? number_at(sc.at("p0_scale"), "scenario.p0_scale")
                     : 100.0;
    if (sc.contains("theta_hat0")) {
        s.theta_hat0 = vector_at(sc.at("theta_hat0"), "scenario.theta_hat0");
    }
    s.parameter = parse_parameter(require(sc, "parameter", "scenario"), s.m);
    const json& reg = require(sc, "regressors", "scenario");
    if (reg.is_array()) {
        for (size_t i = 0; i < reg.size(); ++i) {
            std::ostringstream path;
            path << "scenario.regressors[" << i << "]";
            s.regressors.push_back(parse_regressor(reg[i], s.m, path.str()));
        }
    } else {
        // a single spec broadcasts to every sensor
        for (int i = 0; i < s.n; ++i) {
            s.regressors.push_back(parse_regressor(reg, s.m, "scenario.regressors"));
        }
    }
    if (sc.contains("noise")) {
        s.noise.sigma_w =
            number_at(require(sc.at("noise"), "sigma_w", "scenario.noise"), "scenario.noise.sigma_w");
    }

    const json& topo = require(j, "topology", "");
    if (topo.contains("fixed")) {
        try {
            s.topology = WeightedDigraph(matrix_at(topo.at("fixed"), "topology.fixed"));
        } catch (const Error& e) {
            fail("topology.fixed", e.what());
        }
    } else if (topo.contains("graphs")) {
        const json& graphs = topo.at("graphs");
        if (!graphs.is_array() || graphs.empty()) fail("topology.graphs", "expected graph list");
        std::vector<WeightedDigraph> gs;
        for (size_t k = 0; k < graphs.size(); ++k) {
            std::ostringstream path;
            path << "topology.graphs[" << k << "]";
            try {
                gs.emplace_back(matrix_at(graphs[k], path.str()));
            } catch (const Error& e) {
                fail(path.str(), e.what());
            }
        }
        const Eigen::MatrixXd P = matrix_at(require(topo, "transition", "topology"),
                                            "topology.transition");
        Eigen::VectorXd r0;
        if (topo.contains("initial")) {
            r0 = vector_at(topo.at("initial"), "topology.initial");
        } else {
            r0 = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(gs.size()),
                                           1.0 / static_cast<double>(gs.size()));
        }
        try {
            s.topology = MarkovTopology(std::move(gs), P, r0);
        } catch (const Error& e) {
            fail("topology", e.what());
        }
    } else {
        fail("topology", "need either 'fixed' or 'graphs' + 'transition'");
    }

    if (j.contains("metrics")) {
        const json& me = j.at("metrics");
        if (me.contains("h")) cfg.h = int_at(me.at("h"), "metrics.h");
        if (me.contains("p")) cfg.p = number_at(me.at("p"), "metrics.p");
        if (me.contains("replications")) {
            cfg.replications = int_at(me.at("replications"), "metrics.replications");
        }
        if (me.contains("snapshots")) cfg.snapshots = me.at("snapshots").get<bool>();
    }
    cfg.scenario.excitation_window = cfg.h;

    if (j.contains("output")) {
        const json& out = j.at("output");
        if (out.contains("directory")) cfg.out_dir = out.at("directory").get<std::string>();
        if (out.contains("formats")) {
            cfg.write_csv = false;
            cfg.write_json = false;
            for (const auto& f : out.at("formats")) {
                const std::string name = f.get<std::string>();
                if (name == "csv") {
                    cfg.write_csv = true;
                } else if (name == "json") {
                    cfg.write_json = true;
                } else {
                    fail("output.formats", "unknown format '" + name + "'");
                }
            }
        }
    }
    if (j.contains("orientation")) {
        cfg.orientation = parse_orientation(j.at("orientation").get<std::string>());
    }

    try {
        cfg.scenario.validate();
    } catch (const ConfigInvalid&) {
        throw;
    } catch (const Error& e) {
        throw ConfigInvalid(e.what());
    }
    if (cfg.h < 1) fail("metrics.h", "window length must be >= 1");
    if (cfg.p <= 0.0) fail("metrics.p", "must be positive");
    if (cfg.replications < 1) fail("metrics.replications", "must be >= 1");
    return cfg;
}

json RunConfig::resolved() const {
    json j;
    json sc;
    sc["n"] = scenario.n;
    sc["m"] = scenario.m;
    sc["alpha"] = scenario.alpha;
    sc["horizon"] = scenario.horizon;
    sc["seed"] = scenario.seed;
    sc["ls_mode"] = scenario.ls_mode;
    sc["p0_scale"] = scenario.p0_scale;
    sc["theta_hat0"] = vector_to_json(scenario.initial_estimate());
    sc["parameter"] = parameter_to_json(scenario.parameter);
    json regs = json::array();
    for (const auto& r : scenario.regressors) regs.push_back(regressor_to_json(r));
    sc["regressors"] = regs;
    sc["noise"] = {{"sigma_w", scenario.noise.sigma_w}};
    j["scenario"] = sc;

    json topo;
    if (scenario.is_switching()) {
        const auto& mk = scenario.markov();
        json graphs = json::array();
        for (const auto& g : mk.graphs()) graphs.push_back(matrix_to_json(g.adjacency()));
        topo["graphs"] = graphs;
        topo["transition"] = matrix_to_json(mk.transition());
        topo["initial"] = vector_to_json(mk.initial_distribution());
    } else {
        topo["fixed"] = matrix_to_json(scenario.fixed_graph().adjacency());
    }
    j["topology"] = topo;

    j["metrics"] = {{"h", h}, {"p", p}, {"replications", replications}, {"snapshots", snapshots}};
    json formats = json::array();
    if (write_csv) formats.push_back("csv");
    if (write_json) formats.push_back("json");
    j["output"] = {{"directory", out_dir}, {"formats", formats}};
    if (orientation) j["orientation"] = orientation_name(*orientation);
    return j;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigInvalid("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigInvalid(std::string("config parse error: ") + e.what());
    }
    return parse_config(j);
}

RunConfig load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigInvalid("cannot open manifest file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigInvalid(std::string("manifest parse error: ") + e.what());
    }
    if (!j.contains("config")) throw ConfigInvalid("manifest: missing 'config' section");
    RunConfig cfg = parse_config(j.at("config"));
    if (j.contains("orientation")) {
        cfg.orientation = parse_orientation(j.at("orientation").get<std::string>());
    }
    return cfg;
}

void validate_assumptions(const RunConfig& config, bool allow_unverified) {
    const Scenario& s = config.scenario;
    if (s.is_switching()) {
        const auto& mk = s.markov();
        for (int k = 0; k < mk.states(); ++k) {
            if (!is_balanced(mk.graph(k))) {
                if (allow_unverified) continue;
                std::ostringstream os;
                os << "topology.graphs[" << k
                   << "]: switching mode requires every digraph balanced "
                      "(doubly stochastic adjacency)";
                throw ConfigInvalid(os.str());
            }
        }
        const auto [irr, aper] = markov_is_irreducible_aperiodic(mk);
        if ((!irr || !aper) && !allow_unverified) {
            throw ConfigInvalid(
                "topology.transition: switching chain must be irreducible and aperiodic");
        }
    } else {
        const WeightOrientation o = config.orientation.value_or(default_orientation(s));
        if (o == WeightOrientation::Column && !is_balanced(s.fixed_graph()) && !allow_unverified) {
            throw ConfigInvalid(
                "topology.fixed: column orientation requires a balanced graph "
                "(combine weights must sum to 1)");
        }
    }
}

json make_manifest(const RunConfig& config, WeightOrientation orientation) {
    json j;
    j["version"] = kVersion;
    j["seed"] = config.scenario.seed;
    j["orientation"] = orientation_name(orientation);
    j["config"] = config.resolved();
    return j;
}

const char* orientation_name(WeightOrientation o) {
    return o == WeightOrientation::Row ? "row" : "column";
}

WeightOrientation parse_orientation(const std::string& name) {
    if (name == "row") return WeightOrientation::Row;
    if (name == "column") return WeightOrientation::Column;
    throw ConfigInvalid("orientation: expected 'row' or 'column', got '" + name + "'");
}

}  // namespace dffls
