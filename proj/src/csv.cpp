#include "dffls/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace dffls {

namespace {

void append_g17(std::string& out, double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    out += buf;
}

}  // namespace

std::string trajectory_csv(const TrajectoryRecord& record) {
    std::string out = "t,r";
    for (int j = 0; j < record.m; ++j) out += ",theta_" + std::to_string(j);
    for (int i = 0; i < record.n; ++i) {
        for (int j = 0; j < record.m; ++j) {
            out += ",est_" + std::to_string(i) + "_" + std::to_string(j);
        }
    }
    for (int i = 0; i < record.n; ++i) out += ",err_sq_" + std::to_string(i);
    out += ",mse\n";

    for (int t = 0; t <= record.horizon; ++t) {
        const auto ut = static_cast<size_t>(t);
        out += std::to_string(t);
        out += ',';
        out += std::to_string(record.topo_index[ut] + 1);
        for (int j = 0; j < record.m; ++j) {
            out += ',';
            append_g17(out, record.theta[ut](j));
        }
        for (int i = 0; i < record.n; ++i) {
            for (int j = 0; j < record.m; ++j) {
                out += ',';
                append_g17(out, record.estimates[ut][static_cast<size_t>(i)](j));
            }
        }
        for (int i = 0; i < record.n; ++i) {
            out += ',';
            append_g17(out, record.err_sq[ut][static_cast<size_t>(i)]);
        }
        out += ',';
        append_g17(out, record.mse[ut]);
        out += '\n';
    }
    return out;
}

void write_trajectory_csv(const TrajectoryRecord& record, const std::string& path) {
    write_text_file(path, trajectory_csv(record));
}

std::string excitation_csv(const ExcitationReport& report) {
    std::string out = "window,lambda_hat,lambda_realized";
    const size_t n = report.sensor_lambda_hat.size();
    for (size_t i = 0; i < n; ++i) out += ",sensor_lambda_hat_" + std::to_string(i);
    out += '\n';
    for (int t = 0; t < report.windows; ++t) {
        out += std::to_string(t);
        out += ',';
        append_g17(out, report.lambda_hat[static_cast<size_t>(t)]);
        out += ',';
        append_g17(out, report.lambda_realized[static_cast<size_t>(t)]);
        for (size_t i = 0; i < n; ++i) {
            out += ',';
            append_g17(out, report.sensor_lambda_hat[i][static_cast<size_t>(t)]);
        }
        out += '\n';
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw RuntimeFailure("cannot open output file: " + path);
    f << content;
    if (!f) throw RuntimeFailure("failed writing output file: " + path);
}

}  // namespace dffls
