#pragma once

#include <string>

#include "dffls/engine.hpp"
#include "dffls/metrics.hpp"

namespace dffls {

// Trajectory CSV schema (stable; 2 + m + n*m + n + 1 columns):
//   t, r, theta_0..theta_{m-1}, est_<i>_<j> for each sensor i and coordinate
//   j, err_sq_<i> per sensor, mse.
// r is the one-based topology index (1 for a fixed topology). Floats are
// written with 17 significant digits so re-reads round-trip exactly.
std::string trajectory_csv(const TrajectoryRecord& record);
void write_trajectory_csv(const TrajectoryRecord& record, const std::string& path);

// Per-window excitation CSV: window, lambda_hat, lambda_realized,
// sensor_lambda_hat_<i>...
std::string excitation_csv(const ExcitationReport& report);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace dffls
