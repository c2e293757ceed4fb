#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "surplus/analysis.hpp"
#include "surplus/types.hpp"

namespace surplus {

/// Shortest round-trip decimal representation (locale-independent), so that
/// identical runs produce byte-identical files.
std::string format_double(double value);

/// Write via a temporary file in the same directory, then rename into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Trajectory CSV: header `k,x1..xn,s1..sn`, one row per visited state.
std::string trajectory_csv(const Trajectory<double>& trajectory);

/// Metrics CSV with the fixed column set
/// `k,min_state,max_state,V,conserved_sum,dist_l1,dist_inf,switch_count`.
std::string metrics_csv(const std::vector<MetricsRow>& rows);

/// Row-major dump of a matrix, one CSV row per matrix row, no header.
std::string matrix_csv(const MatrixX<double>& m);

}  // namespace surplus
