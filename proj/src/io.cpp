#include "surplus/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace surplus {

std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (result.ec != std::errc()) throw std::runtime_error("double formatting failed");
  return std::string(buffer, result.ptr);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

std::string trajectory_csv(const Trajectory<double>& trajectory) {
  const Eigen::Index n = trajectory.initial.states.size();
  std::ostringstream out;
  out << "k";
  for (Eigen::Index i = 1; i <= n; ++i) out << ",x" << i;
  for (Eigen::Index i = 1; i <= n; ++i) out << ",s" << i;
  out << "\n";
  for (long k = 0; k <= trajectory.steps(); ++k) {
    const NetworkState<double> st = trajectory.state_at(k);
    out << k;
    for (Eigen::Index i = 0; i < n; ++i) out << "," << format_double(st.states(i));
    for (Eigen::Index i = 0; i < n; ++i) out << "," << format_double(st.surpluses(i));
    out << "\n";
  }
  return out.str();
}

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
  std::ostringstream out;
  out << "k,min_state,max_state,V,conserved_sum,dist_l1,dist_inf,switch_count\n";
  for (const auto& row : rows) {
    out << row.k << "," << format_double(row.min_state) << "," << format_double(row.max_state)
        << "," << format_double(row.lyapunov) << "," << format_double(row.conserved_sum) << ","
        << format_double(row.dist_l1) << "," << format_double(row.dist_inf) << ","
        << row.switch_count << "\n";
  }
  return out.str();
}

std::string matrix_csv(const MatrixX<double>& m) {
  std::ostringstream out;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) out << ",";
      out << format_double(m(r, c));
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace surplus
