#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bitr/data.hpp"

namespace testing {

inline bitr::Observation obs(double y1, double y2, int d1, int d2, int a, std::vector<double> x) {
  bitr::Observation o;
  o.y1 = y1;
  o.y2 = y2;
  o.delta1 = d1;
  o.delta2 = d2;
  o.a = a;
  o.x = std::move(x);
  return o;
}

// Weighted least squares via the normal equations (LDLT), independent of the
// library's QR path.
inline Eigen::VectorXd wls(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                           const std::vector<double>& w) {
  const int p = static_cast<int>(x.front().size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(p);
  for (std::size_t i = 0; i < x.size(); ++i) {
    Eigen::Map<const Eigen::VectorXd> xi(x[i].data(), p);
    A += w[i] * xi * xi.transpose();
    b += w[i] * y[i] * xi;
  }
  return A.ldlt().solve(b);
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("bitr_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

// Kendall's tau-a by direct pair counting.
inline double kendall_tau(const std::vector<double>& a, const std::vector<double>& b) {
  long long conc = 0, disc = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const double s = (a[i] - a[j]) * (b[i] - b[j]);
      if (s > 0) ++conc;
      else if (s < 0) ++disc;
    }
  const double pairs = 0.5 * static_cast<double>(a.size()) * static_cast<double>(a.size() - 1);
  return static_cast<double>(conc - disc) / pairs;
}

}  // namespace testing
