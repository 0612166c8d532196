#pragma once

#include <cmath>
#include <optional>
#include <vector>

namespace oprange {

// Least-squares slope of log y against log x over the points with y > 0.
// Empty when fewer than two such points exist.
inline std::optional<double> loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t k = 0; k < xs.size() && k < ys.size(); ++k) {
    if (ys[k] > 0.0 && xs[k] > 0.0) {
      lx.push_back(std::log(xs[k]));
      ly.push_back(std::log(ys[k]));
    }
  }
  if (lx.size() < 2) return std::nullopt;
  const double count = static_cast<double>(lx.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) mx += lx[k], my += ly[k];
  mx /= count;
  my /= count;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sxy += (lx[k] - mx) * (ly[k] - my);
    sxx += (lx[k] - mx) * (lx[k] - mx);
  }
  if (sxx <= 0.0) return std::nullopt;
  return sxy / sxx;
}

}  // namespace oprange
