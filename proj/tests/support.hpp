#pragma once

// Shared helpers for the unit and acceptance tests.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "divdis/core.hpp"

namespace testing_support {

/// Random point of the K-simplex; with `sparse`, about a third of entries are 0.
inline std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t k, bool sparse = false) {
  std::exponential_distribution<double> expo(1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> p(k);
  double total = 0.0;
  for (auto& v : p) {
    v = (sparse && u(rng) < 0.33) ? 0.0 : expo(rng);
    total += v;
  }
  if (total == 0.0) {
    p[0] = 1.0;
    return p;
  }
  for (auto& v : p) v /= total;
  return p;
}

inline divdis::PredictionSet make_set(const std::vector<std::vector<double>>& rows,
                                      std::string model = "m", std::string split = "s") {
  std::vector<double> flat;
  for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
  return divdis::validate_prediction_set(std::move(model), std::move(split), rows.size(),
                                         rows.empty() ? 0 : rows.front().size(), flat);
}

inline divdis::LabelVector make_labels(std::vector<std::int32_t> y, std::string split = "s") {
  return {std::move(split), std::move(y)};
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("divdis-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing_support
