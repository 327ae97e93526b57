//
// pepview - Copyright 2026 The pepview Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef PEPVIEW_TESTS_TEST_UTIL_H_
#define PEPVIEW_TESTS_TEST_UTIL_H_

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "pepview/core.h"
#include "pepview/ingest.h"
#include "pepview/nn.h"

namespace pepview {
namespace test {
inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, Rng &rng,
                            double scale = 1.0) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i)
    m.data()[i] = scale * rng.normal();
  return m;
}

inline std::string random_sequence(int n, Rng &rng) {
  std::string s;
  for (int i = 0; i < n; ++i)
    s.push_back(kResidueAlphabet[rng.below(kNumResidueTypes)]);
  return s;
}

// Random walk with 3.8 A steps, so consecutive coordinates never coincide.
inline std::vector<Vec3> random_walk(int n, Rng &rng) {
  std::vector<Vec3> coords;
  Vec3 p { 0, 0, 0 };
  for (int i = 0; i < n; ++i) {
    coords.push_back(p);
    double d[3] = { rng.normal(), rng.normal(), rng.normal() };
    const double norm = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
    for (int k = 0; k < 3; ++k)
      p[k] += 3.8 * d[k] / norm;
  }
  return coords;
}

inline PeptideRecord random_record(const std::string &id, int n, Rng &rng) {
  PeptideRecord r;
  r.id = id;
  r.sequence = random_sequence(n, rng);
  r.coords = random_walk(n, rng);
  return r;
}

inline std::vector<Vec3> collinear(std::initializer_list<double> xs) {
  std::vector<Vec3> out;
  for (double x: xs)
    out.push_back({ x, 0, 0 });
  return out;
}

// Fresh per-test scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string &name) {
  auto dir = std::filesystem::temp_directory_path() / ("pepview_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}
}  // namespace test
}  // namespace pepview

#endif  // PEPVIEW_TESTS_TEST_UTIL_H_
