#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "mag/tensor_field.hpp"

namespace testing {

inline double max_diff(const mag::TensorField& a, const mag::TensorField& b,
                       const std::vector<std::vector<double>>& pts) {
  double worst = 0.0;
  for (const auto& p : pts) {
    const auto va = a.at(p);
    const auto vb = b.at(p);
    for (std::size_t i = 0; i < va.size(); ++i) worst = std::max(worst, std::abs(va[i] - vb[i]));
  }
  return worst;
}

inline double max_abs(const mag::TensorField& a, const std::vector<std::vector<double>>& pts) {
  return mag::max_abs(a, pts);
}

}  // namespace testing
