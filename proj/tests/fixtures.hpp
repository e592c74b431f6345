#pragma once

#include <cmath>
#include <vector>

#include "causalpre/dataset.hpp"
#include "causalpre/synth.hpp"

namespace fixtures {

using causalpre::Code;
using causalpre::DagSpec;
using causalpre::EncodedDataset;
using causalpre::Role;

/// Six attributes: S -> I, S -> A1 -> A2, W on its own, and a label that
/// leans on S directly on top of A1 and A2.
///   P(Y = 1 | s, a1, a2) = 0.1 + 0.1 a1 + 0.1 a2 + bias * s
inline DagSpec biased_six(double bias = 0.4) {
  DagSpec spec;
  spec.nodes = {{"S", {"0", "1"}, Role::Sensitive},     {"I", {"0", "1"}, Role::Inadmissible},
                {"A1", {"0", "1", "2"}, Role::Admissible}, {"A2", {"0", "1", "2"}, Role::Admissible},
                {"W", {"0", "1"}, Role::Additional},    {"Y", {"0", "1"}, Role::Label}};
  spec.edges = {{0, 1}, {0, 2}, {2, 3}, {0, 5}, {2, 5}, {3, 5}};
  std::vector<std::vector<double>> y;
  for (int s = 0; s < 2; ++s)
    for (int a1 = 0; a1 < 3; ++a1)
      for (int a2 = 0; a2 < 3; ++a2) {
        const double p = 0.1 + 0.1 * a1 + 0.1 * a2 + bias * s;
        y.push_back({1.0 - p, p});
      }
  spec.cpts = {
      {{0.5, 0.5}},
      {{0.7, 0.3}, {0.3, 0.7}},
      {{0.5, 0.3, 0.2}, {0.2, 0.3, 0.5}},
      {{0.6, 0.3, 0.1}, {0.2, 0.6, 0.2}, {0.1, 0.3, 0.6}},
      {{0.5, 0.5}},
      y,
  };
  return spec;
}

/// Hiring rate P(hired = yes | gender, strength) for the hiring layout
/// (gender, strength, hired).
inline double hire_rate(const EncodedDataset& d, Code gender, Code strength) {
  double yes = 0.0, n = 0.0;
  for (std::size_t r = 0; r < d.num_rows(); ++r) {
    if (d.at(r, 0) != gender || d.at(r, 1) != strength) continue;
    n += 1.0;
    yes += d.at(r, 2) == 1 ? 1.0 : 0.0;
  }
  return n > 0 ? yes / n : 0.0;
}

/// Largest |P(yes | male, s) - P(yes | female, s)| over strength levels.
inline double hiring_gap(const EncodedDataset& d) {
  double gap = 0.0;
  for (Code s = 0; s < 2; ++s) gap = std::max(gap, std::abs(hire_rate(d, 1, s) - hire_rate(d, 0, s)));
  return gap;
}

/// TV distance between P(strength | gender) in two hiring tables, maxed over
/// genders.
inline double strength_given_gender_tv(const EncodedDataset& a, const EncodedDataset& b) {
  auto cond = [](const EncodedDataset& d, Code g) {
    double n = 0.0, high = 0.0;
    for (std::size_t r = 0; r < d.num_rows(); ++r) {
      if (d.at(r, 0) != g) continue;
      n += 1.0;
      high += d.at(r, 1) == 0 ? 1.0 : 0.0;
    }
    return high / n;
  };
  double tv = 0.0;
  for (Code g = 0; g < 2; ++g) tv = std::max(tv, std::abs(cond(a, g) - cond(b, g)));
  return tv;
}

}  // namespace fixtures
