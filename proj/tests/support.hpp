#pragma once

#include <string>
#include <utility>
#include <vector>

#include "causalpre/dataset.hpp"
#include "causalpre/info.hpp"
#include "causalpre/rng.hpp"

namespace testsupport {

using causalpre::Code;
using causalpre::Role;

struct Col {
  std::string name;
  Role role;
  std::size_t domain;  // labels "0".."domain-1" (single digits sort correctly)
  std::vector<Code> codes;
};

inline causalpre::EncodedDataset make_dataset(std::vector<Col> cols) {
  std::vector<causalpre::AttributeSchema> schema;
  std::vector<std::vector<Code>> columns;
  for (auto& c : cols) {
    causalpre::AttributeSchema s;
    s.name = c.name;
    s.role = c.role;
    for (std::size_t v = 0; v < c.domain; ++v) s.domain.push_back(std::to_string(v));
    schema.push_back(std::move(s));
    columns.push_back(std::move(c.codes));
  }
  return causalpre::EncodedDataset(std::move(schema), std::move(columns));
}

/// Independent uniform columns, all with role Additional except the last,
/// which is the label.
inline causalpre::EncodedDataset random_dataset(std::uint64_t seed, std::size_t n,
                                                const std::vector<std::size_t>& dims,
                                                bool last_is_label = false) {
  causalpre::SplitMix64 rng(seed);
  std::vector<Col> cols;
  for (std::size_t a = 0; a < dims.size(); ++a) {
    Col c{"X" + std::to_string(a), Role::Additional, dims[a], {}};
    if (last_is_label && a + 1 == dims.size()) c.role = Role::Label;
    for (std::size_t r = 0; r < n; ++r) c.codes.push_back(static_cast<Code>(rng.below(dims[a])));
    cols.push_back(std::move(c));
  }
  return make_dataset(std::move(cols));
}

/// Correlated columns: each column copies a random earlier column with
/// probability `copy`, otherwise draws uniformly.
inline causalpre::EncodedDataset correlated_dataset(std::uint64_t seed, std::size_t n,
                                                    const std::vector<std::size_t>& dims,
                                                    double copy) {
  causalpre::SplitMix64 rng(seed);
  std::vector<std::size_t> source(dims.size(), 0);
  for (std::size_t a = 1; a < dims.size(); ++a) source[a] = rng.below(a);
  std::vector<Col> cols;
  for (std::size_t a = 0; a < dims.size(); ++a) cols.push_back({"X" + std::to_string(a), Role::Additional, dims[a], {}});
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t a = 0; a < dims.size(); ++a) {
      Code v;
      if (a > 0 && rng.uniform() < copy) {
        v = static_cast<Code>(cols[source[a]].codes[r] % dims[a]);
      } else {
        v = static_cast<Code>(rng.below(dims[a]));
      }
      cols[a].codes.push_back(v);
    }
  }
  return make_dataset(std::move(cols));
}

inline std::vector<std::size_t> iota(std::size_t n) {
  std::vector<std::size_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = i;
  return out;
}

/// MI matrix over attributes 0..d-1 from a weight function.
template <class F>
causalpre::MIMatrix matrix_of(std::size_t d, F&& weight) {
  std::vector<double> w(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) w[i * d + j] = w[j * d + i] = weight(i, j);
  return causalpre::MIMatrix(iota(d), std::move(w));
}

inline causalpre::MIMatrix random_matrix(causalpre::SplitMix64& rng, std::size_t d) {
  return matrix_of(d, [&](std::size_t, std::size_t) { return rng.uniform(); });
}

}  // namespace testsupport
