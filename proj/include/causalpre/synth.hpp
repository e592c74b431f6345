#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "causalpre/dataset.hpp"

namespace causalpre {

struct DagNode {
  std::string name;
  std::vector<std::string> domain;  // order defines codes
  Role role = Role::Additional;
};

/// A categorical Bayesian network. cpts[i] has one row per joint value of
/// node i's parents, row-major with parents in node declaration order (the
/// earliest-declared parent varies slowest); each row is a distribution
/// over node i's domain.
///
/// JSON form:
///   {"nodes": [{"name": "X", "domain": ["a", "b"], "role": "admissible"}],
///    "edges": [["X", "Y"]],
///    "cpts":  {"X": [[0.5, 0.5]], "Y": [[0.9, 0.1], [0.2, 0.8]]}}
struct DagSpec {
  std::vector<DagNode> nodes;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // (parent, child)
  std::vector<std::vector<std::vector<double>>> cpts;

  /// Parents of node i in declaration order.
  std::vector<std::size_t> parents(std::size_t i) const;
  /// Throws CyclicSpec or MalformedCpt.
  void validate() const;
  /// Lowest-index-first topological order; throws CyclicSpec.
  std::vector<std::size_t> topological_order() const;

  static DagSpec from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;
};

/// Ancestral sampling of n rows. Each row uses its own substream, so the
/// output does not depend on `threads`.
EncodedDataset generate(const DagSpec& spec, std::size_t n, std::uint64_t seed,
                        unsigned threads = 1);

/// gender (sensitive) -> strength (admissible); both -> hired (label).
/// P(yes | male, s) - P(yes | female, s) = bias for each strength level s.
DagSpec hiring_spec(double bias);
EncodedDataset hiring_example(std::size_t n, double bias, std::uint64_t seed);

}  // namespace causalpre
