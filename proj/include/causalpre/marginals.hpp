#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "causalpre/cliques.hpp"
#include "causalpre/dataset.hpp"
#include "causalpre/info.hpp"
#include "causalpre/rng.hpp"

namespace causalpre {

struct CodesHash {
  std::size_t operator()(const std::vector<Code>& codes) const noexcept;
};

/// Counts of the free-attribute assignments observed under one separator
/// context, in lexicographic order so sampling is independent of hashing.
struct OutcomeCounts {
  std::vector<std::vector<Code>> outcomes;
  std::vector<double> counts;
  std::vector<double> cumulative;
  double total = 0.0;

  double count_of(std::span<const Code> outcome) const;
};

/// P[free | separator = context], smoothed with the model's pseudocount:
///   (count + lambda) / (total + lambda * |Dom(free)|)
class ConditionalDist {
 public:
  ConditionalDist(const OutcomeCounts* counts, double pseudocount,
                  std::span<const std::size_t> free_dims, bool backoff);

  bool backoff() const noexcept { return backoff_; }
  std::span<const std::size_t> dims() const noexcept { return dims_; }

  double prob(std::span<const Code> free_values) const;
  /// Inverse-CDF draw over the fixed outcome order.
  void sample(SplitMix64& rng, std::span<Code> out) const;
  /// Dense table over the free attributes (attrs left empty).
  ProbTable to_table() const;

 private:
  const OutcomeCounts* counts_;
  double pseudocount_;
  std::span<const std::size_t> dims_;
  double cells_;
  bool backoff_;
};

/// Empirical clique marginals over a CliquePlan, exposed as the conditionals
/// P[C_i \ F_i | F_i] of the forward factorization. Immutable after fit.
class MarginalModel {
 public:
  const CliquePlan& plan() const noexcept { return plan_; }
  double pseudocount() const noexcept { return pseudocount_; }
  std::size_t num_cliques() const noexcept { return cliques_.size(); }
  std::span<const std::size_t> domain_sizes() const noexcept { return domain_sizes_; }

  /// `separator_values` are aligned with plan().separators[clique].
  ConditionalDist conditional(std::size_t clique, std::span<const Code> separator_values) const;

  /// Conditional for clique i reading the separator from a full record
  /// (indexed by attribute).
  ConditionalDist conditional_for(std::size_t clique, std::span<const Code> record) const;

  /// Sum of log2 factor probabilities; -inf if a factor is zero. The record
  /// is indexed by attribute; kUnassigned marks a missing value.
  double log_density(std::span<const Code> record) const;

  /// Smoothed joint table of one clique (dense; throws DomainTooLarge past
  /// 1e7 cells).
  ProbTable table(std::size_t clique) const;

  /// Attributes sampled by clique i, in the order conditional() emits them.
  const AttrSet& free_attrs(std::size_t clique) const { return cliques_.at(clique).free; }

  nlohmann::json to_json() const;
  static MarginalModel from_json(const nlohmann::json& doc);

  friend MarginalModel fit_marginals(const EncodedDataset&, const CliquePlan&, double);

 private:
  struct CliqueCounts {
    AttrSet free;
    std::vector<std::size_t> free_dims;
    std::unordered_map<std::vector<Code>, OutcomeCounts, CodesHash> contexts;
    OutcomeCounts backoff;
  };

  void add_cell(std::size_t clique, std::span<const Code> clique_codes, double count);
  void finalize();

  CliquePlan plan_;
  double pseudocount_ = 0.0;
  std::vector<std::size_t> domain_sizes_;  // indexed by attribute
  std::vector<CliqueCounts> cliques_;
};

/// Fits clique tables (count + lambda per cell, normalized) and the
/// unconditional backoff table of each clique's free part.
MarginalModel fit_marginals(const EncodedDataset& data, const CliquePlan& plan,
                            double pseudocount = 0.0);

}  // namespace causalpre
