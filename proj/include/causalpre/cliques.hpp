#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "causalpre/info.hpp"

namespace causalpre {

/// Sorted, duplicate-free list of dataset attribute indices.
using AttrSet = std::vector<std::size_t>;

/// Ordered, tree-overlapping family of attribute subsets. Clique i is
/// sampled after all cliques before it; `separators[i]` are the attributes
/// it conditions on and `parents[i]` the earlier clique they were taken
/// from (nullopt for a root).
struct CliquePlan {
  std::vector<AttrSet> cliques;
  std::vector<std::optional<std::size_t>> parents;
  std::vector<AttrSet> separators;
  std::size_t k = 0;
  std::size_t m = 0;

  std::size_t size() const noexcept { return cliques.size(); }
  AttrSet coverage() const;
  /// Attributes of clique i that are not conditioned on.
  AttrSet free_attrs(std::size_t i) const;

  bool operator==(const CliquePlan&) const = default;
};

/// Sum of pairwise weights inside one attribute set.
double clique_weight(std::span<const std::size_t> clique, const MIMatrix& mi);
double plan_weight(const CliquePlan& plan, const MIMatrix& mi);

/// Correlation-based-feature-selection merit of adding u to a clique:
///   sum_j E(u,j) / sqrt(|C| + 2 * sum_{j<l in C} E(j,l))
double delta(std::size_t u, std::span<const std::size_t> clique, const MIMatrix& mi);

struct DeltaM {
  double score = 0.0;
  AttrSet top;  // the chosen m attributes, sorted
};

/// Best mean Delta of m attributes of `candidate` against `active`. The
/// objective is a sum of per-attribute terms, so taking the m individually
/// best attributes (ties to the lower index) realizes the max over subsets.
DeltaM delta_m(std::span<const std::size_t> active, std::span<const std::size_t> candidate,
               const MIMatrix& mi, std::size_t m);

/// r = ceil((|attrs| - m) / k)
std::size_t clique_count(std::size_t num_attrs, std::size_t k, std::size_t m);

/// Partitions attrs into r disjoint cliques; at most one exceeds k
/// (up to k + m).
std::vector<AttrSet> clique_initialization(std::span<const std::size_t> attrs,
                                           const MIMatrix& mi, std::size_t k, std::size_t m);

/// Grows the disjoint cliques into a tree of overlapping cliques, each
/// non-root clique absorbing m attributes of one processed clique.
CliquePlan clique_extension(std::vector<AttrSet> init, const MIMatrix& mi, std::size_t k,
                            std::size_t m);

/// Initialization followed by extension, with the degenerate case
/// |attrs| <= k + m collapsing to a single clique.
CliquePlan build_clique_plan(std::span<const std::size_t> attrs, const MIMatrix& mi,
                             std::size_t k, std::size_t m);

struct ConstraintReport {
  bool size_ok = true;
  bool coverage_ok = true;
  bool overlap_ok = true;
  bool acyclicity_ok = true;
  std::vector<std::string> violations;
  double total_weight = 0.0;

  bool all_ok() const noexcept { return size_ok && coverage_ok && overlap_ok && acyclicity_ok; }
};

/// Evaluates the size, coverage, overlap and acyclicity constraints on the
/// clique family literally (independently of the recorded parent links).
ConstraintReport check_constraints(const CliquePlan& plan, std::span<const std::size_t> attrs,
                                   std::size_t k, std::size_t m, const MIMatrix& mi);

enum class SearchObjective { Maximize, Minimize };

struct ExactSearchResult {
  CliquePlan plan;
  double weight = 0.0;
};

inline constexpr std::size_t kExactSearchMaxAttrs = 8;

/// Exhaustive search over families of r = clique_count(...) distinct cliques
/// of size <= k + m that satisfy all four constraints. Ties resolve to the
/// lexicographically smallest family of bitmask-encoded cliques.
ExactSearchResult exact_clique_search(std::span<const std::size_t> attrs, const MIMatrix& mi,
                                      std::size_t k, std::size_t m,
                                      SearchObjective objective = SearchObjective::Maximize);

/// Orders an unordered family whose overlap graph is a forest: breadth-first
/// from the lowest-indexed clique of each component, separators are the
/// intersections with the parent.
CliquePlan order_as_tree(std::vector<AttrSet> cliques, std::size_t k, std::size_t m);

}  // namespace causalpre
