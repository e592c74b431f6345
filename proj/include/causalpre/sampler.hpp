#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "causalpre/cliques.hpp"
#include "causalpre/dataset.hpp"

namespace causalpre {

/// The clique F_Y + {Y} the label is sampled from.
struct LabelClique {
  AttrSet separator;  // F_Y
  std::size_t label = 0;
  std::optional<std::size_t> parent;  // plan clique sharing the most of F_Y

  bool operator==(const LabelClique&) const = default;
};

/// Fair draws F_Y from admissible and additional attributes only;
/// Unrestricted draws from every non-label attribute (the unfair branch of
/// the alpha mixture).
enum class LabelPool { Fair, Unrestricted };

struct PreprocessConfig {
  std::size_t k = 2;
  std::size_t m = 1;
  double alpha = 1.0;
  std::uint64_t seed = 0;
  double pseudocount = 0.0;
  unsigned threads = 1;

  void validate() const;
};

/// MI of every attribute with the label (0 at the label itself).
std::vector<double> label_mi(const EncodedDataset& data, unsigned threads = 1);

/// Picks the k+m-1 candidates most informative about the label (ties to the
/// lower index).
LabelClique build_label_clique(const EncodedDataset& data, const CliquePlan& plan,
                               std::span<const double> mi_to_label, std::size_t k,
                               std::size_t m, LabelPool pool = LabelPool::Fair);

/// Appends F_Y + {Y} as the last clique with separator F_Y.
CliquePlan with_label_clique(CliquePlan plan, const LabelClique& label_clique);

/// Regenerates n fresh rows: the plan's cliques in order, each conditioned on
/// its separator, then the label from P[Y | F_Y]. Requires alpha == 1.
EncodedDataset preprocess(const EncodedDataset& data, const CliquePlan& plan,
                          const LabelClique& label_clique, const PreprocessConfig& config);

/// As preprocess, but each row's label comes from the fair conditional with
/// probability alpha and from the unrestricted one otherwise.
EncodedDataset preprocess_plus(const EncodedDataset& data, const CliquePlan& plan,
                               const LabelClique& fair, const LabelClique& unfair,
                               const PreprocessConfig& config);

}  // namespace causalpre
