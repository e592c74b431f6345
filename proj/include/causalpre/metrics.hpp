#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "causalpre/cliques.hpp"
#include "causalpre/dataset.hpp"

namespace causalpre {

inline constexpr double kRodEpsilon = 1e-6;
inline constexpr double kDistortionEpsilon = 1e-6;

struct RODContext {
  std::size_t context = 0;  // index into the observed-context list
  std::vector<Code> values; // admissible values of this context
  double abs_log_ratio = 0.0;
  std::size_t support = 0;  // rows of the worst pair in this context
};

/// Ratio of observational discrimination. Zero means no measured
/// discrimination.
struct RODReport {
  double rod_normalized = 0.0;  // raw / (1 + raw)
  double raw_abs_log = 0.0;     // bits
  std::pair<std::size_t, std::size_t> worst_pair{0, 1};  // sensitive group ids
  std::vector<RODContext> per_context;                    // for the worst pair
  std::vector<std::vector<Code>> group_values;  // sensitive codes per group id, when known
};

struct RODOptions {
  double epsilon = kRodEpsilon;
  std::size_t min_support = 1;  // per sensitive group within a context
  Code positive = 1;
};

/// Column-level ROD. `sensitive` holds group ids in [0, sensitive_groups);
/// `context` holds context ids (one per row) with `context_values` decoding
/// them for the report (may be empty).
RODReport rod(std::span<const Code> outcomes, std::size_t outcome_domain,
              std::span<const Code> sensitive, std::size_t sensitive_groups,
              std::span<const std::uint32_t> context,
              std::span<const std::vector<Code>> context_values = {},
              const RODOptions& options = {});

/// ROD of a dataset using its label as the outcome, its sensitive attributes
/// (jointly) as groups and its admissible attributes (jointly) as contexts.
RODReport rod(const EncodedDataset& data, const RODOptions& options = {});

/// Same, with the outcome taken from `predictions` (coded like the label).
RODReport rod_of_predictions(const EncodedDataset& data, std::span<const Code> predictions,
                             const RODOptions& options = {});

/// Mean over subsets of KL(original || processed) on the subset marginals.
/// Both sides are smoothed with the same epsilon, so D vs D is exactly 0.
double distortion_kl(const EncodedDataset& original, const EncodedDataset& processed,
                     std::span<const AttrSet> subsets, double epsilon = kDistortionEpsilon);

/// Per-subset values behind distortion_kl.
std::vector<double> distortion_kl_per_subset(const EncodedDataset& original,
                                             const EncodedDataset& processed,
                                             std::span<const AttrSet> subsets,
                                             double epsilon = kDistortionEpsilon);

/// Plug-in I(Y; S | F) in bits. Throws ContextExplosion when |Dom(F)|
/// exceeds 1e5.
double conditional_mi(const EncodedDataset& data, std::size_t label,
                      std::span<const std::size_t> sensitive, std::span<const std::size_t> given);

/// Total-variation distance between the empirical marginals of two datasets
/// (same schema) over `attrs`.
double tv_distance(const EncodedDataset& a, const EncodedDataset& b,
                   std::span<const std::size_t> attrs);

}  // namespace causalpre
