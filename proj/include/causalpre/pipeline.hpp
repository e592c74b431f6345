#pragma once

#include <optional>
#include <vector>

#include "causalpre/cliques.hpp"
#include "causalpre/dataset.hpp"
#include "causalpre/info.hpp"
#include "causalpre/sampler.hpp"

namespace causalpre {

struct PipelineResult {
  MIMatrix mi;  // over the non-label attributes
  CliquePlan plan;
  std::vector<double> label_mi;
  LabelClique fair;
  std::optional<LabelClique> unfair;  // set when alpha < 1
  EncodedDataset output;
};

/// MI matrix and clique plan over the dataset's non-label attributes.
CliquePlan plan_non_label(const EncodedDataset& data, std::size_t k, std::size_t m,
                          unsigned threads, MIMatrix* mi_out = nullptr);

/// mi_matrix -> cliques -> label clique -> fit -> sample. alpha == 1 runs
/// preprocess, anything lower runs preprocess_plus.
PipelineResult run_pipeline(const EncodedDataset& data, const PreprocessConfig& config);

}  // namespace causalpre
