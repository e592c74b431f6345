#include "causalpre/pipeline.hpp"

#include "causalpre/error.hpp"

namespace causalpre {

CliquePlan plan_non_label(const EncodedDataset& data, std::size_t k, std::size_t m,
                          unsigned threads, MIMatrix* mi_out) {
  const auto attrs = data.non_label_attrs();
  if (attrs.empty()) throw Error(ErrorCode::EmptyAttrSet, "dataset has no non-label attributes");
  auto mi = mi_matrix(data, attrs, threads);
  auto plan = build_clique_plan(attrs, mi, k, m);
  if (mi_out) *mi_out = std::move(mi);
  return plan;
}

PipelineResult run_pipeline(const EncodedDataset& data, const PreprocessConfig& config) {
  config.validate();
  if (data.empty()) throw Error(ErrorCode::EmptyDataset, "dataset has no rows");
  PipelineResult result;
  result.plan = plan_non_label(data, config.k, config.m, config.threads, &result.mi);
  result.label_mi = label_mi(data, config.threads);
  result.fair = build_label_clique(data, result.plan, result.label_mi, config.k, config.m,
                                   LabelPool::Fair);
  if (config.alpha == 1.0) {
    result.output = preprocess(data, result.plan, result.fair, config);
  } else {
    result.unfair = build_label_clique(data, result.plan, result.label_mi, config.k, config.m,
                                       LabelPool::Unrestricted);
    result.output = preprocess_plus(data, result.plan, result.fair, *result.unfair, config);
  }
  return result;
}

}  // namespace causalpre
