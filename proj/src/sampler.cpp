#include "causalpre/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "causalpre/error.hpp"
#include "causalpre/info.hpp"
#include "causalpre/marginals.hpp"
#include "causalpre/parallel.hpp"
#include "causalpre/rng.hpp"

namespace causalpre {

namespace {

// Substream for the per-row mixture coin; clique stages use their index.
constexpr std::uint64_t kCoinStream = 0xC01Dull << 32;

std::size_t require_label(const EncodedDataset& data) {
  auto label = data.label_index();
  if (!label) throw Error(ErrorCode::NoLabel, "dataset has no single label attribute");
  return *label;
}

void check_plan_matches(const EncodedDataset& data, const CliquePlan& plan,
                        const LabelClique& lc) {
  const std::size_t label = require_label(data);
  if (lc.label != label) {
    throw Error(ErrorCode::PlanDatasetMismatch, "label clique targets attribute " +
                                                    std::to_string(lc.label) + ", label is " +
                                                    std::to_string(label));
  }
  const auto covered = plan.coverage();
  const auto expected = data.non_label_attrs();
  if (covered != expected) {
    throw Error(ErrorCode::PlanDatasetMismatch,
                "plan does not cover exactly the dataset's non-label attributes");
  }
  if (!std::includes(covered.begin(), covered.end(), lc.separator.begin(), lc.separator.end())) {
    throw Error(ErrorCode::PlanDatasetMismatch, "label separator names unplanned attributes");
  }
}

EncodedDataset generate(const EncodedDataset& data, const MarginalModel& fair,
                        const MarginalModel* unfair, double alpha, const PreprocessConfig& cfg) {
  const std::size_t n = data.num_rows();
  const std::size_t width = data.num_attrs();
  const std::size_t label_stage = fair.num_cliques() - 1;
  std::vector<std::vector<Code>> columns(width, std::vector<Code>(n));

  parallel_chunks(n, cfg.threads, [&](std::size_t begin, std::size_t end) {
    std::vector<Code> record(width);
    std::vector<Code> drawn;
    for (std::size_t r = begin; r < end; ++r) {
      std::fill(record.begin(), record.end(), kUnassigned);
      for (std::size_t stage = 0; stage <= label_stage; ++stage) {
        const MarginalModel* model = &fair;
        if (stage == label_stage && unfair) {
          SplitMix64 coin(substream_seed(cfg.seed, kCoinStream, r));
          if (!(coin.uniform() < alpha)) model = unfair;
        }
        SplitMix64 rng(substream_seed(cfg.seed, stage, r));
        const auto dist = model->conditional_for(stage, record);
        const auto& free = model->free_attrs(stage);
        drawn.resize(free.size());
        dist.sample(rng, drawn);
        for (std::size_t j = 0; j < free.size(); ++j) record[free[j]] = drawn[j];
      }
      for (std::size_t a = 0; a < width; ++a) columns[a][r] = record[a];
    }
  });
  return EncodedDataset(data.schema(), std::move(columns), n);
}

}  // namespace

void PreprocessConfig::validate() const {
  if (k < 1) throw Error(ErrorCode::InvalidConfig, "k must be at least 1");
  if (m < 1) throw Error(ErrorCode::InvalidConfig, "m must be at least 1");
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "alpha must lie in [0, 1]");
  }
  if (!(pseudocount >= 0.0) || !std::isfinite(pseudocount)) {
    throw Error(ErrorCode::InvalidConfig, "pseudocount must be a finite nonnegative number");
  }
}

std::vector<double> label_mi(const EncodedDataset& data, unsigned threads) {
  const std::size_t label = require_label(data);
  std::vector<double> out(data.num_attrs(), 0.0);
  parallel_chunks(data.num_attrs(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t a = begin; a < end; ++a)
      if (a != label) out[a] = pairwise_mi(data, a, label);
  });
  return out;
}

LabelClique build_label_clique(const EncodedDataset& data, const CliquePlan& plan,
                               std::span<const double> mi_to_label, std::size_t k,
                               std::size_t m, LabelPool pool) {
  const std::size_t label = require_label(data);
  if (mi_to_label.size() != data.num_attrs()) {
    throw Error(ErrorCode::ShapeMismatch, "need one label-MI value per attribute");
  }
  std::vector<std::size_t> candidates;
  for (std::size_t a = 0; a < data.num_attrs(); ++a) {
    if (a == label) continue;
    if (pool == LabelPool::Unrestricted || is_fair_role(data.attribute(a).role)) {
      candidates.push_back(a);
    }
  }
  if (candidates.empty()) {
    throw Error(ErrorCode::NoFairAttributes,
                "no admissible or additional attribute can explain the label");
  }
  std::stable_sort(candidates.begin(), candidates.end(), [&](std::size_t x, std::size_t y) {
    return mi_to_label[x] > mi_to_label[y];
  });
  const std::size_t slots = std::max<std::size_t>(1, k + m - 1);
  candidates.resize(std::min(slots, candidates.size()));
  std::sort(candidates.begin(), candidates.end());

  LabelClique lc;
  lc.separator = std::move(candidates);
  lc.label = label;
  std::size_t best_shared = 0;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    AttrSet shared;
    std::set_intersection(plan.cliques[i].begin(), plan.cliques[i].end(), lc.separator.begin(),
                          lc.separator.end(), std::back_inserter(shared));
    if (shared.size() > best_shared) {
      best_shared = shared.size();
      lc.parent = i;
    }
  }
  return lc;
}

CliquePlan with_label_clique(CliquePlan plan, const LabelClique& lc) {
  AttrSet clique = lc.separator;
  clique.insert(std::upper_bound(clique.begin(), clique.end(), lc.label), lc.label);
  plan.cliques.push_back(std::move(clique));
  plan.parents.push_back(lc.parent);
  plan.separators.push_back(lc.separator);
  return plan;
}

EncodedDataset preprocess(const EncodedDataset& data, const CliquePlan& plan,
                          const LabelClique& label_clique, const PreprocessConfig& config) {
  config.validate();
  if (config.alpha != 1.0) {
    throw Error(ErrorCode::InvalidConfig, "preprocess samples the fair branch only (alpha = 1)");
  }
  check_plan_matches(data, plan, label_clique);
  const auto model = fit_marginals(data, with_label_clique(plan, label_clique), config.pseudocount);
  return generate(data, model, nullptr, 1.0, config);
}

EncodedDataset preprocess_plus(const EncodedDataset& data, const CliquePlan& plan,
                               const LabelClique& fair, const LabelClique& unfair,
                               const PreprocessConfig& config) {
  config.validate();
  check_plan_matches(data, plan, fair);
  check_plan_matches(data, plan, unfair);
  const auto fair_model = fit_marginals(data, with_label_clique(plan, fair), config.pseudocount);
  const auto unfair_model =
      fit_marginals(data, with_label_clique(plan, unfair), config.pseudocount);
  return generate(data, fair_model, &unfair_model, config.alpha, config);
}

}  // namespace causalpre
