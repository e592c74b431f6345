#include "causalpre/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "causalpre/error.hpp"
#include "causalpre/info.hpp"

namespace causalpre {

namespace {

constexpr double kMaxConditioningCells = 1e5;

// Codes of the first row in each group, indexed by group id.
std::vector<std::vector<Code>> group_representatives(const EncodedDataset& data,
                                                     std::span<const std::size_t> attrs,
                                                     const Grouping& g) {
  std::vector<std::vector<Code>> out(g.count);
  std::vector<bool> filled(g.count, false);
  for (std::size_t r = 0; r < g.ids.size(); ++r) {
    const auto id = g.ids[r];
    if (filled[id]) continue;
    filled[id] = true;
    for (std::size_t a : attrs) out[id].push_back(data.at(r, a));
  }
  return out;
}

void require_same_schema(const EncodedDataset& a, const EncodedDataset& b) {
  if (a.schema() != b.schema()) {
    throw Error(ErrorCode::SchemaMismatch, "datasets have different schemas");
  }
}

}  // namespace

RODReport rod(std::span<const Code> outcomes, std::size_t outcome_domain,
              std::span<const Code> sensitive, std::size_t sensitive_groups,
              std::span<const std::uint32_t> context,
              std::span<const std::vector<Code>> context_values, const RODOptions& options) {
  if (outcome_domain != 2) {
    throw Error(ErrorCode::NonBinaryOutcome,
                "outcome has " + std::to_string(outcome_domain) + " categories, ROD needs 2");
  }
  if (sensitive_groups < 2) {
    throw Error(ErrorCode::NoSensitiveVariation, "sensitive attribute has fewer than 2 values");
  }
  if (!(options.epsilon > 0.0)) throw Error(ErrorCode::InvalidConfig, "epsilon must be positive");
  if (sensitive.size() != outcomes.size() || context.size() != outcomes.size()) {
    throw Error(ErrorCode::ShapeMismatch, "ROD columns differ in length");
  }
  std::size_t contexts = 0;
  for (auto c : context) contexts = std::max<std::size_t>(contexts, c + 1);

  // counts[(ctx * groups + s) * 2 + positive?]
  std::vector<std::size_t> counts(contexts * sensitive_groups * 2, 0);
  for (std::size_t r = 0; r < outcomes.size(); ++r) {
    if (outcomes[r] > 1) throw Error(ErrorCode::NonBinaryOutcome, "outcome code outside {0, 1}");
    if (sensitive[r] >= sensitive_groups) {
      throw Error(ErrorCode::IndexOutOfRange, "sensitive group id out of range");
    }
    const std::size_t pos = outcomes[r] == options.positive ? 1 : 0;
    ++counts[(context[r] * sensitive_groups + sensitive[r]) * 2 + pos];
  }

  const double eps = options.epsilon;
  auto at = [&](std::size_t ctx, std::size_t s, std::size_t y) {
    return static_cast<double>(counts[(ctx * sensitive_groups + s) * 2 + y]);
  };

  RODReport report;
  bool any = false;
  for (std::size_t s0 = 0; s0 < sensitive_groups; ++s0) {
    for (std::size_t s1 = s0 + 1; s1 < sensitive_groups; ++s1) {
      double sum = 0.0;
      std::vector<RODContext> details;
      for (std::size_t ctx = 0; ctx < contexts; ++ctx) {
        const double n0 = at(ctx, s0, 0) + at(ctx, s0, 1);
        const double n1 = at(ctx, s1, 0) + at(ctx, s1, 1);
        const auto min_support = static_cast<double>(options.min_support);
        if (n0 < min_support || n1 < min_support || n0 == 0.0 || n1 == 0.0) continue;
        // Smoothing the rates (not the counts) keeps equal rates at ratio 1
        // even when a cell is empty and the groups differ in size.
        const double pos0 = (at(ctx, s0, 1) / n0 + eps) / (1 + 2 * eps);
        const double neg0 = (at(ctx, s0, 0) / n0 + eps) / (1 + 2 * eps);
        const double pos1 = (at(ctx, s1, 1) / n1 + eps) / (1 + 2 * eps);
        const double neg1 = (at(ctx, s1, 0) / n1 + eps) / (1 + 2 * eps);
        const double ratio = (pos0 * neg1) / (neg0 * pos1);
        const double abs_log = std::abs(std::log2(ratio));
        sum += abs_log;
        RODContext d;
        d.context = ctx;
        if (ctx < context_values.size()) d.values = context_values[ctx];
        d.abs_log_ratio = abs_log;
        d.support = static_cast<std::size_t>(n0 + n1);
        details.push_back(std::move(d));
      }
      if (details.empty()) continue;
      const double score = sum / static_cast<double>(details.size());
      if (!any || score > report.raw_abs_log) {
        any = true;
        report.raw_abs_log = score;
        report.worst_pair = {s0, s1};
        report.per_context = std::move(details);
      }
    }
  }
  report.rod_normalized = report.raw_abs_log / (1.0 + report.raw_abs_log);
  return report;
}

namespace {

RODReport rod_with_outcomes(const EncodedDataset& data, std::span<const Code> outcomes,
                            const RODOptions& options) {
  const auto label = data.label_index();
  if (!label) throw Error(ErrorCode::NoLabel, "dataset has no single label attribute");
  const auto sens = data.attrs_with_role(Role::Sensitive);
  if (sens.empty()) throw Error(ErrorCode::NoSensitiveVariation, "dataset has no sensitive attribute");
  const auto adm = data.attrs_with_role(Role::Admissible);
  const auto groups = group_rows(data, sens);
  const auto contexts = group_rows(data, adm);
  const auto context_values = group_representatives(data, adm, contexts);
  std::vector<Code> group_codes(groups.ids.begin(), groups.ids.end());
  auto report = rod(outcomes, data.domain_size(*label), group_codes, groups.count, contexts.ids,
                    context_values, options);
  report.group_values = group_representatives(data, sens, groups);
  return report;
}

}  // namespace

RODReport rod(const EncodedDataset& data, const RODOptions& options) {
  const auto label = data.label_index();
  if (!label) throw Error(ErrorCode::NoLabel, "dataset has no single label attribute");
  return rod_with_outcomes(data, data.column(*label), options);
}

RODReport rod_of_predictions(const EncodedDataset& data, std::span<const Code> predictions,
                             const RODOptions& options) {
  if (predictions.size() != data.num_rows()) {
    throw Error(ErrorCode::ShapeMismatch, "one prediction per row is required");
  }
  return rod_with_outcomes(data, predictions, options);
}

std::vector<double> distortion_kl_per_subset(const EncodedDataset& original,
                                             const EncodedDataset& processed,
                                             std::span<const AttrSet> subsets, double epsilon) {
  require_same_schema(original, processed);
  if (subsets.empty()) throw Error(ErrorCode::EmptyAttrSet, "no attribute subsets given");
  if (original.num_rows() == 0 || processed.num_rows() == 0) {
    throw Error(ErrorCode::EmptyDataset, "distortion needs non-empty datasets");
  }
  if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidConfig, "epsilon must be positive");
  std::vector<double> out;
  for (const auto& subset : subsets) {
    if (subset.empty()) throw Error(ErrorCode::EmptyAttrSet, "attribute subset is empty");
    check_attr_indices(original, subset);
    double cells = 1.0;
    for (std::size_t a : subset) cells *= static_cast<double>(original.domain_size(a));
    std::map<std::vector<Code>, std::pair<double, double>> joint;
    std::vector<Code> key(subset.size());
    for (std::size_t r = 0; r < original.num_rows(); ++r) {
      for (std::size_t j = 0; j < subset.size(); ++j) key[j] = original.at(r, subset[j]);
      joint[key].first += 1.0;
    }
    for (std::size_t r = 0; r < processed.num_rows(); ++r) {
      for (std::size_t j = 0; j < subset.size(); ++j) key[j] = processed.at(r, subset[j]);
      joint[key].second += 1.0;
    }
    const double np = static_cast<double>(original.num_rows());
    const double nq = static_cast<double>(processed.num_rows());
    const double norm = 1.0 + epsilon * cells;
    double kl = 0.0;
    for (const auto& [codes, c] : joint) {
      const double p = (c.first / np + epsilon) / norm;
      const double q = (c.second / nq + epsilon) / norm;
      kl += p * std::log2(p / q);
    }
    out.push_back(kl > 0.0 ? kl : 0.0);
  }
  return out;
}

double distortion_kl(const EncodedDataset& original, const EncodedDataset& processed,
                     std::span<const AttrSet> subsets, double epsilon) {
  const auto per = distortion_kl_per_subset(original, processed, subsets, epsilon);
  double sum = 0.0;
  for (double v : per) sum += v;
  return sum / static_cast<double>(per.size());
}

double conditional_mi(const EncodedDataset& data, std::size_t label,
                      std::span<const std::size_t> sensitive, std::span<const std::size_t> given) {
  if (sensitive.empty()) throw Error(ErrorCode::EmptyAttrSet, "no sensitive attributes given");
  const std::size_t y[] = {label};
  check_attr_indices(data, y);
  check_attr_indices(data, sensitive);
  check_attr_indices(data, given);
  double cells = 1.0;
  for (std::size_t a : given) cells *= static_cast<double>(data.domain_size(a));
  if (cells > kMaxConditioningCells) {
    throw Error(ErrorCode::ContextExplosion,
                "conditioning set has " + std::to_string(static_cast<long double>(cells)) +
                    " contexts, limit is 1e5");
  }
  auto joined = [](std::initializer_list<std::span<const std::size_t>> parts) {
    std::vector<std::size_t> out;
    for (auto p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
  };
  const auto yf = joined({y, given});
  const auto sf = joined({sensitive, given});
  const auto ysf = joined({y, sensitive, given});
  const double h_f = given.empty() ? 0.0 : entropy(data, given);
  const double cmi = entropy(data, yf) + entropy(data, sf) - entropy(data, ysf) - h_f;
  return cmi > 0.0 ? cmi : 0.0;
}

double tv_distance(const EncodedDataset& a, const EncodedDataset& b,
                   std::span<const std::size_t> attrs) {
  require_same_schema(a, b);
  check_attr_indices(a, attrs);
  std::map<std::vector<Code>, std::pair<double, double>> joint;
  std::vector<Code> key(attrs.size());
  for (std::size_t r = 0; r < a.num_rows(); ++r) {
    for (std::size_t j = 0; j < attrs.size(); ++j) key[j] = a.at(r, attrs[j]);
    joint[key].first += 1.0;
  }
  for (std::size_t r = 0; r < b.num_rows(); ++r) {
    for (std::size_t j = 0; j < attrs.size(); ++j) key[j] = b.at(r, attrs[j]);
    joint[key].second += 1.0;
  }
  const double na = static_cast<double>(a.num_rows());
  const double nb = static_cast<double>(b.num_rows());
  double tv = 0.0;
  for (const auto& [codes, c] : joint) tv += std::abs(c.first / na - c.second / nb);
  return 0.5 * tv;
}

}  // namespace causalpre
