#include "causalpre/marginals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "causalpre/error.hpp"

namespace causalpre {

namespace {

constexpr std::size_t kMaxDenseCells = 10'000'000;

const OutcomeCounts& empty_counts() {
  static const OutcomeCounts empty;
  return empty;
}

bool is_sorted_unique(const AttrSet& s) {
  return std::adjacent_find(s.begin(), s.end(), std::greater_equal<>()) == s.end();
}

}  // namespace

std::size_t CodesHash::operator()(const std::vector<Code>& codes) const noexcept {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (Code c : codes) {
    h ^= c;
    h *= 0x100000001B3ull;
    h ^= h >> 29;
  }
  return static_cast<std::size_t>(h);
}

double OutcomeCounts::count_of(std::span<const Code> outcome) const {
  auto it = std::lower_bound(outcomes.begin(), outcomes.end(), outcome,
                             [](const std::vector<Code>& a, std::span<const Code> b) {
                               return std::lexicographical_compare(a.begin(), a.end(), b.begin(),
                                                                   b.end());
                             });
  if (it == outcomes.end() || !std::equal(it->begin(), it->end(), outcome.begin(), outcome.end())) {
    return 0.0;
  }
  return counts[static_cast<std::size_t>(it - outcomes.begin())];
}

ConditionalDist::ConditionalDist(const OutcomeCounts* counts, double pseudocount,
                                 std::span<const std::size_t> free_dims, bool backoff)
    : counts_(counts), pseudocount_(pseudocount), dims_(free_dims), backoff_(backoff) {
  cells_ = 1.0;
  for (std::size_t d : dims_) cells_ *= static_cast<double>(d);
}

double ConditionalDist::prob(std::span<const Code> free_values) const {
  if (free_values.size() != dims_.size()) {
    throw Error(ErrorCode::ShapeMismatch, "conditional query has the wrong number of values");
  }
  const double mass = counts_->total + pseudocount_ * cells_;
  if (mass <= 0.0) return 0.0;
  return (counts_->count_of(free_values) + pseudocount_) / mass;
}

void ConditionalDist::sample(SplitMix64& rng, std::span<Code> out) const {
  const double mass = counts_->total + pseudocount_ * cells_;
  const double u = rng.uniform() * mass;
  if (u < counts_->total) {
    const auto& cum = counts_->cumulative;
    auto it = std::upper_bound(cum.begin(), cum.end(), u);
    if (it == cum.end()) --it;
    const auto& outcome = counts_->outcomes[static_cast<std::size_t>(it - cum.begin())];
    std::copy(outcome.begin(), outcome.end(), out.begin());
    return;
  }
  // The pseudocount spreads mass uniformly over the whole free domain.
  for (std::size_t i = 0; i < dims_.size(); ++i) out[i] = static_cast<Code>(rng.below(dims_[i]));
}

ProbTable ConditionalDist::to_table() const {
  ProbTable t;
  t.dims.assign(dims_.begin(), dims_.end());
  if (cells_ > static_cast<double>(kMaxDenseCells)) {
    throw Error(ErrorCode::DomainTooLarge, "conditional table is too large to materialize");
  }
  t.probs.assign(static_cast<std::size_t>(cells_), 0.0);
  const double mass = counts_->total + pseudocount_ * cells_;
  if (mass <= 0.0) return t;
  for (double& p : t.probs) p = pseudocount_ / mass;
  for (std::size_t i = 0; i < counts_->outcomes.size(); ++i) {
    t.probs[t.index_of(counts_->outcomes[i])] += counts_->counts[i] / mass;
  }
  return t;
}

void MarginalModel::add_cell(std::size_t clique, std::span<const Code> clique_codes,
                             double count) {
  const auto& attrs = plan_.cliques[clique];
  const auto& sep = plan_.separators[clique];
  auto& cc = cliques_[clique];
  std::vector<Code> context, outcome;
  context.reserve(sep.size());
  outcome.reserve(cc.free.size());
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    if (std::binary_search(sep.begin(), sep.end(), attrs[i])) {
      context.push_back(clique_codes[i]);
    } else {
      outcome.push_back(clique_codes[i]);
    }
  }
  auto& ctx = cc.contexts[std::move(context)];
  ctx.outcomes.push_back(outcome);
  ctx.counts.push_back(count);
  cc.backoff.outcomes.push_back(std::move(outcome));
  cc.backoff.counts.push_back(count);
}

namespace {

// Merges duplicate outcomes, sorts lexicographically, builds the CDF.
void consolidate(OutcomeCounts& oc) {
  std::vector<std::size_t> order(oc.outcomes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return oc.outcomes[a] < oc.outcomes[b]; });
  OutcomeCounts merged;
  for (std::size_t i : order) {
    if (!merged.outcomes.empty() && merged.outcomes.back() == oc.outcomes[i]) {
      merged.counts.back() += oc.counts[i];
    } else {
      merged.outcomes.push_back(std::move(oc.outcomes[i]));
      merged.counts.push_back(oc.counts[i]);
    }
  }
  double running = 0.0;
  merged.cumulative.reserve(merged.counts.size());
  for (double c : merged.counts) {
    running += c;
    merged.cumulative.push_back(running);
  }
  merged.total = running;
  oc = std::move(merged);
}

}  // namespace

void MarginalModel::finalize() {
  for (auto& cc : cliques_) {
    for (auto& [ctx, oc] : cc.contexts) consolidate(oc);
    consolidate(cc.backoff);
  }
}

namespace {

void validate_plan(const CliquePlan& plan, std::size_t num_attrs) {
  const std::size_t r = plan.cliques.size();
  if (r == 0) throw Error(ErrorCode::AttrMismatch, "plan has no cliques");
  if (plan.parents.size() != r || plan.separators.size() != r) {
    throw Error(ErrorCode::AttrMismatch, "plan parents/separators do not match its cliques");
  }
  AttrSet seen;
  for (std::size_t i = 0; i < r; ++i) {
    const auto& c = plan.cliques[i];
    const auto& sep = plan.separators[i];
    if (c.empty() || !is_sorted_unique(c) || !is_sorted_unique(sep)) {
      throw Error(ErrorCode::AttrMismatch,
                  "clique " + std::to_string(i) + " is empty or not a sorted attribute set");
    }
    for (std::size_t a : c) {
      if (a >= num_attrs) {
        throw Error(ErrorCode::AttrMismatch, "clique " + std::to_string(i) +
                                                 " names attribute " + std::to_string(a) +
                                                 " which the dataset lacks");
      }
    }
    if (!std::includes(c.begin(), c.end(), sep.begin(), sep.end())) {
      throw Error(ErrorCode::AttrMismatch,
                  "separator of clique " + std::to_string(i) + " is not inside the clique");
    }
    if (!std::includes(seen.begin(), seen.end(), sep.begin(), sep.end())) {
      throw Error(ErrorCode::AttrMismatch, "separator of clique " + std::to_string(i) +
                                               " uses attributes not produced earlier");
    }
    AttrSet free;
    std::set_difference(c.begin(), c.end(), sep.begin(), sep.end(), std::back_inserter(free));
    AttrSet reused;
    std::set_intersection(free.begin(), free.end(), seen.begin(), seen.end(),
                          std::back_inserter(reused));
    if (!reused.empty()) {
      throw Error(ErrorCode::AttrMismatch, "clique " + std::to_string(i) + " re-samples attribute " +
                                               std::to_string(reused.front()) +
                                               " outside its separator");
    }
    if (plan.parents[i] && *plan.parents[i] >= i) {
      throw Error(ErrorCode::AttrMismatch,
                  "clique " + std::to_string(i) + " has a parent that is not earlier");
    }
    AttrSet merged;
    std::set_union(seen.begin(), seen.end(), c.begin(), c.end(), std::back_inserter(merged));
    seen = std::move(merged);
  }
}

}  // namespace

MarginalModel fit_marginals(const EncodedDataset& data, const CliquePlan& plan,
                            double pseudocount) {
  if (!(pseudocount >= 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "pseudocount must be nonnegative");
  }
  if (data.num_rows() == 0) throw Error(ErrorCode::EmptyDataset, "cannot fit an empty dataset");
  validate_plan(plan, data.num_attrs());

  MarginalModel model;
  model.plan_ = plan;
  model.pseudocount_ = pseudocount;
  for (std::size_t a = 0; a < data.num_attrs(); ++a) model.domain_sizes_.push_back(data.domain_size(a));

  const std::size_t n = data.num_rows();
  model.cliques_.resize(plan.size());
  for (std::size_t i = 0; i < plan.size(); ++i) {
    auto& cc = model.cliques_[i];
    cc.free = plan.free_attrs(i);
    for (std::size_t a : cc.free) cc.free_dims.push_back(data.domain_size(a));

    // Aggregate row counts per (context, outcome) before splitting.
    const auto& attrs = plan.cliques[i];
    std::unordered_map<std::vector<Code>, double, CodesHash> cells;
    std::vector<Code> key(attrs.size());
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t j = 0; j < attrs.size(); ++j) key[j] = data.at(r, attrs[j]);
      cells[key] += 1.0;
    }
    std::vector<std::pair<std::vector<Code>, double>> ordered(cells.begin(), cells.end());
    std::sort(ordered.begin(), ordered.end());
    for (const auto& [codes, count] : ordered) model.add_cell(i, codes, count);
  }
  model.finalize();
  return model;
}

ConditionalDist MarginalModel::conditional(std::size_t clique,
                                           std::span<const Code> separator_values) const {
  if (clique >= cliques_.size()) {
    throw Error(ErrorCode::IndexOutOfRange, "no clique " + std::to_string(clique));
  }
  const auto& sep = plan_.separators[clique];
  if (separator_values.size() != sep.size()) {
    throw Error(ErrorCode::UnassignedSeparator,
                "clique " + std::to_string(clique) + " needs " + std::to_string(sep.size()) +
                    " separator values, got " + std::to_string(separator_values.size()));
  }
  for (Code c : separator_values) {
    if (c == kUnassigned) {
      throw Error(ErrorCode::UnassignedSeparator,
                  "separator of clique " + std::to_string(clique) + " is not fully assigned");
    }
  }
  const auto& cc = cliques_[clique];
  if (sep.empty()) return ConditionalDist(&cc.backoff, pseudocount_, cc.free_dims, false);

  std::vector<Code> key(separator_values.begin(), separator_values.end());
  auto it = cc.contexts.find(key);
  if (it != cc.contexts.end()) {
    return ConditionalDist(&it->second, pseudocount_, cc.free_dims, false);
  }
  if (pseudocount_ > 0.0) {
    // The smoothed slice of an unseen context is uniform.
    return ConditionalDist(&empty_counts(), pseudocount_, cc.free_dims, false);
  }
  return ConditionalDist(&cc.backoff, pseudocount_, cc.free_dims, true);
}

ConditionalDist MarginalModel::conditional_for(std::size_t clique,
                                               std::span<const Code> record) const {
  const auto& sep = plan_.separators.at(clique);
  std::vector<Code> values;
  values.reserve(sep.size());
  for (std::size_t a : sep) {
    if (a >= record.size()) {
      throw Error(ErrorCode::UnassignedSeparator,
                  "record does not cover separator attribute " + std::to_string(a));
    }
    values.push_back(record[a]);
  }
  return conditional(clique, values);
}

double MarginalModel::log_density(std::span<const Code> record) const {
  for (const auto& c : plan_.cliques) {
    for (std::size_t a : c) {
      if (a >= record.size() || record[a] == kUnassigned) {
        throw Error(ErrorCode::IncompleteRecord,
                    "record leaves attribute " + std::to_string(a) + " unassigned");
      }
    }
  }
  double total = 0.0;
  std::vector<Code> free_values;
  for (std::size_t i = 0; i < cliques_.size(); ++i) {
    const auto dist = conditional_for(i, record);
    free_values.clear();
    for (std::size_t a : cliques_[i].free) free_values.push_back(record[a]);
    const double p = dist.prob(free_values);
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    total += std::log2(p);
  }
  return total;
}

ProbTable MarginalModel::table(std::size_t clique) const {
  if (clique >= cliques_.size()) {
    throw Error(ErrorCode::IndexOutOfRange, "no clique " + std::to_string(clique));
  }
  const auto& attrs = plan_.cliques[clique];
  const auto& sep = plan_.separators[clique];
  const auto& cc = cliques_[clique];
  ProbTable t;
  t.attrs = attrs;
  std::size_t cells = 1;
  for (std::size_t a : attrs) {
    const std::size_t d = domain_sizes_[a];
    if (cells > kMaxDenseCells / d) {
      throw Error(ErrorCode::DomainTooLarge, "clique table exceeds the dense cell limit");
    }
    cells *= d;
    t.dims.push_back(d);
  }
  const double mass = cc.backoff.total + pseudocount_ * static_cast<double>(cells);
  t.probs.assign(cells, pseudocount_ / mass);
  std::vector<Code> codes(attrs.size());
  for (const auto& [ctx, oc] : cc.contexts) {
    for (std::size_t o = 0; o < oc.outcomes.size(); ++o) {
      std::size_t si = 0, fi = 0;
      for (std::size_t j = 0; j < attrs.size(); ++j) {
        codes[j] = (si < sep.size() && sep[si] == attrs[j]) ? ctx[si++] : oc.outcomes[o][fi++];
      }
      t.probs[t.index_of(codes)] += oc.counts[o] / mass;
    }
  }
  return t;
}

nlohmann::json MarginalModel::to_json() const {
  nlohmann::json cliques = nlohmann::json::array();
  for (std::size_t i = 0; i < cliques_.size(); ++i) {
    const auto& attrs = plan_.cliques[i];
    const auto& sep = plan_.separators[i];
    // Contexts live in a hash map; emit cells in sorted order.
    std::vector<std::pair<std::vector<Code>, double>> cells;
    for (const auto& [ctx, oc] : cliques_[i].contexts) {
      for (std::size_t o = 0; o < oc.outcomes.size(); ++o) {
        std::vector<Code> codes(attrs.size());
        std::size_t si = 0, fi = 0;
        for (std::size_t j = 0; j < attrs.size(); ++j) {
          codes[j] = (si < sep.size() && sep[si] == attrs[j]) ? ctx[si++] : oc.outcomes[o][fi++];
        }
        cells.emplace_back(std::move(codes), oc.counts[o]);
      }
    }
    std::sort(cells.begin(), cells.end());
    nlohmann::json jcells = nlohmann::json::array();
    for (const auto& [codes, count] : cells) jcells.push_back({{"codes", codes}, {"count", count}});
    nlohmann::json parent = plan_.parents[i] ? nlohmann::json(*plan_.parents[i]) : nlohmann::json();
    cliques.push_back({{"attrs", attrs},
                       {"separator", sep},
                       {"parent", parent},
                       {"cells", std::move(jcells)}});
  }
  return {{"lambda", pseudocount_},
          {"k", plan_.k},
          {"m", plan_.m},
          {"domain_sizes", domain_sizes_},
          {"cliques", std::move(cliques)}};
}

MarginalModel MarginalModel::from_json(const nlohmann::json& doc) {
  MarginalModel model;
  try {
    model.pseudocount_ = doc.at("lambda").get<double>();
    model.domain_sizes_ = doc.at("domain_sizes").get<std::vector<std::size_t>>();
    model.plan_.k = doc.at("k").get<std::size_t>();
    model.plan_.m = doc.at("m").get<std::size_t>();
    for (const auto& c : doc.at("cliques")) {
      model.plan_.cliques.push_back(c.at("attrs").get<AttrSet>());
      model.plan_.separators.push_back(c.at("separator").get<AttrSet>());
      const auto& p = c.at("parent");
      model.plan_.parents.push_back(p.is_null() ? std::nullopt
                                                : std::optional<std::size_t>(p.get<std::size_t>()));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedConfig, std::string("model document: ") + e.what());
  }
  validate_plan(model.plan_, model.domain_sizes_.size());
  model.cliques_.resize(model.plan_.size());
  for (std::size_t i = 0; i < model.plan_.size(); ++i) {
    auto& cc = model.cliques_[i];
    cc.free = model.plan_.free_attrs(i);
    for (std::size_t a : cc.free) cc.free_dims.push_back(model.domain_sizes_[a]);
    const auto& attrs = model.plan_.cliques[i];
    for (const auto& cell : doc["cliques"][i].at("cells")) {
      auto codes = cell.at("codes").get<std::vector<Code>>();
      if (codes.size() != attrs.size()) {
        throw Error(ErrorCode::MalformedConfig, "model cell has the wrong arity");
      }
      for (std::size_t j = 0; j < codes.size(); ++j) {
        if (codes[j] >= model.domain_sizes_[attrs[j]]) {
          throw Error(ErrorCode::MalformedConfig, "model cell code outside its domain");
        }
      }
      model.add_cell(i, codes, cell.at("count").get<double>());
    }
  }
  model.finalize();
  return model;
}

}  // namespace causalpre
