#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <set>

#include "causalpre/cliques.hpp"
#include "causalpre/error.hpp"

namespace causalpre {

namespace {

using Mask = std::uint32_t;

constexpr double kTieTolerance = 1e-12;

struct Search {
  std::size_t r = 0;
  std::size_t m = 0;
  std::size_t cap = 0;
  Mask full = 0;
  SearchObjective objective = SearchObjective::Maximize;
  std::vector<Mask> masks;  // ascending
  std::vector<double> weights;
  double max_weight = 0.0;

  std::vector<Mask> chosen;
  std::vector<std::size_t> component;  // per chosen clique
  std::vector<Mask> best;
  double best_weight = 0.0;
  bool found = false;

  bool improves(double w) const {
    if (!found) return true;
    return objective == SearchObjective::Maximize ? w > best_weight + kTieTolerance
                                                  : w < best_weight - kTieTolerance;
  }

  bool hopeless(double current, std::size_t remaining) const {
    if (!found) return false;
    if (objective == SearchObjective::Maximize) {
      return current + static_cast<double>(remaining) * max_weight <= best_weight + kTieTolerance;
    }
    return current >= best_weight - kTieTolerance;
  }

  bool every_clique_has_partner() const {
    if (r < 2) return true;
    for (std::size_t i = 0; i < chosen.size(); ++i) {
      bool partner = false;
      for (std::size_t j = 0; j < chosen.size() && !partner; ++j) {
        if (i != j && static_cast<std::size_t>(std::popcount(chosen[i] & chosen[j])) >= m) {
          partner = true;
        }
      }
      if (!partner) return false;
    }
    return true;
  }

  void run(std::size_t start, Mask covered, double weight) {
    const std::size_t placed = chosen.size();
    if (placed == r) {
      if (covered == full && every_clique_has_partner() && improves(weight)) {
        best = chosen;
        best_weight = weight;
        found = true;
      }
      return;
    }
    const std::size_t remaining = r - placed;
    const auto uncovered = static_cast<std::size_t>(std::popcount(full & ~covered));
    if (uncovered > remaining * cap) return;
    if (hopeless(weight, remaining)) return;

    for (std::size_t idx = start; idx + remaining <= masks.size(); ++idx) {
      const Mask candidate = masks[idx];
      // Pairwise overlap must be empty or at least m; overlapping cliques
      // must all lie in distinct components of the overlap forest.
      std::set<std::size_t> touched;
      bool ok = true;
      for (std::size_t j = 0; j < placed && ok; ++j) {
        const auto shared = static_cast<std::size_t>(std::popcount(candidate & chosen[j]));
        if (shared == 0) continue;
        if (shared < m || !touched.insert(component[j]).second) ok = false;
      }
      if (!ok) continue;

      const auto saved = component;
      const std::size_t label = placed;
      for (std::size_t j = 0; j < placed; ++j)
        if (touched.count(saved[j])) component[j] = label;
      chosen.push_back(candidate);
      component.push_back(label);
      run(idx + 1, covered | candidate, weight + weights[idx]);
      chosen.pop_back();
      component = saved;
    }
  }
};

}  // namespace

ExactSearchResult exact_clique_search(std::span<const std::size_t> attrs, const MIMatrix& mi,
                                      std::size_t k, std::size_t m, SearchObjective objective) {
  const std::size_t d = attrs.size();
  if (d > kExactSearchMaxAttrs) {
    throw Error(ErrorCode::TooLarge, "exact clique search is capped at " +
                                         std::to_string(kExactSearchMaxAttrs) + " attributes, got " +
                                         std::to_string(d));
  }
  if (d == 0) throw Error(ErrorCode::EmptyAttrSet, "no attributes to search over");
  AttrSet sorted(attrs.begin(), attrs.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorCode::SameAttribute, "attribute listed twice");
  }
  for (std::size_t a : sorted) {
    if (!mi.contains(a)) {
      throw Error(ErrorCode::IndexOutOfRange,
                  "attribute " + std::to_string(a) + " is not in the MI matrix");
    }
  }

  Search s;
  s.r = clique_count(d, k, m);
  s.m = m;
  s.cap = std::min(k + m, d);
  s.full = static_cast<Mask>((Mask{1} << d) - 1);
  s.objective = objective;
  for (Mask mask = 1; mask <= s.full; ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) > s.cap) continue;
    double w = 0.0;
    for (std::size_t x = 0; x < d; ++x)
      for (std::size_t y = x + 1; y < d; ++y)
        if ((mask >> x & 1u) && (mask >> y & 1u)) w += mi(sorted[x], sorted[y]);
    s.masks.push_back(mask);
    s.weights.push_back(w);
    s.max_weight = std::max(s.max_weight, w);
  }
  s.run(0, 0, 0.0);
  if (!s.found) {
    throw Error(ErrorCode::InfeasibleParams,
                "no clique family satisfies the constraints for " + std::to_string(d) +
                    " attributes, k = " + std::to_string(k) + ", m = " + std::to_string(m));
  }

  std::vector<AttrSet> cliques;
  for (Mask mask : s.best) {
    AttrSet c;
    for (std::size_t x = 0; x < d; ++x)
      if (mask >> x & 1u) c.push_back(sorted[x]);
    cliques.push_back(std::move(c));
  }
  ExactSearchResult result;
  result.plan = order_as_tree(std::move(cliques), k, m);
  result.weight = s.best_weight;
  return result;
}

}  // namespace causalpre
