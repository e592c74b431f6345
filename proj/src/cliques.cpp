#include "causalpre/cliques.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

#include "causalpre/error.hpp"

namespace causalpre {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

std::string format_set(std::span<const std::size_t> s) {
  std::ostringstream out;
  out << '{';
  for (std::size_t i = 0; i < s.size(); ++i) out << (i ? "," : "") << s[i];
  out << '}';
  return out.str();
}

AttrSet intersect(const AttrSet& a, const AttrSet& b) {
  AttrSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

AttrSet unite(const AttrSet& a, const AttrSet& b) {
  AttrSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

AttrSet subtract(const AttrSet& a, const AttrSet& b) {
  AttrSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

void require_distinct_members(std::span<const std::size_t> attrs, const MIMatrix& mi) {
  std::set<std::size_t> seen;
  for (std::size_t a : attrs) {
    if (!mi.contains(a)) {
      throw Error(ErrorCode::IndexOutOfRange,
                  "attribute " + std::to_string(a) + " is not in the MI matrix");
    }
    if (!seen.insert(a).second) {
      throw Error(ErrorCode::SameAttribute, "attribute " + std::to_string(a) + " listed twice");
    }
  }
}

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[std::max(a, b)] = std::min(a, b);
    return true;
  }
};

}  // namespace

AttrSet CliquePlan::coverage() const {
  AttrSet out;
  for (const auto& c : cliques) out = unite(out, c);
  return out;
}

AttrSet CliquePlan::free_attrs(std::size_t i) const {
  return subtract(cliques.at(i), separators.at(i));
}

double clique_weight(std::span<const std::size_t> clique, const MIMatrix& mi) {
  double w = 0.0;
  for (std::size_t x = 0; x < clique.size(); ++x)
    for (std::size_t y = x + 1; y < clique.size(); ++y) w += mi(clique[x], clique[y]);
  return w;
}

double plan_weight(const CliquePlan& plan, const MIMatrix& mi) {
  double w = 0.0;
  for (const auto& c : plan.cliques) w += clique_weight(c, mi);
  return w;
}

double delta(std::size_t u, std::span<const std::size_t> clique, const MIMatrix& mi) {
  if (clique.empty()) throw Error(ErrorCode::EmptyClique, "Delta needs a non-empty clique");
  if (std::find(clique.begin(), clique.end(), u) != clique.end()) {
    throw Error(ErrorCode::MemberAlreadyInClique,
                "attribute " + std::to_string(u) + " already belongs to the clique");
  }
  double affinity = 0.0;
  for (std::size_t j : clique) affinity += mi(u, j);
  // |C| >= 1 keeps the denominator positive.
  const double denom =
      std::sqrt(static_cast<double>(clique.size()) + 2.0 * clique_weight(clique, mi));
  return affinity / denom;
}

DeltaM delta_m(std::span<const std::size_t> active, std::span<const std::size_t> candidate,
               const MIMatrix& mi, std::size_t m) {
  if (m == 0 || candidate.size() < m) {
    throw Error(ErrorCode::CandidateTooSmall, "candidate clique of size " +
                                                  std::to_string(candidate.size()) +
                                                  " cannot supply " + std::to_string(m) +
                                                  " separator attributes");
  }
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(candidate.size());
  for (std::size_t x : candidate) scored.emplace_back(delta(x, active, mi), x);
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  DeltaM out;
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sum += scored[i].first;
    out.top.push_back(scored[i].second);
  }
  std::sort(out.top.begin(), out.top.end());
  out.score = sum / static_cast<double>(m);
  return out;
}

std::size_t clique_count(std::size_t num_attrs, std::size_t k, std::size_t m) {
  if (k == 0) throw Error(ErrorCode::InfeasibleParams, "k must be at least 1");
  if (num_attrs <= m) {
    throw Error(ErrorCode::InfeasibleParams, "m = " + std::to_string(m) + " leaves no room for " +
                                                 std::to_string(num_attrs) + " attributes");
  }
  return (num_attrs - m + k - 1) / k;
}

std::vector<AttrSet> clique_initialization(std::span<const std::size_t> attrs,
                                           const MIMatrix& mi, std::size_t k, std::size_t m) {
  const std::size_t d = attrs.size();
  if (k == 0) throw Error(ErrorCode::InfeasibleParams, "k must be at least 1");
  if (d < 2) throw Error(ErrorCode::InfeasibleParams, "need at least two attributes");
  if (k + m > d) {
    throw Error(ErrorCode::InfeasibleParams, "k + m = " + std::to_string(k + m) +
                                                 " exceeds the " + std::to_string(d) +
                                                 " attributes");
  }
  require_distinct_members(attrs, mi);
  const std::size_t r = clique_count(d, k, m);

  AttrSet sorted(attrs.begin(), attrs.end());
  std::sort(sorted.begin(), sorted.end());

  // Seeding: endpoints of the weakest edges become singleton centroids.
  struct Edge {
    double w;
    std::size_t i, j;
  };
  std::vector<Edge> edges;
  for (std::size_t x = 0; x < d; ++x)
    for (std::size_t y = x + 1; y < d; ++y)
      edges.push_back({mi(sorted[x], sorted[y]), sorted[x], sorted[y]});
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    if (a.w != b.w) return a.w < b.w;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });

  std::vector<AttrSet> cliques;
  std::set<std::size_t> assigned;
  for (const auto& e : edges) {
    if (cliques.size() == r) break;
    for (std::size_t v : {e.i, e.j}) {
      if (cliques.size() < r && !assigned.count(v)) {
        cliques.push_back({v});
        assigned.insert(v);
      }
    }
  }

  // Growth: one attribute per iteration, to the feasible clique with the
  // largest Delta. Affinities and internal weights are kept incrementally.
  std::vector<std::size_t> pending;
  for (std::size_t a : sorted)
    if (!assigned.count(a)) pending.push_back(a);

  std::vector<double> inner(r, 0.0);
  std::vector<std::vector<double>> affinity(pending.size(), std::vector<double>(r, 0.0));
  for (std::size_t p = 0; p < pending.size(); ++p)
    for (std::size_t c = 0; c < r; ++c) affinity[p][c] = mi(pending[p], cliques[c].front());

  std::vector<bool> done(pending.size(), false);
  bool flag = true;
  std::size_t oversized = kNone;
  for (std::size_t step = 0; step < pending.size(); ++step) {
    double best_score = -std::numeric_limits<double>::infinity();
    std::size_t best_p = kNone, best_c = kNone;
    for (std::size_t p = 0; p < pending.size(); ++p) {
      if (done[p]) continue;
      for (std::size_t c = 0; c < r; ++c) {
        const std::size_t cap = (flag || c == oversized) ? k + m : k;
        if (cliques[c].size() >= cap) continue;
        const double score =
            affinity[p][c] /
            std::sqrt(static_cast<double>(cliques[c].size()) + 2.0 * inner[c]);
        if (best_p == kNone || score > best_score) {
          best_score = score;
          best_p = p;
          best_c = c;
        }
      }
    }
    if (best_p == kNone) {
      throw Error(ErrorCode::InfeasibleParams, "clique capacity exhausted during initialization");
    }
    const std::size_t u = pending[best_p];
    inner[best_c] += affinity[best_p][best_c];
    cliques[best_c].insert(std::upper_bound(cliques[best_c].begin(), cliques[best_c].end(), u), u);
    done[best_p] = true;
    for (std::size_t p = 0; p < pending.size(); ++p)
      if (!done[p]) affinity[p][best_c] += mi(pending[p], u);
    if (flag && cliques[best_c].size() > k) {
      flag = false;
      oversized = best_c;
    }
  }
  return cliques;
}

namespace {

// Can every remaining clique still be attached with a full m-separator?
// Each processed clique hosts floor(private / m) children; attaching the
// highest-capacity cliques first is optimal.
bool attachable(std::size_t slots, std::vector<std::size_t> capacities) {
  std::sort(capacities.begin(), capacities.end(), std::greater<>());
  for (std::size_t cap : capacities) {
    if (slots == 0) return false;
    slots = slots - 1 + cap;
  }
  return true;
}

}  // namespace

CliquePlan clique_extension(std::vector<AttrSet> init, const MIMatrix& mi, std::size_t k,
                            std::size_t m) {
  if (init.empty()) throw Error(ErrorCode::EmptyInit, "no initial cliques to extend");
  std::set<std::size_t> seen;
  for (auto& c : init) {
    if (c.empty()) throw Error(ErrorCode::EmptyClique, "initial clique is empty");
    std::sort(c.begin(), c.end());
    for (std::size_t a : c) {
      if (!seen.insert(a).second) {
        throw Error(ErrorCode::InfeasibleParams,
                    "initial cliques are not disjoint (attribute " + std::to_string(a) + ")");
      }
    }
    require_distinct_members(c, mi);
  }

  std::size_t seed = kNone;
  if (m > 0) {
    for (std::size_t i = 0; i < init.size() && seed == kNone; ++i)
      if (init[i].size() == k + m) seed = i;
  }
  if (seed == kNone) {
    seed = 0;
    for (std::size_t i = 1; i < init.size(); ++i)
      if (init[i].size() > init[seed].size()) seed = i;
  }

  CliquePlan plan;
  plan.k = k;
  plan.m = m;
  plan.cliques.push_back(init[seed]);
  plan.parents.push_back(std::nullopt);
  plan.separators.push_back({});

  std::vector<std::size_t> unprocessed;
  for (std::size_t i = 0; i < init.size(); ++i)
    if (i != seed) unprocessed.push_back(i);

  if (m == 0) {
    for (std::size_t i : unprocessed) {
      plan.cliques.push_back(init[i]);
      plan.parents.push_back(std::nullopt);
      plan.separators.push_back({});
    }
    return plan;
  }

  // Attributes of a processed clique that no other processed clique holds.
  // Separators are drawn only from these, which keeps every pairwise overlap
  // at exactly the parent link and the overlap graph a tree.
  std::vector<AttrSet> exclusive{init[seed]};

  auto slots_of = [&](std::size_t size) { return size / m; };

  while (!unprocessed.empty()) {
    std::size_t total_slots = 0;
    for (const auto& e : exclusive) total_slots += slots_of(e.size());

    double best_score = -std::numeric_limits<double>::infinity();
    std::size_t best_u = kNone, best_p = kNone;
    DeltaM best_dm;
    for (std::size_t ui = 0; ui < unprocessed.size(); ++ui) {
      const auto& active = init[unprocessed[ui]];
      for (std::size_t p = 0; p < exclusive.size(); ++p) {
        if (exclusive[p].size() < m) continue;
        DeltaM dm = delta_m(active, exclusive[p], mi, m);
        if (best_u != kNone && !(dm.score > best_score)) continue;
        std::vector<std::size_t> rest;
        for (std::size_t uj = 0; uj < unprocessed.size(); ++uj)
          if (uj != ui) rest.push_back(slots_of(init[unprocessed[uj]].size()));
        const std::size_t slots_after = total_slots - 1 + slots_of(active.size());
        if (!attachable(slots_after, std::move(rest))) continue;
        best_score = dm.score;
        best_u = ui;
        best_p = p;
        best_dm = std::move(dm);
      }
    }

    if (best_u == kNone) {
      // No parent can give m exclusive attributes: attach with a short
      // separator. check_constraints flags the resulting overlap violation.
      for (std::size_t ui = 0; ui < unprocessed.size(); ++ui) {
        const auto& active = init[unprocessed[ui]];
        for (std::size_t p = 0; p < exclusive.size(); ++p) {
          if (exclusive[p].empty()) continue;
          DeltaM dm = delta_m(active, exclusive[p], mi, std::min(m, exclusive[p].size()));
          if (best_u != kNone && !(dm.score > best_score)) continue;
          best_score = dm.score;
          best_u = ui;
          best_p = p;
          best_dm = std::move(dm);
        }
      }
    }

    if (best_u == kNone) {
      const std::size_t idx = unprocessed.front();
      plan.cliques.push_back(init[idx]);
      plan.parents.push_back(std::nullopt);
      plan.separators.push_back({});
      exclusive.push_back(init[idx]);
      unprocessed.erase(unprocessed.begin());
      continue;
    }

    const std::size_t idx = unprocessed[best_u];
    plan.cliques.push_back(unite(init[idx], best_dm.top));
    plan.parents.push_back(best_p);
    plan.separators.push_back(best_dm.top);
    exclusive[best_p] = subtract(exclusive[best_p], best_dm.top);
    exclusive.push_back(init[idx]);
    unprocessed.erase(unprocessed.begin() + static_cast<std::ptrdiff_t>(best_u));
  }
  return plan;
}

CliquePlan build_clique_plan(std::span<const std::size_t> attrs, const MIMatrix& mi,
                             std::size_t k, std::size_t m) {
  if (k == 0) throw Error(ErrorCode::InfeasibleParams, "k must be at least 1");
  if (attrs.empty()) throw Error(ErrorCode::EmptyAttrSet, "no attributes to plan over");
  if (attrs.size() <= k + m || attrs.size() < 2) {
    require_distinct_members(attrs, mi);
    AttrSet all(attrs.begin(), attrs.end());
    std::sort(all.begin(), all.end());
    CliquePlan plan;
    plan.k = k;
    plan.m = m;
    plan.cliques.push_back(std::move(all));
    plan.parents.push_back(std::nullopt);
    plan.separators.push_back({});
    return plan;
  }
  return clique_extension(clique_initialization(attrs, mi, k, m), mi, k, m);
}

ConstraintReport check_constraints(const CliquePlan& plan, std::span<const std::size_t> attrs,
                                   std::size_t k, std::size_t m, const MIMatrix& mi) {
  ConstraintReport report;
  const auto& cl = plan.cliques;
  const std::size_t r = cl.size();

  std::vector<AttrSet> sets;
  for (const auto& c : cl) {
    AttrSet s(c.begin(), c.end());
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    sets.push_back(std::move(s));
  }

  for (std::size_t i = 0; i < r; ++i) {
    if (sets[i].size() > k + m) {
      report.size_ok = false;
      report.violations.push_back("size: clique " + std::to_string(i) + " " +
                                  format_set(sets[i]) + " has " + std::to_string(sets[i].size()) +
                                  " attributes > k+m = " + std::to_string(k + m));
    }
  }

  AttrSet want(attrs.begin(), attrs.end());
  std::sort(want.begin(), want.end());
  AttrSet have;
  for (const auto& s : sets) have = unite(have, s);
  if (auto missing = subtract(want, have); !missing.empty()) {
    report.coverage_ok = false;
    report.violations.push_back("coverage: attributes " + format_set(missing) + " not covered");
  }
  if (auto extra = subtract(have, want); !extra.empty()) {
    report.coverage_ok = false;
    report.violations.push_back("coverage: attributes " + format_set(extra) +
                                " are outside the attribute set");
  }

  if (r >= 2) {
    std::vector<bool> has_partner(r, false);
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = i + 1; j < r; ++j) {
        const std::size_t shared = intersect(sets[i], sets[j]).size();
        if (shared >= m) has_partner[i] = has_partner[j] = true;
        if (shared > 0 && shared < m) {
          report.overlap_ok = false;
          report.violations.push_back("overlap: cliques " + std::to_string(i) + " and " +
                                      std::to_string(j) + " share " + std::to_string(shared) +
                                      " attributes, fewer than m = " + std::to_string(m));
        }
      }
    }
    for (std::size_t i = 0; i < r; ++i) {
      if (!has_partner[i]) {
        report.overlap_ok = false;
        report.violations.push_back("overlap: clique " + std::to_string(i) +
                                    " shares at least m attributes with no other clique");
      }
    }
  }

  DisjointSets components(r);
  for (std::size_t i = 0; i < r && report.acyclicity_ok; ++i) {
    for (std::size_t j = i + 1; j < r; ++j) {
      if (intersect(sets[i], sets[j]).empty()) continue;
      if (!components.unite(i, j)) {
        report.acyclicity_ok = false;
        report.violations.push_back("acyclicity: overlap between cliques " + std::to_string(i) +
                                    " and " + std::to_string(j) + " closes a cycle");
        break;
      }
    }
  }

  for (const auto& s : sets) {
    bool known = true;
    for (std::size_t a : s) known = known && mi.contains(a);
    if (known) report.total_weight += clique_weight(s, mi);
  }
  return report;
}

CliquePlan order_as_tree(std::vector<AttrSet> cliques, std::size_t k, std::size_t m) {
  const std::size_t r = cliques.size();
  for (auto& c : cliques) std::sort(c.begin(), c.end());
  std::vector<std::vector<std::size_t>> adjacent(r);
  DisjointSets components(r);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = i + 1; j < r; ++j) {
      if (intersect(cliques[i], cliques[j]).empty()) continue;
      if (!components.unite(i, j)) {
        throw Error(ErrorCode::InfeasibleParams, "clique overlap graph contains a cycle");
      }
      adjacent[i].push_back(j);
      adjacent[j].push_back(i);
    }
  }
  CliquePlan plan;
  plan.k = k;
  plan.m = m;
  std::vector<std::size_t> placed(r, kNone);
  for (std::size_t root = 0; root < r; ++root) {
    if (placed[root] != kNone) continue;
    std::queue<std::size_t> frontier;
    placed[root] = plan.cliques.size();
    plan.cliques.push_back(cliques[root]);
    plan.parents.push_back(std::nullopt);
    plan.separators.push_back({});
    frontier.push(root);
    while (!frontier.empty()) {
      const std::size_t at = frontier.front();
      frontier.pop();
      for (std::size_t next : adjacent[at]) {
        if (placed[next] != kNone) continue;
        placed[next] = plan.cliques.size();
        plan.cliques.push_back(cliques[next]);
        plan.parents.push_back(placed[at]);
        plan.separators.push_back(intersect(cliques[next], cliques[at]));
        frontier.push(next);
      }
    }
  }
  return plan;
}

}  // namespace causalpre
