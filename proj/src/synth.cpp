#include "causalpre/synth.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>

#include "causalpre/error.hpp"
#include "causalpre/parallel.hpp"
#include "causalpre/rng.hpp"

namespace causalpre {

namespace {

constexpr double kRowSumTolerance = 1e-9;
constexpr std::size_t kMaxCptRows = 1'000'000;

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::MalformedCpt, what);
}

std::size_t node_index(const std::vector<DagNode>& nodes, const std::string& name) {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].name == name) return i;
  malformed("edge names unknown node '" + name + "'");
}

}  // namespace

std::vector<std::size_t> DagSpec::parents(std::size_t i) const {
  std::vector<std::size_t> out;
  for (const auto& [p, c] : edges)
    if (c == i) out.push_back(p);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::size_t> DagSpec::topological_order() const {
  const std::size_t d = nodes.size();
  std::vector<std::size_t> indegree(d, 0);
  std::vector<std::vector<std::size_t>> children(d);
  std::set<std::pair<std::size_t, std::size_t>> unique_edges(edges.begin(), edges.end());
  for (const auto& [p, c] : unique_edges) {
    if (p >= d || c >= d) malformed("edge endpoint out of range");
    if (p == c) throw Error(ErrorCode::CyclicSpec, "node '" + nodes[p].name + "' is its own parent");
    children[p].push_back(c);
    ++indegree[c];
  }
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t i = 0; i < d; ++i)
    if (indegree[i] == 0) ready.push(i);
  std::vector<std::size_t> order;
  while (!ready.empty()) {
    const std::size_t v = ready.top();
    ready.pop();
    order.push_back(v);
    for (std::size_t c : children[v])
      if (--indegree[c] == 0) ready.push(c);
  }
  if (order.size() != d) throw Error(ErrorCode::CyclicSpec, "edge set contains a cycle");
  return order;
}

void DagSpec::validate() const {
  if (nodes.empty()) malformed("spec has no nodes");
  std::set<std::string> names;
  for (const auto& node : nodes) {
    if (!names.insert(node.name).second) malformed("duplicate node '" + node.name + "'");
    if (node.domain.empty()) malformed("node '" + node.name + "' has an empty domain");
    std::set<std::string> values(node.domain.begin(), node.domain.end());
    if (values.size() != node.domain.size()) {
      malformed("node '" + node.name + "' repeats a domain value");
    }
  }
  topological_order();
  if (cpts.size() != nodes.size()) malformed("need one CPT per node");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    std::size_t rows = 1;
    for (std::size_t p : parents(i)) {
      rows *= nodes[p].domain.size();
      if (rows > kMaxCptRows) malformed("CPT of '" + nodes[i].name + "' is too large");
    }
    if (cpts[i].size() != rows) {
      malformed("CPT of '" + nodes[i].name + "' has " + std::to_string(cpts[i].size()) +
                " rows, parents need " + std::to_string(rows));
    }
    for (const auto& row : cpts[i]) {
      if (row.size() != nodes[i].domain.size()) {
        malformed("CPT row of '" + nodes[i].name + "' does not match its domain");
      }
      double sum = 0.0;
      for (double p : row) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
          malformed("CPT of '" + nodes[i].name + "' has a negative or non-finite entry");
        }
        sum += p;
      }
      if (std::abs(sum - 1.0) > kRowSumTolerance) {
        malformed("CPT row of '" + nodes[i].name + "' sums to " + std::to_string(sum));
      }
    }
  }
}

DagSpec DagSpec::from_json(const nlohmann::json& doc) {
  DagSpec spec;
  try {
    for (const auto& n : doc.at("nodes")) {
      DagNode node;
      node.name = n.at("name").get<std::string>();
      node.domain = n.at("domain").get<std::vector<std::string>>();
      if (n.contains("role")) {
        const auto text = n.at("role").get<std::string>();
        const auto role = parse_role(text);
        if (!role) malformed("node '" + node.name + "' has unknown role '" + text + "'");
        node.role = *role;
      }
      spec.nodes.push_back(std::move(node));
    }
    if (doc.contains("edges")) {
      for (const auto& e : doc.at("edges")) {
        if (!e.is_array() || e.size() != 2) malformed("edges must be [parent, child] pairs");
        spec.edges.emplace_back(node_index(spec.nodes, e[0].get<std::string>()),
                                node_index(spec.nodes, e[1].get<std::string>()));
      }
    }
    const auto& cpts = doc.at("cpts");
    for (const auto& node : spec.nodes) {
      if (!cpts.contains(node.name)) malformed("no CPT for node '" + node.name + "'");
      spec.cpts.push_back(cpts.at(node.name).get<std::vector<std::vector<double>>>());
    }
  } catch (const nlohmann::json::exception& e) {
    malformed(std::string("bad spec document: ") + e.what());
  }
  spec.validate();
  return spec;
}

nlohmann::json DagSpec::to_json() const {
  nlohmann::json doc;
  doc["nodes"] = nlohmann::json::array();
  for (const auto& node : nodes) {
    doc["nodes"].push_back(
        {{"name", node.name}, {"domain", node.domain}, {"role", std::string(to_string(node.role))}});
  }
  doc["edges"] = nlohmann::json::array();
  for (const auto& [p, c] : edges) doc["edges"].push_back({nodes[p].name, nodes[c].name});
  doc["cpts"] = nlohmann::json::object();
  for (std::size_t i = 0; i < nodes.size(); ++i) doc["cpts"][nodes[i].name] = cpts[i];
  return doc;
}

EncodedDataset generate(const DagSpec& spec, std::size_t n, std::uint64_t seed,
                        unsigned threads) {
  spec.validate();
  if (n == 0) throw Error(ErrorCode::InvalidConfig, "row count must be at least 1");
  const std::size_t d = spec.nodes.size();
  const auto order = spec.topological_order();
  std::vector<std::vector<std::size_t>> parents(d);
  for (std::size_t i = 0; i < d; ++i) parents[i] = spec.parents(i);

  std::vector<std::vector<Code>> columns(d, std::vector<Code>(n));
  parallel_chunks(n, threads, [&](std::size_t begin, std::size_t end) {
    std::vector<Code> record(d);
    for (std::size_t r = begin; r < end; ++r) {
      SplitMix64 rng(substream_seed(seed, 0, r));
      for (std::size_t v : order) {
        std::size_t row = 0;
        for (std::size_t p : parents[v]) row = row * spec.nodes[p].domain.size() + record[p];
        const auto& probs = spec.cpts[v][row];
        const double u = rng.uniform();
        double acc = 0.0;
        Code pick = 0;
        Code last_positive = 0;
        bool found = false;
        for (std::size_t c = 0; c < probs.size(); ++c) {
          if (probs[c] <= 0.0) continue;
          last_positive = static_cast<Code>(c);
          acc += probs[c];
          if (!found && u < acc) {
            pick = static_cast<Code>(c);
            found = true;
          }
        }
        // Rounding can leave u above the final partial sum.
        record[v] = found ? pick : last_positive;
      }
      for (std::size_t a = 0; a < d; ++a) columns[a][r] = record[a];
    }
  });

  std::vector<AttributeSchema> schema;
  for (const auto& node : spec.nodes) schema.push_back({node.name, node.role, node.domain});
  return EncodedDataset(std::move(schema), std::move(columns));
}

DagSpec hiring_spec(double bias) {
  if (!(bias >= 0.0 && bias <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "bias must lie in [0, 1]");
  }
  // P(yes | gender, strength) = (1 - bias) * q(strength) + bias * [male].
  const double q_high = 0.7;
  const double q_low = 0.3;
  auto row = [](double yes) { return std::vector<double>{1.0 - yes, yes}; };
  DagSpec spec;
  spec.nodes = {{"gender", {"female", "male"}, Role::Sensitive},
                {"strength", {"high", "low"}, Role::Admissible},
                {"hired", {"no", "yes"}, Role::Label}};
  spec.edges = {{0, 1}, {0, 2}, {1, 2}};
  spec.cpts = {
      {{0.5, 0.5}},
      {{0.4, 0.6}, {0.6, 0.4}},
      {row((1 - bias) * q_high), row((1 - bias) * q_low), row((1 - bias) * q_high + bias),
       row((1 - bias) * q_low + bias)},
  };
  return spec;
}

EncodedDataset hiring_example(std::size_t n, double bias, std::uint64_t seed) {
  return generate(hiring_spec(bias), n, seed);
}

}  // namespace causalpre
