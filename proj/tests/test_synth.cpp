#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "causalpre/error.hpp"
#include "causalpre/info.hpp"
#include "causalpre/pipeline.hpp"
#include "causalpre/synth.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace causalpre;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::IoFailure;
}

DagSpec parse(const char* text) { return DagSpec::from_json(nlohmann::json::parse(text)); }

}  // namespace

TEST_CASE("two fair coins") {
  const auto spec = parse(R"({
    "nodes": [{"name": "a", "domain": ["h", "t"]}, {"name": "b", "domain": ["h", "t"], "role": "label"}],
    "edges": [],
    "cpts": {"a": [[0.5, 0.5]], "b": [[0.5, 0.5]]}})");
  const auto d = generate(spec, 40'000, 1);
  double tv = 0.0;
  for (const auto& [k, p] : oracle::joint(d, {0, 1})) tv += std::abs(p - 0.25);
  CHECK(0.5 * tv <= 0.02);
}

TEST_CASE("deterministic chain copies entropy") {
  const auto spec = parse(R"({
    "nodes": [{"name": "x", "domain": ["0", "1", "2"]}, {"name": "y", "domain": ["0", "1", "2"], "role": "label"}],
    "edges": [["x", "y"]],
    "cpts": {"x": [[0.2, 0.3, 0.5]], "y": [[1, 0, 0], [0, 1, 0], [0, 0, 1]]}})");
  const auto d = generate(spec, 20'000, 2);
  const std::size_t x[] = {0};
  CHECK(std::abs(pairwise_mi(d, 0, 1) - entropy(d, x)) <= 0.02);
}

TEST_CASE("empirical CPTs converge") {
  const auto spec = fixtures::biased_six();
  const auto d = generate(spec, 50'000, 3);
  for (std::size_t v = 0; v < spec.nodes.size(); ++v) {
    const auto parents = spec.parents(v);
    std::size_t cells = spec.nodes[v].domain.size();
    for (auto p : parents) cells *= spec.nodes[p].domain.size();
    if (cells > 32) continue;
    std::vector<std::size_t> attrs = parents;
    attrs.push_back(v);
    const auto counts = oracle::count(d, attrs);
    const auto pc = oracle::count(d, parents.empty() ? std::vector<std::size_t>{v} : parents);
    double worst = 0.0;
    for (std::size_t row = 0; row < spec.cpts[v].size(); ++row) {
      oracle::Key ctx;
      std::size_t rem = row;
      for (std::size_t i = parents.size(); i-- > 0;) {
        const auto dim = spec.nodes[parents[i]].domain.size();
        ctx.insert(ctx.begin(), static_cast<Code>(rem % dim));
        rem /= dim;
      }
      const double n = parents.empty() ? 50'000.0 : pc.at(ctx);
      for (std::size_t c = 0; c < spec.nodes[v].domain.size(); ++c) {
        auto key = ctx;
        key.push_back(static_cast<Code>(c));
        const auto it = counts.find(key);
        const double p = it == counts.end() ? 0.0 : it->second / n;
        worst = std::max(worst, std::abs(p - spec.cpts[v][row][c]));
      }
    }
    CHECK_MESSAGE(worst <= 0.02, spec.nodes[v].name);
  }
}

TEST_CASE("six-node spec runs end to end") {
  const auto d = generate(fixtures::biased_six(), 50'000, 4);
  CHECK(d.num_rows() == 50'000);
  CHECK(d.num_attrs() == 6);
  PreprocessConfig cfg;
  const auto result = run_pipeline(d, cfg);
  CHECK(result.output.schema() == d.schema());
}

TEST_CASE("generation is deterministic and thread independent") {
  const auto spec = fixtures::biased_six();
  CHECK(generate(spec, 10'000, 5) == generate(spec, 10'000, 5, 4));
  CHECK_FALSE(generate(spec, 10'000, 5) == generate(spec, 10'000, 6));
}

TEST_CASE("malformed and cyclic specs") {
  CHECK(code_of([] {
          parse(R"({"nodes": [{"name": "a", "domain": ["0", "1"]}, {"name": "b", "domain": ["0", "1"]}],
                   "edges": [["a", "b"], ["b", "a"]],
                   "cpts": {"a": [[0.5, 0.5], [0.5, 0.5]], "b": [[0.5, 0.5], [0.5, 0.5]]}})");
        }) == ErrorCode::CyclicSpec);
  CHECK(code_of([] {
          parse(R"({"nodes": [{"name": "a", "domain": ["0", "1"]}], "edges": [],
                   "cpts": {"a": [[0.5, 0.6]]}})");
        }) == ErrorCode::MalformedCpt);
  CHECK(code_of([] {
          parse(R"({"nodes": [{"name": "a", "domain": ["0", "1"]}, {"name": "b", "domain": ["0", "1"]}],
                   "edges": [["a", "b"]], "cpts": {"a": [[0.5, 0.5]], "b": [[0.5, 0.5]]}})");
        }) == ErrorCode::MalformedCpt);
  CHECK(code_of([] {
          parse(R"({"nodes": [{"name": "a", "domain": ["0", "1"]}], "edges": [["a", "z"]],
                   "cpts": {"a": [[0.5, 0.5]]}})");
        }) == ErrorCode::MalformedCpt);
  CHECK(code_of([] { parse(R"({"nodes": 3})"); }) == ErrorCode::MalformedCpt);
  CHECK(code_of([] { generate(fixtures::biased_six(), 0, 1); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("spec survives JSON") {
  const auto spec = fixtures::biased_six();
  const auto back = DagSpec::from_json(spec.to_json());
  CHECK(back.cpts == spec.cpts);
  CHECK(back.edges.size() == spec.edges.size());
  CHECK(generate(back, 1000, 1) == generate(spec, 1000, 1));
}

TEST_CASE("hiring example") {
  const auto unbiased = hiring_example(50'000, 0.0, 1);
  CHECK(fixtures::hiring_gap(unbiased) <= 0.02);
  const auto biased = hiring_example(50'000, 0.5, 2);
  for (Code s = 0; s < 2; ++s) {
    CHECK(std::abs(fixtures::hire_rate(biased, 1, s) - fixtures::hire_rate(biased, 0, s) - 0.5) <= 0.02);
  }
  for (double bias : {0.0, 0.3, 1.0}) {
    const auto d = hiring_example(20'000, bias, 3);
    for (Code g = 0; g < 2; ++g) {
      double n = 0.0, high = 0.0;
      for (std::size_t r = 0; r < d.num_rows(); ++r) {
        if (d.at(r, 0) != g) continue;
        n += 1;
        high += d.at(r, 1) == 0;
      }
      CHECK(high / n >= 0.2);
      CHECK(1 - high / n >= 0.2);
    }
  }
  CHECK(code_of([] { hiring_spec(1.5); }) == ErrorCode::InvalidConfig);
}
