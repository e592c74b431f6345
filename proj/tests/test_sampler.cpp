#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "causalpre/error.hpp"
#include "causalpre/metrics.hpp"
#include "causalpre/pipeline.hpp"
#include "causalpre/sampler.hpp"
#include "causalpre/synth.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace causalpre;
using testsupport::Col;
using testsupport::make_dataset;

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

PreprocessConfig config(std::size_t k, std::size_t m, std::uint64_t seed, double alpha = 1.0) {
  PreprocessConfig c;
  c.k = k;
  c.m = m;
  c.seed = seed;
  c.alpha = alpha;
  return c;
}

}  // namespace

TEST_CASE("label clique on the hiring table is {strength}") {
  const auto d = hiring_example(5000, 0.4, 1);
  const auto plan = plan_non_label(d, 2, 1, 1);
  const auto lc = build_label_clique(d, plan, label_mi(d), 2, 1);
  CHECK(lc.separator == AttrSet{1});
  CHECK(lc.label == 2);
  CHECK(lc.parent == 0u);
  const auto wide = build_label_clique(d, plan, label_mi(d), 3, 3);
  CHECK(wide.separator == AttrSet{1});
}

TEST_CASE("label clique takes all candidates when slots exceed them") {
  const auto d = generate(fixtures::biased_six(), 3000, 2);
  const auto plan = plan_non_label(d, 3, 3, 1);
  const auto lc = build_label_clique(d, plan, label_mi(d), 3, 3);
  CHECK(lc.separator == AttrSet{2, 3, 4});
}

TEST_CASE("label clique picks the top fair attributes by MI") {
  // six fair attributes with the label copying a decreasing share of each
  SplitMix64 rng(6);
  const std::size_t n = 20'000;
  std::vector<Col> cols;
  for (int a = 0; a < 6; ++a) cols.push_back({"F" + std::to_string(a), Role::Admissible, 2, {}});
  cols.push_back({"S", Role::Sensitive, 2, {}});
  cols.push_back({"Y", Role::Label, 2, {}});
  for (std::size_t r = 0; r < n; ++r) {
    Code y = static_cast<Code>(rng.below(2));
    for (int a = 0; a < 6; ++a) {
      const double keep = 0.9 - 0.12 * ((a * 5) % 6);  // scrambled ranking
      cols[a].codes.push_back(rng.uniform() < keep ? y : static_cast<Code>(rng.below(2)));
    }
    cols[6].codes.push_back(rng.uniform() < 0.95 ? y : 1 - y);  // sensitive is the most informative
    cols[7].codes.push_back(y);
  }
  const auto d = make_dataset(std::move(cols));
  std::vector<std::size_t> fair{0, 1, 2, 3, 4, 5};
  std::stable_sort(fair.begin(), fair.end(),
                   [&](std::size_t a, std::size_t b) { return oracle::mi(d, a, 7) > oracle::mi(d, b, 7); });
  const auto plan = plan_non_label(d, 2, 2, 1);
  const auto lc = build_label_clique(d, plan, label_mi(d), 2, 2);
  AttrSet expect(fair.begin(), fair.begin() + 3);
  std::sort(expect.begin(), expect.end());
  CHECK(lc.separator == expect);
  CHECK(std::find(lc.separator.begin(), lc.separator.end(), 6) == lc.separator.end());

  const auto unfair = build_label_clique(d, plan, label_mi(d), 2, 2, LabelPool::Unrestricted);
  CHECK(std::find(unfair.separator.begin(), unfair.separator.end(), 6) != unfair.separator.end());
}

TEST_CASE("label clique needs a fair attribute") {
  const auto d = make_dataset({{"S", Role::Sensitive, 2, {0, 1, 0, 1}},
                               {"I", Role::Inadmissible, 2, {0, 0, 1, 1}},
                               {"Y", Role::Label, 2, {0, 1, 1, 0}}});
  const auto plan = plan_non_label(d, 2, 1, 1);
  CHECK(code_of([&] { build_label_clique(d, plan, label_mi(d), 2, 1); }) ==
        ErrorCode::NoFairAttributes);
}

TEST_CASE("deterministic label rule survives regeneration") {
  SplitMix64 rng(3);
  const std::size_t n = 50'000;
  std::vector<Col> cols{{"S", Role::Sensitive, 2, {}}, {"A1", Role::Admissible, 3, {}},
                        {"W", Role::Additional, 2, {}}, {"Y", Role::Label, 2, {}}};
  for (std::size_t r = 0; r < n; ++r) {
    const Code s = static_cast<Code>(rng.below(2));
    const Code a = rng.uniform() < (s ? 0.6 : 0.3) ? 2 : static_cast<Code>(rng.below(2));
    cols[0].codes.push_back(s);
    cols[1].codes.push_back(a);
    cols[2].codes.push_back(static_cast<Code>(rng.below(2)));
    cols[3].codes.push_back(a == 2 ? 1 : 0);
  }
  const auto d = make_dataset(std::move(cols));
  const auto out = run_pipeline(d, config(2, 1, 5)).output;
  std::size_t agree = 0;
  for (std::size_t r = 0; r < n; ++r) agree += (out.at(r, 3) == (out.at(r, 1) == 2 ? 1u : 0u));
  CHECK(static_cast<double>(agree) / n >= 0.99);
}

TEST_CASE("hiring bias is corrected while strength variability stays") {
  const auto d = hiring_example(50'000, 0.5, 12);
  CHECK(fixtures::hiring_gap(d) > 0.45);
  const auto out = run_pipeline(d, config(2, 1, 7)).output;
  CHECK(fixtures::hiring_gap(out) <= 0.03);
  CHECK(fixtures::strength_given_gender_tv(d, out) <= 0.02);
  const std::size_t s[] = {0};
  const std::size_t f[] = {1};
  CHECK(conditional_mi(out, 2, s, f) < conditional_mi(d, 2, s, f));
}

TEST_CASE("output is a pure function of the seed, independent of threads") {
  const auto d = generate(fixtures::biased_six(), 20'000, 4);
  auto cfg = config(2, 1, 99);
  const auto a = run_pipeline(d, cfg).output;
  const auto b = run_pipeline(d, cfg).output;
  cfg.threads = 4;
  const auto c = run_pipeline(d, cfg).output;
  CHECK(a == b);
  CHECK(a == c);
  CHECK(a.schema() == d.schema());
  CHECK(a.num_rows() == d.num_rows());
  cfg.seed = 100;
  CHECK_FALSE(run_pipeline(d, cfg).output == a);
}

TEST_CASE("alpha endpoints and interpolation") {
  const auto d = hiring_example(50'000, 0.4, 21);
  const auto plan = plan_non_label(d, 2, 1, 1);
  const auto lmi = label_mi(d);
  const auto fair = build_label_clique(d, plan, lmi, 2, 1);
  const auto unfair = build_label_clique(d, plan, lmi, 2, 1, LabelPool::Unrestricted);
  CHECK(unfair.separator == AttrSet{0, 1});

  const auto base = preprocess(d, plan, fair, config(2, 1, 8));
  CHECK(preprocess_plus(d, plan, fair, unfair, config(2, 1, 8, 1.0)) == base);

  const auto zero = preprocess_plus(d, plan, fair, unfair, config(2, 1, 8, 0.0));
  CHECK(std::abs(fixtures::hiring_gap(zero) - fixtures::hiring_gap(d)) <= 0.03);

  const std::size_t s[] = {0};
  const std::size_t f[] = {1};
  const auto mid = preprocess_plus(d, plan, fair, unfair, config(2, 1, 8, 0.83));
  const double dep0 = conditional_mi(zero, 2, s, f);
  const double dep1 = conditional_mi(base, 2, s, f);
  const double dep = conditional_mi(mid, 2, s, f);
  CHECK(dep1 < dep);
  CHECK(dep < dep0);
}

TEST_CASE("configuration and plan checks") {
  const auto d = hiring_example(1000, 0.4, 1);
  const auto plan = plan_non_label(d, 2, 1, 1);
  const auto lc = build_label_clique(d, plan, label_mi(d), 2, 1);
  CHECK(code_of([&] { preprocess(d, plan, lc, config(2, 1, 0, 0.5)); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([&] { preprocess(d, plan, lc, config(0, 1, 0)); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([&] { preprocess(d, plan, lc, config(2, 0, 0)); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([&] { preprocess_plus(d, plan, lc, lc, config(2, 1, 0, 1.5)); }) ==
        ErrorCode::InvalidConfig);

  CliquePlan partial = plan;
  partial.cliques[0] = {1};
  CHECK(code_of([&] { preprocess(d, partial, lc, config(2, 1, 0)); }) ==
        ErrorCode::PlanDatasetMismatch);
  LabelClique wrong = lc;
  wrong.label = 0;
  CHECK(code_of([&] { preprocess(d, plan, wrong, config(2, 1, 0)); }) ==
        ErrorCode::PlanDatasetMismatch);
}

TEST_CASE("with_label_clique appends the label clique") {
  const auto d = generate(fixtures::biased_six(), 5000, 3);
  const auto plan = plan_non_label(d, 2, 1, 1);
  const auto lc = build_label_clique(d, plan, label_mi(d), 2, 1);
  CHECK(lc.separator == AttrSet{2, 3});
  const auto full = with_label_clique(plan, lc);
  CHECK(full.size() == plan.size() + 1);
  CHECK(full.cliques.back() == AttrSet{2, 3, 5});
  CHECK(full.separators.back() == lc.separator);
  // the parent shares the most of F_Y with it
  std::size_t best = 0;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    std::size_t shared = 0;
    for (auto a : plan.cliques[i]) shared += std::count(lc.separator.begin(), lc.separator.end(), a);
    best = std::max(best, shared);
  }
  REQUIRE(lc.parent.has_value());
  std::size_t got = 0;
  for (auto a : plan.cliques[*lc.parent]) got += std::count(lc.separator.begin(), lc.separator.end(), a);
  CHECK(got == best);
}
