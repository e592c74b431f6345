#include "causalpre/info.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "causalpre/error.hpp"
#include "causalpre/parallel.hpp"

namespace causalpre {

namespace {

constexpr std::size_t kMaxDenseCells = 100'000'000;
constexpr std::size_t kNoPosition = std::numeric_limits<std::size_t>::max();

void check_attr_set(const EncodedDataset& data, std::span<const std::size_t> attrs) {
  if (attrs.empty()) throw Error(ErrorCode::EmptyAttrSet, "attribute set is empty");
  check_attr_indices(data, attrs);
  std::vector<std::size_t> sorted(attrs.begin(), attrs.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorCode::SameAttribute, "attribute set contains duplicates");
  }
  if (data.num_rows() == 0) throw Error(ErrorCode::EmptyDataset, "dataset has no rows");
}

}  // namespace

std::size_t ProbTable::index_of(std::span<const Code> codes) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < dims.size(); ++i) idx = idx * dims[i] + codes[i];
  return idx;
}

std::vector<Code> ProbTable::codes_of(std::size_t index) const {
  std::vector<Code> codes(dims.size());
  for (std::size_t i = dims.size(); i-- > 0;) {
    codes[i] = static_cast<Code>(index % dims[i]);
    index /= dims[i];
  }
  return codes;
}

double ProbTable::total() const {
  double s = 0;
  for (double p : probs) s += p;
  return s;
}

std::vector<std::size_t> Grouping::sizes() const {
  std::vector<std::size_t> out(count, 0);
  for (auto id : ids) ++out[id];
  return out;
}

Grouping group_rows(const EncodedDataset& data, std::span<const std::size_t> attrs) {
  check_attr_indices(data, attrs);
  const std::size_t n = data.num_rows();
  Grouping g;
  g.ids.assign(n, 0);
  g.count = n == 0 ? 0 : 1;
  for (std::size_t a : attrs) {
    const auto col = data.column(a);
    const std::uint64_t dom = data.domain_size(a);
    std::unordered_map<std::uint64_t, std::uint32_t> remap;
    remap.reserve(std::min<std::size_t>(n, g.count * dom));
    for (std::size_t r = 0; r < n; ++r) {
      const std::uint64_t key = std::uint64_t{g.ids[r]} * dom + col[r];
      auto [it, inserted] = remap.try_emplace(key, static_cast<std::uint32_t>(remap.size()));
      g.ids[r] = it->second;
    }
    g.count = remap.size();
  }
  return g;
}

ProbTable empirical_joint(const EncodedDataset& data, std::span<const std::size_t> attrs) {
  check_attr_set(data, attrs);
  ProbTable t;
  t.attrs.assign(attrs.begin(), attrs.end());
  std::size_t cells = 1;
  for (std::size_t a : attrs) {
    const std::size_t d = data.domain_size(a);
    if (cells > kMaxDenseCells / d) {
      throw Error(ErrorCode::DomainTooLarge, "joint table over " + std::to_string(attrs.size()) +
                                                 " attributes exceeds the dense cell limit");
    }
    cells *= d;
    t.dims.push_back(d);
  }
  std::vector<std::size_t> counts(cells, 0);
  const std::size_t n = data.num_rows();
  std::vector<std::size_t> index(n, 0);
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    const auto col = data.column(attrs[i]);
    for (std::size_t r = 0; r < n; ++r) index[r] = index[r] * t.dims[i] + col[r];
  }
  for (std::size_t idx : index) ++counts[idx];
  t.probs.resize(cells);
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t c = 0; c < cells; ++c) t.probs[c] = static_cast<double>(counts[c]) * inv;
  return t;
}

double entropy_of_counts(std::span<const std::size_t> counts, std::size_t n) {
  if (n == 0) return 0.0;
  const double nd = static_cast<double>(n);
  double h = 0.0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / nd;
    h -= p * std::log2(p);
  }
  return h > 0.0 ? h : 0.0;
}

double entropy(const EncodedDataset& data, std::span<const std::size_t> attrs) {
  check_attr_set(data, attrs);
  const auto g = group_rows(data, attrs);
  const auto sizes = g.sizes();
  return entropy_of_counts(sizes, data.num_rows());
}

double pairwise_mi(const EncodedDataset& data, std::size_t i, std::size_t j) {
  if (i == j) throw Error(ErrorCode::SameAttribute, "mutual information needs two attributes");
  if (i > j) std::swap(i, j);
  const std::size_t a[] = {i};
  const std::size_t b[] = {j};
  const std::size_t ab[] = {i, j};
  const double mi = entropy(data, a) + entropy(data, b) - entropy(data, ab);
  return mi > 0.0 ? mi : 0.0;
}

MIMatrix::MIMatrix(std::vector<std::size_t> attrs, std::vector<double> weights)
    : attrs_(std::move(attrs)), weights_(std::move(weights)) {
  const std::size_t d = attrs_.size();
  if (weights_.size() != d * d) {
    throw Error(ErrorCode::ShapeMismatch, "MI matrix needs " + std::to_string(d * d) + " weights");
  }
  std::size_t max_attr = 0;
  for (std::size_t a : attrs_) max_attr = std::max(max_attr, a);
  pos_.assign(d == 0 ? 0 : max_attr + 1, kNoPosition);
  for (std::size_t p = 0; p < d; ++p) {
    if (pos_[attrs_[p]] != kNoPosition) {
      throw Error(ErrorCode::SameAttribute, "MI matrix lists an attribute twice");
    }
    pos_[attrs_[p]] = p;
  }
  for (std::size_t x = 0; x < d; ++x) {
    weights_[x * d + x] = 0.0;
    for (std::size_t y = 0; y < x; ++y) {
      const double w = weights_[x * d + y];
      if (w != weights_[y * d + x] || !(w >= 0.0)) {
        throw Error(ErrorCode::ShapeMismatch, "MI weights must be symmetric and nonnegative");
      }
    }
  }
}

bool MIMatrix::contains(std::size_t attr) const noexcept {
  return attr < pos_.size() && pos_[attr] != kNoPosition;
}

std::size_t MIMatrix::position(std::size_t attr) const {
  if (!contains(attr)) {
    throw Error(ErrorCode::IndexOutOfRange,
                "attribute " + std::to_string(attr) + " is not in the MI matrix");
  }
  return pos_[attr];
}

double MIMatrix::operator()(std::size_t a, std::size_t b) const {
  return at(position(a), position(b));
}

MIMatrix MIMatrix::scaled(double factor) const {
  auto w = weights_;
  for (double& x : w) x *= factor;
  return MIMatrix(attrs_, std::move(w));
}

MIMatrix mi_matrix(const EncodedDataset& data, std::span<const std::size_t> attrs,
                   unsigned threads) {
  check_attr_set(data, attrs);
  const std::size_t d = attrs.size();
  std::vector<double> single(d);
  for (std::size_t p = 0; p < d; ++p) single[p] = entropy(data, attrs.subspan(p, 1));

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t x = 0; x < d; ++x)
    for (std::size_t y = x + 1; y < d; ++y) pairs.emplace_back(x, y);

  std::vector<double> w(d * d, 0.0);
  parallel_chunks(pairs.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      auto [x, y] = pairs[i];
      const std::size_t lo = std::min(attrs[x], attrs[y]);
      const std::size_t hi = std::max(attrs[x], attrs[y]);
      const std::size_t both[] = {lo, hi};
      const double mi = single[x] + single[y] - entropy(data, both);
      w[x * d + y] = w[y * d + x] = mi > 0.0 ? mi : 0.0;
    }
  });
  return MIMatrix(std::vector<std::size_t>(attrs.begin(), attrs.end()), std::move(w));
}

double multivariate_mi(const EncodedDataset& data, std::span<const std::size_t> attrs,
                       std::size_t max_attrs) {
  if (attrs.size() < 2) {
    throw Error(ErrorCode::EmptyAttrSet, "multivariate MI needs at least two attributes");
  }
  if (attrs.size() > max_attrs) {
    throw Error(ErrorCode::TooManyAttributes,
                "multivariate MI over " + std::to_string(attrs.size()) +
                    " attributes exceeds the cap of " + std::to_string(max_attrs));
  }
  check_attr_set(data, attrs);
  const std::size_t d = attrs.size();
  double total = 0.0;
  std::vector<std::size_t> subset;
  for (std::uint32_t mask = 1; mask < (1u << d); ++mask) {
    subset.clear();
    for (std::size_t b = 0; b < d; ++b)
      if (mask & (1u << b)) subset.push_back(attrs[b]);
    const double h = entropy(data, subset);
    total += (subset.size() % 2 == 1) ? h : -h;
  }
  return total;
}

double kl_divergence(const ProbTable& p, const ProbTable& q, std::optional<double> smoothing) {
  if (p.attrs != q.attrs || p.dims != q.dims || p.probs.size() != q.probs.size()) {
    throw Error(ErrorCode::ShapeMismatch, "KL divergence needs tables over identical attributes");
  }
  const double eps = smoothing.value_or(0.0);
  const double norm = 1.0 + eps * static_cast<double>(q.probs.size());
  double kl = 0.0;
  for (std::size_t c = 0; c < p.probs.size(); ++c) {
    const double pc = p.probs[c];
    if (pc <= 0.0) continue;
    const double qc = (q.probs[c] + eps) / norm;
    if (qc <= 0.0) return std::numeric_limits<double>::infinity();
    kl += pc * std::log2(pc / qc);
  }
  return kl > 0.0 ? kl : 0.0;
}

}  // namespace causalpre
