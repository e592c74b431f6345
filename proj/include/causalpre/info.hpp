#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "causalpre/dataset.hpp"

namespace causalpre {

/// Dense probability table over the cross product of `attrs`' domains.
/// Row-major: the first attribute varies slowest.
struct ProbTable {
  std::vector<std::size_t> attrs;
  std::vector<std::size_t> dims;
  std::vector<double> probs;

  std::size_t index_of(std::span<const Code> codes) const;
  std::vector<Code> codes_of(std::size_t index) const;
  double total() const;
};

/// Dense rank of each row's joint value over `attrs`, in first-occurrence
/// order. Overflow-free for any number of attributes.
struct Grouping {
  std::vector<std::uint32_t> ids;
  std::size_t count = 0;

  std::vector<std::size_t> sizes() const;
};

Grouping group_rows(const EncodedDataset& data, std::span<const std::size_t> attrs);

/// Plug-in joint distribution. Throws DomainTooLarge beyond 1e8 cells.
ProbTable empirical_joint(const EncodedDataset& data, std::span<const std::size_t> attrs);

/// Plug-in joint entropy in bits.
double entropy(const EncodedDataset& data, std::span<const std::size_t> attrs);

/// Entropy of a vector of group sizes summing to n.
double entropy_of_counts(std::span<const std::size_t> counts, std::size_t n);

double pairwise_mi(const EncodedDataset& data, std::size_t i, std::size_t j);

/// Symmetric pairwise MI over a fixed attribute list. Lookups use dataset
/// attribute indices.
class MIMatrix {
 public:
  MIMatrix() = default;
  MIMatrix(std::vector<std::size_t> attrs, std::vector<double> weights);

  const std::vector<std::size_t>& attrs() const noexcept { return attrs_; }
  std::size_t size() const noexcept { return attrs_.size(); }
  bool contains(std::size_t attr) const noexcept;

  /// Weight between two attributes (by dataset index); 0 on the diagonal.
  double operator()(std::size_t a, std::size_t b) const;
  /// Weight by position in attrs().
  double at(std::size_t pa, std::size_t pb) const { return weights_[pa * attrs_.size() + pb]; }

  MIMatrix scaled(double factor) const;

 private:
  std::size_t position(std::size_t attr) const;

  std::vector<std::size_t> attrs_;
  std::vector<double> weights_;
  std::vector<std::size_t> pos_;  // attr index -> position, npos if absent
};

MIMatrix mi_matrix(const EncodedDataset& data, std::span<const std::size_t> attrs,
                   unsigned threads = 1);

/// Alternating inclusion-exclusion sum of subset entropies.
double multivariate_mi(const EncodedDataset& data, std::span<const std::size_t> attrs,
                       std::size_t max_attrs = 6);

/// KL(p || q) in bits. Without smoothing returns +inf when p has mass where q
/// has none. With smoothing eps, q becomes (q + eps) / (1 + eps * cells).
double kl_divergence(const ProbTable& p, const ProbTable& q,
                     std::optional<double> smoothing = std::nullopt);

}  // namespace causalpre
