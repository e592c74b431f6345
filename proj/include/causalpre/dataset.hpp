#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace causalpre {

using Code = std::uint32_t;

/// Marks an unassigned slot in a record (see MarginalModel::log_density).
inline constexpr Code kUnassigned = std::numeric_limits<Code>::max();

/// Category label used for literal empty CSV cells.
inline constexpr std::string_view kMissingLabel = "<NA>";

enum class Role { Sensitive, Inadmissible, Admissible, Additional, Label };

std::string_view to_string(Role role) noexcept;
std::optional<Role> parse_role(std::string_view text) noexcept;

/// Roles that may legitimately influence the label.
inline bool is_fair_role(Role role) noexcept {
  return role == Role::Admissible || role == Role::Additional;
}

struct AttributeSchema {
  std::string name;
  Role role = Role::Additional;
  std::vector<std::string> domain;  // code i decodes to domain[i]

  std::optional<Code> encode(std::string_view label) const;
  const std::string& decode(Code code) const { return domain.at(code); }

  bool operator==(const AttributeSchema&) const = default;
};

/// Column-major table of categorical codes. Immutable once built; the
/// constructor validates shape and that every code indexes its domain.
class EncodedDataset {
 public:
  EncodedDataset() = default;
  EncodedDataset(std::vector<AttributeSchema> schema,
                 std::vector<std::vector<Code>> columns);
  /// Zero-column tables still carry a row count.
  EncodedDataset(std::vector<AttributeSchema> schema,
                 std::vector<std::vector<Code>> columns, std::size_t n_rows);

  std::size_t num_rows() const noexcept { return n_rows_; }
  std::size_t num_attrs() const noexcept { return schema_.size(); }
  bool empty() const noexcept { return n_rows_ == 0 || schema_.empty(); }

  const std::vector<AttributeSchema>& schema() const noexcept { return schema_; }
  const AttributeSchema& attribute(std::size_t i) const { return schema_.at(i); }
  std::size_t domain_size(std::size_t i) const { return schema_.at(i).domain.size(); }
  std::span<const Code> column(std::size_t i) const { return columns_.at(i); }
  Code at(std::size_t row, std::size_t attr) const { return columns_[attr][row]; }

  std::optional<std::size_t> find(std::string_view name) const;
  std::optional<std::size_t> label_index() const;
  std::vector<std::size_t> attrs_with_role(Role role) const;
  std::vector<std::size_t> non_label_attrs() const;

  /// Codes of one row, indexed by attribute.
  std::vector<Code> row(std::size_t r) const;

  bool operator==(const EncodedDataset&) const = default;

 private:
  void validate() const;

  std::vector<AttributeSchema> schema_;
  std::vector<std::vector<Code>> columns_;
  std::size_t n_rows_ = 0;
};

/// Throws IndexOutOfRange unless every index addresses an attribute.
void check_attr_indices(const EncodedDataset& data, std::span<const std::size_t> attrs);

}  // namespace causalpre
