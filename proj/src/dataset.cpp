#include "causalpre/dataset.hpp"

#include <algorithm>
#include <set>

#include "causalpre/error.hpp"

namespace causalpre {

std::string_view to_string(Role role) noexcept {
  switch (role) {
    case Role::Sensitive: return "sensitive";
    case Role::Inadmissible: return "inadmissible";
    case Role::Admissible: return "admissible";
    case Role::Additional: return "additional";
    case Role::Label: return "label";
  }
  return "additional";
}

std::optional<Role> parse_role(std::string_view text) noexcept {
  for (Role r : {Role::Sensitive, Role::Inadmissible, Role::Admissible, Role::Additional,
                 Role::Label}) {
    if (text == to_string(r)) return r;
  }
  return std::nullopt;
}

std::optional<Code> AttributeSchema::encode(std::string_view label) const {
  auto it = std::find(domain.begin(), domain.end(), label);
  if (it == domain.end()) return std::nullopt;
  return static_cast<Code>(it - domain.begin());
}

EncodedDataset::EncodedDataset(std::vector<AttributeSchema> schema,
                               std::vector<std::vector<Code>> columns)
    : schema_(std::move(schema)), columns_(std::move(columns)) {
  n_rows_ = columns_.empty() ? 0 : columns_.front().size();
  validate();
}

EncodedDataset::EncodedDataset(std::vector<AttributeSchema> schema,
                               std::vector<std::vector<Code>> columns, std::size_t n_rows)
    : schema_(std::move(schema)), columns_(std::move(columns)), n_rows_(n_rows) {
  validate();
}

void EncodedDataset::validate() const {
  if (schema_.size() != columns_.size()) {
    throw Error(ErrorCode::ShapeMismatch, "schema has " + std::to_string(schema_.size()) +
                                              " attributes but " +
                                              std::to_string(columns_.size()) + " columns given");
  }
  std::set<std::string_view> names;
  for (std::size_t a = 0; a < schema_.size(); ++a) {
    const auto& attr = schema_[a];
    if (!names.insert(attr.name).second) {
      throw Error(ErrorCode::MalformedConfig, "duplicate attribute name '" + attr.name + "'");
    }
    if (attr.domain.empty()) {
      throw Error(ErrorCode::MalformedConfig, "attribute '" + attr.name + "' has an empty domain");
    }
    std::set<std::string_view> labels(attr.domain.begin(), attr.domain.end());
    if (labels.size() != attr.domain.size()) {
      throw Error(ErrorCode::MalformedConfig,
                  "attribute '" + attr.name + "' has duplicate domain labels");
    }
    if (columns_[a].size() != n_rows_) {
      throw Error(ErrorCode::ShapeMismatch, "column '" + attr.name + "' has " +
                                                std::to_string(columns_[a].size()) +
                                                " rows, expected " + std::to_string(n_rows_));
    }
    const auto dom = static_cast<Code>(attr.domain.size());
    for (Code c : columns_[a]) {
      if (c >= dom) {
        throw Error(ErrorCode::IndexOutOfRange,
                    "code " + std::to_string(c) + " outside domain of '" + attr.name + "'");
      }
    }
  }
}

std::optional<std::size_t> EncodedDataset::find(std::string_view name) const {
  for (std::size_t i = 0; i < schema_.size(); ++i) {
    if (schema_[i].name == name) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> EncodedDataset::label_index() const {
  auto labels = attrs_with_role(Role::Label);
  if (labels.size() != 1) return std::nullopt;
  return labels.front();
}

std::vector<std::size_t> EncodedDataset::attrs_with_role(Role role) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < schema_.size(); ++i) {
    if (schema_[i].role == role) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> EncodedDataset::non_label_attrs() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < schema_.size(); ++i) {
    if (schema_[i].role != Role::Label) out.push_back(i);
  }
  return out;
}

std::vector<Code> EncodedDataset::row(std::size_t r) const {
  std::vector<Code> out(columns_.size());
  for (std::size_t a = 0; a < columns_.size(); ++a) out[a] = columns_[a][r];
  return out;
}

void check_attr_indices(const EncodedDataset& data, std::span<const std::size_t> attrs) {
  for (std::size_t a : attrs) {
    if (a >= data.num_attrs()) {
      throw Error(ErrorCode::IndexOutOfRange, "attribute index " + std::to_string(a) +
                                                  " out of range (dataset has " +
                                                  std::to_string(data.num_attrs()) + ")");
    }
  }
}

}  // namespace causalpre
