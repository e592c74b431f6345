#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "causalpre/dataset.hpp"

namespace causalpre {

struct RoleSpec {
  std::string name;
  Role role = Role::Additional;
  std::optional<std::vector<std::string>> domain;  // pinned domain, order defines codes
};

/// The roles document:
///   {"attributes": [{"name": str, "role": "sensitive|...|label", "domain": [str, ...]}]}
/// Exactly one entry must carry the label role.
struct RolesConfig {
  std::vector<RoleSpec> attributes;

  const RoleSpec* find(std::string_view name) const;

  static RolesConfig from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;
};

RolesConfig load_roles(const std::filesystem::path& path);
void save_roles(const RolesConfig& config, const std::filesystem::path& path);

/// Roles config pinning every domain of `data`, so that a written CSV
/// reloads to the identical dataset.
RolesConfig roles_config_of(const EncodedDataset& data);

struct LoadOptions {
  // An unpinned column whose values are all numeric is treated as continuous
  // (and rejected) if any value is fractional or it has more distinct values
  // than this.
  std::size_t max_numeric_levels = 64;
};

EncodedDataset read_csv(std::istream& in, const RolesConfig& roles, const LoadOptions& options = {});
EncodedDataset load_csv(const std::filesystem::path& path, const RolesConfig& roles,
                        const LoadOptions& options = {});

void write_csv(const EncodedDataset& data, std::ostream& out);
void write_csv(const EncodedDataset& data, const std::filesystem::path& path);

/// RFC-4180 record splitter; exposed for tests.
std::vector<std::vector<std::string>> parse_csv_records(std::istream& in);

}  // namespace causalpre
