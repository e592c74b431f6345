#include "causalpre/csv_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "causalpre/error.hpp"

namespace causalpre {

namespace {

bool needs_quoting(std::string_view field) {
  return field.find_first_of(",\"\r\n") != std::string_view::npos;
}

void write_field(std::ostream& out, std::string_view field) {
  if (!needs_quoting(field)) {
    out << field;
    return;
  }
  out << '"';
  for (char c : field) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

struct NumericProbe {
  bool all_numeric = true;
  bool fractional = false;
};

void probe_numeric(std::string_view v, NumericProbe& probe) {
  if (!probe.all_numeric || v == kMissingLabel) return;
  double x = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    probe.all_numeric = false;
    return;
  }
  if (std::floor(x) != x) probe.fractional = true;
}

}  // namespace

const RoleSpec* RolesConfig::find(std::string_view name) const {
  for (const auto& a : attributes) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

RolesConfig RolesConfig::from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("attributes") || !doc["attributes"].is_array()) {
    throw Error(ErrorCode::MalformedConfig, "roles config needs an \"attributes\" array");
  }
  RolesConfig cfg;
  std::set<std::string> seen;
  std::size_t labels = 0;
  for (const auto& item : doc["attributes"]) {
    if (!item.is_object() || !item.contains("name") || !item["name"].is_string() ||
        !item.contains("role") || !item["role"].is_string()) {
      throw Error(ErrorCode::MalformedConfig, "each attribute needs string \"name\" and \"role\"");
    }
    RoleSpec spec;
    spec.name = item["name"].get<std::string>();
    auto role = parse_role(item["role"].get<std::string>());
    if (!role) {
      throw Error(ErrorCode::MalformedConfig,
                  "attribute '" + spec.name + "' has unknown role '" +
                      item["role"].get<std::string>() + "'");
    }
    spec.role = *role;
    if (spec.role == Role::Label) ++labels;
    if (item.contains("domain")) {
      const auto& dom = item["domain"];
      if (!dom.is_array() || dom.empty()) {
        throw Error(ErrorCode::MalformedConfig,
                    "attribute '" + spec.name + "' domain must be a non-empty array");
      }
      std::vector<std::string> labels_list;
      for (const auto& v : dom) {
        if (!v.is_string()) {
          throw Error(ErrorCode::MalformedConfig,
                      "attribute '" + spec.name + "' domain entries must be strings");
        }
        labels_list.push_back(v.get<std::string>());
      }
      std::set<std::string> uniq(labels_list.begin(), labels_list.end());
      if (uniq.size() != labels_list.size()) {
        throw Error(ErrorCode::MalformedConfig,
                    "attribute '" + spec.name + "' domain has duplicate labels");
      }
      spec.domain = std::move(labels_list);
    }
    if (!seen.insert(spec.name).second) {
      throw Error(ErrorCode::MalformedConfig, "attribute '" + spec.name + "' listed twice");
    }
    cfg.attributes.push_back(std::move(spec));
  }
  if (labels == 0) throw Error(ErrorCode::NoLabel, "roles config assigns no label attribute");
  if (labels > 1) {
    throw Error(ErrorCode::MultipleLabels,
                "roles config assigns " + std::to_string(labels) + " label attributes");
  }
  return cfg;
}

nlohmann::json RolesConfig::to_json() const {
  nlohmann::json attrs = nlohmann::json::array();
  for (const auto& a : attributes) {
    nlohmann::json item{{"name", a.name}, {"role", std::string(to_string(a.role))}};
    if (a.domain) item["domain"] = *a.domain;
    attrs.push_back(std::move(item));
  }
  return nlohmann::json{{"attributes", std::move(attrs)}};
}

RolesConfig load_roles(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open roles config " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::MalformedConfig, "roles config " + path.string() + ": " + e.what());
  }
  return RolesConfig::from_json(doc);
}

void save_roles(const RolesConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write roles config " + path.string());
  out << config.to_json().dump(2) << '\n';
  if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

RolesConfig roles_config_of(const EncodedDataset& data) {
  RolesConfig cfg;
  for (const auto& a : data.schema()) cfg.attributes.push_back({a.name, a.role, a.domain});
  return cfg;
}

std::vector<std::vector<std::string>> parse_csv_records(std::istream& in) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  bool record_open = false;
  std::size_t line = 1;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_was_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
    record_open = false;
  };

  char c;
  while (in.get(c)) {
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty() || field_was_quoted) {
          throw Error(ErrorCode::MalformedCsv,
                      "stray quote inside unquoted field on line " + std::to_string(line));
        }
        in_quotes = true;
        field_was_quoted = true;
        record_open = true;
        break;
      case ',':
        end_field();
        record_open = true;
        break;
      case '\r':
        if (in.peek() == '\n') in.get(c);
        [[fallthrough]];
      case '\n':
        end_record();
        ++line;
        break;
      default:
        if (field_was_quoted) {
          throw Error(ErrorCode::MalformedCsv,
                      "characters after closing quote on line " + std::to_string(line));
        }
        field.push_back(c);
        record_open = true;
    }
  }
  if (in_quotes) throw Error(ErrorCode::MalformedCsv, "unterminated quoted field");
  if (record_open) end_record();
  return records;
}

EncodedDataset read_csv(std::istream& in, const RolesConfig& roles, const LoadOptions& options) {
  auto records = parse_csv_records(in);
  if (records.empty() || (records.front().size() == 1 && records.front().front().empty())) {
    throw Error(ErrorCode::EmptyDataset, "CSV has no header row");
  }
  const auto& header = records.front();
  const std::size_t width = header.size();
  if (records.size() < 2) throw Error(ErrorCode::EmptyDataset, "CSV has no data rows");

  std::vector<const RoleSpec*> specs;
  std::set<std::string_view> header_names;
  for (const auto& name : header) {
    if (!header_names.insert(name).second) {
      throw Error(ErrorCode::MalformedCsv, "duplicate header column '" + name + "'");
    }
    const RoleSpec* spec = roles.find(name);
    if (!spec) throw Error(ErrorCode::MissingRole, "column '" + name + "' has no role assigned");
    specs.push_back(spec);
  }
  for (const auto& a : roles.attributes) {
    if (!header_names.count(a.name)) {
      throw Error(ErrorCode::UnknownAttribute,
                  "roles config names '" + a.name + "' which is not a CSV column");
    }
  }
  std::size_t labels = std::count_if(specs.begin(), specs.end(),
                                     [](const RoleSpec* s) { return s->role == Role::Label; });
  if (labels == 0) throw Error(ErrorCode::NoLabel, "no label column");
  if (labels > 1) throw Error(ErrorCode::MultipleLabels, "more than one label column");

  const std::size_t n_rows = records.size() - 1;
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != width) {
      throw Error(ErrorCode::MalformedCsv, "row " + std::to_string(r) + " has " +
                                               std::to_string(records[r].size()) +
                                               " fields, header has " + std::to_string(width));
    }
    for (auto& v : records[r]) {
      if (v.empty()) v = std::string(kMissingLabel);
    }
  }

  std::vector<AttributeSchema> schema;
  std::vector<std::vector<Code>> columns;
  for (std::size_t c = 0; c < width; ++c) {
    AttributeSchema attr{header[c], specs[c]->role, {}};
    std::vector<Code> codes(n_rows);
    if (specs[c]->domain) {
      attr.domain = *specs[c]->domain;
      std::map<std::string_view, Code> index;
      for (Code i = 0; i < attr.domain.size(); ++i) index.emplace(attr.domain[i], i);
      for (std::size_t r = 0; r < n_rows; ++r) {
        const auto& v = records[r + 1][c];
        auto it = index.find(v);
        if (it == index.end()) {
          throw Error(ErrorCode::UnknownCategory, "row " + std::to_string(r + 1) + ", column '" +
                                                      header[c] + "': value '" + v +
                                                      "' is outside the pinned domain");
        }
        codes[r] = it->second;
      }
    } else {
      std::map<std::string_view, Code> index;
      NumericProbe probe;
      for (std::size_t r = 0; r < n_rows; ++r) {
        const auto& v = records[r + 1][c];
        if (index.emplace(v, 0).second) probe_numeric(v, probe);
      }
      if (probe.all_numeric && (probe.fractional || index.size() > options.max_numeric_levels)) {
        throw Error(ErrorCode::ContinuousColumn,
                    "column '" + header[c] + "' looks continuous (" + std::to_string(index.size()) +
                        " numeric levels); bin it or pin its domain");
      }
      Code next = 0;
      for (auto& [label, code] : index) {
        code = next++;
        attr.domain.emplace_back(label);
      }
      for (std::size_t r = 0; r < n_rows; ++r) codes[r] = index.at(records[r + 1][c]);
    }
    schema.push_back(std::move(attr));
    columns.push_back(std::move(codes));
  }
  return EncodedDataset(std::move(schema), std::move(columns), n_rows);
}

EncodedDataset load_csv(const std::filesystem::path& path, const RolesConfig& roles,
                        const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  return read_csv(in, roles, options);
}

void write_csv(const EncodedDataset& data, std::ostream& out) {
  const std::size_t width = data.num_attrs();
  if (width == 0) return;
  for (std::size_t c = 0; c < width; ++c) {
    if (c) out << ',';
    write_field(out, data.attribute(c).name);
  }
  out << '\n';
  for (std::size_t r = 0; r < data.num_rows(); ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      if (c) out << ',';
      write_field(out, data.attribute(c).decode(data.at(r, c)));
    }
    out << '\n';
  }
}

void write_csv(const EncodedDataset& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  write_csv(data, out);
  out.flush();
  if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

}  // namespace causalpre
