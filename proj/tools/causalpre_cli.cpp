// causalpre command-line front end.
//
// Exit codes: 0 success, 2 invalid input (one JSON line on stderr), 1 internal
// failure. Every run emits a manifest (to --manifest, else stderr).

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include "causalpre/csv_io.hpp"
#include "causalpre/error.hpp"
#include "causalpre/info.hpp"
#include "causalpre/metrics.hpp"
#include "causalpre/pipeline.hpp"
#include "causalpre/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace causalpre;

namespace {

constexpr const char* kVersion = "0.1.0";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

class Manifest {
 public:
  explicit Manifest(std::string command) : start_(Clock::now()) {
    doc_["command"] = std::move(command);
    doc_["version"] = kVersion;
    doc_["flags"] = json::object();
    doc_["inputs"] = json::object();
    doc_["timings_ms"] = json::object();
  }

  json& flags() { return doc_["flags"]; }
  void seed(std::uint64_t s) { doc_["seed"] = s; }
  void input(const std::string& path) {
    if (!path.empty()) doc_["inputs"][path] = sha256_file(path);
  }
  void lap(const std::string& stage) {
    const auto now = Clock::now();
    doc_["timings_ms"][stage] =
        std::chrono::duration<double, std::milli>(now - last_).count();
    last_ = now;
  }
  json finish() {
    doc_["timings_ms"]["total"] =
        std::chrono::duration<double, std::milli>(Clock::now() - start_).count();
    return doc_;
  }

 private:
  using Clock = std::chrono::steady_clock;
  json doc_;
  Clock::time_point start_;
  Clock::time_point last_ = Clock::now();
};

unsigned resolve_threads(unsigned flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("CAUSALPRE_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
    throw UsageError("CAUSALPRE_THREADS must be a positive integer");
  }
  return 1;
}

void write_text(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoFailure, "cannot write " + out);
  f << text;
}

std::vector<std::string> names_of(const EncodedDataset& data, std::span<const std::size_t> attrs) {
  std::vector<std::string> out;
  for (std::size_t a : attrs) out.push_back(data.attribute(a).name);
  return out;
}

json plan_json(const EncodedDataset& data, const CliquePlan& plan) {
  json doc;
  doc["cliques"] = json::array();
  doc["parents"] = json::array();
  doc["separators"] = json::array();
  for (std::size_t i = 0; i < plan.size(); ++i) {
    doc["cliques"].push_back(names_of(data, plan.cliques[i]));
    doc["parents"].push_back(plan.parents[i] ? json(*plan.parents[i]) : json(nullptr));
    doc["separators"].push_back(names_of(data, plan.separators[i]));
  }
  return doc;
}

json label_clique_json(const EncodedDataset& data, const LabelClique& lc) {
  return {{"separator", names_of(data, lc.separator)},
          {"label", data.attribute(lc.label).name},
          {"parent", lc.parent ? json(*lc.parent) : json(nullptr)}};
}

struct Common {
  unsigned threads = 0;
  std::string manifest;
};

void emit_manifest(Manifest& manifest, const Common& common) {
  const auto doc = manifest.finish();
  if (common.manifest.empty()) {
    std::cerr << doc.dump() << '\n';
  } else {
    std::ofstream f(common.manifest);
    if (!f) throw Error(ErrorCode::IoFailure, "cannot write " + common.manifest);
    f << doc.dump(2) << '\n';
  }
}

// ---- preprocess

struct PreprocessArgs {
  std::string input, roles, out;
  std::size_t k = 0, m = 0;
  double alpha = 1.0;
  std::uint64_t seed = 0;
  double pseudocount = 0.0;
};

void cmd_preprocess(const PreprocessArgs& a, const Common& common) {
  Manifest manifest("preprocess");
  PreprocessConfig cfg;
  cfg.k = a.k;
  cfg.m = a.m;
  cfg.alpha = a.alpha;
  cfg.seed = a.seed;
  cfg.pseudocount = a.pseudocount;
  cfg.threads = resolve_threads(common.threads);
  manifest.flags() = {{"input", a.input}, {"roles", a.roles},   {"k", a.k},
                      {"m", a.m},         {"alpha", a.alpha},   {"seed", a.seed},
                      {"pseudocount", a.pseudocount}, {"out", a.out}, {"threads", cfg.threads}};
  manifest.seed(a.seed);
  manifest.input(a.input);
  manifest.input(a.roles);

  const auto roles = load_roles(a.roles);
  const auto data = load_csv(a.input, roles);
  manifest.lap("load");
  const auto result = run_pipeline(data, cfg);
  manifest.lap("pipeline");

  std::ostringstream csv;
  write_csv(result.output, csv);
  write_text(a.out, csv.str());
  manifest.lap("write");

  if (!a.out.empty() && a.out != "-") {
    json prov = manifest.finish();
    prov["plan"] = plan_json(data, result.plan);
    prov["plan_weight_bits"] = plan_weight(result.plan, result.mi);
    prov["label_clique"] = label_clique_json(data, result.fair);
    if (result.unfair) prov["unfair_label_clique"] = label_clique_json(data, *result.unfair);
    prov["rows"] = result.output.num_rows();
    write_text(a.out + ".provenance.json", prov.dump(2) + "\n");
  }
  emit_manifest(manifest, common);
}

// ---- info

struct InfoArgs {
  std::string input, roles, out, format = "json";
};

void cmd_info(const InfoArgs& a, const Common& common) {
  Manifest manifest("info");
  const unsigned threads = resolve_threads(common.threads);
  manifest.flags() = {{"input", a.input}, {"roles", a.roles}, {"out", a.out},
                      {"format", a.format}, {"threads", threads}};
  manifest.input(a.input);
  manifest.input(a.roles);
  const auto data = load_csv(a.input, load_roles(a.roles));
  std::vector<std::size_t> all(data.num_attrs());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const auto mi = mi_matrix(data, all, threads);
  std::vector<double> h;
  for (std::size_t a_ : all) {
    const std::size_t one[] = {a_};
    h.push_back(entropy(data, one));
  }
  manifest.lap("compute");

  std::ostringstream text;
  if (a.format == "csv") {
    text << std::setprecision(17) << "attribute";
    for (std::size_t i : all) text << ',' << data.attribute(i).name;
    text << '\n';
    for (std::size_t i : all) {
      text << data.attribute(i).name;
      for (std::size_t j : all) text << ',' << (i == j ? h[i] : mi(i, j));
      text << '\n';
    }
  } else {
    json doc;
    doc["attributes"] = names_of(data, all);
    doc["roles"] = json::array();
    for (const auto& s : data.schema()) doc["roles"].push_back(std::string(to_string(s.role)));
    doc["rows"] = data.num_rows();
    doc["entropy_bits"] = h;
    doc["mi_bits"] = json::array();
    for (std::size_t i : all) {
      json row = json::array();
      for (std::size_t j : all) row.push_back(mi(i, j));
      doc["mi_bits"].push_back(row);
    }
    text << doc.dump(2) << '\n';
  }
  write_text(a.out, text.str());
  emit_manifest(manifest, common);
}

// ---- cliques

struct CliquesArgs {
  std::string input, roles, out;
  std::size_t k = 0, m = 0;
};

void cmd_cliques(const CliquesArgs& a, const Common& common) {
  Manifest manifest("cliques");
  const unsigned threads = resolve_threads(common.threads);
  manifest.flags() = {{"input", a.input}, {"roles", a.roles}, {"k", a.k},
                      {"m", a.m},         {"out", a.out},     {"threads", threads}};
  manifest.input(a.input);
  manifest.input(a.roles);
  const auto data = load_csv(a.input, load_roles(a.roles));
  // m = 0 (disjoint cliques) is a valid plan here, unlike in preprocess.
  if (a.k < 1) throw Error(ErrorCode::InvalidConfig, "k must be at least 1");
  MIMatrix mi;
  const auto plan = plan_non_label(data, a.k, a.m, threads, &mi);
  const auto report = check_constraints(plan, mi.attrs(), a.k, a.m, mi);
  manifest.lap("compute");

  json doc = plan_json(data, plan);
  doc["weight_bits"] = plan_weight(plan, mi);
  doc["constraints_ok"] = report.all_ok();
  doc["violations"] = report.violations;
  if (a.m >= 1) {
    const auto lmi = label_mi(data, threads);
    doc["label_clique"] =
        label_clique_json(data, build_label_clique(data, plan, lmi, a.k, a.m, LabelPool::Fair));
  }
  write_text(a.out, doc.dump(2) + "\n");
  emit_manifest(manifest, common);
}

// ---- metrics

struct MetricsArgs {
  std::string original, processed, roles, out;
  std::size_t k = 2, m = 1;
};

json rod_json(const EncodedDataset& data, const RODReport& r) {
  const auto sens = data.attrs_with_role(Role::Sensitive);
  auto group_label = [&](std::size_t g) {
    json parts = json::object();
    if (g < r.group_values.size()) {
      for (std::size_t j = 0; j < sens.size(); ++j) {
        parts[data.attribute(sens[j]).name] = data.attribute(sens[j]).decode(r.group_values[g][j]);
      }
    }
    return parts;
  };
  return {{"rod_normalized", r.rod_normalized},
          {"raw_abs_log", r.raw_abs_log},
          {"worst_pair", {group_label(r.worst_pair.first), group_label(r.worst_pair.second)}},
          {"contexts", r.per_context.size()}};
}

void cmd_metrics(const MetricsArgs& a, const Common& common) {
  Manifest manifest("metrics");
  const unsigned threads = resolve_threads(common.threads);
  manifest.flags() = {{"original", a.original}, {"processed", a.processed}, {"roles", a.roles},
                      {"k", a.k}, {"m", a.m}, {"out", a.out}, {"threads", threads}};
  manifest.input(a.original);
  manifest.input(a.processed);
  manifest.input(a.roles);
  const auto original = load_csv(a.original, load_roles(a.roles));
  // Pin the original's domains so that both tables share one schema.
  const auto processed = load_csv(a.processed, roles_config_of(original));
  PreprocessConfig cfg;
  cfg.k = a.k;
  cfg.m = a.m;
  cfg.validate();

  const auto rod_orig = rod(original);
  const auto rod_proc = rod(processed);
  const auto plan = plan_non_label(original, a.k, a.m, threads);
  const auto lmi = label_mi(original, threads);
  const auto full = with_label_clique(
      plan, build_label_clique(original, plan, lmi, a.k, a.m, LabelPool::Fair));
  const auto kl = distortion_kl_per_subset(original, processed, full.cliques);
  manifest.lap("compute");

  json doc = rod_json(processed, rod_proc);
  doc["original"] = rod_json(original, rod_orig);
  doc["rod_delta"] = rod_proc.raw_abs_log - rod_orig.raw_abs_log;
  doc["kl_bits_per_clique"] = kl;
  double mean = 0.0;
  for (double v : kl) mean += v;
  doc["kl_bits_mean"] = kl.empty() ? 0.0 : mean / static_cast<double>(kl.size());
  doc["cliques"] = json::array();
  for (const auto& c : full.cliques) doc["cliques"].push_back(names_of(original, c));
  write_text(a.out, doc.dump(2) + "\n");
  emit_manifest(manifest, common);
}

// ---- synth

struct SynthArgs {
  std::string spec, out, roles_out;
  std::size_t rows = 0;
  std::uint64_t seed = 0;
  bool hiring = false;
  double bias = 0.3;
};

void cmd_synth(const SynthArgs& a, const Common& common) {
  Manifest manifest("synth");
  const unsigned threads = resolve_threads(common.threads);
  manifest.flags() = {{"spec", a.spec},   {"rows", a.rows},     {"seed", a.seed},
                      {"out", a.out},     {"roles_out", a.roles_out}, {"hiring", a.hiring},
                      {"bias", a.bias},   {"threads", threads}};
  manifest.seed(a.seed);
  if (a.hiring == !a.spec.empty()) throw UsageError("give exactly one of --spec and --hiring");
  DagSpec spec;
  if (a.hiring) {
    spec = hiring_spec(a.bias);
  } else {
    manifest.input(a.spec);
    std::ifstream in(a.spec);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + a.spec);
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::MalformedCpt, std::string("spec is not valid JSON: ") + e.what());
    }
    spec = DagSpec::from_json(doc);
  }
  const auto data = generate(spec, a.rows, a.seed, threads);
  manifest.lap("generate");
  std::ostringstream csv;
  write_csv(data, csv);
  write_text(a.out, csv.str());
  if (!a.roles_out.empty()) save_roles(roles_config_of(data), a.roles_out);
  emit_manifest(manifest, common);
}

void fail(int code, const std::string& kind, const std::string& message) {
  std::cerr << json{{"error", kind}, {"message", message}}.dump() << '\n';
  std::exit(code);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"causal-fairness preprocessing for categorical tables"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--threads", common.threads, "worker threads (fallback: CAUSALPRE_THREADS)");
    sub->add_option("--manifest", common.manifest, "write the run manifest here instead of stderr");
  };

  PreprocessArgs pre;
  auto* p = app.add_subcommand("preprocess", "regenerate a table with a fair label mechanism");
  p->add_option("--input", pre.input)->required();
  p->add_option("--roles", pre.roles)->required();
  p->add_option("--k", pre.k)->required();
  p->add_option("--m", pre.m)->required();
  p->add_option("--alpha", pre.alpha)->capture_default_str();
  p->add_option("--seed", pre.seed)->capture_default_str();
  p->add_option("--pseudocount", pre.pseudocount)->capture_default_str();
  p->add_option("--out", pre.out, "output CSV (default stdout)");
  add_common(p);

  InfoArgs info;
  auto* i = app.add_subcommand("info", "entropies and pairwise mutual information");
  i->add_option("--input", info.input)->required();
  i->add_option("--roles", info.roles)->required();
  i->add_option("--format", info.format)->check(CLI::IsMember({"json", "csv"}));
  i->add_option("--out", info.out);
  add_common(i);

  CliquesArgs cl;
  auto* c = app.add_subcommand("cliques", "clique plan over the non-label attributes");
  c->add_option("--input", cl.input)->required();
  c->add_option("--roles", cl.roles)->required();
  c->add_option("--k", cl.k)->required();
  c->add_option("--m", cl.m)->required();
  c->add_option("--out", cl.out);
  add_common(c);

  MetricsArgs me;
  auto* mt = app.add_subcommand("metrics", "ROD and KL distortion of a processed table");
  mt->add_option("--original", me.original)->required();
  mt->add_option("--processed", me.processed)->required();
  mt->add_option("--roles", me.roles)->required();
  mt->add_option("--k", me.k)->capture_default_str();
  mt->add_option("--m", me.m)->capture_default_str();
  mt->add_option("--out", me.out);
  add_common(mt);

  SynthArgs sy;
  auto* s = app.add_subcommand("synth", "sample a table from a categorical DAG");
  s->add_option("--spec", sy.spec);
  s->add_flag("--hiring", sy.hiring, "use the built-in hiring network");
  s->add_option("--bias", sy.bias)->capture_default_str();
  s->add_option("--rows", sy.rows)->required();
  s->add_option("--seed", sy.seed)->capture_default_str();
  s->add_option("--out", sy.out);
  s->add_option("--roles-out", sy.roles_out, "also write a roles file with pinned domains");
  add_common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    fail(2, "InvalidArguments", e.what());
  }

  try {
    if (*p) cmd_preprocess(pre, common);
    if (*i) cmd_info(info, common);
    if (*c) cmd_cliques(cl, common);
    if (*mt) cmd_metrics(me, common);
    if (*s) cmd_synth(sy, common);
  } catch (const Error& e) {
    fail(2, std::string(to_string(e.code())), e.what());
  } catch (const UsageError& e) {
    fail(2, "InvalidArguments", e.what());
  } catch (const std::exception& e) {
    fail(1, "Internal", e.what());
  }
  return 0;
}
