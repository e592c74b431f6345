#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kCli = CAUSALPRE_CLI_PATH;

struct Run {
  int code;
  std::string err;
};

class Workdir {
 public:
  Workdir() {
    dir_ = fs::temp_directory_path() / ("causalpre_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  ~Workdir() { fs::remove_all(dir_); }
  std::string operator/(const std::string& name) const { return (dir_ / name).string(); }

  Run run(const std::string& args, const std::string& env = "") const {
    const std::string err = *this / "stderr.txt";
    const std::string cmd = env + " " + kCli.string() + " " + args + " 2> " + err;
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(err)};
  }

  static std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

 private:
  fs::path dir_;
};

// Two planted blocks {a1,a2,a3} and {b1,b2,b3}; each block copies its root.
const char* kBlocks = R"({
  "nodes": [
    {"name": "a1", "domain": ["0", "1"], "role": "admissible"},
    {"name": "a2", "domain": ["0", "1"], "role": "admissible"},
    {"name": "a3", "domain": ["0", "1"], "role": "admissible"},
    {"name": "b1", "domain": ["0", "1"], "role": "additional"},
    {"name": "b2", "domain": ["0", "1"], "role": "additional"},
    {"name": "b3", "domain": ["0", "1"], "role": "sensitive"},
    {"name": "y", "domain": ["0", "1"], "role": "label"}],
  "edges": [["a1", "a2"], ["a1", "a3"], ["b1", "b2"], ["b1", "b3"], ["a1", "y"]],
  "cpts": {
    "a1": [[0.5, 0.5]], "a2": [[0.9, 0.1], [0.1, 0.9]], "a3": [[0.85, 0.15], [0.15, 0.85]],
    "b1": [[0.5, 0.5]], "b2": [[0.9, 0.1], [0.1, 0.9]], "b3": [[0.85, 0.15], [0.15, 0.85]],
    "y": [[0.7, 0.3], [0.4, 0.6]]}})";

}  // namespace

TEST_CASE("preprocess contract on the hiring fixture") {
  Workdir w;
  REQUIRE(w.run("synth --hiring --bias 0.4 --rows 5000 --seed 1 --out " + (w / "h.csv") +
                " --roles-out " + (w / "roles.json"))
              .code == 0);
  const std::string base = "preprocess --input " + (w / "h.csv") + " --roles " + (w / "roles.json") +
                           " --k 2 --m 1 --seed 7";
  const auto first = w.run(base + " --out " + (w / "a.csv") + " --manifest " + (w / "m.json"));
  CHECK(first.code == 0);
  CHECK(w.run(base + " --out " + (w / "b.csv")).code == 0);
  CHECK(w.run(base + " --alpha 1.0 --out " + (w / "c.csv")).code == 0);
  CHECK(w.run(base + " --out " + (w / "d.csv"), "CAUSALPRE_THREADS=3").code == 0);
  const auto a = Workdir::slurp(w / "a.csv");
  CHECK(a.rfind("gender,strength,hired\n", 0) == 0);
  CHECK(a == Workdir::slurp(w / "b.csv"));
  CHECK(a == Workdir::slurp(w / "c.csv"));
  CHECK(a == Workdir::slurp(w / "d.csv"));

  const auto manifest = json::parse(Workdir::slurp(w / "m.json"));
  CHECK(manifest["command"] == "preprocess");
  CHECK(manifest["seed"] == 7);
  CHECK(manifest["flags"]["k"] == 2);
  CHECK(manifest["flags"]["alpha"] == 1.0);
  CHECK(manifest["inputs"][w / "h.csv"].get<std::string>().size() == 64);
  CHECK(manifest.contains("version"));
  CHECK(manifest["timings_ms"].contains("total"));

  const auto prov = json::parse(Workdir::slurp(w / "a.csv.provenance.json"));
  CHECK(prov["label_clique"]["separator"] == json::array({"strength"}));
  CHECK(prov["plan"]["cliques"].size() == 1);
  CHECK(prov["flags"]["pseudocount"] == 0.0);

  // manifest lands on stderr without --manifest
  const auto second = w.run(base + " --out " + (w / "e.csv"));
  CHECK(json::parse(second.err)["command"] == "preprocess");
  const auto threaded = w.run(base + " --out " + (w / "f.csv"), "CAUSALPRE_THREADS=3");
  CHECK(json::parse(threaded.err)["flags"]["threads"] == 3);

  // alpha below one goes through the mixture
  CHECK(w.run(base + " --alpha 0.5 --out " + (w / "g.csv")).code == 0);
  CHECK(json::parse(Workdir::slurp(w / "g.csv.provenance.json")).contains("unfair_label_clique"));
}

TEST_CASE("validation failures exit 2 with one JSON line") {
  Workdir w;
  auto r = w.run("preprocess --input " + (w / "missing.csv") + " --roles " + (w / "none.json") +
                 " --k 2 --m 1");
  CHECK(r.code == 2);
  const auto err = json::parse(r.err.substr(0, r.err.find('\n')));
  CHECK(err["error"] == "IoFailure");
  CHECK(err.contains("message"));

  r = w.run("preprocess --bogus");
  CHECK(r.code == 2);
  CHECK(json::parse(r.err)["error"] == "InvalidArguments");

  REQUIRE(w.run("synth --hiring --rows 200 --out " + (w / "h.csv") + " --roles-out " + (w / "r.json")).code == 0);
  r = w.run("preprocess --input " + (w / "h.csv") + " --roles " + (w / "r.json") + " --k 2 --m 1 --alpha 2");
  CHECK(r.code == 2);
  CHECK(json::parse(r.err)["error"] == "InvalidConfig");
  r = w.run("info --input " + (w / "h.csv") + " --roles " + (w / "r.json"), "CAUSALPRE_THREADS=zero");
  CHECK(r.code == 2);

  std::ofstream(w / "bad.json") << R"({"attributes": [{"name": "gender", "role": "sensitive"}]})";
  r = w.run("info --input " + (w / "h.csv") + " --roles " + (w / "bad.json"));
  CHECK(r.code == 2);
  CHECK(json::parse(r.err)["error"] == "NoLabel");
}

TEST_CASE("info emits a symmetric nonnegative MI matrix") {
  Workdir w;
  REQUIRE(w.run("synth --hiring --rows 3000 --out " + (w / "h.csv") + " --roles-out " + (w / "r.json")).code == 0);
  REQUIRE(w.run("info --input " + (w / "h.csv") + " --roles " + (w / "r.json") + " --out " + (w / "i.json")).code == 0);
  const auto doc = json::parse(Workdir::slurp(w / "i.json"));
  CHECK(doc["attributes"] == json::array({"gender", "strength", "hired"}));
  const auto& mi = doc["mi_bits"];
  for (int i = 0; i < 3; ++i) {
    CHECK(mi[i][i] == 0.0);
    for (int j = 0; j < 3; ++j) {
      CHECK(mi[i][j].get<double>() >= 0.0);
      CHECK(mi[i][j] == mi[j][i]);
    }
  }
  REQUIRE(w.run("info --format csv --input " + (w / "h.csv") + " --roles " + (w / "r.json") + " --out " + (w / "i.csv")).code == 0);
  CHECK(Workdir::slurp(w / "i.csv").rfind("attribute,gender,strength,hired\n", 0) == 0);
}

TEST_CASE("metrics of a table against itself") {
  Workdir w;
  REQUIRE(w.run("synth --hiring --bias 0.3 --rows 4000 --out " + (w / "h.csv") + " --roles-out " + (w / "r.json")).code == 0);
  REQUIRE(w.run("metrics --original " + (w / "h.csv") + " --processed " + (w / "h.csv") + " --roles " +
                (w / "r.json") + " --out " + (w / "m.json"))
              .code == 0);
  const auto doc = json::parse(Workdir::slurp(w / "m.json"));
  CHECK(doc["rod_delta"] == 0.0);
  CHECK(doc["kl_bits_mean"] == 0.0);
  for (const auto& v : doc["kl_bits_per_clique"]) CHECK(v == 0.0);
  CHECK(doc["rod_normalized"].get<double>() > 0.0);
  CHECK(doc["worst_pair"].size() == 2);
  CHECK(doc.contains("raw_abs_log"));
}

TEST_CASE("metrics after preprocessing show less discrimination") {
  Workdir w;
  REQUIRE(w.run("synth --hiring --bias 0.4 --rows 20000 --out " + (w / "h.csv") + " --roles-out " + (w / "r.json")).code == 0);
  REQUIRE(w.run("preprocess --input " + (w / "h.csv") + " --roles " + (w / "r.json") +
                " --k 2 --m 1 --out " + (w / "p.csv"))
              .code == 0);
  REQUIRE(w.run("metrics --original " + (w / "h.csv") + " --processed " + (w / "p.csv") + " --roles " +
                (w / "r.json") + " --out " + (w / "m.json"))
              .code == 0);
  const auto doc = json::parse(Workdir::slurp(w / "m.json"));
  CHECK(doc["rod_delta"].get<double>() < 0.0);
  CHECK(doc["raw_abs_log"].get<double>() <= 0.5 * doc["original"]["raw_abs_log"].get<double>());
}

TEST_CASE("cliques recovers planted blocks and synth reads spec files") {
  Workdir w;
  std::ofstream(w / "spec.json") << kBlocks;
  REQUIRE(w.run("synth --spec " + (w / "spec.json") + " --rows 20000 --seed 3 --out " + (w / "b.csv") +
                " --roles-out " + (w / "r.json"))
              .code == 0);
  REQUIRE(w.run("cliques --input " + (w / "b.csv") + " --roles " + (w / "r.json") +
                " --k 3 --m 0 --out " + (w / "c.json"))
              .code == 0);
  const auto doc = json::parse(Workdir::slurp(w / "c.json"));
  std::set<std::set<std::string>> got;
  for (const auto& c : doc["cliques"]) got.insert(c.get<std::set<std::string>>());
  CHECK(got == std::set<std::set<std::string>>{{"a1", "a2", "a3"}, {"b1", "b2", "b3"}});
  CHECK(doc["constraints_ok"] == true);
  CHECK(doc["weight_bits"].get<double>() > 0.0);

  REQUIRE(w.run("cliques --input " + (w / "b.csv") + " --roles " + (w / "r.json") +
                " --k 2 --m 1 --out " + (w / "c2.json"))
              .code == 0);
  const auto ext = json::parse(Workdir::slurp(w / "c2.json"));
  CHECK(ext["constraints_ok"] == true);
  CHECK(ext["label_clique"]["label"] == "y");

  std::ofstream(w / "cyclic.json") << R"({"nodes": [{"name": "a", "domain": ["0"]}, {"name": "b", "domain": ["0"]}],
    "edges": [["a", "b"], ["b", "a"]], "cpts": {"a": [[1]], "b": [[1]]}})";
  const auto r = w.run("synth --spec " + (w / "cyclic.json") + " --rows 10 --out " + (w / "x.csv"));
  CHECK(r.code == 2);
  CHECK(json::parse(r.err)["error"] == "CyclicSpec");
}
