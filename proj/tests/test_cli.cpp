#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

using nlohmann::json;

namespace {

const std::string kCli = GSHIFT_CLI_PATH;
const std::string kData = GSHIFT_TEST_DATA;

struct Result {
  int code = -1;
  std::string out;
};

// Runs the CLI with stderr discarded unless `keep_err`.
Result cli(const std::string& args, bool keep_err = false, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + kCli + " " + args + (keep_err ? " 2>&1" : " 2>/dev/null");
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string data(const std::string& name) { return kData + "/" + name; }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// Letters of a printed word; "a^3" and "a^-2" expand to repeated letters.
std::vector<std::string> tokens(const std::string& w) {
  std::istringstream in(w);
  std::vector<std::string> out;
  for (std::string t; in >> t;) {
    const auto caret = t.find('^');
    if (caret == std::string::npos || t.substr(caret) == "^-1") {
      out.push_back(t);
      continue;
    }
    const long e = std::stol(t.substr(caret + 1));
    for (long i = 0; i < std::labs(e); ++i) out.push_back(t.substr(0, caret) + (e < 0 ? "^-1" : ""));
  }
  return out;
}

std::string invert_letter(const std::string& l) {
  return l.size() > 3 && l.substr(l.size() - 3) == "^-1" ? l.substr(0, l.size() - 3) : l + "^-1";
}

// Free reduction of a word in a free group.
std::vector<std::string> free_reduce(const std::vector<std::string>& w) {
  std::vector<std::string> out;
  for (const auto& l : w) {
    if (!out.empty() && out.back() == invert_letter(l)) out.pop_back();
    else out.push_back(l);
  }
  return out;
}

// Affine action x -> 2^k x + m on dyadic rationals, stored as (k, m * 2^64-scaled).
struct Affine {
  long double scale = 1, shift = 0;
  Affine then(const Affine& o) const { return {scale * o.scale, shift * o.scale + o.shift}; }
};

// BS(1,2) is faithfully represented by a: x -> x + 1, b: x -> 2x (or its
// mirror). The convention is chosen so that the group relation holds.
Affine bs_eval(const std::vector<std::string>& w, bool left) {
  std::map<std::string, Affine> gen = {
      {"a", {1, 1}}, {"a^-1", {1, -1}}, {"b", {2, 0}}, {"b^-1", {0.5L, 0}}};
  Affine acc;
  for (const auto& l : w) acc = left ? gen.at(l).then(acc) : acc.then(gen.at(l));
  return acc;
}

bool bs_equal(const std::string& u, const std::string& v) {
  for (bool left : {false, true}) {
    const Affine rel = bs_eval(tokens("b^-1 a b a^-1 a^-1"), left);
    if (rel.scale != 1 || rel.shift != 0) continue;
    const Affine x = bs_eval(tokens(u), left), y = bs_eval(tokens(v), left);
    return x.scale == y.scale && x.shift == y.shift;
  }
  FAIL("no convention satisfies the relation");
  return false;
}

json strip_timestamp(json j) {
  j["manifest"].erase("timestamp");
  return j;
}

}  // namespace

TEST_CASE("word problem exit codes") {
  auto r = cli("wp --group " + data("free2.json") + " --word \"a a^-1\"");
  CHECK(r.code == 0);
  CHECK(r.out == "true\n");
  r = cli("wp --group " + data("free2.json") + " --word \"a b a^-1\"");
  CHECK(r.code == 1);
  CHECK(r.out == "false\n");
  r = cli("wp --group " + data("bs12.json") + " --word \"b^-1 a b a^-1 a^-1\"");
  CHECK(r.code == 0);
  r = cli("canon --group " + data("z2.json") + " --word \"y x y^-1\" --format json");
  CHECK(json::parse(r.out)["result"]["canonical"] == "x");
}

TEST_CASE("coding check on the inconsistent Baumslag-Solitar coding") {
  auto r = cli("coding check --group " + data("bs12.json") + " --coding " + data("bs_inconsistent.json") +
               " --format json");
  CHECK(r.code == 1);
  const json j = json::parse(r.out);
  CHECK(j["result"]["consistent"] == false);
  const auto w = j["result"]["witness"];
  REQUIRE(w.size() == 2);
  // The two words name the same element but carry different symbols.
  const std::string u = w[0], v = w[1];
  CHECK(bs_equal(u, v));
  std::map<std::string, std::string> sym;
  const json coding = json::parse(slurp(data("bs_inconsistent.json")));
  for (const auto& e : coding["entries"])
    sym[e[0].get<std::string>()] = e[1].get<std::string>();
  CHECK(sym.at(u) != sym.at(v));

  r = cli("coding check --group " + data("bs12.json") + " --coding " + data("bs_inconsistent.json"));
  CHECK(r.code == 1);
  CHECK(r.out.rfind("INCONSISTENT\n", 0) == 0);

  r = cli("coding check --group " + data("bs12.json") + " --coding " + data("bs_consistent.json"));
  CHECK(r.code == 0);
  CHECK(r.out.rfind("CONSISTENT\n", 0) == 0);
}

TEST_CASE("path machine DOT is a simple path") {
  auto r = cli("machine path --group " + data("free2.json") + " --steps 500 --format dot");
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("digraph", 0) == 0);
  const std::regex node(R"re(\s*n(\d+) \[label="([^"]*)"\];)re"), edge(R"re(\s*n(\d+) -> n(\d+) .*)re");
  std::vector<std::string> labels;
  std::vector<std::pair<std::size_t, std::size_t>> arcs;
  std::istringstream lines(r.out);
  for (std::string line; std::getline(lines, line);) {
    std::smatch m;
    if (std::regex_match(line, m, node)) {
      CHECK(std::stoul(m[1]) == labels.size());
      labels.push_back(m[2]);
    } else if (std::regex_match(line, m, edge)) {
      arcs.emplace_back(std::stoul(m[1]), std::stoul(m[2]));
    }
  }
  REQUIRE(labels.size() > 3);
  CHECK(labels[0].empty());
  std::set<std::vector<std::string>> seen;
  for (const auto& l : labels) CHECK(seen.insert(free_reduce(tokens(l))).second);
  for (const auto& [i, k] : arcs) {
    REQUIRE(k == i + 1);
    auto step = tokens(labels[i]);
    std::reverse(step.begin(), step.end());
    for (auto& l : step) l = invert_letter(l);
    for (const auto& l : tokens(labels[k])) step.push_back(l);
    CHECK(free_reduce(step).size() == 1);
  }
  CHECK(arcs.size() + 1 == labels.size());
}

TEST_CASE("ball sizes and word enumeration") {
  auto r = cli("ball --group " + data("free2.json") + " --n 3 --format json");
  CHECK(json::parse(r.out)["result"]["size"] == 1 + 4 + 12 + 36);
  r = cli("ball --group " + data("z2.json") + " --n 3 --format json");
  CHECK(json::parse(r.out)["result"]["size"] == 25);
  r = cli("ball --group " + data("z2cyclic.json") + " --n 1 --format dot");
  CHECK(r.out.find("graph") != std::string::npos);
  r = cli("words --group " + data("z.json") + " --max-len 3 --format json");
  CHECK(json::parse(r.out)["result"]["words"].size() == 1 + 2 + 4 + 8);
}

TEST_CASE("disjoint balls and component sequences") {
  auto r = cli("sequences --group " + data("free2.json") + " --n 2 --format json");
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out)["result"];
  REQUIRE(j["g"].size() == 3);
  std::set<std::vector<std::string>> centers;
  for (const auto& key : {"g", "h"})
    for (const auto& w : j[key]) CHECK(centers.insert(free_reduce(tokens(w.get<std::string>()))).second);
  r = cli("sequences --group " + data("z2.json") + " --component --big-n 2 --seed \"x x x\" --n 3");
  CHECK(r.code == 0);
  r = cli("sequences --group " + data("z2.json") + " --component --big-n 2 --seed x --n 3");
  CHECK(r.code == 2);
}

TEST_CASE("subshift check, extend and delone") {
  CHECK(cli("subshift check --subshift " + data("one_or_less.json") + " --pattern " + data("two_ones.json")).code == 1);
  CHECK(cli("subshift check --subshift " + data("one_or_less.json") + " --pattern " + data("one_one.json")).code == 0);
  CHECK(cli("subshift extend --subshift " + data("one_or_less.json") + " --pattern " + data("one_one.json") +
            " --radius 2")
            .code == 0);
  auto r = cli("delone gen --group " + data("z.json") + " --n 1 --radius 8 --format json");
  REQUIRE(r.code == 0);
  // Y_1 on Z: ones pairwise at distance >= 4, 2 exactly next to a one, and
  // no cell of the window could take another one.
  std::map<long, std::string> line;
  const json dj = json::parse(r.out);
  for (const auto& e : dj["result"]["pattern"]["support"]) {
    long x = 0;
    for (const auto& t : tokens(e[0].get<std::string>())) x += t == "a" ? 1 : -1;
    line[x] = e[1].get<std::string>();
  }
  REQUIRE(line.size() == 17);
  std::vector<long> ones;
  for (const auto& [x, s] : line)
    if (s == "1") ones.push_back(x);
  REQUIRE_FALSE(ones.empty());
  for (std::size_t i = 1; i < ones.size(); ++i) CHECK(ones[i] - ones[i - 1] >= 4);
  for (const auto& [x, s] : line) {
    long d = 100;
    for (long o : ones) d = std::min(d, std::labs(x - o));
    CHECK(d < 4);
    CHECK(s == (d == 0 ? "1" : d == 1 ? "2" : "0"));
  }
  r = cli("delone gen --group " + data("z.json") + " --n 1 --radius 4 --format dot");
  CHECK(r.out.rfind("graph", 0) == 0);
}

TEST_CASE("machine run, equiv, retarget and simulate-balls") {
  const std::string base = " --group " + data("z2.json") + " --machine " + data("walker.json");
  auto r = cli("machine run" + base + " --pattern " + data("walker_pattern.json") + " --trace");
  CHECK(r.code == 0);
  CHECK(r.out.find("4 q1 x x x 1") != std::string::npos);
  CHECK(cli("machine run" + base + " --budget 2").code == 3);
  CHECK(cli("machine run" + base, false, "GSHIFT_BUDGET=3").code == 3);
  CHECK(cli("machine equiv" + base + " --pattern " + data("walker_pattern.json") + " --steps 40").code == 0);

  r = cli("machine retarget" + base + " --target " + data("z2.json") + " --map x=x --map y=y");
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out) == json::parse(cli("machine retarget" + base + " --target " + data("z2.json") +
                                              " --map x=x --map y=y")
                                              .out));
  CHECK(cli("machine retarget" + base + " --target " + data("z2.json") + " --map x=y --map y=x").code == 2);

  r = cli("machine simulate-balls" + base + " --coding " + data("walker_coding.json") + " --format json");
  CHECK(r.code == 0);
  CHECK(json::parse(r.out)["result"]["outcome"] == "accepted");
}

TEST_CASE("machine visit and oracle-sim") {
  auto r = cli("machine visit --group " + data("z2.json") + " --n 2 --format json");
  REQUIRE(r.code == 0);
  // Search head covered the ball of radius 1.
  std::set<std::string> cells;
  const json vj = json::parse(r.out);
  for (const auto& c : vj["result"]["visited"]) cells.insert(c.get<std::string>());
  for (const char* w : {"", "x", "x^-1", "y", "y^-1"}) CHECK(cells.count(w));
  CHECK(cli("machine visit --group " + data("z2.json") + " --n 3 --budget 10").code == 3);

  r = cli("machine oracle-sim --group " + data("z.json") + " --classical " + data("find_one.json") +
          " --pattern " + data("z_one.json"));
  CHECK(r.code == 0);
}

TEST_CASE("completion membership") {
  auto r = cli("completion --group " + data("z.json") + " --enumeration " + data("enum.json") + " --coding " +
               data("bad_coding.json") + " --budget 100");
  CHECK(r.code == 1);
}

TEST_CASE("reductions from the command line") {
  const std::string out = "/tmp/gshift_cli_test_inst.json";
  auto r = cli("compile domino --group " + data("z2.json") + " --machine " + data("walker.json") +
               " --a1 windowed:2 -o " + out);
  REQUIRE(r.code == 0);
  const std::string first = slurp(out);
  const json inst = json::parse(first);
  CHECK(inst["forbidden"].size() > 0);
  REQUIRE(cli("compile domino --group " + data("z2.json") + " --machine " + data("walker.json") +
              " --a1 windowed:2 -o " + out)
              .code == 0);
  CHECK(slurp(out) == first);

  r = cli("verify window --instance " + out + " --radius 1 --height 2 --format json");
  CHECK(r.code == 0);
  CHECK(json::parse(r.out)["result"]["verdict"] == "satisfiable");
  CHECK(cli("verify window --instance " + out + " --radius 2 --height 3", false, "GSHIFT_BUDGET=5").code == 3);

  r = cli("compile domino --group " + data("z2.json") + " --machine " + data("walker.json") + " --free-factor " +
          data("z2cyclic.json") + " --format json");
  CHECK(r.code == 0);
  CHECK(json::parse(r.out)["result"]["counts"].contains("Y_aux"));

  r = cli("compile simulate --group " + data("z.json") + " --machine " + data("z_walker.json") +
          " --abar 0 --height 4 --format json");
  CHECK(r.code == 0);
  CHECK(json::parse(r.out)["result"]["starting"] == 3);
}

TEST_CASE("x~ prefix and plus positions") {
  auto r = cli("xtime prefix --n 20 --schedule paper-example");
  CHECK(r.out == "⋆ ⊕ ▷ • • a ▷ • • a^-1 a^-1 ▷ • • a ⊕ ▷ • • •\n");
  r = cli("xtime kpos --n 2");
  CHECK(r.out == "15\n");
  r = cli("xtime symbol --index 15");
  CHECK(r.out == "⊕\n");
  CHECK(cli("xtime prefix --n 5 --schedule weekly").code == 2);
}

TEST_CASE("usage errors print hints") {
  auto r = cli("", true);
  CHECK(r.code == 2);
  r = cli("machine run --group " + data("z2.json"), true);
  CHECK(r.code == 2);
  CHECK(r.out.find("--machine") != std::string::npos);
  r = cli("wp --group " + data("missing.json") + " --word a", true);
  CHECK(r.code == 2);
  CHECK(r.out.find("schema") != std::string::npos);
  r = cli("coding check --group " + data("bs12.json") + " --coding " + data("free2.json"), true);
  CHECK(r.code == 2);
  CHECK(cli("--help").code == 0);
}

TEST_CASE("json output is reproducible and carries a manifest") {
  const std::string args = "coding check --group " + data("bs12.json") + " --coding " + data("bs_consistent.json") +
                           " --format json";
  const auto a = cli(args), b = cli(args);
  const json ja = json::parse(a.out), jb = json::parse(b.out);
  CHECK(strip_timestamp(ja).dump() == strip_timestamp(jb).dump());
  const json m = ja["manifest"];
  CHECK(m["tool"] == "gshift_cli");
  CHECK(m["exit_code"] == 0);
  CHECK(m["inputs"].size() == 2);

  // Digest against the system tool.
  FILE* p = popen(("sha256sum " + data("bs12.json")).c_str(), "r");
  REQUIRE(p != nullptr);
  char hex[65] = {};
  REQUIRE(fread(hex, 1, 64, p) == 64);
  pclose(p);
  CHECK(m["inputs"][data("bs12.json")] == std::string(hex));

  const std::string file = "/tmp/gshift_cli_test_manifest.json";
  std::remove(file.c_str());
  auto r = cli("wp --group " + data("free2.json") + " --word a --manifest " + file);
  CHECK(r.code == 1);
  const json mf = json::parse(slurp(file));
  CHECK(mf["outcome"] == "not identity");
  CHECK(mf["parameters"]["word"] == "a");
}
