#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "provsparql/cli.hpp"

using namespace provsparql;

namespace {

const std::string kData = PROVSPARQL_DATA_DIR;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args, const CliHooks& hooks = {}) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err, hooks);
  return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& content) {
  auto path = std::filesystem::temp_directory_path() / ("provsparql_cli_" + name);
  std::ofstream(path) << content;
  return path.string();
}

std::size_t occurrences(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

const std::string kExample = kData + "/example1.nq";
const std::string kQuery = kData + "/example1.rq";

}  // namespace

TEST_CASE("run prints a tsv table") {
  Run r = cli({"run", "--data", kExample, "--query", kQuery});
  CHECK(r.code == kExitOk);
  CHECK(r.out ==
        "?who\t?acc\t?home\tprovenance\n"
        "<http://people/david>\t<http://bank>\t<http://bank/yourmoney>\tg0*t1*t3\n"
        "<http://people/david>\t<http://bank>\t\tg0*t1*(1-t1*t3)\n"
        "<http://people/felix>\t<http://games>\t\tg0*t2\n");
  CHECK(r.err.empty());
}

TEST_CASE("counterfactual dataset") {
  Run r = cli({"run", "--data", kData + "/example1_without_homepage.nq", "--query", kQuery});
  CHECK(r.code == kExitOk);
  CHECK(r.out ==
        "?who\t?acc\t?home\tprovenance\n"
        "<http://people/david>\t<http://bank>\t\tg0*t1\n"
        "<http://people/felix>\t<http://games>\t\tg0*t2\n");
}

TEST_CASE("bool semiring adds a trust column") {
  Run all = cli({"run", "--data", kExample, "--query", kQuery, "--semiring", "bool"});
  CHECK(all.code == kExitOk);
  CHECK(occurrences(all.out, "\ttrue\n") == 2);
  CHECK(occurrences(all.out, "\tfalse\n") == 1);

  Run no_t3 = cli({"run", "--data", kExample, "--query", kQuery, "--semiring", "bool", "--trust", "t3=0"});
  CHECK(no_t3.out ==
        "?who\t?acc\t?home\tprovenance\ttrust\n"
        "<http://people/david>\t<http://bank>\t<http://bank/yourmoney>\tg0*t1*t3\tfalse\n"
        "<http://people/david>\t<http://bank>\t\tg0*t1*(1-t1*t3)\ttrue\n"
        "<http://people/felix>\t<http://games>\t\tg0*t2\ttrue\n");

  Run no_graph = cli({"run", "--data", kExample, "--query", kQuery, "--semiring", "bool", "--trust", "g0=0"});
  CHECK(occurrences(no_graph.out, "\tfalse\n") == 3);

  Run strict = cli({"run", "--data", kExample, "--query", kQuery, "--semiring", "bool", "--trust",
                    "g0=1,t2=1", "--trust-default", "0"});
  CHECK(occurrences(strict.out, "\ttrue\n") == 1);
  CHECK(strict.out.find("g0*t2\ttrue") != std::string::npos);
}

TEST_CASE("nat semiring prints counts") {
  Run r = cli({"run", "--data", kExample, "--query", kQuery, "--semiring", "nat"});
  CHECK(r.code == kExitOk);
  CHECK(r.out ==
        "?who\t?acc\t?home\tcount\n"
        "<http://people/david>\t<http://bank>\t<http://bank/yourmoney>\t1\n"
        "<http://people/felix>\t<http://games>\t\t1\n");
}

TEST_CASE("json output") {
  Run r = cli({"run", "--data", kExample, "--query", kQuery, "--format", "json"});
  REQUIRE(r.code == kExitOk);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["vars"] == nlohmann::json::array({"who", "acc", "home"}));
  REQUIRE(j["rows"].size() == 3);
  CHECK(j["rows"][0]["provenance"] == "g0*t1*t3");
  CHECK(j["rows"][1]["bindings"]["home"].is_null());
  CHECK(j["rows"][2]["bindings"]["who"] == "<http://people/felix>");
  CHECK_FALSE(j["rows"][0].contains("trust"));

  Run b = cli({"run", "--data", kExample, "--query", kQuery, "--format", "json", "--semiring", "bool"});
  auto jb = nlohmann::json::parse(b.out);
  CHECK(jb["rows"][1]["trust"] == false);

  Run n = cli({"run", "--data", kExample, "--query", kQuery, "--format", "json", "--semiring", "nat"});
  auto jn = nlohmann::json::parse(n.out);
  REQUIRE(jn["rows"].size() == 2);
  CHECK(jn["rows"][0]["count"] == 1);
}

TEST_CASE("empty dataset prints only the header") {
  Run r = cli({"run", "--data", kData + "/empty.nq", "--query", kQuery});
  CHECK(r.code == kExitOk);
  CHECK(r.out == "?who\t?acc\t?home\tprovenance\n");
}

TEST_CASE("exit codes for bad input") {
  CHECK(cli({"run", "--data", kData + "/missing.nq", "--query", kQuery}).code == kExitIo);
  CHECK(cli({"run", "--data", kExample, "--query", kData + "/missing.rq"}).code == kExitIo);

  std::string bad_query = temp_file("bad.rq", "SELECT ?x WHERE { ?x ?y }");
  Run syntax = cli({"run", "--data", kExample, "--query", bad_query});
  CHECK(syntax.code == kExitUser);
  CHECK_FALSE(syntax.err.empty());

  std::string bad_data = temp_file("bad.nq", "<http://a> <http://b> .\n");
  CHECK(cli({"run", "--data", bad_data, "--query", kQuery}).code == kExitUser);

  std::string bad_proj = temp_file("proj.rq", "SELECT ?nobody WHERE { ?x ?y ?z }");
  CHECK(cli({"run", "--data", kExample, "--query", bad_proj}).code == kExitUser);

  CHECK(cli({"run", "--data", kExample, "--query", kQuery, "--semiring", "bool", "--trust", "t3=maybe"}).code ==
        kExitUser);
  CHECK(cli({"run", "--data", kExample, "--query", kQuery, "--semiring", "real"}).code == kExitUser);
  CHECK(cli({"run", "--data", kExample}).code == kExitUser);
  CHECK(cli({"frobnicate"}).code == kExitUser);
  CHECK(cli({"--help"}).code == kExitOk);
}

TEST_CASE("check subcommand") {
  Run ok = cli({"check", "--data", kExample, "--query", kQuery});
  CHECK(ok.code == kExitOk);
  CHECK(ok.out ==
        "?who\t?acc\t?home\tra\tref\n"
        "<http://people/david>\t<http://bank>\t<http://bank/yourmoney>\t1\t1\n"
        "<http://people/felix>\t<http://games>\t\t1\t1\n"
        "ok\n");

  // A deliberately broken translator must be caught.
  CliHooks broken;
  broken.translator = [](const Query& q) {
    RAPtr e = translate_query(q);
    return ra_union(e, e);
  };
  Run bad = cli({"check", "--data", kExample, "--query", kQuery}, broken);
  CHECK(bad.code == kExitUser);
  CHECK(occurrences(bad.out, "MISMATCH") == 2);
  CHECK(bad.out.substr(bad.out.size() - 9) == "mismatch\n");
}

TEST_CASE("translate subcommand") {
  Run r = cli({"translate", "--query", kQuery});
  CHECK(r.code == kExitOk);
  CHECK(r.out.rfind("Project [?who, ?acc, ?home]\n", 0) == 0);
  CHECK(occurrences(r.out, "Diff\n") == 1);
  CHECK(occurrences(r.out, "DupElim\n") == 1);
  CHECK(occurrences(r.out, "Graphs\n") == 1);
}

TEST_CASE("parse subcommand") {
  Run r = cli({"parse", "--query", kQuery});
  CHECK(r.code == kExitOk);
  CHECK(r.out ==
        "(select ?who ?acc ?home\n"
        "  (optional\n"
        "    (triple ?who <http://xmlns.com/foaf/0.1/account> ?acc)\n"
        "    (triple ?acc <http://xmlns.com/foaf/0.1/accountServiceHomepage> ?home)))\n");
}
