#include "provsparql/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "provsparql/error.hpp"
#include "provsparql/provenance.hpp"

namespace provsparql {

namespace {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CliConfig {
  std::string data_path;
  std::string query_path;
  std::string semiring = "free";
  std::string trust;
  bool trust_default = true;
  std::string format = "tsv";
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading " + path);
  return ss.str();
}

Dataset load_data(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return parse_nquads(in);
}

Query load_query(const std::string& path) { return parse_query(read_file(path)); }

TrustAssignment parse_trust(const std::string& text) {
  TrustAssignment ta;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 2 != item.size() ||
        (item[eq + 1] != '0' && item[eq + 1] != '1')) {
      throw std::invalid_argument("bad trust entry '" + item + "', expected id=0 or id=1");
    }
    ta[item.substr(0, eq)] = item[eq + 1] == '1';
  }
  return ta;
}

nlohmann::ordered_json bindings_json(const std::vector<std::string>& cols, const RowValues& values) {
  nlohmann::ordered_json b = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < cols.size(); ++i) {
    b[cols[i]] = values[i] ? nlohmann::ordered_json(*values[i]) : nlohmann::ordered_json(nullptr);
  }
  return b;
}

void tsv_header(std::ostream& out, const std::vector<std::string>& cols,
                std::initializer_list<const char*> extra) {
  bool first = true;
  for (const auto& c : cols) {
    out << (first ? "" : "\t") << '?' << c;
    first = false;
  }
  for (const char* e : extra) {
    out << (first ? "" : "\t") << e;
    first = false;
  }
  out << '\n';
}

void tsv_values(std::ostream& out, const RowValues& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << '\t';
    if (values[i]) out << *values[i];
  }
}

int cmd_run(const CliConfig& cfg, std::ostream& out) {
  const Dataset d = load_data(cfg.data_path);
  const Query q = load_query(cfg.query_path);
  const bool json = cfg.format == "json";
  const char* sep = "\t";
  if (cfg.semiring == "nat") {
    CountedResult r = run_counts(q, d);
    if (json) {
      nlohmann::ordered_json rows = nlohmann::ordered_json::array();
      for (const auto& row : r.rows) {
        rows.push_back({{"bindings", bindings_json(r.columns, row.values)}, {"count", row.count}});
      }
      out << nlohmann::ordered_json{{"vars", r.columns}, {"rows", rows}}.dump(2) << '\n';
      return kExitOk;
    }
    tsv_header(out, r.columns, {"count"});
    for (const auto& row : r.rows) {
      tsv_values(out, row.values);
      out << (row.values.empty() ? "" : sep) << row.count << '\n';
    }
    return kExitOk;
  }

  AnnotatedResult r = run_provenance(q, d);
  const bool with_trust = cfg.semiring == "bool";
  std::vector<bool> trust;
  if (with_trust) trust = apply_trust(r, parse_trust(cfg.trust), cfg.trust_default);

  if (json) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
      nlohmann::ordered_json row{{"bindings", bindings_json(r.columns, r.rows[i].values)},
                         {"provenance", render(r.rows[i].annotation)}};
      if (with_trust) row["trust"] = static_cast<bool>(trust[i]);
      rows.push_back(std::move(row));
    }
    out << nlohmann::ordered_json{{"vars", r.columns}, {"rows", rows}}.dump(2) << '\n';
    return kExitOk;
  }
  if (with_trust) {
    tsv_header(out, r.columns, {"provenance", "trust"});
  } else {
    tsv_header(out, r.columns, {"provenance"});
  }
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    tsv_values(out, r.rows[i].values);
    out << (r.rows[i].values.empty() ? "" : sep) << render(r.rows[i].annotation);
    if (with_trust) out << sep << (trust[i] ? "true" : "false");
    out << '\n';
  }
  return kExitOk;
}

int cmd_check(const CliConfig& cfg, std::ostream& out, const CliHooks& hooks) {
  const Dataset d = load_data(cfg.data_path);
  const Query q = load_query(cfg.query_path);
  CountCheckReport report = count_check(q, d, hooks.translator);
  tsv_header(out, report.columns, {"ra", "ref"});
  for (const auto& row : report.rows) {
    tsv_values(out, row.values);
    out << (row.values.empty() ? "" : "\t") << row.ra_count << '\t' << row.ref_count;
    if (row.ra_count != row.ref_count) out << "\tMISMATCH";
    out << '\n';
  }
  const bool ok = report.matches();
  out << (ok ? "ok" : "mismatch") << '\n';
  return ok ? kExitOk : kExitUser;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const CliHooks& hooks) {
  CLI::App app{"Provenance-annotated SPARQL evaluation through relational algebra", "provsparql"};
  app.require_subcommand(1);
  CliConfig cfg;

  auto* run = app.add_subcommand("run", "evaluate a query and print annotated solutions");
  run->add_option("--data", cfg.data_path, "N-Quads dataset")->required();
  run->add_option("--query", cfg.query_path, "query file")->required();
  run->add_option("--semiring", cfg.semiring, "free, bool or nat")
      ->check(CLI::IsMember({"free", "bool", "nat"}));
  run->add_option("--trust", cfg.trust, "comma-separated id=0|1 list (bool semiring)");
  run->add_option("--trust-default", cfg.trust_default, "trust for ids not listed (default 1)");
  run->add_option("--format", cfg.format, "tsv or json")->check(CLI::IsMember({"tsv", "json"}));

  auto* translate = app.add_subcommand("translate", "print the relational algebra expression");
  translate->add_option("--query", cfg.query_path, "query file")->required();

  auto* parse = app.add_subcommand("parse", "print the parsed graph pattern");
  parse->add_option("--query", cfg.query_path, "query file")->required();

  auto* check = app.add_subcommand("check", "compare bag evaluation with the reference evaluator");
  check->add_option("--data", cfg.data_path, "N-Quads dataset")->required();
  check->add_option("--query", cfg.query_path, "query file")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUser;
  }

  try {
    if (*run) return cmd_run(cfg, out);
    if (*check) return cmd_check(cfg, out, hooks);
    const Query q = load_query(cfg.query_path);
    if (*translate) {
      out << print_ra(*translate_query(q));
    } else {
      out << print_query(q);
    }
    return kExitOk;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUser;
  }
}

}  // namespace provsparql
