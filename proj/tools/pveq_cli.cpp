#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pveq/paper_suite.hpp"
#include "pveq/run.hpp"

namespace {

struct Options {
  std::string config_path;
  std::string cone;
  std::vector<std::string> uses;
  std::vector<std::string> params;
  bool json = false;
  int budget = 0;
  int grid = 0;
  long seed = 0;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw pveq::InputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Config from --config plus command-line overrides; tasks dropped when a
/// single-task subcommand supplies its own.
pveq::ProblemConfig load_config(const Options& o, const std::string& task_kind) {
  pveq::ProblemConfig c = pveq::parse_config(o.config_path.empty() ? std::string{} : read_file(o.config_path));
  std::vector<pveq::Task> tasks = task_kind.empty() ? c.tasks : std::vector<pveq::Task>{};
  c.tasks.clear();
  if (!o.cone.empty()) {
    const pveq::ProblemConfig k = pveq::parse_config("cone " + o.cone + "\n");
    c.cone = k.cone;
    c.cone_text = k.cone_text;
  }
  std::string uses;
  for (const auto& u : o.uses) {
    const auto eq = u.find('=');
    if (eq == std::string::npos) throw pveq::InputError("--use expects NAME=CATALOG_ID, got '" + u + "'");
    uses += "use " + u.substr(0, eq) + " " + u.substr(eq + 1) + "\n";
  }
  if (o.grid > 0) {
    if (!c.domain) {
      if (c.maps.empty() && uses.empty()) throw pveq::InputError("--grid needs a domain or a map");
      c.domain = c.maps.empty() ? pveq::parse_config(uses).maps.front().map.domain() : c.maps.front().map.domain();
    }
    const pveq::BoxDomain& d = *c.domain;
    c.domain = pveq::BoxDomain(d.lower(), d.upper(), std::vector<std::uint32_t>(d.dim(), static_cast<std::uint32_t>(o.grid)));
  }
  if (o.budget > 0) {
    c.budget.tail_depth = static_cast<std::size_t>(o.budget);
    c.budget_declared = true;
  }
  std::string text = pveq::serialize_config(c) + uses;
  for (const auto& t : tasks) text += "task " + t.str() + "\n";
  if (!task_kind.empty()) {
    text += "task " + task_kind;
    for (const auto& p : o.params) text += " " + p;
    text += "\n";
  }
  return pveq::parse_config(text);
}

void add_common(CLI::App* app, Options& o, bool with_params) {
  app->add_option("--config", o.config_path, "problem config file");
  app->add_option("--cone", o.cone, "cone declaration, e.g. \"orthant 2\" or icecream2");
  app->add_option("--use", o.uses, "declare a catalog map, NAME=CATALOG_ID");
  app->add_flag("--json", o.json, "emit JSON");
  app->add_option("--budget", o.budget, "tail depth override")->check(CLI::Range(1, 64));
  app->add_option("--grid", o.grid, "grid intervals per axis")->check(CLI::Range(1, 400));
  app->add_option("--seed", o.seed, "recorded in the report; sampling is a fixed lattice");
  if (with_params) app->add_option("params", o.params, "task parameters key=value");
}

int emit_run(const pveq::ProblemConfig& c, const Options& o) {
  const pveq::RunReport r = pveq::run_config(c);
  if (o.json) {
    pveq::Json j = r.to_json();
    j["seed"] = o.seed;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << r.to_text();
  }
  return r.exit_status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pveq: vector equilibrium problems over ordered spaces"};
  app.require_subcommand(1);
  Options o;
  const std::vector<std::string> task_verbs = {"validate-cone", "eval",       "semicont", "levelset",
                                               "solve",         "check-condition", "coercivity", "probe",
                                               "diagonal",      "segment",    "transfer"};
  std::vector<CLI::App*> task_cmds;
  for (const auto& v : task_verbs) {
    auto* sc = app.add_subcommand(v, "run a single " + v + " task");
    add_common(sc, o, true);
    task_cmds.push_back(sc);
  }
  auto* run = app.add_subcommand("run", "run every task in the config");
  add_common(run, o, false);
  auto* suite = app.add_subcommand("paper-suite", "reproduce the worked examples");
  suite->add_flag("--json", o.json, "emit JSON");
  suite->add_option("--budget", o.budget, "tail depth override")->check(CLI::Range(1, 64));
  suite->add_option("--seed", o.seed, "accepted for uniformity");
  std::string report_path;
  auto* verify = app.add_subcommand("verify", "replay the certificates of a JSON report");
  verify->add_option("report", report_path, "report produced with --json")->required();
  verify->add_flag("--json", o.json, "emit JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    for (std::size_t i = 0; i < task_cmds.size(); ++i)
      if (task_cmds[i]->parsed()) return emit_run(load_config(o, task_verbs[i]), o);
    if (run->parsed()) return emit_run(load_config(o, ""), o);
    if (suite->parsed()) {
      pveq::SamplingBudget b;
      if (o.budget > 0) b.tail_depth = static_cast<std::size_t>(o.budget);
      const pveq::SuiteReport r = pveq::run_paper_suite(b);
      if (o.json) std::cout << r.to_json().dump(2) << "\n";
      else std::cout << r.to_text();
      return r.exit_status();
    }
    if (verify->parsed()) {
      pveq::Json j;
      try {
        j = pveq::Json::parse(read_file(report_path));
      } catch (const pveq::Json::exception& e) {
        throw pveq::InputError(std::string("malformed report: ") + e.what());
      }
      const pveq::VerifyOutcome v = pveq::verify_report(j);
      if (o.json) {
        std::cout << pveq::Json{{"ok", v.ok}, {"replayed", v.replayed}, {"messages", v.messages}}.dump(2) << "\n";
      } else {
        for (const auto& m : v.messages) std::cout << m << "\n";
        std::cout << (v.ok ? "verified " : "FAILED ") << v.replayed << " certificate(s)\n";
      }
      return v.ok ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
