#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "pveq/run.hpp"

using namespace pveq;

namespace {

std::string read(const std::string& name) {
  std::ifstream in(std::string(PVEQ_CFG_DIR) + "/" + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> good_configs() {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(PVEQ_CFG_DIR))
    if (e.path().extension() == ".cfg" && e.path().filename() != "bad_syntax.cfg") out.push_back(e.path().filename());
  std::sort(out.begin(), out.end());
  return out;
}

/// "LINE:COL" of the parse error raised by text.
std::string error_position(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ParseError& e) {
    return std::to_string(e.line()) + ":" + std::to_string(e.column());
  }
  return "none";
}

}  // namespace

TEST(Config, RoundTripsEveryExample) {
  const auto names = good_configs();
  ASSERT_GE(names.size(), 8u);
  for (const auto& n : names) {
    const ProblemConfig c = parse_config(read(n));
    const std::string once = serialize_config(c);
    const ProblemConfig again = parse_config(once);
    EXPECT_TRUE(c == again) << n;
    EXPECT_EQ(serialize_config(again), once) << n;
  }
}

TEST(Config, CanonicalisesValues) {
  const ProblemConfig c = parse_config("cone orthant 2\nuse G EX_QUSC_NOT_AUSC\ntask eval map=G x=2/4\n");
  EXPECT_EQ(c.tasks.front().get("x"), "1/2");
}

TEST(Config, ErrorPositions) {
  EXPECT_EQ(error_position("cone orthant 2\nbogus thing\n"), "2:1");
  EXPECT_EQ(error_position("cone orthant 2\nuse G EX_NOPE\n"), "2:7");
  EXPECT_EQ(error_position("cone orthant 2\nuse G EX_QUSC_NOT_AUSC\ntask eval map=Q x=0\n"), "3:11");
  EXPECT_EQ(error_position("cone orthant 2\nuse G EX_QUSC_NOT_AUSC\ntask eval map=G x=1/0\n"), "3:17");
  EXPECT_EQ(error_position("domain -1:1:0\n"), "1:8");
  EXPECT_EQ(error_position("cone orthant 2\ncone orthant 2\n"), "2:1");
  EXPECT_EQ(error_position(read("bad_syntax.cfg")).substr(0, 2), "3:");
  EXPECT_EQ(error_position("task frobnicate\n"), "1:6");
}

TEST(Config, ErrorMessageCarriesPosition) {
  try {
    parse_config("cone orthant 2\nuse G EX_QUSC_NOT_AUSC\ntask eval map=Q x=0\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("3:11: ", 0), 0u) << e.what();
  }
}

TEST(Config, InlineMapErrorsPointIntoTheBlock) {
  const std::string text =
      "domain -1:1:8\nmap H unary codomain 1\npiece\nwhen x1 << 0\nvalue x1\nend\nendmap\n";
  EXPECT_EQ(error_position(text), "4:9");
}

TEST(Run, EmptyConfig) {
  const RunReport r = run_config(parse_config(read("empty.cfg")));
  EXPECT_EQ(r.exit_status, 0);
  EXPECT_TRUE(r.tasks.empty());
  EXPECT_EQ(r.to_text(), "exit: 0\n");
}

TEST(Run, ExitStatusContract) {
  EXPECT_EQ(run_config(parse_config(read("qusc_not_ausc.cfg"))).exit_status, 1);
  EXPECT_EQ(run_config(parse_config(read("consistent_only.cfg"))).exit_status, 0);
  EXPECT_EQ(run_config(parse_config(read("square_gap.cfg"))).exit_status, 0);
  // a failing verdict without assert=yes does not change the exit status
  const std::string unasserted = "cone orthant 2\nuse G EX_QUSC_NOT_AUSC\ntask semicont map=G x0=0 notion=ausc\n";
  EXPECT_EQ(run_config(parse_config(unasserted)).exit_status, 0);
  EXPECT_THROW(run_config(parse_config("use G EX_QUSC_NOT_AUSC\ntask semicont map=G x0=0 notion=ausc\n")), InputError);
}

TEST(Run, Deterministic) {
  for (const auto& n : good_configs()) {
    const ProblemConfig c = parse_config(read(n));
    EXPECT_EQ(run_config(c).to_json().dump(), run_config(c).to_json().dump()) << n;
    EXPECT_EQ(run_config(c).to_text(), run_config(parse_config(serialize_config(c))).to_text()) << n;
  }
}

TEST(Verify, ReplaysEveryExample) {
  for (const auto& n : good_configs()) {
    const Json report = run_config(parse_config(read(n))).to_json();
    const VerifyOutcome v = verify_report(report);
    EXPECT_TRUE(v.ok) << n << ": " << (v.messages.empty() ? "" : v.messages.front());
  }
}

TEST(Verify, TamperedWitnessFails) {
  Json report = run_config(parse_config(read("icecream_table.cfg"))).to_json();
  Json& along = report["tasks"][0]["result"]["verdicts"][0];
  ASSERT_EQ(along["status"], "Holds");
  Json& w = along["certificate"]["witness"];
  w = WitnessSpec::of_sequence({Expr::x(), Expr::constant(0)}, RationalVec::parse({"1/2", "0"})).to_json();
  const VerifyOutcome v = verify_report(report);
  EXPECT_FALSE(v.ok);
  ASSERT_FALSE(v.messages.empty());
  EXPECT_NE(v.messages.front().find("first failing index"), std::string::npos) << v.messages.front();
}

TEST(Verify, TamperedSolutionFails) {
  Json report = run_config(parse_config(read("square_gap.cfg"))).to_json();
  bool changed = false;
  for (auto& t : report["tasks"]) {
    if (t["task"].get<std::string>().rfind("solve", 0) == 0) {
      t["result"]["solutions"].push_back(to_json(RationalVec::parse({"1"})));
      changed = true;
    }
  }
  ASSERT_TRUE(changed);
  EXPECT_FALSE(verify_report(report).ok);
}

TEST(Verify, ConsistentOnlyHasNothingToReplay) {
  const VerifyOutcome v = verify_report(run_config(parse_config(read("consistent_only.cfg"))).to_json());
  EXPECT_TRUE(v.ok);
  EXPECT_EQ(v.replayed, 0u);
  ASSERT_FALSE(v.messages.empty());
  EXPECT_NE(v.messages.front().find("nothing to replay"), std::string::npos);
}
