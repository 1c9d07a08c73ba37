#pragma once

#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pveq/config.hpp"

namespace pveq {

/// Bad input discovered while executing a task (exit status 2).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TaskResult {
  std::size_t index = 0;
  Task task;
  bool assertion = false;
  std::string status;  ///< Holds | Fails | ConsistentUpToSampling | ok | NotAsserted | Discrepancy
  Json result;

  Json to_json() const {
    return {{"index", index}, {"task", task.str()}, {"assert", assertion}, {"status", status}, {"result", result}};
  }
};

struct RunReport {
  std::string config_text;
  std::vector<TaskResult> tasks;
  int exit_status = 0;

  Json to_json() const {
    Json t = Json::array();
    for (const auto& r : tasks) t.push_back(r.to_json());
    return {{"config", config_text}, {"tasks", t}, {"exit_status", exit_status}};
  }

  std::string to_text() const {
    std::ostringstream os;
    for (const auto& r : tasks) {
      os << "task " << r.index << ": " << r.task.str() << "\n";
      os << "  status: " << r.status << "\n";
      os << "  result: " << r.result.dump() << "\n";
    }
    os << "exit: " << exit_status << "\n";
    return os.str();
  }
};

namespace detail {

inline const ConeSpec& need_cone(const ProblemConfig& c) {
  if (!c.cone) throw InputError("task needs a cone declaration");
  return *c.cone;
}

inline const BoxDomain& need_domain(const ProblemConfig& c) {
  if (c.domain) return *c.domain;
  if (!c.maps.empty()) return c.maps.front().map.domain();
  throw InputError("task needs a domain declaration");
}

inline const PiecewiseMap& need_map(const ProblemConfig& c, const Task& t, const std::string& key) {
  auto name = t.get(key);
  if (!name) throw InputError("task " + t.kind + " needs '" + key + "'");
  const MapDecl* m = c.find_map(*name);
  if (!m) throw InputError("unknown map '" + *name + "'");
  return m->map;
}

inline RationalVec need_point(const Task& t, const std::string& key) {
  auto v = t.get(key);
  if (!v) throw InputError("task " + t.kind + " needs '" + key + "'");
  return cfg::parse_point(*v);
}

/// The unary map a semicontinuity task talks about.
inline PiecewiseMap semicont_map(const ProblemConfig& c, const Task& t) {
  const PiecewiseMap& m = need_map(c, t, "map");
  if (m.is_unary()) return m;
  if (!t.has("y")) throw InputError("bifunction semicontinuity needs y=");
  const RationalVec y = need_point(t, "y");
  return t.get("fix").value_or("second") == "first" ? fix_first(m, y) : fix_second(m, y);
}

inline std::optional<ConditionWitness> task_witness(const Task& t) {
  static const char* keys[] = {"xnet", "unet", "ynet", "vnet", "znet", "wnet"};
  bool any = t.has("w_source");
  for (auto k : keys) any = any || t.has(k);
  if (!any) return std::nullopt;
  ConditionWitness w;
  auto seq = [&](const char* k, std::optional<SequenceSpec>& out) {
    if (auto v = t.get(k)) out = cfg::parse_sequence(*v);
  };
  seq("xnet", w.x);
  seq("unet", w.u);
  seq("ynet", w.y);
  seq("vnet", w.v);
  seq("znet", w.z);
  seq("wnet", w.w);
  const std::string src = t.get("w_source").value_or("net");
  if (src == "g(x0,z)") w.w_source = ConditionWitness::WSource::FromZ;
  if (src == "terms") w.w_source = ConditionWitness::WSource::FromTerms;
  return w;
}

inline Json cone_validation_json(const ConeValidation& v) {
  Json j{{"valid", v.valid}, {"pointed", v.pointed}, {"interior_nonempty", v.interior_nonempty}, {"rank", v.rank},
         {"message", v.message}};
  if (v.witness) j["witness"] = to_json(*v.witness);
  return j;
}

}  // namespace detail

inline TaskResult run_task(const ProblemConfig& c, const Task& t, std::size_t index) {
  TaskResult r{index, t, t.get("assert").value_or("no") == "yes", "ok", Json::object()};
  const SamplingBudget& b = c.budget;
  auto set_verdict = [&](const Verdict& v) {
    r.status = to_string(v.status);
    r.result = v.to_json();
  };
  if (t.kind == "validate-cone") {
    const auto v = cone_validate(detail::need_cone(c));
    r.status = v.valid ? "Holds" : "Fails";
    r.result = detail::cone_validation_json(v);
  } else if (t.kind == "eval") {
    const PiecewiseMap& m = detail::need_map(c, t, "map");
    const RationalVec x = detail::need_point(t, "x");
    RationalVec v = m.is_unary() ? m.eval(x) : m.eval(x, detail::need_point(t, "y"));
    r.result = {{"value", to_json(v)}};
    if (c.cone) {
      const ConeSpec& k = *c.cone;
      r.result["in_C"] = cone_contains(k, v);
      r.result["in_int_C"] = cone_interior_contains(k, v);
      r.result["in_neg_int_C"] = cone_interior_contains(k, -v);
    }
  } else if (t.kind == "semicont") {
    const ConeSpec& k = detail::need_cone(c);
    const PiecewiseMap h = detail::semicont_map(c, t);
    const RationalVec x0 = detail::need_point(t, "x0");
    const std::string notion = *t.get("notion");
    std::vector<SequenceSpec> extra;
    if (auto s = t.get("seq")) extra.push_back(cfg::parse_sequence(*s));
    std::vector<Verdict> vs;
    if (notion == "ausc" || notion == "all") {
      if (!extra.empty()) vs.push_back(ausc_along(h, x0, extra.front(), k, b));
      vs.push_back(ausc_check(h, x0, k, b));
    }
    if (notion == "cusc" || notion == "all") vs.push_back(cusc_check(h, x0, k, b));
    if (notion == "qusc" || notion == "all") vs.push_back(qusc_check(h, x0, k, b));
    if (notion == "wusc" || notion == "all") vs.push_back(wusc_check(h, x0, k, b, extra));
    Json arr = Json::array();
    for (const auto& v : vs) arr.push_back(v.to_json());
    r.result = {{"verdicts", arr}};
    r.status = vs.size() == 1 ? to_string(vs.front().status) : "ok";
    if (std::any_of(vs.begin(), vs.end(), [](const Verdict& v) { return v.fails(); }) && vs.size() > 1)
      r.status = "Fails";
  } else if (t.kind == "levelset") {
    const ConeSpec& k = detail::need_cone(c);
    const PiecewiseMap& g = detail::need_map(c, t, "map");
    const RationalVec y = detail::need_point(t, "y");
    const BoxDomain& d = g.domain();
    r.result = {{"level_set", level_set(g, y, k, d).to_json()}};
    if (t.get("probe").value_or("yes") == "yes") {
      const Verdict v = closedness_probe(g, y, k, d, b);
      r.result["probe"] = v.to_json();
      r.status = to_string(v.status);
    }
  } else if (t.kind == "solve") {
    const ConeSpec& k = detail::need_cone(c);
    const PiecewiseMap& g = detail::need_map(c, t, "map");
    const SolutionReport rep = t.has("f") ? solve_perturbed(detail::need_map(c, t, "f"), g, g.domain(), k)
                                          : solve_dual(g, g.domain(), k);
    r.result = rep.to_json();
    r.status = rep.solutions.empty() ? "Fails" : "Holds";
  } else if (t.kind == "check-condition") {
    const ConeSpec& k = detail::need_cone(c);
    const ConditionId id = condition_from_string(*t.get("id"));
    const ConditionResult cr =
        check_condition(id, detail::need_map(c, t, "f"), detail::need_map(c, t, "g"), detail::need_point(t, "x0"),
                        detail::need_point(t, "y"), k, detail::task_witness(t), b);
    r.result = cr.to_json();
    r.status = to_string(cr.verdict.status);
  } else if (t.kind == "coercivity") {
    const PiecewiseMap& h = detail::need_map(c, t, "map");
    set_verdict(coercivity_check(h, h.domain(), cfg::parse_box(*t.get("k0"), h.domain()), detail::need_cone(c)));
  } else if (t.kind == "probe") {
    const PiecewiseMap& g = detail::need_map(c, t, "map");
    const BoxDomain k0 = t.has("k0") ? cfg::parse_box(*t.get("k0"), g.domain()) : g.domain();
    const ExistenceTrace tr = existence_probe(g.with_domain(k0), k0, detail::need_cone(c), b);
    r.result = tr.to_json();
    r.status = tr.outcome;
  } else if (t.kind == "diagonal") {
    const PiecewiseMap& h = detail::need_map(c, t, "map");
    set_verdict(diagonal_check(h, h.domain(), detail::need_cone(c),
                               *t.get("mode") == "in-cone" ? DiagonalMode::InCone : DiagonalMode::NotNegInterior));
  } else if (t.kind == "segment") {
    const PiecewiseMap& f = detail::need_map(c, t, "f");
    set_verdict(segment_corollary_check(f, detail::need_map(c, t, "g"), detail::need_point(t, "x0"),
                                        detail::need_cone(c), f.domain(), cfg::parse_rats(*t.get("t"))));
  } else if (t.kind == "transfer") {
    const PiecewiseMap& f = detail::need_map(c, t, "f");
    const RationalVec x0 = detail::need_point(t, "x0");
    const WitnessProvider wp = t.get("witness").value_or("search") == "trivial" ? trivial_b1_witness(x0) : WitnessProvider{};
    const TransferReport tr = transfer_check(f, detail::need_map(c, t, "g"), x0, detail::need_cone(c), f.domain(),
                                             condition_from_string(*t.get("id")), wp, b);
    r.result = tr.to_json();
    r.status = !tr.discrepancy.empty() ? "Discrepancy" : (tr.asserted ? "Holds" : "NotAsserted");
  } else {
    throw InputError("unknown task kind '" + t.kind + "'");
  }
  return r;
}

/// Runs every task in order. Exit 1 when an assertion-mode task Fails or a
/// transfer discrepancy shows up.
inline RunReport run_config(const ProblemConfig& c) {
  RunReport rep;
  rep.config_text = serialize_config(c);
  for (std::size_t i = 0; i < c.tasks.size(); ++i) {
    TaskResult r;
    try {
      r = run_task(c, c.tasks[i], i + 1);
    } catch (const InputError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw InputError("task " + std::to_string(i + 1) + " (line " + std::to_string(c.tasks[i].line) + "): " + e.what());
    } catch (const std::runtime_error& e) {
      throw InputError("task " + std::to_string(i + 1) + " (line " + std::to_string(c.tasks[i].line) + "): " + e.what());
    }
    if ((r.assertion && r.status == "Fails") || r.status == "Discrepancy") rep.exit_status = 1;
    rep.tasks.push_back(std::move(r));
  }
  return rep;
}

// ---- verify -------------------------------------------------------------------

struct VerifyOutcome {
  bool ok = true;
  std::size_t replayed = 0;
  std::vector<std::string> messages;

  void record(const std::string& where, const ReplayResult& r) {
    ++replayed;
    if (!r.ok) {
      ok = false;
      std::string m = where + ": " + r.message;
      if (r.failing_index) m += " (first failing index " + std::to_string(*r.failing_index) + ")";
      messages.push_back(m);
    }
  }
};

namespace detail {

inline void replay_semicont_verdict(const Json& v, const PiecewiseMap& h, const ConeSpec& c, const SamplingBudget& b,
                                    const std::string& where, VerifyOutcome& out) {
  const Json& cert = v.at("certificate");
  const std::string kind = cert.value("kind", std::string{});
  if (kind == "ausc_witness" || kind == "wusc_witness") {
    out.record(where, verify_ausc_witness(h, vec_from_json(cert.at("x0")), SequenceSpec::from_json(cert.at("sequence")),
                                          WitnessSpec::from_json(cert.at("witness")), c, b));
  } else if (kind == "ausc_infeasible") {
    out.record(where, verify_ausc_infeasible(h, cert, c));
  } else if (kind == "ausc_all") {
    for (const auto& p : cert.at("per_sequence")) replay_semicont_verdict(p, h, c, b, where, out);
  } else if (kind == "wusc_bound") {
    out.record(where, verify_wusc_bound(h, cert, c));
  } else if (kind == "cusc_refutation" || kind == "qusc_refutation") {
    out.record(where, verify_neighbourhood_refutation(h, cert, c));
  }
}

inline SolutionReport solution_report_from_json(const Json& j, const BoxDomain& d) {
  SolutionReport r{j.at("problem").get<std::string>(), d, {}, {}};
  for (const auto& s : j.at("solutions")) r.solutions.push_back(vec_from_json(s));
  for (const auto& v : j.at("violators")) r.violators.emplace_back(vec_from_json(v.at("x")), vec_from_json(v.at("y")));
  return r;
}

inline void replay_condition(const Json& res, ConditionId id, const PiecewiseMap& f, const PiecewiseMap& g,
                             const RationalVec& x0, const RationalVec& y, const ConeSpec& c, const SamplingBudget& b,
                             const std::string& where, VerifyOutcome& out) {
  const Json& mem = res.at("membership").at("certificate");
  const std::string kind = mem.value("kind", std::string{});
  if (kind == "condition_membership") {
    const Verdict v = verify_condition_membership(id, f, g, x0, y, c, ConditionWitness::from_json(mem.at("witness")), b);
    ReplayResult rr;
    if (!v.holds()) {
      rr = ReplayResult::fail("membership does not replay");
      if (v.certificate.contains("index")) rr.failing_index = v.certificate.at("index").get<long>();
    }
    out.record(where + " membership", rr);
  } else if (kind == "condition_impossible" || kind == "condition_impossible_w") {
    const Verdict v = search_condition(id, f, g, x0, y, c, b);
    out.record(where + " impossibility",
               v.to_json() == res.at("membership") ? ReplayResult{} : ReplayResult::fail("impossibility certificate differs"));
  }
  const auto reqs = condition_template(id).ausc;
  const Json& subs = res.at("subchecks");
  for (std::size_t i = 0; i < reqs.size() && i < subs.size(); ++i) {
    const PiecewiseMap& h = reqs[i].map == 'f' ? f : g;
    const bool at_x0 = reqs[i].slice == Slice::FirstArgAtX0;
    replay_semicont_verdict(subs[i], at_x0 ? fix_second(h, y) : fix_first(h, x0), c, b, where + " subcheck", out);
  }
}

}  // namespace detail

inline VerifyOutcome verify_report(const Json& report) {
  VerifyOutcome out;
  if (!report.contains("config") || !report.contains("tasks")) throw ParseError("report lacks config or tasks");
  const ProblemConfig c = parse_config(report.at("config").get<std::string>());
  for (const auto& tj : report.at("tasks")) {
    const std::size_t idx = tj.at("index").get<std::size_t>();
    if (idx == 0 || idx > c.tasks.size()) throw ParseError("task index out of range");
    const Task& t = c.tasks[idx - 1];
    const Json& res = tj.at("result");
    const std::string where = "task " + std::to_string(idx);
    const SamplingBudget& b = c.budget;
    if (t.kind == "semicont") {
      const PiecewiseMap h = detail::semicont_map(c, t);
      for (const auto& v : res.at("verdicts")) detail::replay_semicont_verdict(v, h, *c.cone, b, where, out);
    } else if (t.kind == "levelset") {
      const PiecewiseMap& g = detail::need_map(c, t, "map");
      const RationalVec y = detail::need_point(t, "y");
      out.record(where + " level set", level_set(g, y, *c.cone, g.domain()).to_json() == res.at("level_set")
                                            ? ReplayResult{}
                                            : ReplayResult::fail("level set does not regenerate"));
      if (res.contains("probe") && res.at("probe").at("certificate").value("kind", "") == "closedness_refutation")
        out.record(where + " probe",
                   verify_closedness_refutation(g, res.at("probe").at("certificate"), *c.cone, g.domain(), b));
    } else if (t.kind == "solve") {
      const PiecewiseMap& g = detail::need_map(c, t, "map");
      const PiecewiseMap h = t.has("f") ? sum_maps(detail::need_map(c, t, "f"), g) : g;
      out.record(where, recheck_solutions(h, detail::solution_report_from_json(res, g.domain()), *c.cone)
                            ? ReplayResult{}
                            : ReplayResult::fail("solution report does not re-verify"));
    } else if (t.kind == "check-condition") {
      detail::replay_condition(res, condition_from_string(*t.get("id")), detail::need_map(c, t, "f"),
                               detail::need_map(c, t, "g"), detail::need_point(t, "x0"), detail::need_point(t, "y"),
                               *c.cone, b, where, out);
    } else if (t.kind == "coercivity") {
      if (res.at("certificate").value("kind", "") == "coercivity_assignment") {
        const PiecewiseMap& h = detail::need_map(c, t, "map");
        out.record(where, verify_coercivity(h, res.at("certificate"), h.domain(),
                                            cfg::parse_box(*t.get("k0"), h.domain()), *c.cone));
      }
    } else if (t.kind == "probe") {
      const PiecewiseMap& g = detail::need_map(c, t, "map");
      const BoxDomain k0 = t.has("k0") ? cfg::parse_box(*t.get("k0"), g.domain()) : g.domain();
      out.record(where, verify_existence_trace(g.with_domain(k0), k0, *c.cone, res));
    } else if (t.kind == "transfer") {
      const PiecewiseMap& f = detail::need_map(c, t, "f");
      const PiecewiseMap& g = detail::need_map(c, t, "g");
      const RationalVec x0 = detail::need_point(t, "x0");
      const ConditionId id = condition_from_string(*t.get("id"));
      for (const auto& e : res.at("per_y"))
        detail::replay_condition(e.at("result"), id, f, g, x0, vec_from_json(e.at("y")), *c.cone, b, where, out);
    } else {
      const TaskResult again = run_task(c, t, idx);
      out.record(where + " rerun", again.result == res ? ReplayResult{} : ReplayResult::fail("result differs on rerun"));
    }
  }
  if (out.replayed == 0) out.messages.push_back("nothing to replay");
  return out;
}

}  // namespace pveq
