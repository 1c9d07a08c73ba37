#pragma once

#include <string>
#include <utility>

#include "json.hpp"
#include "pveq/rational.hpp"

namespace pveq {

using Json = nlohmann::ordered_json;

enum class Status { Holds, Fails, ConsistentUpToSampling };

inline std::string to_string(Status s) {
  switch (s) {
    case Status::Holds: return "Holds";
    case Status::Fails: return "Fails";
    case Status::ConsistentUpToSampling: return "ConsistentUpToSampling";
  }
  return "?";
}

inline Status status_from_string(const std::string& s) {
  if (s == "Holds") return Status::Holds;
  if (s == "Fails") return Status::Fails;
  if (s == "ConsistentUpToSampling") return Status::ConsistentUpToSampling;
  throw ParseError("unknown verdict status '" + s + "'");
}

/// Three-valued result. Holds and Fails carry a certificate whose "kind"
/// names the replay routine; ConsistentUpToSampling records the budget used.
struct Verdict {
  Status status = Status::ConsistentUpToSampling;
  std::string check;
  Json certificate = Json::object();
  std::string note;

  bool holds() const noexcept { return status == Status::Holds; }
  bool fails() const noexcept { return status == Status::Fails; }
  bool consistent() const noexcept { return status == Status::ConsistentUpToSampling; }

  static Verdict make(Status s, std::string check, Json cert = Json::object(), std::string note = {}) {
    return {s, std::move(check), std::move(cert), std::move(note)};
  }

  Json to_json() const {
    Json j;
    j["check"] = check;
    j["status"] = to_string(status);
    if (!note.empty()) j["note"] = note;
    j["certificate"] = certificate;
    return j;
  }

  static Verdict from_json(const Json& j) {
    Verdict v;
    v.check = j.at("check").get<std::string>();
    v.status = status_from_string(j.at("status").get<std::string>());
    v.note = j.value("note", std::string{});
    v.certificate = j.value("certificate", Json::object());
    return v;
  }
};

inline Json to_json(const Rational& q) { return q.get_str(); }

inline Json to_json(const RationalVec& v) {
  Json a = Json::array();
  for (const auto& c : v) a.push_back(c.get_str());
  return a;
}

inline Rational rational_from_json(const Json& j) {
  if (j.is_number_integer()) return Rational(j.get<long>());
  return parse_rational(j.get<std::string>());
}

inline RationalVec vec_from_json(const Json& j) {
  std::vector<Rational> c;
  for (const auto& e : j) c.push_back(rational_from_json(e));
  return RationalVec(std::move(c));
}

}  // namespace pveq
