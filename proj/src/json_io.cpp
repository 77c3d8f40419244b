#include "pbisim/json_io.hpp"

#include "pbisim/parser.hpp"

#include "json.hpp"

namespace pbisim {

using nlohmann::json;

namespace {

json named(const NamedSignature& s) {
  json o = json::object();
  for (auto& [k, v] : s) o[k] = v.fraction();
  return o;
}

json subst_json(const Substitution& s) {
  json o = json::object();
  for (auto& [k, v] : s.nd) o[k] = v.str();
  for (auto& [k, v] : s.p) o[k] = v.str();
  if (s.alpha) o["alpha"] = s.alpha->name();
  for (auto& [k, v] : s.num) o[k] = v.fraction();
  return o;
}

Substitution subst_from(const json& o) {
  Substitution s;
  for (auto& [k, v] : o.items()) {
    const std::string text = v.get<std::string>();
    if (k == "alpha") {
      s.alpha = Action(text);
    } else if (k == "r" || k == "s") {
      s.num.emplace(k, Rational::parse(text));
    } else if (k == "E" || k == "F" || k == "G") {
      s.nd.emplace(k, parse_nd(text));
    } else {
      s.p.emplace(k, parse_p(text));
    }
  }
  return s;
}

Term parse_term(const std::string& text) {
  auto v = parse_any(text);
  if (auto* e = std::get_if<NdTerm>(&v)) return *e;
  return std::get<PTerm>(v);
}

}  // namespace

std::string verdict_json(const Verdict& v) {
  json o;
  o["schema_version"] = kSchemaVersion;
  o["relation"] = v.relation;
  o["equivalent"] = v.equivalent;
  if (v.witness) {
    o["witness"] = {{"action_path", v.witness->action_path},
                    {"left", named(v.witness->left)},
                    {"right", named(v.witness->right)}};
  }
  return o.dump();
}

std::vector<std::string> trace_json_lines(const ProofTrace& t) {
  std::vector<std::string> out;
  Term cur = t.start;
  std::size_t i = 0;
  for (const auto& s : t.steps) {
    Term next = apply_axiom(cur, s, false);
    json o;
    o["schema_version"] = kSchemaVersion;
    o["index"] = i++;
    o["rule"] = axiom_name(s.axiom);
    o["direction"] = s.direction == Direction::LR ? "lr" : "rl";
    o["position"] = s.position;
    o["subst"] = subst_json(s.subst);
    o["before"] = cur.str();
    o["after"] = next.str();
    if (s.witness) o["witness"] = *s.witness;
    out.push_back(o.dump());
    cur = next;
  }
  return out;
}

ProofTrace trace_from_json_lines(const std::vector<std::string>& lines) {
  if (lines.empty()) throw std::invalid_argument("empty trace");
  std::vector<RewriteStep> steps;
  std::optional<Term> start, end;
  for (const auto& line : lines) {
    json o = json::parse(line);
    auto id = axiom_from_name(o.at("rule").get<std::string>());
    if (!id) throw std::invalid_argument("unknown rule " + o.at("rule").dump());
    RewriteStep s;
    s.axiom = *id;
    s.direction = o.at("direction").get<std::string>() == "lr" ? Direction::LR : Direction::RL;
    s.position = o.at("position").get<Position>();
    s.subst = subst_from(o.at("subst"));
    if (o.contains("witness")) s.witness = o["witness"].get<std::string>();
    if (!start) start = parse_term(o.at("before").get<std::string>());
    end = parse_term(o.at("after").get<std::string>());
    steps.push_back(std::move(s));
  }
  return ProofTrace{*start, std::move(steps), *end};
}

std::string report_json(const Report& r) {
  json o;
  o["schema_version"] = kSchemaVersion;
  o["suite"] = r.suite;
  o["trials"] = r.trials;
  o["passed"] = r.passed;
  o["vacuous"] = r.skipped;
  json fs = json::array();
  for (auto& f : r.failures)
    fs.push_back({{"seed", f.seed}, {"input_terms", f.input_terms}, {"expected", f.expected}, {"got", f.got}});
  o["failures"] = fs;
  json c = json::object();
  for (auto& [k, v] : r.counts) c[k] = v;
  o["counts"] = c;
  return o.dump();
}

}  // namespace pbisim
