#include "pbisim/dot.hpp"

#include "pbisim/semantics.hpp"

#include <cstdio>
#include <set>
#include <sstream>

namespace pbisim {

std::string stable_id(const std::string& canonical) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[24];
  std::snprintf(buf, sizeof buf, "n%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

// Node declarations go to `os`, edges to `edges`.
struct Writer {
  std::ostringstream os, edges;
  std::set<std::string> nodes;

  std::string state(const NdTerm& e) {
    std::string id = stable_id(e.str());
    if (nodes.insert(id).second) os << "  " << id << " [shape=circle, label=\"" << escape(e.str()) << "\"];\n";
    return id;
  }

  // A non-Dirac distribution gets its own split point.
  std::string dist(const Distribution& mu) {
    if (mu.is_dirac()) return state(mu.entries().begin()->first);
    std::string id = stable_id(mu.str());
    if (nodes.insert(id).second) {
      os << "  " << id << " [shape=point, style=filled, width=0.1];\n";
      for (auto& [e, p] : mu.entries())
        edges << "  " << id << " -> " << state(e) << " [style=dashed, label=\"" << p.fraction() << "\"];\n";
    }
    return id;
  }

  void explore(const std::set<NdTerm>& states) {
    for (auto& e : states) {
      std::string from = state(e);
      for (auto& t : nd_transitions(e))
        edges << "  " << from << " -> " << dist(t.target) << " [label=\"" << t.action.name() << "\"];\n";
    }
  }
};

}  // namespace

std::string lts_dot(const PTerm& p) {
  Writer w;
  w.os << "digraph lts {\n  rankdir=LR;\n";
  Distribution mu = den(p);
  std::string root = w.dist(mu);
  w.os << "  init [shape=none, label=\"\"];\n";
  w.edges << "  init -> " << root << ";\n";
  w.explore(derivatives(p));
  w.os << w.edges.str() << "}\n";
  return w.os.str();
}

std::string lts_dot(const NdTerm& e) { return lts_dot(PTerm::dirac(e)); }

}  // namespace pbisim
