#include "pbisim/term.hpp"

#include <mutex>
#include <stdexcept>
#include <unordered_set>

namespace pbisim {
namespace detail {

struct Node {
  Tag tag;
  Action act;
  const Node* a = nullptr;
  const Node* b = nullptr;
  Rational w;
  std::size_t h = 0;
  std::uint64_t cplx = 0;
};

namespace {

struct NodeHash {
  std::size_t operator()(const Node* n) const { return n->h; }
};
struct NodeEq {
  bool operator()(const Node* x, const Node* y) const {
    return x->tag == y->tag && x->a == y->a && x->b == y->b && x->act == y->act && x->w == y->w;
  }
};

struct Table {
  std::mutex mu;
  std::unordered_set<const Node*, NodeHash, NodeEq> set;
};

Table& table() {
  static Table* t = new Table();
  return *t;
}

std::size_t mix(std::size_t h, std::size_t v) { return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)); }

const Node* intern(Node proto) {
  std::size_t h = static_cast<std::size_t>(proto.tag) * 0x100000001b3ULL;
  h = mix(h, std::hash<std::string>{}(proto.act.name()));
  if (proto.a) h = mix(h, proto.a->h);
  if (proto.b) h = mix(h, proto.b->h);
  if (proto.tag == Tag::PChoice) h = mix(h, proto.w.hash());
  proto.h = h;
  switch (proto.tag) {
    case Tag::Zero: proto.cplx = 0; break;
    case Tag::Prefix: proto.cplx = proto.a->cplx + 1; break;
    case Tag::Sum: proto.cplx = proto.a->cplx + proto.b->cplx; break;
    case Tag::Dirac: proto.cplx = proto.a->cplx + 1; break;
    case Tag::PChoice: proto.cplx = proto.a->cplx + proto.b->cplx; break;
  }
  Table& t = table();
  std::lock_guard<std::mutex> lock(t.mu);
  auto it = t.set.find(&proto);
  if (it != t.set.end()) return *it;
  const Node* n = new Node(std::move(proto));
  t.set.insert(n);
  return n;
}

const Node* zero_node() {
  static const Node* z = intern(Node{Tag::Zero, Action(""), nullptr, nullptr, Rational(), 0, 0});
  return z;
}

bool needs_paren_left_sum(const Node* n) { return n->tag == Tag::Sum; }

void print(const Node* n, std::string& out) {
  switch (n->tag) {
    case Tag::Zero: out += '0'; break;
    case Tag::Prefix:
      out += n->act.name();
      out += '.';
      if (n->a->tag == Tag::Dirac) {
        print(n->a, out);
      } else {
        out += '(';
        print(n->a, out);
        out += ')';
      }
      break;
    case Tag::Sum:
      if (needs_paren_left_sum(n->a)) {
        out += '(';
        print(n->a, out);
        out += ')';
      } else {
        print(n->a, out);
      }
      out += " + ";
      print(n->b, out);
      break;
    case Tag::Dirac:
      out += "D(";
      print(n->a, out);
      out += ')';
      break;
    case Tag::PChoice:
      if (n->a->tag == Tag::PChoice) {
        out += '(';
        print(n->a, out);
        out += ')';
      } else {
        print(n->a, out);
      }
      out += " +[";
      out += n->w.str();
      out += "] ";
      print(n->b, out);
      break;
  }
}

}  // namespace
}  // namespace detail

using detail::Node;

std::strong_ordering compare_nodes(const Node* a, const Node* b) {
  if (a == b) return std::strong_ordering::equal;
  if (a->tag != b->tag) return a->tag <=> b->tag;
  switch (a->tag) {
    case Tag::Zero: return std::strong_ordering::equal;
    case Tag::Prefix: {
      auto c = a->act <=> b->act;
      if (c != 0) return c;
      return compare_nodes(a->a, b->a);
    }
    case Tag::Sum: {
      auto c = compare_nodes(a->a, b->a);
      if (c != 0) return c;
      return compare_nodes(a->b, b->b);
    }
    case Tag::Dirac: return compare_nodes(a->a, b->a);
    case Tag::PChoice: {
      auto c = compare_nodes(a->a, b->a);
      if (c != 0) return c;
      c = a->w <=> b->w;
      if (c != 0) return c;
      return compare_nodes(a->b, b->b);
    }
  }
  return std::strong_ordering::equal;
}

NdTerm::NdTerm() : n_(detail::zero_node()) {}
NdTerm NdTerm::zero() { return NdTerm(); }

NdTerm NdTerm::prefix(const Action& a, const PTerm& body) {
  return NdTerm(detail::intern(Node{Tag::Prefix, a, body.node(), nullptr, Rational(), 0, 0}));
}

NdTerm NdTerm::sum(const NdTerm& l, const NdTerm& r) {
  return NdTerm(detail::intern(Node{Tag::Sum, Action(""), l.node(), r.node(), Rational(), 0, 0}));
}

Tag NdTerm::tag() const { return n_->tag; }

const Action& NdTerm::action() const {
  if (n_->tag != Tag::Prefix) throw std::logic_error("action() on non-prefix");
  return n_->act;
}
PTerm NdTerm::body() const {
  if (n_->tag != Tag::Prefix) throw std::logic_error("body() on non-prefix");
  return PTerm(n_->a);
}
NdTerm NdTerm::left() const {
  if (n_->tag != Tag::Sum) throw std::logic_error("left() on non-sum");
  return NdTerm(n_->a);
}
NdTerm NdTerm::right() const {
  if (n_->tag != Tag::Sum) throw std::logic_error("right() on non-sum");
  return NdTerm(n_->b);
}
std::uint64_t NdTerm::complexity() const { return n_->cplx; }
std::size_t NdTerm::hash() const { return n_->h; }
std::string NdTerm::str() const {
  std::string s;
  detail::print(n_, s);
  return s;
}
std::strong_ordering operator<=>(const NdTerm& a, const NdTerm& b) { return compare_nodes(a.n_, b.n_); }

PTerm::PTerm() : n_(dirac(NdTerm()).n_) {}

PTerm PTerm::dirac(const NdTerm& e) {
  return PTerm(detail::intern(Node{Tag::Dirac, Action(""), e.node(), nullptr, Rational(), 0, 0}));
}

PTerm PTerm::choice(const PTerm& l, const Rational& r, const PTerm& rr) {
  if (r.sign() <= 0 || r >= Rational(1)) throw std::invalid_argument("choice weight " + r.str() + " not in (0,1)");
  return PTerm(detail::intern(Node{Tag::PChoice, Action(""), l.node(), rr.node(), r, 0, 0}));
}

Tag PTerm::tag() const { return n_->tag; }
NdTerm PTerm::inner() const {
  if (n_->tag != Tag::Dirac) throw std::logic_error("inner() on non-Dirac");
  return NdTerm(n_->a);
}
PTerm PTerm::left() const {
  if (n_->tag != Tag::PChoice) throw std::logic_error("left() on non-choice");
  return PTerm(n_->a);
}
PTerm PTerm::right() const {
  if (n_->tag != Tag::PChoice) throw std::logic_error("right() on non-choice");
  return PTerm(n_->b);
}
const Rational& PTerm::weight() const {
  if (n_->tag != Tag::PChoice) throw std::logic_error("weight() on non-choice");
  return n_->w;
}
std::uint64_t PTerm::complexity() const { return n_->cplx; }
std::size_t PTerm::hash() const { return n_->h; }
std::string PTerm::str() const {
  std::string s;
  detail::print(n_, s);
  return s;
}
std::strong_ordering operator<=>(const PTerm& a, const PTerm& b) { return compare_nodes(a.n_, b.n_); }

bool Term::is_nd() const { return n->tag == Tag::Zero || n->tag == Tag::Prefix || n->tag == Tag::Sum; }
std::string Term::str() const {
  std::string s;
  detail::print(n, s);
  return s;
}
std::uint64_t Term::complexity() const { return n->cplx; }

NdTerm sum_of(const std::vector<NdTerm>& xs) {
  if (xs.empty()) return NdTerm();
  NdTerm acc = xs.back();
  for (std::size_t i = xs.size() - 1; i-- > 0;) acc = NdTerm::sum(xs[i], acc);
  return acc;
}

static void collect(const NdTerm& e, std::vector<NdTerm>& out) {
  if (e.is_sum()) {
    collect(e.left(), out);
    collect(e.right(), out);
  } else {
    out.push_back(e);
  }
}

std::vector<NdTerm> summands(const NdTerm& e) {
  std::vector<NdTerm> out;
  collect(e, out);
  return out;
}

std::size_t interned_node_count() {
  auto& t = detail::table();
  std::lock_guard<std::mutex> lock(t.mu);
  return t.set.size();
}

}  // namespace pbisim
