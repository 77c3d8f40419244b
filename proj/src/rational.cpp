#include "pbisim/rational.hpp"

#include <cctype>
#include <functional>

namespace pbisim {

Rational::Rational(long n, long d) {
  if (d == 0) throw std::invalid_argument("zero denominator");
  v_ = mpq_class(n, d);
  v_.canonicalize();
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw std::domain_error("division by zero");
  v_ /= o.v_;
  return *this;
}

static bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

Rational Rational::parse(std::string_view text) {
  std::string_view s = text;
  bool neg = false;
  if (!s.empty() && s.front() == '-') {
    neg = true;
    s.remove_prefix(1);
  }
  auto slash = s.find('/');
  std::string_view n = s.substr(0, slash);
  std::string_view d = slash == std::string_view::npos ? std::string_view("1") : s.substr(slash + 1);
  if (!all_digits(n) || !all_digits(d)) throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
  mpz_class zn{std::string(n)}, zd{std::string(d)};
  if (zd == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
  if (neg) zn = -zn;
  mpq_class q(zn, zd);
  q.canonicalize();
  return Rational(q);
}

std::string Rational::str() const {
  if (v_.get_den() == 1) return v_.get_num().get_str();
  return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

std::string Rational::fraction() const { return v_.get_num().get_str() + "/" + v_.get_den().get_str(); }

std::size_t Rational::hash() const {
  std::hash<std::string> h;
  return h(v_.get_num().get_str(16)) * 1000003u ^ h(v_.get_den().get_str(16));
}

}  // namespace pbisim
