#pragma once

#include "pbisim/parser.hpp"
#include "pbisim/rational.hpp"

#include <string>

namespace testutil {

inline pbisim::PTerm P(const std::string& s) { return pbisim::parse_p(s); }
inline pbisim::NdTerm N(const std::string& s) { return pbisim::parse_nd(s); }
inline pbisim::Rational R(long n, long d = 1) { return pbisim::Rational(n, d); }

}  // namespace testutil
