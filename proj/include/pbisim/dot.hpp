#pragma once

#include "pbisim/term.hpp"

#include <string>

namespace pbisim {

// Transition graph reachable from the term, as a DOT digraph. States are
// circles, distributions are filled points; probabilistic edges carry
// exact fractions. Node ids are FNV-1a hashes of canonical term strings.
std::string lts_dot(const PTerm& p);
std::string lts_dot(const NdTerm& e);

std::string stable_id(const std::string& canonical);

}  // namespace pbisim
