#pragma once

#include "pbisim/axioms.hpp"
#include "pbisim/harness.hpp"

#include <string>
#include <vector>

namespace pbisim {

inline constexpr int kSchemaVersion = 1;

std::string verdict_json(const Verdict& v);
// One object per step: index, rule, direction, position, before, after, witness.
std::vector<std::string> trace_json_lines(const ProofTrace& t);
std::string report_json(const Report& r);

// Inverse of trace_json_lines given the start term; used for replay checks.
ProofTrace trace_from_json_lines(const std::vector<std::string>& lines);

}  // namespace pbisim
