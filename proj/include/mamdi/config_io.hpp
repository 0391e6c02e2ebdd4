#pragma once

#include <string>

#include "mamdi/bb84.hpp"
#include "mamdi/mdi.hpp"
#include "mamdi/params.hpp"
#include "mamdi/protocol_mc.hpp"
#include "mamdi/sweep.hpp"

namespace mamdi {

enum class OutputFormat { csv, json };
OutputFormat output_format_from_string(const std::string& name);

// Parses a JSON config document (sections: channel, detector, memory, source,
// geometry, protocol; all keys optional with physical defaults). Unknown
// sections or keys are rejected by path; the result is fully validated.
// Throws std::invalid_argument with the offending field and constraint.
SystemConfig parse_config(const std::string& document);

// Canonical JSON for a config. Doubles round-trip exactly, so
// parse_config(emit_config(c)) == c field-for-field; infinite time constants
// are written as the string "inf".
std::string emit_config(const SystemConfig& config);

std::string emit(const SweepResult& result, OutputFormat format);
std::string emit(const RateBreakdown& breakdown, OutputFormat format);
std::string emit(const Bb84Breakdown& breakdown, OutputFormat format);
std::string emit(const EmpiricalEstimates& estimates, OutputFormat format);
std::string emit(const CrossoverReport& report, OutputFormat format);

}  // namespace mamdi
