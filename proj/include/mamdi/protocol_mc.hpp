#pragma once

#include <cstdint>

#include "mamdi/loading.hpp"
#include "mamdi/params.hpp"

namespace mamdi {

// Trial-level estimates from the event-by-event protocol simulation.
// y11_qm counts middle-measurement successes per consumed source pulse
// (both bases pooled; the success probability is basis-independent), the
// error fractions are conditioned on success in the named basis, and
// n_load / storage_time describe the loading phase itself.
struct EmpiricalEstimates {
  Estimate y11_qm;
  Estimate e11x;
  Estimate e11z;
  Estimate n_load;
  Estimate storage_time;  // seconds
  std::uint64_t trials = 0;
  std::uint64_t successes_z = 0;
  std::uint64_t successes_x = 0;
  std::uint64_t errors_z = 0;
  std::uint64_t errors_x = 0;
  std::uint64_t seed = 0;
};

// Simulates the directly heralded protocol one heralding cycle at a time:
// geometric loading of both memories, background capture, misalignment and
// storage dephasing flips, amplitude decay of the earlier memory, and the
// four-detector middle measurement with dark counts. Trials alternate
// between the Z basis (even indices) and the X basis (odd indices).
// Deterministic in (config, trials, seed) and independent of scheduling.
EmpiricalEstimates simulate_direct(const SystemConfig& config, std::uint64_t trials,
                                   std::uint64_t seed);

}  // namespace mamdi
