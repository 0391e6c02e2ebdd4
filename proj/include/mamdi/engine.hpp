#pragma once

#include <optional>

#include "mamdi/mdi.hpp"
#include "mamdi/params.hpp"

namespace mamdi {

// Probability that one heralding attempt loads the memory on the given leg.
// For direct heralding an optional coherent-state intensity replaces the
// single-photon source; for indirect heralding the intensity is ignored.
double loading_prob_direct(const SystemConfig& config, Leg leg,
                           std::optional<double> intensity = std::nullopt);
double loading_prob_indirect(const SystemConfig& config, Leg leg);
double loading_prob(const SystemConfig& config, Leg leg,
                    std::optional<double> intensity = std::nullopt);

// Number of repetition periods consumed by reading both memories and
// rewriting them before loading attempts can resume.
int holding_rounds(const SystemConfig& config);

struct MeasurementEfficiencies {
  double eta_m = 0.0;        // retrieval+detection efficiency of the later memory
  double eta_m_prime = 0.0;  // same for the earlier memory, averaged over the wait
};

MeasurementEfficiencies effective_measurement_efficiencies(const SystemConfig& config,
                                                           double eta_a, double eta_b);

// Secret-key rate of the memory-assisted link for the configured heralding
// scheme and source.  Negative key terms are reported as-is; use the clamped
// accessors on the result for plotting.
RateBreakdown rate_single_photon(const SystemConfig& config);
RateBreakdown rate_decoy(const SystemConfig& config);
RateBreakdown rate(const SystemConfig& config);

struct SymmetricSummary {
  double loading_prob = 0.0;   // per-attempt loading probability of either memory
  double expected_rounds = 0.0;  // mean attempts until both memories are loaded
  double storage_time_s = 0.0;   // mean time the earlier memory waits
};

// Closed forms for a symmetric link (equal legs).  Throws std::domain_error
// when the two legs differ.
SymmetricSummary symmetric_summary(const SystemConfig& config);

}  // namespace mamdi
