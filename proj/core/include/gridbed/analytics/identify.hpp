#pragma once

#include <string>
#include <vector>

#include "gridbed/premises/load.hpp"

namespace gridbed::analytics {

struct SignatureEntry {
  std::string label;
  std::vector<premises::PhaseSig> signature;
};

struct IdentifyResult {
  std::string label;
  double distance = 0.0;
  bool no_activity = false;
};

// Matches a power trace against a signature library: the trace's active span
// (first to last step above the activity floor) is aligned at switch-on and
// compared by L2 distance to each signature rendered at the trace's
// resolution; shorter side zero-padded. Ties keep library order. An all-zero
// trace yields a no-activity result.
IdentifyResult identify_appliance(const premises::LoadProfile& trace,
                                  const std::vector<SignatureEntry>& library,
                                  double activity_floor_kw = 0.05);

}  // namespace gridbed::analytics
