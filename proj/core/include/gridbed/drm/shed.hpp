#pragma once

#include <string>
#include <vector>

namespace gridbed::drm {

struct ShedCandidate {
  std::string id;
  double power_kw = 0.0;
  double weight = 1.0;  // user inconvenience of switching this appliance off
};

struct ShedSelection {
  std::vector<std::string> appliance_ids;  // sorted
  double shed_kw = 0.0;
  double total_inconvenience = 0.0;
  bool insufficient = false;  // set when even shedding everything falls short
};

// Picks a subset with shed power >= required_kw that minimizes total
// inconvenience; among minima the one shedding the least power, and among
// remaining ties the lexicographically smallest id set. Exhaustive up to 15
// candidates, greedy by weight-per-kW with a drop-redundant repair pass
// beyond that. If the candidates cannot cover required_kw, everything is
// selected and the result is flagged insufficient.
ShedSelection select_shed_set(std::vector<ShedCandidate> candidates, double required_kw);

}  // namespace gridbed::drm
