#include "gridbed/drm/shed.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace gridbed::drm {

namespace {

constexpr std::size_t kExhaustiveLimit = 15;

std::vector<std::string> ids_of_mask(const std::vector<ShedCandidate>& c, std::uint32_t mask) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (mask & (1u << i)) ids.push_back(c[i].id);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

ShedSelection solve_exhaustive(const std::vector<ShedCandidate>& c, double required_kw) {
  const std::size_t n = c.size();
  const std::uint32_t masks = 1u << n;
  // subset sums via lowest-bit decomposition
  std::vector<double> power(masks, 0.0), weight(masks, 0.0);
  for (std::uint32_t m = 1; m < masks; ++m) {
    const auto low = static_cast<std::uint32_t>(std::countr_zero(m));
    power[m] = power[m & (m - 1)] + c[low].power_kw;
    weight[m] = weight[m & (m - 1)] + c[low].weight;
  }
  std::uint32_t best = 0;
  bool found = false;
  for (std::uint32_t m = 1; m < masks; ++m) {
    if (power[m] < required_kw) continue;
    if (!found) {
      best = m;
      found = true;
      continue;
    }
    if (weight[m] < weight[best] ||
        (weight[m] == weight[best] && power[m] < power[best])) {
      best = m;
    } else if (weight[m] == weight[best] && power[m] == power[best] &&
               ids_of_mask(c, m) < ids_of_mask(c, best)) {
      best = m;
    }
  }
  ShedSelection sel;
  if (!found) {
    sel.insufficient = true;
    best = masks - 1;
  }
  sel.appliance_ids = ids_of_mask(c, best);
  sel.shed_kw = power[best];
  sel.total_inconvenience = weight[best];
  return sel;
}

ShedSelection solve_greedy(const std::vector<ShedCandidate>& c, double required_kw) {
  std::vector<std::size_t> order(c.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ra = c[a].weight / c[a].power_kw;
    const double rb = c[b].weight / c[b].power_kw;
    if (ra != rb) return ra < rb;
    return c[a].id < c[b].id;
  });

  std::vector<bool> picked(c.size(), false);
  double total = 0.0;
  for (std::size_t i : order) {
    if (total >= required_kw) break;
    picked[i] = true;
    total += c[i].power_kw;
  }
  ShedSelection sel;
  if (total < required_kw) {
    sel.insufficient = true;
    picked.assign(c.size(), true);
    total = 0.0;
    for (const auto& cand : c) total += cand.power_kw;
  } else {
    // drop the heaviest-weight members that are not needed for feasibility
    std::vector<std::size_t> drop_order(order.rbegin(), order.rend());
    for (std::size_t i : drop_order) {
      if (picked[i] && total - c[i].power_kw >= required_kw) {
        picked[i] = false;
        total -= c[i].power_kw;
      }
    }
  }
  sel.shed_kw = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!picked[i]) continue;
    sel.appliance_ids.push_back(c[i].id);
    sel.shed_kw += c[i].power_kw;
    sel.total_inconvenience += c[i].weight;
  }
  std::sort(sel.appliance_ids.begin(), sel.appliance_ids.end());
  return sel;
}

}  // namespace

ShedSelection select_shed_set(std::vector<ShedCandidate> candidates, double required_kw) {
  if (required_kw <= 0.0) throw std::invalid_argument("select_shed_set: required_kw must be > 0");
  for (const auto& cand : candidates) {
    if (cand.power_kw <= 0.0) throw std::invalid_argument("select_shed_set: candidate power must be > 0");
  }
  if (candidates.empty()) {
    ShedSelection sel;
    sel.insufficient = true;
    return sel;
  }
  if (candidates.size() <= kExhaustiveLimit) return solve_exhaustive(candidates, required_kw);
  return solve_greedy(candidates, required_kw);
}

}  // namespace gridbed::drm
