#include "pedsafe/demographics.hpp"

#include <cmath>

#include "pedsafe/distributions.hpp"
#include "pedsafe/error.hpp"

namespace pedsafe::stochastic {

std::string_view to_string(AgeGroup g) {
  switch (g) {
    case AgeGroup::teen: return "teen";
    case AgeGroup::young: return "young";
    case AgeGroup::middle: return "middle";
    case AgeGroup::older: return "older";
  }
  return "?";
}

std::string_view to_string(Gender g) { return g == Gender::female ? "female" : "male"; }

std::string_view to_string(RiskPreference r) {
  switch (r) {
    case RiskPreference::unaware: return "unaware";
    case RiskPreference::pass_first: return "pass_first";
    case RiskPreference::yield_back: return "yield_back";
  }
  return "?";
}

std::optional<AgeGroup> age_group_from_string(std::string_view s) {
  for (auto g : kAgeGroups) {
    if (to_string(g) == s) return g;
  }
  return std::nullopt;
}

std::optional<Gender> gender_from_string(std::string_view s) {
  for (auto g : kGenders) {
    if (to_string(g) == s) return g;
  }
  return std::nullopt;
}

std::optional<RiskPreference> risk_preference_from_string(std::string_view s) {
  for (auto r : kRiskPreferences) {
    if (to_string(r) == s) return r;
  }
  return std::nullopt;
}

AgeBounds age_bounds(AgeGroup g) {
  switch (g) {
    case AgeGroup::teen: return {13.0, 18.0};
    case AgeGroup::young: return {19.0, 30.0};
    case AgeGroup::middle: return {31.0, 59.0};
    case AgeGroup::older: return {60.0, 85.0};
  }
  return {0.0, 0.0};
}

DemographicsTable DemographicsTable::make(std::vector<DemographicsCell> cells,
                                          std::array<GroupSpeed, 4> speeds, double min_speed) {
  if (cells.empty()) throw DomainError("demographics table has no cells");
  double total = 0.0;
  for (const auto& c : cells) {
    if (!(c.weight >= 0.0) || !std::isfinite(c.weight)) {
      throw DomainError("demographics weights must be finite and non-negative");
    }
    total += c.weight;
  }
  if (!(total > 0.0)) throw DomainError("demographics weights sum to zero");
  // already-normalized tables are kept bit-exact so serialization round-trips
  const bool rescale = std::abs(total - 1.0) > 1e-12;
  double check = 0.0;
  for (auto& c : cells) {
    if (rescale) c.weight /= total;
    check += c.weight;
  }
  if (std::abs(check - 1.0) > 1e-9) throw DomainError("demographics weights do not normalize");
  for (const auto& s : speeds) {
    if (!(s.mean > 0.0) || !(s.sd > 0.0)) {
      throw DomainError("group speed mean and spread must be positive");
    }
  }
  if (!(min_speed > 0.0)) throw DomainError("minimum walking speed must be positive");

  DemographicsTable t;
  t.cells_ = std::move(cells);
  t.speeds_ = speeds;
  t.min_speed_ = min_speed;
  return t;
}

DemographicsTable DemographicsTable::uniform() {
  std::vector<DemographicsCell> cells;
  for (auto g : kAgeGroups) {
    for (auto s : kGenders) {
      for (auto r : kRiskPreferences) cells.push_back({g, s, r, 1.0});
    }
  }
  return make(std::move(cells));
}

PedestrianProfile sample_profile(const DemographicsTable& table, RandomStream& rng) {
  const auto& cells = table.cells();
  const double u = rng.uniform();
  double acc = 0.0;
  const DemographicsCell* chosen = nullptr;
  for (const auto& c : cells) {
    acc += c.weight;
    if (c.weight > 0.0 && u < acc) {
      chosen = &c;
      break;
    }
  }
  if (chosen == nullptr) {
    // u landed in the rounding slack above the last cumulative weight
    for (auto it = cells.rbegin(); it != cells.rend(); ++it) {
      if (it->weight > 0.0) {
        chosen = &*it;
        break;
      }
    }
  }

  PedestrianProfile p;
  p.age_group = chosen->age_group;
  p.gender = chosen->gender;
  p.risk_preference = chosen->risk_preference;
  const auto bounds = age_bounds(p.age_group);
  p.age = bounds.min_years + rng.uniform() * (bounds.max_years - bounds.min_years);
  const auto& speed = table.speed(p.age_group);
  p.base_speed = sample_truncated_normal(speed.mean, speed.sd, table.min_speed(), rng);
  return p;
}

}  // namespace pedsafe::stochastic
