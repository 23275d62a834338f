#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pedsafe/random.hpp"

namespace pedsafe::stochastic {

enum class AgeGroup { teen, young, middle, older };
enum class Gender { female, male };
enum class RiskPreference { unaware, pass_first, yield_back };

inline constexpr std::array kAgeGroups{AgeGroup::teen, AgeGroup::young, AgeGroup::middle,
                                       AgeGroup::older};
inline constexpr std::array kGenders{Gender::female, Gender::male};
inline constexpr std::array kRiskPreferences{RiskPreference::unaware, RiskPreference::pass_first,
                                             RiskPreference::yield_back};

std::string_view to_string(AgeGroup g);
std::string_view to_string(Gender g);
std::string_view to_string(RiskPreference r);
std::optional<AgeGroup> age_group_from_string(std::string_view s);
std::optional<Gender> gender_from_string(std::string_view s);
std::optional<RiskPreference> risk_preference_from_string(std::string_view s);

struct AgeBounds {
  double min_years;
  double max_years;
};
/// teen 13-18, young 19-30, middle 31-59, older 60-85.
AgeBounds age_bounds(AgeGroup g);

struct PedestrianProfile {
  double age = 0.0;
  Gender gender = Gender::female;
  AgeGroup age_group = AgeGroup::young;
  RiskPreference risk_preference = RiskPreference::unaware;
  double base_speed = 0.0;  // m/s
  bool operator==(const PedestrianProfile&) const = default;
};

struct DemographicsCell {
  AgeGroup age_group = AgeGroup::young;
  Gender gender = Gender::female;
  RiskPreference risk_preference = RiskPreference::unaware;
  double weight = 0.0;
  bool operator==(const DemographicsCell&) const = default;
};

struct GroupSpeed {
  double mean = 0.0;  // m/s
  double sd = 0.15;   // m/s
  bool operator==(const GroupSpeed&) const = default;
};

/// Walking-speed means by age group. Teens share the young-adult figure.
inline constexpr std::array<GroupSpeed, 4> kDefaultGroupSpeeds{
    GroupSpeed{1.46, 0.15}, GroupSpeed{1.46, 0.15}, GroupSpeed{1.45, 0.15},
    GroupSpeed{1.03, 0.15}};

class DemographicsTable {
 public:
  /// Weights are renormalized to sum to one. Throws DomainError on
  /// negative or all-zero weights, or on a non-positive speed spread.
  static DemographicsTable make(std::vector<DemographicsCell> cells,
                                std::array<GroupSpeed, 4> speeds = kDefaultGroupSpeeds,
                                double min_speed = 0.3);
  /// Uniform over every (age group, gender, risk preference) cell.
  static DemographicsTable uniform();

  const std::vector<DemographicsCell>& cells() const { return cells_; }
  const GroupSpeed& speed(AgeGroup g) const { return speeds_[static_cast<std::size_t>(g)]; }
  const std::array<GroupSpeed, 4>& speeds() const { return speeds_; }
  double min_speed() const { return min_speed_; }
  bool operator==(const DemographicsTable&) const = default;

 private:
  std::vector<DemographicsCell> cells_;
  std::array<GroupSpeed, 4> speeds_{};
  double min_speed_ = 0.3;
};

PedestrianProfile sample_profile(const DemographicsTable& table, RandomStream& rng);

}  // namespace pedsafe::stochastic
