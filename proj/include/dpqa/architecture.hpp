#pragma once

#include "dpqa/json.hpp"

#include <string>
#include <utility>
#include <vector>

namespace dpqa {

/// Physical constants of the trap hardware. Lengths in µm, times in µs
/// except the coherence time, which is in seconds.
struct PhysicalParams {
  double rydbergRadiusUm = 7.5;   ///< r_b
  double minSeparationUm = 2.0;   ///< d_s, same-array row/column spacing
  double moveTimeUs = 200.0;      ///< T0
  double moveDistanceUm = 110.0;  ///< D0
  double twoQubitFidelity = 0.995;
  double coherenceTimeS = 1.5;
  double transferTimeUs = 0.0;    ///< per activate/deactivate
};

struct ArchSpec {
  int x = 16;  ///< interaction-site columns
  int y = 16;  ///< interaction-site rows
  int c = 16;  ///< AOD columns
  int r = 16;  ///< AOD rows
  int rowStack = 3;
  int colStack = 3;
  double sitePitchUm = 27.0;
  PhysicalParams phys;
  bool transfersAllowed = false;
};

/// Largest symmetric k with 2 (k-1)^2 d_s^2 <= r_b^2; never below 1.
std::pair<int, int> deriveStacking(const PhysicalParams& phys);

/// Largest |offset| from a site centre that an atom can take under the
/// intra-site placement used by code generation.
double maxIntraSiteOffsetUm(const ArchSpec& spec);

/// 2.5 r_b plus twice the intra-site extent, rounded up to a whole µm.
double derivedSitePitch(const PhysicalParams& phys, int rowStack,
                        int colStack);

/// Default hardware: 16x16 sites, 16 AOD rows/columns, r_b = 7.5 µm,
/// d_s = 2 µm, T0 = 200 µs, D0 = 110 µm, 99.5 % CZ, 1.5 s coherence.
ArchSpec defaultArchSpec();

/// Every violated invariant, as human-readable strings. Empty means valid.
std::vector<std::string> validate(const ArchSpec& spec);

class ArchError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Throws ArchError listing the violations when `validate` is non-empty.
void requireValid(const ArchSpec& spec);

/// Omitted fields keep their defaults; omitted pitch and stacking are derived.
ArchSpec loadArchSpec(const Json& doc);
ArchSpec loadArchSpecFile(const std::string& path);
Json toJson(const ArchSpec& spec);

} // namespace dpqa
