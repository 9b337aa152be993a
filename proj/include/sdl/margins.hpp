#pragma once

// Margin bookkeeping shared by the distortion verifiers. A margin is
// positive when the inequality holds; tiny negatives are rounding.

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "sdl/error.hpp"

namespace sdl {

inline constexpr double kRoundingMargin = -1e-9;
inline constexpr double kViolationMargin = -1e-6;

enum class MarginClass { holds, rounding, violation };

inline MarginClass classify_margin(double m) {
  if (m >= kRoundingMargin) return MarginClass::holds;
  if (m >= kViolationMargin) return MarginClass::rounding;
  return MarginClass::violation;
}

struct DistortionSample {
  double x1 = 0;
  /// NaN for single-point inequalities.
  double x2 = std::numeric_limits<double>::quiet_NaN();
  /// Which inequality: "a", "b" for Theorem 1, "pair" for two-point bounds.
  std::string part;
  double lhs = 0;
  double rhs = 0;
  double margin = 0;
  /// Imaginary parts for disk points (two-point bounds on the surface).
  double y1 = 0;
  double y2 = 0;
};

struct DistortionReport {
  std::string theorem;
  std::string p_kind;
  std::vector<DistortionSample> samples;
  double min_margin = std::numeric_limits<double>::infinity();
  std::size_t worst_site = 0;
  bool hypothesis_ok = true;
  std::string hypothesis_note = "sampled hypothesis";
  /// Largest sampled excess of the hypothesis quantity over its bound
  /// (negative when the hypothesis holds with room) and the node count.
  double hypothesis_max_excess = -std::numeric_limits<double>::infinity();
  std::size_t hypothesis_nodes = 0;
  std::size_t rounding_count = 0;
  std::size_t violation_count = 0;

  bool holds() const { return hypothesis_ok && violation_count == 0 && rounding_count == 0; }
  /// Holds up to rounding.
  bool holds_up_to_rounding() const { return hypothesis_ok && violation_count == 0; }

  /// Fills min_margin, worst_site and the classification counts.
  void finalize() {
    min_margin = std::numeric_limits<double>::infinity();
    worst_site = 0;
    rounding_count = violation_count = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const double m = samples[i].margin;
      if (!std::isfinite(m)) {
        throw Error(ErrorCode::DomainError, "non-finite margin in " + theorem + " sample", samples[i].x1);
      }
      if (m < min_margin) {
        min_margin = m;
        worst_site = i;
      }
      switch (classify_margin(m)) {
        case MarginClass::holds: break;
        case MarginClass::rounding: ++rounding_count; break;
        case MarginClass::violation: ++violation_count; break;
      }
    }
  }
};

}  // namespace sdl
