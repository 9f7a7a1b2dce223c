#pragma once

#include <string>
#include <variant>

namespace beamctl {

/// Control supported on [xi, xi + 1/n].
struct InternalRegion {
  double xi = 0.0;
  int n = 1;

  double width() const { return 1.0 / n; }
};

/// Control v(t) delta_xi.
struct PointwiseRegion {
  double xi = 0.0;
};

using ControlRegion = std::variant<InternalRegion, PointwiseRegion>;

/// Throws InvalidRegion unless the region lies in [0,1]
/// (Internal additionally needs n >= 1 and xi + 1/n <= 1).
void validate(const ControlRegion& region);

inline bool is_internal(const ControlRegion& region) {
  return std::holds_alternative<InternalRegion>(region);
}

inline double region_point(const ControlRegion& region) {
  return std::visit([](const auto& r) { return r.xi; }, region);
}

/// Factor n for internal regions (the Gramian and control gain), 1 otherwise.
inline double region_gain(const ControlRegion& region) {
  if (const auto* r = std::get_if<InternalRegion>(&region)) return r->n;
  return 1.0;
}

std::string describe(const ControlRegion& region);

}  // namespace beamctl
