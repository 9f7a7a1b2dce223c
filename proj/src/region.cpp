#include "beamctl/region.hpp"

#include <cmath>
#include <cstdio>

#include "beamctl/errors.hpp"

namespace beamctl {

void validate(const ControlRegion& region) {
  if (const auto* r = std::get_if<InternalRegion>(&region)) {
    if (r->n < 1) throw InvalidRegion("internal region: n must be >= 1");
    if (!(r->xi >= 0.0) || r->xi + r->width() > 1.0 + 1e-15) {
      throw InvalidRegion("internal region [xi, xi+1/n] must lie in [0,1]");
    }
    return;
  }
  const auto& p = std::get<PointwiseRegion>(region);
  if (!(p.xi >= 0.0 && p.xi <= 1.0)) {
    throw InvalidRegion("pointwise region: xi must lie in [0,1]");
  }
}

std::string describe(const ControlRegion& region) {
  char buf[96];
  if (const auto* r = std::get_if<InternalRegion>(&region)) {
    std::snprintf(buf, sizeof buf, "internal(xi=%.17g, n=%d)", r->xi, r->n);
  } else {
    std::snprintf(buf, sizeof buf, "pointwise(xi=%.17g)",
                  std::get<PointwiseRegion>(region).xi);
  }
  return buf;
}

}  // namespace beamctl
