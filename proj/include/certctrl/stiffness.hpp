#pragma once

#include <stdexcept>

namespace certctrl {

// Cornering-stiffness uncertainty set handed from perception to control:
// the true stiffness is claimed to lie in [lo, hi]; nominal is the value
// the controller designs around (interval midpoint unless stated).
struct StiffnessInterval {
  double lo = 0.0;
  double hi = 0.0;
  double nominal = 0.0;

  void validate() const {
    if (!(lo > 0.0) || !(hi >= lo))
      throw std::invalid_argument("stiffness interval: need 0 < lo <= hi");
    if (!(nominal >= lo) || !(nominal <= hi))
      throw std::invalid_argument("stiffness interval: nominal outside");
  }

  static StiffnessInterval centered(double lo, double hi) {
    StiffnessInterval s{lo, hi, 0.5 * (lo + hi)};
    s.validate();
    return s;
  }
};

// Physical range used as the fallback when certification abstains.
constexpr double kStiffnessFloor = 20000.0;
constexpr double kStiffnessCeil = 120000.0;

}  // namespace certctrl
