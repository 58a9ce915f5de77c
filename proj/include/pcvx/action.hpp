// A platoon leader's decision for one time step: which sub-band to reuse
// and which discrete transmit power level to use on it.
#pragma once

namespace pcvx {

struct Action {
  int sub_band = 0;     // index into {0..M-1}
  int power_level = 0;  // index into the configured dBm level list

  bool operator==(const Action&) const = default;
};

}  // namespace pcvx
