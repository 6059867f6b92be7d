#pragma once

#include <stdexcept>
#include <string>

#include "wbc/prob.hpp"
#include "wbc/sim.hpp"

namespace wbc::io {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Channel file: JSON object
//   {"input_size": int, "y1": [[..]..], "y2": [[..]..], "z": [[..]..], "name": str?}
// Row-sum violations are reported with the offending matrix and row index.
WiretapBc load_channel(const std::string& path);

// Sim config: JSON mirroring the SimConfig fields; "aux" carries
// {"axes": [{"name","size"}...], "table": [...]}.
sim::SimConfig load_sim_config(const std::string& path);

// Fixed 12-significant-digit, locale-independent numeric formatting.
std::string fmt12(double v);

}  // namespace wbc::io
