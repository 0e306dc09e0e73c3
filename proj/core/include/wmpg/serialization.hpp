#pragma once

#include <iosfwd>
#include <string>

#include "wmpg/network.hpp"

namespace wmpg {

// Snapshot layout (all integers and floats little-endian):
//   "WMPGNN1"            7 bytes
//   layer_count          u32
//   per layer            u32 input_width, u32 output_width, u8 activation
//   parameter_count      u64
//   parameters           parameter_count x f64
void save_network(std::ostream& out, const Network& net);
Network load_network(std::istream& in);

void save_network(const std::string& path, const Network& net);
Network load_network(const std::string& path);

}  // namespace wmpg
