#include "ediref/checksum.hpp"

#include <array>
#include <cstdio>

namespace ediref {

std::string checksum_hex(std::span<const double> values) {
  std::array<char, 17> buf{};
  std::snprintf(buf.data(), buf.size(), "%016llx",
                static_cast<unsigned long long>(checksum(values)));
  return std::string(buf.data());
}

}  // namespace ediref
