#ifndef EDIREF_CHECKSUM_HPP
#define EDIREF_CHECKSUM_HPP

#include <cstdint>
#include <span>
#include <string>

#include "ediref/rng.hpp"

namespace ediref {

// Bit-exact checksum of a parameter group. Equal checksums across epochs are
// the freezing proof recorded in TrainHistory.
inline std::uint64_t checksum(std::span<const double> values) {
  return hash_bytes(values.data(), values.size_bytes());
}

std::string checksum_hex(std::span<const double> values);

}  // namespace ediref

#endif  // EDIREF_CHECKSUM_HPP
