#pragma once

#include <filesystem>

#include "logsub/grid.hpp"

namespace logsub {

// Writes <stem>.bin (little-endian complex64 pairs, FFT-free sample order)
// and <stem>.json (dimension, n, sample count, dtype).
void write_field(const std::filesystem::path& stem, const Field& f);

// Reads a pair written by write_field. Values round through float32.
Field read_field(const std::filesystem::path& stem);

}  // namespace logsub
