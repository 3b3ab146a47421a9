#include "logsub/field_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <nlohmann/json.hpp>

#include "logsub/error.hpp"

namespace logsub {

namespace {

std::filesystem::path with_ext(std::filesystem::path stem, const char* ext) {
  stem += ext;
  return stem;
}

std::uint32_t to_le(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
}

}  // namespace

void write_field(const std::filesystem::path& stem, const Field& f) {
  std::ofstream bin(with_ext(stem, ".bin"), std::ios::binary);
  if (!bin) throw std::runtime_error("write_field: cannot open " + with_ext(stem, ".bin").string());
  for (const auto& z : f.samples) {
    for (double part : {z.real(), z.imag()}) {
      const auto word = to_le(std::bit_cast<std::uint32_t>(static_cast<float>(part)));
      bin.write(reinterpret_cast<const char*>(&word), sizeof(word));
    }
  }
  nlohmann::json desc = {{"dimension", f.grid.d()},
                         {"n", f.grid.n()},
                         {"samples", f.samples.size()},
                         {"dtype", "complex64"},
                         {"byte_order", "little"}};
  std::ofstream(with_ext(stem, ".json")) << desc.dump(2) << '\n';
}

Field read_field(const std::filesystem::path& stem) {
  std::ifstream jf(with_ext(stem, ".json"));
  if (!jf) throw ConfigError("read_field: missing descriptor " + with_ext(stem, ".json").string());
  nlohmann::json desc;
  try {
    jf >> desc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("read_field: bad descriptor: ") + e.what());
  }
  const TorusGrid g(desc.at("dimension").get<int>(), desc.at("n").get<std::size_t>());
  Field f = Field::zeros(g);
  std::ifstream bin(with_ext(stem, ".bin"), std::ios::binary);
  if (!bin) throw ConfigError("read_field: missing samples " + with_ext(stem, ".bin").string());
  for (auto& z : f.samples) {
    std::uint32_t w[2];
    if (!bin.read(reinterpret_cast<char*>(w), sizeof(w))) throw ShapeError("read_field: truncated sample file");
    z = {std::bit_cast<float>(to_le(w[0])), std::bit_cast<float>(to_le(w[1]))};
  }
  if (bin.peek() != std::char_traits<char>::eof()) throw ShapeError("read_field: trailing bytes in sample file");
  return f;
}

}  // namespace logsub
