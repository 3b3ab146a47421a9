#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "logsub/grid.hpp"

namespace logsub {

enum class CorpusKind { random_bandlimited, wave_packet, tone, chirp_log };

std::string to_string(CorpusKind k);
CorpusKind parse_corpus_kind(const std::string& s);

// Members are drawn frequency by frequency in a grid-independent order, so the
// same CorpusSpec yields the same continuous functions on any grid resolving the band.
struct CorpusSpec {
  std::uint64_t seed = 1;
  CorpusKind kind = CorpusKind::random_bandlimited;
  std::size_t count = 0;
  int k_lo = 4;  // band 2^k_lo <= |xi| <= 2^k_hi
  int k_hi = 15;
  double gamma = 2.0;           // packet widths and chirp phase
  double chirp_strength = 1.0;  // 0 turns chirps into focused bumps
};

// Unit-L2 members; throws DomainError on band conflicts.
std::vector<Field> gen_corpus(const CorpusSpec& spec, const TorusGrid& g);

struct CorpusMember {
  std::string label;
  Field field;
};

struct MixedCorpusSpec {
  std::uint64_t seed = 1;
  std::size_t random_bandlimited = 8;
  std::size_t wave_packet = 4;
  std::size_t tone = 4;
  std::size_t chirp_log = 0;
  int k_lo = 4;
  int k_hi = 15;
  double gamma = 2.0;

  std::string describe() const;
};

std::vector<CorpusMember> gen_mixed_corpus(const MixedCorpusSpec& spec, const TorusGrid& g);

enum class WeightKind { constant, spike, smoothed_random, power_singularity, narrow_bump };

std::string to_string(WeightKind k);
WeightKind parse_weight_kind(const std::string& s);

struct WeightSpec {
  WeightKind kind = WeightKind::constant;
  std::uint64_t seed = 1;
};

// Nonnegative weights; spike is a single grid point of height 1, the others
// are defined by grid-independent formulas.
RealField gen_weight(const WeightSpec& spec, const TorusGrid& g);

struct WeightMember {
  std::string label;
  RealField weight;
};

std::vector<WeightMember> gen_weights(const std::vector<WeightKind>& kinds, std::uint64_t seed, const TorusGrid& g);

}  // namespace logsub
