#pragma once

#include <array>
#include <cstdint>

namespace fraclab {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as
/// easy as 1, 2, 3").
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

/// What a stream is used for; keeps substreams of different consumers disjoint.
enum class StreamPurpose : std::uint32_t {
  Dynamics = 0,
  Initialization = 1,
  SamplerValidation = 2,
  VarianceStudy = 3,
  Test = 255,
};

/// Identifies one substream: (species, particle, step) plus a purpose tag.
struct StreamId {
  std::uint32_t species = 0;
  std::uint32_t particle = 0;
  std::uint32_t step = 0;
  StreamPurpose purpose = StreamPurpose::Dynamics;
};

/// Counter-based random stream. The master seed is the Philox key and the
/// stream id fills three counter words, so a (seed, id) pair always yields the
/// same sequence no matter which thread draws it.
class RngStream {
 public:
  RngStream(std::uint64_t seed, const StreamId& id);

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform();
  double normal();
  double exponential();

 private:
  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> block_{};
  int used_ = 4;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace fraclab
