#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace wl1 {

/// One Philox4x32-10 block: ten rounds of the counter-based bijection.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                            std::array<std::uint32_t, 2> key);

std::uint64_t splitmix64(std::uint64_t x);

/// Identifies an independent random substream: draws are a pure function of
/// (algorithm, seed, stream).
struct RandomStream {
  static constexpr const char* algorithm = "philox4x32-10";

  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  /// Derived substream, e.g. one per purpose inside a trial.
  RandomStream child(std::uint64_t tag) const;

  bool operator==(const RandomStream&) const = default;
};

/// Sequential reader of a RandomStream. The key is the seed, counter words
/// 2..3 hold the stream index and words 0..1 count blocks.
class Philox {
 public:
  explicit Philox(const RandomStream& stream);

  std::uint32_t next_u32();
  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform();
  /// Standard normal (Box-Muller).
  double normal();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  void refill();

  std::array<std::uint32_t, 2> key_{};
  std::uint64_t stream_ = 0;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace wl1
