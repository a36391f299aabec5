#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace wisheig {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). The block
/// function maps a 128-bit counter and 64-bit key to 128 random bits.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr std::uint32_t kM0 = 0xD2511F53u;
  static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kW0 = 0x9E3779B9u;
  static constexpr std::uint32_t kW1 = 0xBB67AE85u;

  static constexpr Counter block(Counter c, Key k) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        k[0] += kW0;
        k[1] += kW1;
      }
      const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * c[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * c[2];
      c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
    }
    return c;
  }
};

/// Random stream for one replication: key = seed, counter = (block index,
/// replication index). Streams for different replications never overlap,
/// so results do not depend on which thread runs which replication.
class ReplicationStream {
 public:
  ReplicationStream(std::uint64_t seed, std::uint64_t replication)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        rep_lo_(static_cast<std::uint32_t>(replication)),
        rep_hi_(static_cast<std::uint32_t>(replication >> 32)) {}

  std::uint64_t next_u64() {
    if (pos_ == 2) refill();
    return buf_[pos_++];
  }

  // 53-bit uniform on [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Marsaglia polar method. Pairs are drawn as u, v = 2U - 1 from two
  // consecutive uniforms, rejected unless 0 < s = u^2 + v^2 < 1; both
  // outputs u*f and v*f, f = sqrt(-2 ln s / s), are used in that order.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  [[nodiscard]] std::uint64_t blocks_used() const noexcept { return block_; }

 private:
  void refill() {
    const auto out = Philox4x32::block({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                                        rep_lo_, rep_hi_},
                                       key_);
    ++block_;
    buf_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
    buf_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
    pos_ = 0;
  }

  Philox4x32::Key key_;
  std::uint32_t rep_lo_, rep_hi_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buf_{};
  int pos_ = 2;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace wisheig
