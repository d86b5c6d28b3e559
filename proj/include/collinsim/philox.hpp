#pragma once

// Philox4x32-10 counter-based generator (Salmon, Moraes, Dror, Shaw, SC'11)
// and the labelled standard-normal streams built on it.
//
// A stream is identified by (seed, label). Its uniform words are the Philox
// outputs for counters (block_lo, block_hi, label, 0), block = 0, 1, 2, ...
// under key (seed_lo, seed_hi); each block yields two 64-bit words
// (lane0 | lane1 << 32, lane2 | lane3 << 32).
//
// Normals come from a 256-layer ziggurat (Marsaglia & Tsang tables with
// R = 3.6541528853610088, V = 0.00492867323399). Layer index and the signed
// abscissa are taken from disjoint bits of one word (Doornik's layout); the
// wedge and tail tests consume further words. Variates are produced strictly
// sequentially, so a stream's n-th value depends only on (seed, label, n).

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string_view>

namespace collinsim {

class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr int kRounds = 10;

  static constexpr Counter generate(Counter ctr, Key key) noexcept {
    for (int round = 0; round < kRounds; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      ctr = single_round(ctr, key);
    }
    return ctr;
  }

  static constexpr int kBatch = 4;

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static constexpr Counter single_round(const Counter& c, const Key& k) noexcept {
    const std::uint64_t p0 = std::uint64_t{kMul0} * c[0];
    const std::uint64_t p1 = std::uint64_t{kMul1} * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
};

enum class StreamLabel : std::uint32_t { Design = 1, Error = 2 };

inline constexpr std::string_view kGeneratorName = "philox4x32-10";
inline constexpr std::string_view kNormalMethod = "ziggurat-256";
inline constexpr std::string_view kGeneratorVersion = "1";

namespace detail {

struct ZigguratTables {
  static constexpr double kR = 3.6541528853610088;
  static constexpr double kV = 0.00492867323399;
  std::array<double, 257> x{};
  std::array<double, 257> f{};

  ZigguratTables() {
    auto pdf = [](double v) { return std::exp(-0.5 * v * v); };
    x[0] = kV / pdf(kR);
    x[1] = kR;
    for (int i = 2; i < 256; ++i) x[i] = std::sqrt(-2.0 * std::log(kV / x[i - 1] + pdf(x[i - 1])));
    x[256] = 0.0;
    for (int i = 0; i < 257; ++i) f[i] = pdf(x[i]);
  }
};

inline const ZigguratTables& ziggurat_tables() {
  static const ZigguratTables tables;
  return tables;
}

}  // namespace detail

/// Sequential standard-normal stream for (seed, label).
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, StreamLabel label) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        label_(static_cast<std::uint32_t>(label)),
        tables_(&detail::ziggurat_tables()) {}

  std::uint64_t next_u64() noexcept {
    if (lane_ == kWords) refill();
    return words_[static_cast<std::size_t>(lane_++)];
  }

  /// Uniform on the open interval (0, 1) with 53-bit resolution.
  double next_open_unit() noexcept { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  double next() noexcept {
    const auto& t = *tables_;
    for (;;) {
      const std::uint64_t bits = next_u64();
      const std::size_t layer = bits & 0xffu;
      const double u = 2.0 * (static_cast<double>(bits >> 12) * 0x1.0p-52) - 1.0;  // [-1, 1)
      const double x = u * t.x[layer];
      if (std::abs(x) < t.x[layer + 1]) return x;
      if (layer == 0) return tail(u < 0.0);
      if (t.f[layer + 1] + (t.f[layer] - t.f[layer + 1]) * next_open_unit() < std::exp(-0.5 * x * x)) return x;
    }
  }

  void fill(std::span<double> out) noexcept {
    for (double& v : out) v = next();
  }

 private:
  double tail(bool negative) noexcept {
    constexpr double r = detail::ZigguratTables::kR;
    double x = 0.0;
    double y = 0.0;
    do {
      x = -std::log(next_open_unit()) / r;
      y = -std::log(next_open_unit());
    } while (2.0 * y < x * x);
    return negative ? -(r + x) : r + x;
  }

  static constexpr int kWords = 2 * Philox4x32::kBatch;

  void refill() noexcept {
    for (std::size_t i = 0; i < Philox4x32::kBatch; ++i) {
      const std::uint64_t blk = block_ + i;
      const auto b = Philox4x32::generate(
          {static_cast<std::uint32_t>(blk), static_cast<std::uint32_t>(blk >> 32), label_, 0u}, key_);
      words_[2 * i] = std::uint64_t{b[0]} | (std::uint64_t{b[1]} << 32);
      words_[2 * i + 1] = std::uint64_t{b[2]} | (std::uint64_t{b[3]} << 32);
    }
    block_ += Philox4x32::kBatch;
    lane_ = 0;
  }

  Philox4x32::Key key_;
  std::uint32_t label_;
  const detail::ZigguratTables* tables_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, kWords> words_{};
  int lane_ = kWords;
};

}  // namespace collinsim
