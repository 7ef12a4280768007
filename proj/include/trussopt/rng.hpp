#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace trussopt {

// Source of bounded uniform indices. The search core draws all of its
// randomness through this interface so tests can script exact choices.
class IndexSource {
 public:
  virtual ~IndexSource() = default;
  virtual std::size_t pick(std::size_t n) = 0;  // uniform in [0, n)
};

// mt19937_64 is fully specified by the standard, so a (seed, draw-count)
// pair reproduces the same sequence on every platform. The modulo bias at
// n <= a few hundred is ~1e-17 and irrelevant here.
class Rng final : public IndexSource {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::size_t pick(std::size_t n) override {
    if (n <= 1) return 0;
    return static_cast<std::size_t>(engine_() % n);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace trussopt
