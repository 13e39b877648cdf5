#pragma once

#include <cstdint>
#include <limits>

namespace socs {

// Purpose tags; each gets an independent stream per trial.
enum class Stream : std::uint64_t {
  Arrival = 1,
  Decompose = 2,
  Mark = 3,
  Choice = 4,
  Order = 5,
  Generate = 6,
  Probe = 7,
  Misc = 8,
};

std::uint64_t mix64(std::uint64_t x);

// Counter-based generator: value n of a stream is mix64(key + (n+1)*golden),
// i.e. SplitMix64 seeded with `key`. Any draw can be replayed from
// (seed, trial, tag, counter) alone.
class Rng {
 public:
  using result_type = std::uint64_t;

  Rng(std::uint64_t seed, std::uint64_t trial, Stream tag);
  explicit Rng(std::uint64_t key) : key_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return at(counter_++); }
  result_type at(std::uint64_t n) const;

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return to_unit(operator()()); }
  double uniform_at(std::uint64_t n) const { return to_unit(at(n)); }
  bool bernoulli(double p) { return uniform() < p; }
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  std::uint64_t counter() const { return counter_; }
  void seek(std::uint64_t n) { counter_ = n; }

  static double to_unit(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Per-trial bundle of purpose streams.
struct TrialRng {
  TrialRng(std::uint64_t seed, std::uint64_t trial)
      : arrival(seed, trial, Stream::Arrival),
        decompose(seed, trial, Stream::Decompose),
        mark(seed, trial, Stream::Mark),
        choice(seed, trial, Stream::Choice),
        order(seed, trial, Stream::Order),
        probe(seed, trial, Stream::Probe) {}
  Rng arrival;
  Rng decompose;
  Rng mark;
  Rng choice;
  Rng order;
  Rng probe;
};

}  // namespace socs
