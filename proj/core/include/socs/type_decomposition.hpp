#pragma once

#include <vector>

namespace socs {

// Dummy agent for the unassigned residual interval.
inline constexpr int kBottom = -1;

struct SurrogateType {
  bool two_way = false;
  int a = kBottom;  // OneWay agent, or the smaller real agent of a pair
  int b = kBottom;  // second agent of a pair; kBottom when paired with the dummy

  static SurrogateType one_way(int j) { return {false, j, kBottom}; }
  static SurrogateType pair(int j, int k);
  bool involves(int j) const { return a == j || (two_way && b == j); }
  bool operator==(const SurrogateType&) const = default;
};

struct SurrogateOutcome {
  SurrogateType type;
  double prob = 0.0;
};

// Interval layout of one allocation vector mu (agents left to right,
// residual last). Reusable sampler.
class Decomposer {
 public:
  Decomposer() = default;
  explicit Decomposer(const std::vector<double>& mu);
  // eta in [0, 1/2)
  SurrogateType sample(double eta) const;
  // Agent whose interval contains z in [0, 1), or kBottom.
  int locate(double z) const;
  const std::vector<double>& prefix() const { return prefix_; }

 private:
  std::vector<double> prefix_;  // prefix_[j] = mu_0 + ... + mu_{j-1}, size J+1
};

SurrogateType sample_surrogate(const std::vector<double>& mu, double eta);

// Exact distribution, from the interval geometry.
std::vector<SurrogateOutcome> surrogate_distribution(const std::vector<double>& mu);

// max_j |f mu_j - f (Pr[OneWay j] + 1/2 sum_k Pr[{j,k}])|
double conservation_residual(const std::vector<double>& mu, double f,
                             const std::vector<SurrogateOutcome>& dist);

}  // namespace socs
