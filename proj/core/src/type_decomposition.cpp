#include "socs/type_decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "socs/error.hpp"

namespace socs {

SurrogateType SurrogateType::pair(int j, int k) {
  if (j == k) throw InvalidInput("two-way surrogate needs distinct agents");
  if (j == kBottom) return {true, k, kBottom};
  if (k == kBottom) return {true, j, kBottom};
  return {true, std::min(j, k), std::max(j, k)};
}

Decomposer::Decomposer(const std::vector<double>& mu) {
  prefix_.assign(mu.size() + 1, 0.0);
  for (std::size_t j = 0; j < mu.size(); ++j) {
    if (!(mu[j] >= -1e-12) || !std::isfinite(mu[j]))
      throw InvalidInput("type decomposition: negative allocation for agent " + std::to_string(j));
    prefix_[j + 1] = prefix_[j] + std::max(0.0, mu[j]);
  }
  if (prefix_.back() > 1.0 + 1e-12) throw InvalidInput("type decomposition: allocation sums above 1");
}

int Decomposer::locate(double z) const {
  // First j with z < prefix_[j+1]; left-closed right-open intervals.
  auto it = std::upper_bound(prefix_.begin() + 1, prefix_.end(), z);
  if (it == prefix_.end()) return kBottom;
  return static_cast<int>(it - prefix_.begin()) - 1;
}

SurrogateType Decomposer::sample(double eta) const {
  if (!(eta >= 0.0 && eta < 0.5)) throw InvalidInput("type decomposition: eta must lie in [0, 1/2)");
  const int j = locate(eta);
  const int k = locate(eta + 0.5);
  if (j == k) return SurrogateType::one_way(j);
  return SurrogateType::pair(j, k);
}

SurrogateType sample_surrogate(const std::vector<double>& mu, double eta) { return Decomposer(mu).sample(eta); }

std::vector<SurrogateOutcome> surrogate_distribution(const std::vector<double>& mu) {
  Decomposer d(mu);
  const auto& P = d.prefix();
  std::vector<double> cuts{0.0, 0.5};
  for (double p : P) {
    if (p > 0 && p < 0.5) cuts.push_back(p);
    if (p - 0.5 > 0 && p - 0.5 < 0.5) cuts.push_back(p - 0.5);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<SurrogateOutcome> out;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double lo = cuts[s], hi = cuts[s + 1];
    if (hi <= lo) continue;
    // Outcome is constant on [lo, hi); the midpoint avoids rounding at the cuts.
    const SurrogateType ty = d.sample(0.5 * (lo + hi));
    const double p = 2.0 * (hi - lo);
    auto it = std::find_if(out.begin(), out.end(), [&](const SurrogateOutcome& o) { return o.type == ty; });
    if (it == out.end()) out.push_back({ty, p});
    else it->prob += p;
  }
  return out;
}

double conservation_residual(const std::vector<double>& mu, double f, const std::vector<SurrogateOutcome>& dist) {
  double worst = 0.0;
  for (int j = 0; j < static_cast<int>(mu.size()); ++j) {
    double mass = 0.0;
    for (const auto& o : dist) {
      if (!o.type.involves(j)) continue;
      mass += o.type.two_way ? 0.5 * o.prob : o.prob;
    }
    worst = std::max(worst, std::abs(f * mu[j] - f * mass));
  }
  return worst;
}

}  // namespace socs
