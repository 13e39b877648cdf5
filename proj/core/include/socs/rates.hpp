#pragma once

#include <string>
#include <vector>

namespace socs {

enum class RateKind {
  Baseline,
  TwoWayMatching,
  GeneralMatching,
  RandomOrderMatching,
  TwoWayAdWords,
  GeneralAdWords,
  MultiwayOcsAdWords,
  TwoWayDisplay,
  GeneralDisplay,
};

inline constexpr double kGeneralAdWordsC = 0.417;

const char* to_string(RateKind k);
RateKind rate_kind_from_string(const std::string& s);
const std::vector<RateKind>& all_rate_kinds();

// g_kind(y). For y > 1 the last piece's formula is evaluated as-is.
double convergence_rate(RateKind kind, double y, double c = kGeneralAdWordsC);

struct RateCurve {
  RateKind kind = RateKind::Baseline;
  double c = kGeneralAdWordsC;
  double operator()(double y) const { return convergence_rate(kind, y, c); }
  std::string name() const { return to_string(kind); }
};

// Maximizer of the multi-way OCS objective on y_S + y_L1 + y_L2 = y.
struct MultiwayArgmax {
  double value = 1.0;  // the max (without the e^{-y} factor)
  double y_s = 0, y_l1 = 0, y_l2 = 0;
};
double multiway_objective(double y_s, double y_l1, double y_l2);
MultiwayArgmax multiway_argmax(double y);

// 1 - int_0^inf g(z) e^{-z} dz
double adversarial_gamma(const RateCurve& g);
// min over y in (0, 1] of (1 - g(y)) / y
double chord_ratio(const RateCurve& g);
// Gamma for MultiwayOcsAdWords and Baseline-in-adversarial use; chord ratio otherwise.
double ratio_constant(RateKind kind, double c = kGeneralAdWordsC);

struct CheckResult {
  std::string name;
  bool pass = false;
  double worst = 0.0;  // worst residual in the check's own sign convention
  std::string detail;
};

// Numeric certification of the univariate facts behind the rate curves.
std::vector<CheckResult> appendix_b_checks(double step = 1e-3);

}  // namespace socs
