#include "socs/rates.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "socs/error.hpp"

namespace socs {

namespace {
const double kE = std::exp(1.0);
double pos(double v) { return v > 0 ? v : 0.0; }
}  // namespace

const char* to_string(RateKind k) {
  switch (k) {
    case RateKind::Baseline: return "Baseline";
    case RateKind::TwoWayMatching: return "TwoWayMatching";
    case RateKind::GeneralMatching: return "GeneralMatching";
    case RateKind::RandomOrderMatching: return "RandomOrderMatching";
    case RateKind::TwoWayAdWords: return "TwoWayAdWords";
    case RateKind::GeneralAdWords: return "GeneralAdWords";
    case RateKind::MultiwayOcsAdWords: return "MultiwayOcsAdWords";
    case RateKind::TwoWayDisplay: return "TwoWayDisplay";
    case RateKind::GeneralDisplay: return "GeneralDisplay";
  }
  return "?";
}

const std::vector<RateKind>& all_rate_kinds() {
  static const std::vector<RateKind> k{RateKind::Baseline,          RateKind::TwoWayMatching,
                                       RateKind::GeneralMatching,   RateKind::RandomOrderMatching,
                                       RateKind::TwoWayAdWords,     RateKind::GeneralAdWords,
                                       RateKind::MultiwayOcsAdWords, RateKind::TwoWayDisplay,
                                       RateKind::GeneralDisplay};
  return k;
}

RateKind rate_kind_from_string(const std::string& s) {
  for (auto k : all_rate_kinds())
    if (s == to_string(k)) return k;
  throw InvalidInput("unknown rate kind '" + s + "'");
}

double multiway_objective(double ys, double l1, double l2) {
  const double a = (1 + ys / 2) * std::exp(-ys / 2);
  const double c = 0.75 + 0.25 * (1 + l2 / 2) * std::exp(-l2 / 2);
  double e = 1.0;
  if (l1 > 0) e = std::exp(-l1 * l1 / (3 * l1 + 6 * l2));
  return a * c * e;
}

namespace {

// Best y_L1 for fixed y_L2 = b and remaining mass r = y_S + y_L1. The
// objective is concave in y_L1; its derivative has the sign of
//   s/(2(2+s)) - (3 l1^2 + 12 l1 b)/(3 l1 + 6 b)^2,  s = r - l1,
// which is decreasing in l1.
double best_l1(double r, double b, double tol = 1e-15) {
  if (r <= 0) return 0.0;
  auto slope = [&](double l1) {
    const double s = r - l1;
    const double left = s / (2 * (2 + s));
    double right;
    if (b <= 0) right = 1.0 / 3.0;
    else {
      const double d = 3 * l1 + 6 * b;
      right = (3 * l1 * l1 + 12 * l1 * b) / (d * d);
    }
    return left - right;
  };
  if (slope(0.0) <= 0) return 0.0;
  if (slope(r) >= 0) return r;
  double lo = 0, hi = r;
  for (int it = 0; it < 200 && hi - lo > tol * std::max(1.0, r); ++it) {
    const double mid = 0.5 * (lo + hi);
    (slope(mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double profile(double y, double b, double tol = 1e-15) {
  const double l1 = best_l1(y - b, b, tol);
  return multiway_objective(std::max(0.0, y - b - l1), l1, b);
}

}  // namespace

MultiwayArgmax multiway_argmax(double y) {
  MultiwayArgmax out;
  if (!(y > 0)) return out;
  auto neg = [&](double b) { return -profile(y, b); };
  // log C is concave for y_L2 below ~2.56; beyond that scan before refining.
  double lo = 0, hi = y;
  if (y > 2.4) {
    const int n = 256;
    int best = 0;
    double bv = -1;
    for (int k = 0; k <= n; ++k) {
      double v = profile(y, y * k / n, 1e-8);  // coarse: only picks the cell
      if (v > bv) {
        bv = v;
        best = k;
      }
    }
    lo = y * std::max(0, best - 1) / n;
    hi = y * std::min(n, best + 1) / n;
  }
  auto r = boost::math::tools::brent_find_minima(neg, lo, hi, std::numeric_limits<double>::digits / 2);
  double b = r.first, v = -r.second;
  for (double edge : {lo, hi}) {
    double ve = profile(y, edge);
    if (ve > v) {
      v = ve;
      b = edge;
    }
  }
  out.value = v;
  out.y_l2 = b;
  out.y_l1 = best_l1(y - b, b);
  out.y_s = std::max(0.0, y - b - out.y_l1);
  return out;
}

double convergence_rate(RateKind kind, double y, double c) {
  if (!(y >= 0)) throw InvalidInput("convergence_rate: y must be non-negative");
  switch (kind) {
    case RateKind::Baseline: return std::exp(-y);
    case RateKind::TwoWayMatching: return (1 + y) * std::exp(-2 * y);
    case RateKind::GeneralMatching:
      if (y <= 0.5) return 0.25 * (std::exp(-2 * y) + 3 - 2 * y);
      return std::exp(-2 * y) * ((1 + kE) / 4 + kE / 2 * y);
    case RateKind::RandomOrderMatching:
      if (y <= 0.5) return (1 + y / 2) * std::exp(-2 * y) + 0.5 * y * (1 - y);
      return std::exp(-2 * y) * (1 + (0.5 + kE / 4) * y);
    case RateKind::TwoWayAdWords: {
      const double h = 0.75 + 0.25 * (1 + y / 4) * std::exp(-y / 4);
      return std::exp(-y) * h * h;
    }
    case RateKind::GeneralAdWords: {
      const double u = pos(y - c);
      const double h = 0.75 + 0.25 * (1 + u / 4) * std::exp(-u / 4);
      return std::exp(-y) * h * h;
    }
    case RateKind::MultiwayOcsAdWords: return std::exp(-y) * multiway_argmax(y).value;
    case RateKind::TwoWayDisplay:
      return std::min((1 + y / 2) * std::exp(-1.5 * y) + (1 - y) / 15, std::exp(-y));
    case RateKind::GeneralDisplay: {
      const double u = pos(y - 0.44);
      return std::min(std::exp(-y), std::exp(-y) * (1 + u / 2) * std::exp(-u / 2) + (1 - y) / 15);
    }
  }
  throw InvalidInput("convergence_rate: unknown kind");
}

double adversarial_gamma(const RateCurve& g) {
  using boost::math::quadrature::gauss_kronrod;
  auto f = [&](double z) { return g(z) * std::exp(-z); };
  double integral = 0;
  // Piecewise so joints sit on panel boundaries; tail beyond 40 is below e^{-40}.
  const double cuts[] = {0, 0.44, 0.5, g.c, 1, 2, 4, 8, 16, 40};
  std::vector<double> pts(std::begin(cuts), std::end(cuts));
  std::sort(pts.begin(), pts.end());
  for (std::size_t k = 0; k + 1 < pts.size(); ++k)
    if (pts[k + 1] > pts[k]) integral += gauss_kronrod<double, 31>::integrate(f, pts[k], pts[k + 1], 8, 1e-13);
  return 1 - integral;
}

double chord_ratio(const RateCurve& g) {
  double best = std::numeric_limits<double>::infinity();
  const int n = 10000;
  for (int k = 1; k <= n; ++k) {
    const double y = static_cast<double>(k) / n;
    best = std::min(best, (1 - g(y)) / y);
  }
  return best;
}

double ratio_constant(RateKind kind, double c) {
  RateCurve g{kind, c};
  if (kind == RateKind::MultiwayOcsAdWords) return adversarial_gamma(g);
  return chord_ratio(g);
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

// max over interior grid points of f(x-h) - 2 f(x) + f(x+h)
double max_second_difference(const std::function<double(double)>& f, double a, double b, double h) {
  double worst = -std::numeric_limits<double>::infinity();
  const int n = static_cast<int>(std::llround((b - a) / h));
  for (int k = 1; k < n; ++k) {
    const double x = a + k * h;
    worst = std::max(worst, f(x - h) - 2 * f(x) + f(x + h));
  }
  return worst;
}

double min_first_difference(const std::function<double(double)>& f, double a, double b, double h) {
  double worst = std::numeric_limits<double>::infinity();
  const int n = static_cast<int>(std::llround((b - a) / h));
  for (int k = 0; k < n; ++k) worst = std::min(worst, f(a + (k + 1) * h) - f(a + k * h));
  return worst;
}

// Second-order one-sided derivatives.
double left_derivative(const std::function<double(double)>& f, double x, double h = 1e-5) {
  return (3 * f(x) - 4 * f(x - h) + f(x - 2 * h)) / (2 * h);
}
double right_derivative(const std::function<double(double)>& f, double x, double h = 1e-5) {
  return (-3 * f(x) + 4 * f(x + h) - f(x + 2 * h)) / (2 * h);
}

CheckResult concavity(const std::string& name, const std::function<double(double)>& f, double a, double b,
                      double h) {
  const double w = max_second_difference(f, a, b, h);
  return {name, w <= 1e-10, w, "max second difference " + fmt(w)};
}

CheckResult joint(const std::string& name, const std::function<double(double)>& f, double x, double expect) {
  const double l = left_derivative(f, x), r = right_derivative(f, x);
  const double w = std::max(std::abs(l - expect), std::abs(r - expect));
  return {name, w <= 1e-6, w, "left " + fmt(l) + ", right " + fmt(r) + ", expected " + fmt(expect)};
}

}  // namespace

std::vector<CheckResult> appendix_b_checks(double h) {
  std::vector<CheckResult> out;
  const double ln2 = std::log(2.0);

  {  // 1 - a x <= (1 + b x) e^{-(a+b) x} for a >= b >= 0
    double worst = std::numeric_limits<double>::infinity();
    for (double a : {0.25, 0.5, 1.0, 1.5, 2.0, 3.0})
      for (double b : {0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0}) {
        if (b > a) continue;
        const int n = static_cast<int>(std::llround(3.0 / h));
        for (int k = 0; k <= n; ++k) {
          const double x = k * h;
          worst = std::min(worst, (1 + b * x) * std::exp(-(a + b) * x) - (1 - a * x));
        }
      }
    out.push_back({"B1 exponential bound", worst >= -1e-12, worst, "min residual " + fmt(worst)});
    const double at0 = (1 + 0.0) * std::exp(0.0) - 1.0;
    out.push_back({"B1 equality at x=0 (a=2,b=1)", at0 == 0.0, at0, "residual " + fmt(at0)});
  }

  auto b2 = [&](double y) {
    const double u = pos(y - 1 + ln2);
    return 1 - (1 + u) * std::exp(-y - u);
  };
  out.push_back(concavity("B2 concavity (two-way composition bound)", b2, 0, 1, h));
  out.push_back(joint("B2 joint at 1-ln2", b2, 1 - ln2, 2 / kE));

  auto one_minus = [](RateKind k, double c = kGeneralAdWordsC) {
    return [k, c](double y) { return 1 - convergence_rate(k, y, c); };
  };
  out.push_back(concavity("B3 concavity of 1-g GeneralMatching", one_minus(RateKind::GeneralMatching), 0, 1, h));
  out.push_back(joint("B3 joint at 1/2", one_minus(RateKind::GeneralMatching), 0.5, 0.5 + 1 / (2 * kE)));
  out.push_back(
      concavity("B4 concavity of 1-g RandomOrderMatching", one_minus(RateKind::RandomOrderMatching), 0, 1, h));
  out.push_back(joint("B4 joint at 1/2", one_minus(RateKind::RandomOrderMatching), 0.5, 2 / kE));

  auto b5 = [](double x) { return std::log(3 + (1 + x) * std::exp(-x)); };
  out.push_back(concavity("B5 log-concavity ln(3+(1+x)e^-x)", b5, 0, 1, h));

  for (double c : {0.413, kGeneralAdWordsC}) {
    out.push_back(concavity("B6 concavity of 1-g GeneralAdWords c=" + fmt(c), one_minus(RateKind::GeneralAdWords, c),
                            0, 1, h));
    out.push_back(joint("B6 joint at c=" + fmt(c), one_minus(RateKind::GeneralAdWords, c), c, std::exp(-c)));
  }

  auto b7 = [](double x) { return std::exp(-x) * (1 - std::exp(-x / 2) * (1 + x / 2)); };
  {
    const double w = min_first_difference(b7, 0, 1, h);
    out.push_back({"B7 monotonicity", w >= -1e-12, w, "min first difference " + fmt(w)});
    const double f1 = b7(1.0);
    out.push_back({"B7 f(1) < 1/30", f1 < 1.0 / 30, f1, "f(1) = " + fmt(f1)});
  }

  {
    double worst = std::numeric_limits<double>::infinity();
    const int n0 = static_cast<int>(std::llround(0.9 / h));
    const int n1 = static_cast<int>(std::llround(1.0 / h));
    for (int k = n0; k <= n1; ++k) {
      const double y = k * h;
      worst = std::min(worst, (1 - convergence_rate(RateKind::GeneralDisplay, y)) / y);
    }
    out.push_back({"B8 (1-g)/y >= 0.644 on [0.9,1]", worst >= 0.644, worst, "min ratio " + fmt(worst)});
    const double chord = (1 - std::exp(-0.9)) / 0.9;
    out.push_back({"B8 chord of 1-e^-y at 0.9 > 0.659", chord > 0.659, chord, "chord " + fmt(chord)});
    double full = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= n1; ++k) {
      const double y = k * h;
      full = std::min(full, (1 - convergence_rate(RateKind::GeneralDisplay, y)) / y);
    }
    out.push_back({"B8 (1-g)/y >= 0.644 on (0,1]", full >= 0.644, full, "min ratio " + fmt(full)});
  }
  return out;
}

}  // namespace socs
