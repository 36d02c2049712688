#include "metaspec/stable.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include "metaspec/error.hpp"

namespace metaspec::stable {
namespace {

using std::numbers::pi;
using boost::math::quadrature::gauss_kronrod;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxSeriesTerms = 400;
constexpr double kGkTolerance = 1e-13;
constexpr unsigned kGkDepth = 12;
constexpr int kMaxPieces = 20000;

// Epsilon-algorithm extrapolation of the limit of a sequence of partial sums,
// using at most the last 21 terms.
double wynn_epsilon(const std::vector<double>& sums) {
  const std::size_t m = std::min<std::size_t>(sums.size(), 21);
  std::vector<double> prev(m + 1, 0.0);
  std::vector<double> cur(sums.end() - m, sums.end());
  double best = cur.back();
  for (std::size_t k = 1; cur.size() > 1; ++k) {
    std::vector<double> next(cur.size() - 1);
    for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
      const double diff = cur[i + 1] - cur[i];
      if (diff == 0.0) return cur[i + 1];
      next[i] = prev[i + 1] + 1.0 / diff;
    }
    prev.assign(cur.begin(), cur.end());
    cur = std::move(next);
    if (k % 2 == 0) best = cur.back();
  }
  return best;
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0)) {
    std::ostringstream os;
    os << "stable: alpha must lie in (0, 2), got " << alpha;
    throw DomainError(os.str());
  }
}

// int_Y^inf (1 - cos y) y^(-1-alpha) dy for Y a multiple of 2 pi, from
// repeated integration by parts of the cosine part.
double defining_integral_tail(double alpha, double Y) {
  const double beta = 1.0 + alpha;
  double term = beta * std::pow(Y, -beta - 1.0);
  double cos_part = 0.0;
  for (int j = 0; j < 50 && std::abs(term) > 1e-30; ++j) {
    cos_part += term;
    term *= -(beta + 2 * j + 1) * (beta + 2 * j + 2) / (Y * Y);
  }
  return std::pow(Y, -alpha) / alpha - cos_part;
}

double find_switch_point(const StableParams& p) {
  for (double x = 0.25; x < 1e4; x *= 1.05) {
    const BranchValue s = survival_by_series(x, p);
    if (s.value > 0.0 && s.error_estimate <= 1e-12 * s.value) return x;
  }
  std::ostringstream os;
  os << "stable: no usable tail-series switch point for alpha=" << p.alpha();
  throw NumericError(os.str());
}

}  // namespace

double c_alpha_closed_form(double alpha) {
  check_alpha(alpha);
  return pi / (2.0 * std::tgamma(alpha) * std::sin(pi * alpha / 2.0));
}

double c_alpha(double alpha) {
  check_alpha(alpha);
  const double two_pi = 2.0 * pi;
  auto integrand = [alpha](double y) {
    if (y <= 0.0) return 0.0;
    const double r = std::sin(0.5 * y) / y;
    return 2.0 * r * r * std::pow(y, 1.0 - alpha);
  };
  // On [0, 1] the integrand behaves like y^(1-alpha)/2; integrate the cosine
  // Taylor series termwise there.
  double total = 0.0;
  double factorial = 2.0;
  for (int k = 1; k <= 12; ++k) {
    const double power = 2.0 * k - alpha;
    total += ((k % 2 == 1) ? 1.0 : -1.0) / (factorial * power);
    factorial *= (2.0 * k + 1.0) * (2.0 * k + 2.0);
  }
  total += gauss_kronrod<double, 21>::integrate(integrand, 1.0, two_pi, kGkDepth, kGkTolerance);
  constexpr int kPeriods = 64;
  for (int k = 1; k < kPeriods; ++k) {
    total += gauss_kronrod<double, 21>::integrate(integrand, k * two_pi, (k + 1) * two_pi,
                                                  kGkDepth, kGkTolerance);
  }
  total += defining_integral_tail(alpha, kPeriods * two_pi);
  const double value = alpha * total;
  const double closed = c_alpha_closed_form(alpha);
  if (!(std::abs(value - closed) <= 1e-10 * closed)) {
    std::ostringstream os;
    os.precision(17);
    os << "stable: c(alpha) quadrature " << value << " disagrees with closed form " << closed
       << " at alpha=" << alpha;
    throw NumericError(os.str());
  }
  return value;
}

StableParams::StableParams(double alpha) : alpha_(alpha), c_alpha_(0.0), switch_point_(0.0) {
  check_alpha(alpha);
  c_alpha_ = stable::c_alpha(alpha);
  switch_point_ = find_switch_point(*this);
}

BranchValue survival_by_series(double x, const StableParams& p) {
  const double alpha = p.alpha();
  if (!(x > 0.0)) throw DomainError("stable: tail series needs x > 0");
  if (std::isinf(x)) return {0.0, 0.0};
  // S(x) = (1/pi) sum_k (-1)^(k+1) Gamma(alpha k) / k! sin(k pi alpha / 2) (c x^-alpha)^k
  const double log_z = std::log(p.c_alpha()) - alpha * std::log(x);
  double sum = 0.0;
  double largest = 0.0;
  double prev_envelope = kInf;
  double omitted = kInf;
  int k = 1;
  for (; k <= kMaxSeriesTerms; ++k) {
    const double log_env = std::lgamma(alpha * k) - std::lgamma(k + 1.0) + k * log_z;
    const double envelope = std::exp(log_env) / pi;
    if (alpha > 1.0 && envelope > prev_envelope) {
      omitted = envelope;
      break;
    }
    const double sign = (k % 2 == 1) ? 1.0 : -1.0;
    sum += sign * std::sin(k * pi * alpha / 2.0) * envelope;
    largest = std::max(largest, envelope);
    prev_envelope = envelope;
    if (envelope <= 1e-17 * std::abs(sum)) {
      omitted = 0.0;
      break;
    }
  }
  if (k > kMaxSeriesTerms) omitted = prev_envelope;
  const double rounding = std::numeric_limits<double>::epsilon() * largest * std::sqrt(double(k));
  return {sum, omitted + rounding};
}

BranchValue survival_by_inversion(double x, const StableParams& p) {
  if (!(x >= 0.0)) throw DomainError("stable: inversion branch needs x >= 0");
  if (x == 0.0) return {0.5, 0.0};
  const double alpha = p.alpha();
  // Rescale so that the characteristic function is exp(-v^alpha).
  const double y = x * std::pow(p.c_alpha(), -1.0 / alpha);
  const double v_max = std::pow(45.0, 1.0 / alpha);
  auto integrand = [alpha, y](double v) {
    const double vy = v * y;
    const double sinc = std::abs(vy) < 1e-4 ? y * (1.0 - vy * vy / 6.0) : std::sin(vy) / v;
    return sinc * std::exp(-std::pow(v, alpha));
  };
  // Half-period pieces alternate in sign with a smooth decreasing envelope;
  // their partial sums are accelerated with the epsilon algorithm.
  const double half_period = pi / y;
  std::vector<double> partial;
  double integral = 0.0;
  double error = 0.0;
  double running = 0.0;
  double previous_estimate = kInf;
  for (int piece = 0; piece < kMaxPieces; ++piece) {
    const double lo = piece * half_period;
    if (lo >= v_max) {
      integral = running;
      break;
    }
    const double hi = std::min(lo + half_period, v_max);
    double piece_error = 0.0;
    if (piece == 0) {
      // exp(-v^alpha) is not smooth at v = 0; integrate the first piece over
      // dyadic subintervals that shrink towards the origin. The integrand is
      // bounded by y, so the part below `floor` is negligible. A single
      // 21-point rule per subinterval is exact to rounding here.
      const double floor = 1e-18 / y;
      for (double b = hi; b > floor; b *= 0.5) {
        double e = 0.0;
        running += gauss_kronrod<double, 21>::integrate(integrand, 0.5 * b, b, 0, 0.0, &e);
        piece_error += std::abs(e);
      }
    } else {
      running += gauss_kronrod<double, 21>::integrate(integrand, lo, hi, kGkDepth, kGkTolerance,
                                                      &piece_error);
    }
    error += std::abs(piece_error);
    partial.push_back(running);
    integral = running;
    if (partial.size() >= 10) {
      const double estimate = wynn_epsilon(partial);
      if (std::abs(estimate - previous_estimate) <= 1e-16 + 1e-15 * std::abs(estimate)) {
        integral = estimate;
        error += std::abs(estimate - previous_estimate);
        break;
      }
      previous_estimate = estimate;
    }
    if (piece + 1 == kMaxPieces) {
      std::ostringstream os;
      os << "stable: oscillatory inversion integral not converged after " << kMaxPieces
         << " half periods at x=" << x << " alpha=" << alpha;
      throw NumericError(os.str());
    }
  }
  if (!std::isfinite(integral)) {
    std::ostringstream os;
    os << "stable: inversion integral did not converge at x=" << x << " alpha=" << alpha;
    throw NumericError(os.str());
  }
  return {0.5 - integral / pi, error / pi};
}

double survival(double x, const StableParams& p) {
  if (std::isnan(x)) throw DomainError("stable: survival of NaN");
  if (x == kInf) return 0.0;
  if (x == -kInf) return 1.0;
  if (x < 0.0) return 1.0 - survival(-x, p);
  if (x > p.switch_point()) return survival_by_series(x, p).value;
  return survival_by_inversion(x, p).value;
}

double cdf(double x, const StableParams& p) {
  if (x <= 0.0) return survival(-x, p);
  return 1.0 - survival(x, p);
}

namespace {

double standardize(double bound, double shift, double scale) {
  if (std::isinf(bound)) return bound;
  return (bound - shift) / scale;
}

void check_interval(double lo, double hi, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    std::ostringstream os;
    os << "stable: scale must be positive and finite, got " << scale;
    throw DomainError(os.str());
  }
  if (!(lo < hi)) {
    std::ostringstream os;
    os << "stable: empty interval [" << lo << ", " << hi << ")";
    throw DomainError(os.str());
  }
}

}  // namespace

double interval_prob(double lo, double hi, double shift, double scale, const StableParams& p) {
  check_interval(lo, hi, scale);
  const double l = standardize(lo, shift, scale);
  const double u = standardize(hi, shift, scale);
  if (l >= 0.0) return survival(l, p) - survival(u, p);
  if (u <= 0.0) return survival(-u, p) - survival(-l, p);
  return 1.0 - survival(-l, p) - survival(u, p);
}

double outside_prob(double lo, double hi, double shift, double scale, const StableParams& p) {
  check_interval(lo, hi, scale);
  const double l = standardize(lo, shift, scale);
  const double u = standardize(hi, shift, scale);
  const double below = l <= 0.0 ? survival(-l, p) : 1.0 - survival(l, p);
  const double above = u >= 0.0 ? survival(u, p) : 1.0 - survival(-u, p);
  return below + above;
}

}  // namespace metaspec::stable
