#pragma once

// Symmetric alpha-stable law of L_1 with characteristic function
// exp(-c(alpha) |u|^alpha), normalised so that u^alpha P(|L_1| >= u) -> 1.

namespace metaspec::stable {

/// c(alpha) = alpha * int_0^inf (1 - cos y) / y^(1+alpha) dy by adaptive
/// quadrature. Aborts with NumericError if it disagrees with the closed form
/// pi / (2 Gamma(alpha) sin(pi alpha / 2)) by more than 1e-10 (relative).
double c_alpha(double alpha);

/// pi / (2 Gamma(alpha) sin(pi alpha / 2)).
double c_alpha_closed_form(double alpha);

class StableParams {
 public:
  explicit StableParams(double alpha);

  double alpha() const { return alpha_; }
  double c_alpha() const { return c_alpha_; }
  /// Standardised argument above which the tail series replaces inversion.
  double switch_point() const { return switch_point_; }

 private:
  double alpha_;
  double c_alpha_;
  double switch_point_;
};

struct BranchValue {
  double value;
  double error_estimate;
};

/// P(L_1 > x) for x >= 0 by Gil-Pelaez inversion of the characteristic function.
BranchValue survival_by_inversion(double x, const StableParams& p);

/// P(L_1 > x) for x > 0 from the large-x series, truncated at its smallest term.
BranchValue survival_by_series(double x, const StableParams& p);

/// P(L_1 > x). Accepts +-infinity.
double survival(double x, const StableParams& p);

/// P(L_1 <= x).
double cdf(double x, const StableParams& p);

/// P(shift + scale * L_1 in [lo, hi)); lo may be -inf and hi may be +inf.
double interval_prob(double lo, double hi, double shift, double scale, const StableParams& p);

/// 1 - interval_prob(...), evaluated as the sum of the two tail masses so that
/// it keeps full relative precision when the interval holds almost all mass.
double outside_prob(double lo, double hi, double shift, double scale, const StableParams& p);

}  // namespace metaspec::stable
