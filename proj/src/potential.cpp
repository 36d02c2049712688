#include "metaspec/potential.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

#include "metaspec/error.hpp"
#include "metaspec/linalg.hpp"

namespace metaspec {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kSignSamples = 200;

std::string describe(const char* kind, std::size_t index, double x) {
  std::ostringstream os;
  os.precision(17);
  os << kind << "_" << index << " = " << x;
  return os.str();
}

// Linear interpolation of the derivative between knots and its integral.
struct KnotTable {
  std::vector<double> x;
  std::vector<double> slope;
  std::vector<double> value;  // U at each knot, U(x[0]) = 0

  explicit KnotTable(const std::vector<Knot>& knots) {
    for (const auto& k : knots) {
      x.push_back(k.x);
      slope.push_back(k.slope);
    }
    value.assign(x.size(), 0.0);
    for (std::size_t k = 1; k < x.size(); ++k) {
      value[k] = value[k - 1] + 0.5 * (x[k] - x[k - 1]) * (slope[k - 1] + slope[k]);
    }
  }

  // Index k of the segment [x[k], x[k+1]) containing t, or -1 / size-1 outside.
  std::ptrdiff_t segment(double t) const {
    const auto it = std::upper_bound(x.begin(), x.end(), t);
    return std::distance(x.begin(), it) - 1;
  }

  double deriv(double t) const {
    const std::ptrdiff_t k = segment(t);
    if (k < 0) return slope.front();
    if (k + 1 >= static_cast<std::ptrdiff_t>(x.size())) return slope.back();
    const double w = (t - x[k]) / (x[k + 1] - x[k]);
    return slope[k] + w * (slope[k + 1] - slope[k]);
  }

  double eval(double t) const {
    const std::ptrdiff_t k = segment(t);
    if (k < 0) return slope.front() * (t - x.front());
    if (k + 1 >= static_cast<std::ptrdiff_t>(x.size())) {
      return value.back() + slope.back() * (t - x.back());
    }
    const double d = t - x[k];
    const double len = x[k + 1] - x[k];
    return value[k] + slope[k] * d + 0.5 * (slope[k + 1] - slope[k]) * d * d / len;
  }
};

void check_knots(const std::vector<Knot>& knots) {
  if (knots.size() < 2) throw DomainError("potential: a knot table needs at least two knots");
  for (std::size_t k = 0; k < knots.size(); ++k) {
    if (!std::isfinite(knots[k].x) || !std::isfinite(knots[k].slope)) {
      throw DomainError("potential: knot " + std::to_string(k) + " is not finite");
    }
    if (k > 0 && !(knots[k].x > knots[k - 1].x)) {
      throw DomainError("potential: knot abscissae must increase strictly (knot " +
                        std::to_string(k) + ")");
    }
  }
  if (!(knots.front().slope < 0.0) || !(knots.back().slope > 0.0)) {
    throw DomainError("potential: U' must be negative left of the first knot and positive right "
                      "of the last knot");
  }
}

double horner(const std::vector<double>& c, double x) {
  double acc = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * x + c[k];
  return acc;
}

std::vector<double> derivative_coeffs(const std::vector<double>& c) {
  std::vector<double> d;
  for (std::size_t k = 1; k < c.size(); ++k) d.push_back(static_cast<double>(k) * c[k]);
  return d;
}

}  // namespace

Potential::Potential(Fn value, Fn deriv, std::vector<double> minima, std::vector<double> maxima,
                     std::string description, double kink_width)
    : value_(std::move(value)),
      deriv_(std::move(deriv)),
      minima_(std::move(minima)),
      maxima_(std::move(maxima)),
      description_(std::move(description)),
      kink_width_(kink_width) {
  validate();
}

double Potential::second_deriv(double x) const {
  const double d = kink_width_ > 0.0 ? 0.25 * kink_width_ : 1e-5 * std::max(1.0, std::abs(x));
  return (deriv_(x + d) - deriv_(x - d)) / (2.0 * d);
}

double Potential::barrier(std::size_t i) const {
  if (i == 0) return -kInf;
  if (i >= minima_.size()) return kInf;
  return maxima_[i - 1];
}

void Potential::validate() const {
  if (!value_ || !deriv_) throw DomainError("potential: U and U' must both be supplied");
  if (!(kink_width_ >= 0.0) || !std::isfinite(kink_width_)) {
    throw DomainError("potential: kink width must be finite and non-negative");
  }
  const std::size_t n = minima_.size();
  if (n < 2) throw DomainError("potential: at least two minima are required");
  if (maxima_.size() != n - 1) {
    std::ostringstream os;
    os << "potential: " << n << " minima need " << n - 1 << " maxima, got " << maxima_.size();
    throw DomainError(os.str());
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(minima_[i])) throw DomainError("potential: " + describe("m", i + 1, minima_[i]) + " is not finite");
    if (i + 1 < n && !std::isfinite(maxima_[i])) throw DomainError("potential: " + describe("s", i + 1, maxima_[i]) + " is not finite");
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!(minima_[i] < maxima_[i])) {
      throw DomainError("potential: interleaving violated, " + describe("m", i + 1, minima_[i]) +
                        " is not below " + describe("s", i + 1, maxima_[i]));
    }
    if (!(maxima_[i] < minima_[i + 1])) {
      throw DomainError("potential: interleaving violated, " + describe("s", i + 1, maxima_[i]) +
                        " is not below " + describe("m", i + 2, minima_[i + 1]));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double c = second_deriv(minima_[i]);
    if (!(c > 0.0)) {
      std::ostringstream os;
      os << "potential: " << describe("m", i + 1, minima_[i]) << " is not a nondegenerate minimum (U'' = " << c << ")";
      throw DomainError(os.str());
    }
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double c = second_deriv(maxima_[i]);
    if (!(c < 0.0)) {
      std::ostringstream os;
      os << "potential: " << describe("s", i + 1, maxima_[i]) << " is not a nondegenerate maximum (U'' = " << c << ")";
      throw DomainError(os.str());
    }
  }
  // Sign of U' on each monotone stretch. Outer stretches are sampled over a
  // range comparable to the extent of the extrema.
  const double outer = std::max(1.0, minima_.back() - minima_.front());
  for (std::size_t i = 0; i < n; ++i) {
    const double m = minima_[i];
    const double left = i == 0 ? m - outer : maxima_[i - 1];
    const double right = i + 1 == n ? m + outer : maxima_[i];
    for (int side = 0; side < 2; ++side) {
      const double lo = side == 0 ? left : m;
      const double hi = side == 0 ? m : right;
      const double sign = side == 0 ? -1.0 : 1.0;
      for (int k = 1; k < kSignSamples; ++k) {
        const double x = lo + (hi - lo) * k / kSignSamples;
        const double g = deriv_(x);
        if (!(g * sign > 0.0)) {
          std::ostringstream os;
          os.precision(17);
          os << "potential: U'(" << x << ") = " << g << " has the wrong sign "
             << (side == 0 ? "left" : "right") << " of " << describe("m", i + 1, m);
          throw DomainError(os.str());
        }
      }
    }
  }
}

int well_index(double x, const Potential& p) {
  const auto& s = p.maxima();
  return static_cast<int>(std::upper_bound(s.begin(), s.end(), x) - s.begin()) + 1;
}

Potential piecewise_linear_potential(std::vector<Knot> knots, double kink_width,
                                     std::string description) {
  check_knots(knots);
  auto table = std::make_shared<const KnotTable>(knots);
  std::vector<double> minima;
  std::vector<double> maxima;
  const auto& xs = table->x;
  const auto& sl = table->slope;
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    if (sl[k] == 0.0 && sl[k + 1] == 0.0) {
      std::ostringstream os;
      os << "potential: U' vanishes on the whole segment [" << xs[k] << ", " << xs[k + 1] << "]";
      throw DomainError(os.str());
    }
    if (sl[k] * sl[k + 1] < 0.0) {
      const double root = xs[k] - sl[k] * (xs[k + 1] - xs[k]) / (sl[k + 1] - sl[k]);
      (sl[k] < 0.0 ? minima : maxima).push_back(root);
    } else if (sl[k + 1] == 0.0 && k + 2 < xs.size()) {
      if (sl[k] * sl[k + 2] < 0.0) (sl[k] < 0.0 ? minima : maxima).push_back(xs[k + 1]);
    }
  }
  return Potential([table](double x) { return table->eval(x); },
                   [table](double x) { return table->deriv(x); }, std::move(minima),
                   std::move(maxima), std::move(description), kink_width);
}

Potential example_potential(double kappa) {
  if (!(kappa > 0.0) || !(kappa < 0.5)) {
    throw DomainError("example_potential: kink half-width must lie in (0, 0.5)");
  }
  const std::vector<double> minima{-4.015, 0.468, 3.966};
  const std::vector<double> maxima{-1.034, 1.921};
  std::vector<Knot> knots;
  for (std::size_t i = 0; i < minima.size(); ++i) {
    knots.push_back({minima[i] - kappa, -1.0});
    knots.push_back({minima[i] + kappa, 1.0});
    if (i < maxima.size()) {
      knots.push_back({maxima[i] - kappa, 1.0});
      knots.push_back({maxima[i] + kappa, -1.0});
    }
  }
  check_knots(knots);
  auto table = std::make_shared<const KnotTable>(knots);
  std::ostringstream os;
  os << "example(kappa=" << kappa << ")";
  return Potential([table](double x) { return table->eval(x); },
                   [table](double x) { return table->deriv(x); }, minima, maxima, os.str(),
                   kappa);
}

Potential polynomial_potential(std::vector<double> coeffs) {
  while (!coeffs.empty() && coeffs.back() == 0.0) coeffs.pop_back();
  for (double c : coeffs) {
    if (!std::isfinite(c)) throw DomainError("polynomial potential: coefficients must be finite");
  }
  const std::size_t degree = coeffs.empty() ? 0 : coeffs.size() - 1;
  if (degree < 4 || degree % 2 != 0 || !(coeffs.back() > 0.0)) {
    throw DomainError("polynomial potential: need even degree >= 4 with positive leading "
                      "coefficient");
  }
  const auto d1 = derivative_coeffs(coeffs);
  const auto d2 = derivative_coeffs(d1);
  // Roots of U' from the companion matrix of the monic derivative.
  const std::size_t k = d1.size() - 1;
  Matrix companion(k, k);
  for (std::size_t j = 0; j < k; ++j) companion(0, j) = -d1[k - 1 - j] / d1[k];
  for (std::size_t i = 1; i < k; ++i) companion(i, i - 1) = 1.0;
  std::vector<double> roots;
  for (const complex z : eigenvalues(companion)) {
    if (std::abs(z.imag()) > 1e-7 * (1.0 + std::abs(z.real()))) continue;
    double x = z.real();
    for (int it = 0; it < 8; ++it) {
      const double slope = horner(d2, x);
      if (slope == 0.0) break;
      x -= horner(d1, x) / slope;
    }
    roots.push_back(x);
  }
  std::sort(roots.begin(), roots.end());
  std::vector<double> minima;
  std::vector<double> maxima;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    const double curvature = horner(d2, roots[i]);
    const bool expect_min = i % 2 == 0;
    if (expect_min ? !(curvature > 0.0) : !(curvature < 0.0)) {
      std::ostringstream os;
      os.precision(17);
      os << "polynomial potential: critical point " << roots[i] << " (U'' = " << curvature
         << ") breaks the minimum/maximum alternation";
      throw DomainError(os.str());
    }
    (expect_min ? minima : maxima).push_back(roots[i]);
  }
  std::ostringstream os;
  os.precision(17);
  os << "poly(";
  for (std::size_t i = 0; i < coeffs.size(); ++i) os << (i ? "," : "") << coeffs[i];
  os << ")";
  return Potential([coeffs](double x) { return horner(coeffs, x); },
                   [d1](double x) { return horner(d1, x); }, std::move(minima),
                   std::move(maxima), os.str());
}

std::vector<Knot> read_knot_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("potential: cannot open knot table '" + path + "'");
  std::vector<Knot> knots;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    Knot k{};
    if (!(ls >> k.x)) {
      if (line.find_first_not_of(" \t\r,") == std::string::npos) continue;
      throw DomainError("potential: " + path + ":" + std::to_string(lineno) + ": expected 'x slope'");
    }
    ls >> std::ws;
    if (ls.peek() == ',') ls.get();
    if (!(ls >> k.slope)) {
      throw DomainError("potential: " + path + ":" + std::to_string(lineno) + ": expected 'x slope'");
    }
    knots.push_back(k);
  }
  return knots;
}

}  // namespace metaspec
