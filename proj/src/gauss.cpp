#include "pipefair/gauss.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "pipefair/error.hpp"

namespace pipefair {

namespace {

// Above this point 1 - Phi(x) is taken from the Mills-ratio continued
// fraction instead of erfc. Both agree to ~1e-15 relative at x = 8.
constexpr double kTailBranch = 8.0;

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) {
    throw InvalidArgument(std::string(what) + " must be finite");
  }
}

// Mills ratio for x > kTailBranch:
//   R(x) = 1 / (x + 1/(x + 2/(x + 3/(x + ...))))
// evaluated by the modified Lentz algorithm.
double mills_ratio_continued_fraction(double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  double f = x;
  double c = x;
  double d = 0.0;
  for (int j = 1; j < 500; ++j) {
    const double a = static_cast<double>(j);
    d = x + a * d;
    if (std::abs(d) < tiny) d = tiny;
    c = x + a / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < eps) break;
  }
  return 1.0 / f;
}

}  // namespace

Cutoff::Cutoff(double value) {
  if (std::isnan(value)) {
    throw InvalidArgument("cutoff must not be NaN");
  }
  if (std::isinf(value)) {
    kind_ = value > 0 ? Kind::PlusInfinity : Kind::MinusInfinity;
  } else {
    value_ = value;
  }
}

double Cutoff::value() const {
  if (!is_finite()) {
    throw InvalidArgument("cutoff " + to_string() + " has no finite value");
  }
  return value_;
}

double Cutoff::as_double() const noexcept {
  switch (kind_) {
    case Kind::MinusInfinity:
      return -std::numeric_limits<double>::infinity();
    case Kind::PlusInfinity:
      return std::numeric_limits<double>::infinity();
    case Kind::Finite:
      break;
  }
  return value_;
}

std::string Cutoff::to_string() const {
  switch (kind_) {
    case Kind::MinusInfinity:
      return "-inf";
    case Kind::PlusInfinity:
      return "+inf";
    case Kind::Finite:
      break;
  }
  std::ostringstream os;
  os.precision(12);
  os << value_;
  return os.str();
}

Cutoff parse_cutoff(const std::string& text) {
  if (text == "-inf" || text == "-infinity") return Cutoff::minus_infinity();
  if (text == "inf" || text == "+inf" || text == "infinity") return Cutoff::plus_infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw InvalidArgument("not a number: '" + text + "'");
  }
  if (used != text.size() || !std::isfinite(v)) {
    throw InvalidArgument("not a number: '" + text + "'");
  }
  return Cutoff(v);
}

void validate(const GaussianParams& g) {
  if (!std::isfinite(g.mean)) throw InvalidArgument("Gaussian mean must be finite");
  if (!std::isfinite(g.sd) || !(g.sd > 0.0)) {
    throw InvalidArgument("Gaussian sd must be finite and positive");
  }
}

double std_pdf(double x) {
  require_finite(x, "x");
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double log_std_pdf(double x) {
  require_finite(x, "x");
  return -0.5 * x * x - kLogSqrt2Pi;
}

double mills_ratio(double x) {
  require_finite(x, "x");
  if (x > kTailBranch) return mills_ratio_continued_fraction(x);
  return 0.5 * std::erfc(x / std::numbers::sqrt2) / std_pdf(x);
}

double std_upper_tail(double x) {
  require_finite(x, "x");
  if (x > kTailBranch) return std_pdf(x) * mills_ratio_continued_fraction(x);
  return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

double std_cdf(double x) {
  require_finite(x, "x");
  return std_upper_tail(-x);
}

PdfCdf std_pdf_cdf(double x) { return {std_pdf(x), std_cdf(x)}; }

double log_std_upper_tail(double x) {
  require_finite(x, "x");
  if (x > kTailBranch) return log_std_pdf(x) + std::log(mills_ratio_continued_fraction(x));
  return std::log(0.5 * std::erfc(x / std::numbers::sqrt2));
}

double log_std_cdf(double x) { return log_std_upper_tail(-x); }

double hazard(double x) {
  require_finite(x, "x");
  if (x > kTailBranch) return 1.0 / mills_ratio_continued_fraction(x);
  return std_pdf(x) / std_upper_tail(x);
}

double log_hazard(double x) {
  require_finite(x, "x");
  if (x > kTailBranch) return -std::log(mills_ratio_continued_fraction(x));
  return log_std_pdf(x) - log_std_upper_tail(x);
}

double truncated_mean(const GaussianParams& g, Cutoff lower) {
  validate(g);
  if (lower.is_minus_infinity()) return g.mean;
  if (lower.is_plus_infinity()) {
    throw InvalidArgument("truncation at +inf leaves no mass");
  }
  return g.mean + g.sd * hazard((lower.value() - g.mean) / g.sd);
}

ProductResult gaussian_product(const GaussianParams& a, const GaussianParams& b) {
  validate(a);
  validate(b);
  const double va = a.sd * a.sd;
  const double vb = b.sd * b.sd;
  const double sum = va + vb;
  ProductResult r;
  r.mean = (vb * a.mean + va * b.mean) / sum;
  r.sd = std::sqrt(va * vb / sum);
  // integral = sd_a * sd_b / sqrt(sum) * phi((mean_a - mean_b) / sqrt(sum))
  const double s = std::sqrt(sum);
  r.log_normalizer = std::log(a.sd) + std::log(b.sd) - std::log(s) + log_std_pdf((a.mean - b.mean) / s);
  return r;
}

GaussianParams condition_type_on_score_grade(const GaussianParams& prior, double gamma, double s,
                                             double g) {
  validate(prior);
  if (!std::isfinite(gamma) || !(gamma > 0.0)) throw InvalidArgument("gamma must be positive");
  require_finite(s, "score");
  require_finite(g, "grade");
  const double v = prior.sd * prior.sd;
  const double w = gamma * gamma;
  // Determinant of the (S, G) covariance block.
  const double det = v + w + v * w;
  GaussianParams out;
  out.mean = prior.mean + (v * w * (s - prior.mean) + v * (g - prior.mean)) / det;
  out.sd = std::sqrt(v * w / det);
  return out;
}

}  // namespace pipefair
