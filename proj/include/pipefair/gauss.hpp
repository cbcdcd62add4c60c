#pragma once

// Scalar Gaussian primitives used throughout the screening model.
//
// Everything here is a pure function of its arguments. Thresholds that may be
// infinite are carried as `Cutoff` values so that no formula ever sees a
// floating-point infinity.

#include <compare>
#include <string>

namespace pipefair {

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;
inline constexpr double kLogSqrt2Pi = 0.918938533204672741780329736406;

// An extended real threshold: a finite value, or one of the two sentinels.
class Cutoff {
 public:
  enum class Kind { MinusInfinity, Finite, PlusInfinity };

  // Implicit on purpose: a plain double is a finite cutoff. Infinite doubles
  // are mapped onto the sentinels; NaN is rejected.
  Cutoff(double value);  // NOLINT(google-explicit-constructor)

  static Cutoff minus_infinity() noexcept { return Cutoff(Kind::MinusInfinity); }
  static Cutoff plus_infinity() noexcept { return Cutoff(Kind::PlusInfinity); }

  Kind kind() const noexcept { return kind_; }
  bool is_finite() const noexcept { return kind_ == Kind::Finite; }
  bool is_minus_infinity() const noexcept { return kind_ == Kind::MinusInfinity; }
  bool is_plus_infinity() const noexcept { return kind_ == Kind::PlusInfinity; }

  // Throws InvalidArgument on a sentinel.
  double value() const;

  // Finite value, or +-inf for the sentinels. Only for output and comparisons.
  double as_double() const noexcept;

  std::string to_string() const;

  friend bool operator==(const Cutoff&, const Cutoff&) = default;
  friend std::partial_ordering operator<=>(const Cutoff& a, const Cutoff& b) noexcept {
    return a.as_double() <=> b.as_double();
  }

 private:
  explicit Cutoff(Kind kind) noexcept : kind_(kind) {}

  Kind kind_ = Kind::Finite;
  double value_ = 0.0;
};

// Parses "-inf", "+inf", "inf" or a finite decimal number.
Cutoff parse_cutoff(const std::string& text);

struct GaussianParams {
  double mean = 0.0;
  double sd = 1.0;
};

// Throws InvalidArgument unless mean is finite and sd is finite and positive.
void validate(const GaussianParams& g);

struct PdfCdf {
  double density = 0.0;
  double probability = 0.0;
};

PdfCdf std_pdf_cdf(double x);
double std_pdf(double x);
double std_cdf(double x);
// 1 - Phi(x), accurate in relative terms far into the upper tail.
double std_upper_tail(double x);

double log_std_pdf(double x);
double log_std_cdf(double x);
double log_std_upper_tail(double x);

// Mills ratio (1 - Phi(x)) / phi(x).
double mills_ratio(double x);

// Hazard rate phi(x) / (1 - Phi(x)) of a standard normal.
double hazard(double x);
double log_hazard(double x);

// Mean of the Gaussian `g` truncated below at `lower`.
double truncated_mean(const GaussianParams& g, Cutoff lower);

struct ProductResult {
  double mean = 0.0;
  double sd = 1.0;
  // log of the integral over t of phi((mean_a - t)/sd_a) * phi((mean_b - t)/sd_b).
  double log_normalizer = 0.0;
};

ProductResult gaussian_product(const GaussianParams& a, const GaussianParams& b);

// Law of T given S = s and G = g when T ~ prior, S = T + N(0, 1) and
// G = T + N(0, gamma^2) with independent noises.
GaussianParams condition_type_on_score_grade(const GaussianParams& prior, double gamma, double s,
                                             double g);

}  // namespace pipefair
