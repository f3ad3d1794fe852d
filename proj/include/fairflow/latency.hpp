#pragma once

#include <optional>
#include <string_view>
#include <variant>
#include <vector>

namespace fairflow {

// Parameter blocks for the supported latency families. All parameters are
// nonnegative; see LatencyFn for the validation rules.

struct Constant {
  double c = 0.0;
  bool operator==(const Constant&) const = default;
};

/// slope * x + intercept
struct Affine {
  double slope = 0.0;
  double intercept = 0.0;
  bool operator==(const Affine&) const = default;
};

/// coef * x^degree
struct Monomial {
  double coef = 1.0;
  int degree = 1;
  bool operator==(const Monomial&) const = default;
};

/// sum_k coefs[k] * x^k
struct Polynomial {
  std::vector<double> coefs;
  bool operator==(const Polynomial&) const = default;
};

/// Bureau of Public Roads: free_flow_time * (1 + a * (x / capacity)^power)
struct Bpr {
  double free_flow_time = 1.0;
  double capacity = 1.0;
  double a = 0.15;
  double power = 4.0;
  bool operator==(const Bpr&) const = default;
};

/// sup over x > 0 of marginal(x) / evaluate(x).
struct Steepness {
  double value = 1.0;
  /// True when the supremum is only approached as x -> infinity.
  bool attained_in_limit = false;
};

/// A latency function from a closed set of families. Immutable once built.
///
/// Every member is nonnegative, nondecreasing and standard (x * l(x) convex)
/// on [0, inf), so marginal cost, antiderivative and steepness all have
/// closed forms.
class LatencyFn {
 public:
  using Params = std::variant<Constant, Affine, Monomial, Polynomial, Bpr>;

  /// Throws DomainError on negative or non-finite parameters, zero BPR
  /// capacity, BPR power below 1, or an empty coefficient list.
  explicit LatencyFn(Params params);

  static LatencyFn constant(double c);
  static LatencyFn affine(double slope, double intercept);
  static LatencyFn monomial(double coef, int degree);
  static LatencyFn polynomial(std::vector<double> coefs);
  static LatencyFn bpr(double free_flow_time, double capacity, double a, double power);

  /// l(x). Throws DomainError for x < 0.
  double evaluate(double x) const;
  /// l'(x).
  double derivative(double x) const;
  /// d/dx (x * l(x)) = l(x) + x * l'(x).
  double marginal(double x) const;
  /// Integral of l over [0, x].
  double integral(double x) const;
  Steepness steepness() const;

  /// Degree when the function is a polynomial with nonnegative coefficients
  /// (BPR counts when its power is integral); nullopt otherwise.
  std::optional<int> polynomial_degree() const;

  /// True when l is identically zero.
  bool is_zero() const;

  const Params& params() const { return params_; }
  std::string_view kind() const;

  bool operator==(const LatencyFn&) const = default;

 private:
  Params params_;
};

}  // namespace fairflow
