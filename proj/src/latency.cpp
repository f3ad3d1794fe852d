#include "fairflow/latency.hpp"

#include <cmath>
#include <string>

#include "fairflow/errors.hpp"

namespace fairflow {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_param(double v, const char* what) {
  if (!std::isfinite(v) || v < 0.0) {
    throw DomainError(std::string("latency parameter '") + what + "' must be finite and nonnegative");
  }
}

void require_domain(double x) {
  if (!(x >= 0.0)) throw DomainError("latency evaluated at negative load " + std::to_string(x));
}

// x^n for a nonnegative integer n; pow(0, 0) is 1.
double ipow(double x, int n) { return n == 0 ? 1.0 : std::pow(x, n); }

}  // namespace

LatencyFn::LatencyFn(Params params) : params_(std::move(params)) {
  std::visit(Overloaded{
                 [](const Constant& p) { require_param(p.c, "c"); },
                 [](const Affine& p) {
                   require_param(p.slope, "slope");
                   require_param(p.intercept, "intercept");
                 },
                 [](const Monomial& p) {
                   require_param(p.coef, "coef");
                   if (p.degree < 0) throw DomainError("monomial degree must be nonnegative");
                 },
                 [](const Polynomial& p) {
                   if (p.coefs.empty()) throw DomainError("polynomial needs at least one coefficient");
                   for (double c : p.coefs) require_param(c, "coefs");
                 },
                 [](const Bpr& p) {
                   require_param(p.free_flow_time, "xi");
                   require_param(p.a, "a");
                   if (!std::isfinite(p.capacity) || p.capacity <= 0.0) {
                     throw DomainError("BPR capacity must be positive");
                   }
                   if (!std::isfinite(p.power) || p.power < 1.0) {
                     throw DomainError("BPR power must be at least 1");
                   }
                 },
             },
             params_);
}

LatencyFn LatencyFn::constant(double c) { return LatencyFn(Constant{c}); }
LatencyFn LatencyFn::affine(double slope, double intercept) { return LatencyFn(Affine{slope, intercept}); }
LatencyFn LatencyFn::monomial(double coef, int degree) { return LatencyFn(Monomial{coef, degree}); }
LatencyFn LatencyFn::polynomial(std::vector<double> coefs) { return LatencyFn(Polynomial{std::move(coefs)}); }
LatencyFn LatencyFn::bpr(double free_flow_time, double capacity, double a, double power) {
  return LatencyFn(Bpr{free_flow_time, capacity, a, power});
}

double LatencyFn::evaluate(double x) const {
  require_domain(x);
  return std::visit(Overloaded{
                        [](const Constant& p) { return p.c; },
                        [x](const Affine& p) { return p.slope * x + p.intercept; },
                        [x](const Monomial& p) { return p.coef * ipow(x, p.degree); },
                        [x](const Polynomial& p) {
                          double acc = 0.0;  // Horner
                          for (auto it = p.coefs.rbegin(); it != p.coefs.rend(); ++it) acc = acc * x + *it;
                          return acc;
                        },
                        [x](const Bpr& p) {
                          return p.free_flow_time * (1.0 + p.a * std::pow(x / p.capacity, p.power));
                        },
                    },
                    params_);
}

double LatencyFn::derivative(double x) const {
  require_domain(x);
  return std::visit(Overloaded{
                        [](const Constant&) { return 0.0; },
                        [](const Affine& p) { return p.slope; },
                        [x](const Monomial& p) {
                          return p.degree == 0 ? 0.0 : p.coef * p.degree * ipow(x, p.degree - 1);
                        },
                        [x](const Polynomial& p) {
                          double acc = 0.0;
                          for (std::size_t k = p.coefs.size(); k-- > 1;) acc = acc * x + static_cast<double>(k) * p.coefs[k];
                          return acc;
                        },
                        [x](const Bpr& p) {
                          return p.free_flow_time * p.a * p.power * std::pow(x / p.capacity, p.power - 1.0) /
                                 p.capacity;
                        },
                    },
                    params_);
}

double LatencyFn::marginal(double x) const {
  require_domain(x);
  return std::visit(Overloaded{
                        [](const Constant& p) { return p.c; },
                        [x](const Affine& p) { return 2.0 * p.slope * x + p.intercept; },
                        [x](const Monomial& p) { return (p.degree + 1) * p.coef * ipow(x, p.degree); },
                        [x](const Polynomial& p) {
                          double acc = 0.0;
                          for (std::size_t k = p.coefs.size(); k-- > 0;) {
                            acc = acc * x + static_cast<double>(k + 1) * p.coefs[k];
                          }
                          return acc;
                        },
                        [x](const Bpr& p) {
                          return p.free_flow_time * (1.0 + p.a * (p.power + 1.0) * std::pow(x / p.capacity, p.power));
                        },
                    },
                    params_);
}

double LatencyFn::integral(double x) const {
  require_domain(x);
  return std::visit(Overloaded{
                        [x](const Constant& p) { return p.c * x; },
                        [x](const Affine& p) { return 0.5 * p.slope * x * x + p.intercept * x; },
                        [x](const Monomial& p) { return p.coef * ipow(x, p.degree + 1) / (p.degree + 1); },
                        [x](const Polynomial& p) {
                          double acc = 0.0;
                          for (std::size_t k = p.coefs.size(); k-- > 0;) {
                            acc = acc * x + p.coefs[k] / static_cast<double>(k + 1);
                          }
                          return acc * x;
                        },
                        [x](const Bpr& p) {
                          return p.free_flow_time *
                                 (x + p.a * x * std::pow(x / p.capacity, p.power) / (p.power + 1.0));
                        },
                    },
                    params_);
}

Steepness LatencyFn::steepness() const {
  // The ratio marginal/evaluate is a weighted average of (k + 1) over the
  // monomial terms c_k x^k, so its supremum is (top degree + 1). It is
  // attained only when a single term is present.
  return std::visit(Overloaded{
                        [](const Constant&) { return Steepness{1.0, false}; },
                        [](const Affine& p) {
                          if (p.slope == 0.0) return Steepness{1.0, false};
                          return Steepness{2.0, p.intercept > 0.0};
                        },
                        [](const Monomial& p) {
                          if (p.coef == 0.0) return Steepness{1.0, false};
                          return Steepness{static_cast<double>(p.degree + 1), false};
                        },
                        [](const Polynomial& p) {
                          int top = -1;
                          int terms = 0;
                          for (std::size_t k = 0; k < p.coefs.size(); ++k) {
                            if (p.coefs[k] > 0.0) {
                              top = static_cast<int>(k);
                              ++terms;
                            }
                          }
                          if (top < 0) return Steepness{1.0, false};
                          return Steepness{static_cast<double>(top + 1), terms > 1};
                        },
                        [](const Bpr& p) {
                          if (p.a == 0.0 || p.free_flow_time == 0.0) return Steepness{1.0, false};
                          return Steepness{p.power + 1.0, true};
                        },
                    },
                    params_);
}

std::optional<int> LatencyFn::polynomial_degree() const {
  return std::visit(Overloaded{
                        [](const Constant&) -> std::optional<int> { return 0; },
                        [](const Affine& p) -> std::optional<int> { return p.slope > 0.0 ? 1 : 0; },
                        [](const Monomial& p) -> std::optional<int> { return p.coef > 0.0 ? p.degree : 0; },
                        [](const Polynomial& p) -> std::optional<int> {
                          int top = 0;
                          for (std::size_t k = 0; k < p.coefs.size(); ++k) {
                            if (p.coefs[k] > 0.0) top = static_cast<int>(k);
                          }
                          return top;
                        },
                        [](const Bpr& p) -> std::optional<int> {
                          if (p.a == 0.0 || p.free_flow_time == 0.0) return 0;
                          if (p.power != std::floor(p.power)) return std::nullopt;
                          return static_cast<int>(p.power);
                        },
                    },
                    params_);
}

bool LatencyFn::is_zero() const {
  return std::visit(Overloaded{
                        [](const Constant& p) { return p.c == 0.0; },
                        [](const Affine& p) { return p.slope == 0.0 && p.intercept == 0.0; },
                        [](const Monomial& p) { return p.coef == 0.0; },
                        [](const Polynomial& p) {
                          for (double c : p.coefs) {
                            if (c != 0.0) return false;
                          }
                          return true;
                        },
                        [](const Bpr& p) { return p.free_flow_time == 0.0; },
                    },
                    params_);
}

std::string_view LatencyFn::kind() const {
  return std::visit(Overloaded{
                        [](const Constant&) { return std::string_view("constant"); },
                        [](const Affine&) { return std::string_view("affine"); },
                        [](const Monomial&) { return std::string_view("monomial"); },
                        [](const Polynomial&) { return std::string_view("polynomial"); },
                        [](const Bpr&) { return std::string_view("bpr"); },
                    },
                    params_);
}

}  // namespace fairflow
