#pragma once

#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "gnls/numerics.hpp"

namespace gnls {

/// A real coefficient function q_n(x) supported in [0, b]; evaluates to zero outside.
class CoefficientFunction {
 public:
  enum class Kind { zero, constant, exponential, tabulated, sinusoid };

  static CoefficientFunction zero(double support);
  static CoefficientFunction constant(double support, double gamma);
  /// e^{rate * x}
  static CoefficientFunction exponential(double support, double rate);
  /// amplitude * sin(frequency * x)
  static CoefficientFunction sinusoid(double support, double amplitude, double frequency);
  /// Linear interpolation between samples on `grid`; support is grid.width().
  static CoefficientFunction tabulated(const SpatialGrid& grid, std::vector<double> samples);

  Kind kind() const noexcept;
  double support() const noexcept { return support_; }

  double operator()(double x) const noexcept;

  double sup_norm() const;
  /// int_0^b |q|
  double l1_norm() const;
  bool is_identically_zero() const;

  CoefficientFunction scaled(double factor) const;

  /// Samples on the nodes of `grid` (grid.width() must equal support()).
  std::vector<double> sample(const SpatialGrid& grid) const;

  std::string describe() const;

 private:
  struct Zero {};
  struct Constant {
    double gamma;
  };
  struct Exponential {
    double rate;
    double amplitude;
  };
  struct Sinusoid {
    double amplitude;
    double frequency;
  };
  struct Tabulated {
    SpatialGrid grid;
    std::shared_ptr<const std::vector<double>> samples;
  };
  using Shape = std::variant<Zero, Constant, Exponential, Tabulated, Sinusoid>;

  CoefficientFunction(double support, Shape shape);

  double support_;
  Shape shape_;
};

/// Truncated Q(x, u) = sum_{n=0}^{D} q_n(x) u^n.
class NonlinearPotential {
 public:
  NonlinearPotential(double support, std::vector<CoefficientFunction> coefficients);

  double support() const noexcept { return support_; }
  std::size_t degree() const noexcept { return coeffs_.size() - 1; }
  /// q_n; the zero function for n > degree().
  const CoefficientFunction& coefficient(std::size_t n) const noexcept;
  std::span<const CoefficientFunction> coefficients() const noexcept { return coeffs_; }

  /// Same potential with q_n replaced by zero for n >= count.
  NonlinearPotential truncated(std::size_t count) const;

 private:
  double support_;
  std::vector<CoefficientFunction> coeffs_;
  CoefficientFunction zero_;
};

/// Horner evaluation; zero for x outside [0, b].
cplx eval_Q(const NonlinearPotential& potential, double x, cplx u);

/// C = sum_n sup|q_n| r^n, an upper bound of |Q| on |u| <= r.
double sup_bound(const NonlinearPotential& potential, double r);

struct ExistenceEstimate {
  double r = 0.0;
  double C = 0.0;
  double delta = 0.0;
};

/// Admissible incident amplitude bound delta = (r/2) exp(-C b^2).
ExistenceEstimate epsilon_bound(const NonlinearPotential& potential, double r);

}  // namespace gnls
