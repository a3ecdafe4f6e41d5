#include "gnls/closed_form.hpp"

#include <cmath>

#include "gnls/errors.hpp"

namespace gnls::closed_form {

namespace {

void require_nonzero(cplx k) {
  if (k == cplx{}) throw ContractError("closed-form coefficients are singular at k = 0");
}

// (e^{z b} - 1) / z with the z -> 0 limit b
cplx expm1_over(cplx z, double b) {
  if (std::abs(z * b) < 1e-8) return b * (1.0 + 0.5 * z * b);
  return (std::exp(z * b) - 1.0) / z;
}

}  // namespace

ABPair constant_gamma(double gamma, double b, cplx k) {
  require_nonzero(k);
  const cplx A = -gamma / (8.0 * k * k) * (1.0 - std::exp(-4.0 * kI * k * b));
  const cplx B = gamma / (4.0 * k * k) * (1.0 - std::exp(-2.0 * kI * k * b));
  return {A, B};
}

ABPair exponential_alpha(double alpha, double b, cplx k) {
  require_nonzero(k);
  const cplx A = expm1_over(alpha - 4.0 * kI * k, b) / (2.0 * kI * k);
  const cplx B = -expm1_over(alpha - 2.0 * kI * k, b) / (2.0 * kI * k);
  return {A, B};
}

cplx u3_constant_gamma(double gamma, cplx k, double x) {
  require_nonzero(k);
  const cplx c = 1.0 / (2.0 * kI * k);
  return c * std::exp(kI * k * x) * gamma * expm1_over(-4.0 * kI * k, x) -
         c * std::exp(-kI * k * x) * gamma * expm1_over(-2.0 * kI * k, x);
}

}  // namespace gnls::closed_form
