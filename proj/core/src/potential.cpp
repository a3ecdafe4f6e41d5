#include "gnls/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "gnls/errors.hpp"

namespace gnls {

namespace {

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

void check_support(double b) {
  if (!(b > 0.0) || !std::isfinite(b)) throw ContractError("coefficient support width must be positive");
}

}  // namespace

CoefficientFunction::CoefficientFunction(double support, Shape shape) : support_(support), shape_(std::move(shape)) {
  check_support(support);
}

CoefficientFunction CoefficientFunction::zero(double support) { return {support, Zero{}}; }

CoefficientFunction CoefficientFunction::constant(double support, double gamma) {
  return {support, Constant{gamma}};
}

CoefficientFunction CoefficientFunction::exponential(double support, double rate) {
  return {support, Exponential{rate, 1.0}};
}

CoefficientFunction CoefficientFunction::sinusoid(double support, double amplitude, double frequency) {
  return {support, Sinusoid{amplitude, frequency}};
}

CoefficientFunction CoefficientFunction::tabulated(const SpatialGrid& grid, std::vector<double> samples) {
  if (samples.size() != grid.size()) throw ContractError("tabulated coefficient needs one sample per grid node");
  for (double s : samples) {
    if (!std::isfinite(s)) throw ContractError("tabulated coefficient has a non-finite sample");
  }
  return {grid.width(), Tabulated{grid, std::make_shared<const std::vector<double>>(std::move(samples))}};
}

CoefficientFunction::Kind CoefficientFunction::kind() const noexcept {
  return std::visit(overloaded{[](const Zero&) { return Kind::zero; },
                               [](const Constant&) { return Kind::constant; },
                               [](const Exponential&) { return Kind::exponential; },
                               [](const Tabulated&) { return Kind::tabulated; },
                               [](const Sinusoid&) { return Kind::sinusoid; }},
                    shape_);
}

double CoefficientFunction::operator()(double x) const noexcept {
  if (x < 0.0 || x > support_) return 0.0;
  return std::visit(overloaded{[](const Zero&) { return 0.0; },
                               [](const Constant& c) { return c.gamma; },
                               [x](const Exponential& e) { return e.amplitude * std::exp(e.rate * x); },
                               [x](const Sinusoid& s) { return s.amplitude * std::sin(s.frequency * x); },
                               [x](const Tabulated& t) {
                                 const auto& v = *t.samples;
                                 const double pos = x / t.grid.step();
                                 const auto last = t.grid.intervals();
                                 auto i = static_cast<std::size_t>(pos);
                                 if (i >= last) return v[last];
                                 const double frac = pos - static_cast<double>(i);
                                 return v[i] + frac * (v[i + 1] - v[i]);
                               }},
                    shape_);
}

double CoefficientFunction::sup_norm() const {
  const double b = support_;
  return std::visit(overloaded{[](const Zero&) { return 0.0; },
                               [](const Constant& c) { return std::abs(c.gamma); },
                               [b](const Exponential& e) { return std::abs(e.amplitude) * std::max(1.0, std::exp(e.rate * b)); },
                               [b](const Sinusoid& s) {
                                 const double theta = std::abs(s.frequency) * b;
                                 const double peak = theta >= std::numbers::pi / 2 ? 1.0 : std::sin(theta);
                                 return std::abs(s.amplitude) * peak;
                               },
                               [](const Tabulated& t) {
                                 double m = 0.0;
                                 for (double v : *t.samples) m = std::max(m, std::abs(v));
                                 return m;
                               }},
                    shape_);
}

double CoefficientFunction::l1_norm() const {
  const double b = support_;
  return std::visit(
      overloaded{[](const Zero&) { return 0.0; },
                 [b](const Constant& c) { return std::abs(c.gamma) * b; },
                 [b](const Exponential& e) {
                   if (e.rate == 0.0) return std::abs(e.amplitude) * b;
                   return std::abs(e.amplitude) * std::expm1(e.rate * b) / e.rate;
                 },
                 [b](const Sinusoid& s) {
                   if (s.frequency == 0.0) return 0.0;
                   const double theta = std::abs(s.frequency) * b;
                   const double half_periods = std::floor(theta / std::numbers::pi);
                   const double rest = theta - half_periods * std::numbers::pi;
                   return std::abs(s.amplitude) / std::abs(s.frequency) * (2.0 * half_periods + 1.0 - std::cos(rest));
                 },
                 [](const Tabulated& t) {
                   const auto& v = *t.samples;
                   const double h = t.grid.step();
                   double acc = 0.0;
                   for (std::size_t i = 0; i + 1 < v.size(); ++i) {
                     const double a = v[i];
                     const double c = v[i + 1];
                     if (a * c >= 0.0) {
                       acc += 0.5 * h * (std::abs(a) + std::abs(c));
                     } else {
                       acc += 0.5 * h * (a * a + c * c) / (std::abs(a) + std::abs(c));
                     }
                   }
                   return acc;
                 }},
      shape_);
}

bool CoefficientFunction::is_identically_zero() const {
  return std::visit(overloaded{[](const Zero&) { return true; },
                               [](const Constant& c) { return c.gamma == 0.0; },
                               [](const Exponential& e) { return e.amplitude == 0.0; },
                               [](const Sinusoid& s) { return s.amplitude == 0.0 || s.frequency == 0.0; },
                               [](const Tabulated& t) {
                                 return std::all_of(t.samples->begin(), t.samples->end(),
                                                    [](double v) { return v == 0.0; });
                               }},
                    shape_);
}

CoefficientFunction CoefficientFunction::scaled(double factor) const {
  const double b = support_;
  return std::visit(overloaded{[b](const Zero&) { return zero(b); },
                               [b, factor](const Constant& c) { return constant(b, c.gamma * factor); },
                               [b, factor](const Exponential& e) {
                                 return CoefficientFunction(b, Exponential{e.rate, e.amplitude * factor});
                               },
                               [b, factor](const Sinusoid& s) {
                                 return sinusoid(b, s.amplitude * factor, s.frequency);
                               },
                               [factor](const Tabulated& t) {
                                 std::vector<double> v = *t.samples;
                                 for (double& s : v) s *= factor;
                                 return tabulated(t.grid, std::move(v));
                               }},
                    shape_);
}

std::vector<double> CoefficientFunction::sample(const SpatialGrid& grid) const {
  if (std::abs(grid.width() - support_) > 1e-12 * support_) {
    throw ContractError("sampling grid width does not match coefficient support");
  }
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (*this)(grid.node(i));
  return out;
}

std::string CoefficientFunction::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{[&](const Zero&) { os << "zero"; },
                        [&](const Constant& c) { os << "constant(" << c.gamma << ")"; },
                        [&](const Exponential& e) { os << "exponential(rate=" << e.rate << ", scale=" << e.amplitude << ")"; },
                        [&](const Sinusoid& s) { os << "sinusoid(" << s.amplitude << ", " << s.frequency << ")"; },
                        [&](const Tabulated& t) { os << "tabulated(" << t.samples->size() << " samples)"; }},
             shape_);
  return os.str();
}

NonlinearPotential::NonlinearPotential(double support, std::vector<CoefficientFunction> coefficients)
    : support_(support), coeffs_(std::move(coefficients)), zero_(CoefficientFunction::zero(support)) {
  if (coeffs_.empty()) throw ContractError("potential needs at least the coefficient q0");
  for (std::size_t n = 0; n < coeffs_.size(); ++n) {
    if (std::abs(coeffs_[n].support() - support_) > 1e-12 * support_) {
      throw ContractError("coefficient q" + std::to_string(n) + " has a different support width");
    }
  }
}

const CoefficientFunction& NonlinearPotential::coefficient(std::size_t n) const noexcept {
  return n < coeffs_.size() ? coeffs_[n] : zero_;
}

NonlinearPotential NonlinearPotential::truncated(std::size_t count) const {
  std::vector<CoefficientFunction> kept;
  for (std::size_t n = 0; n < std::max<std::size_t>(count, 1); ++n) kept.push_back(coefficient(n));
  if (count == 0) kept[0] = zero_;
  return {support_, std::move(kept)};
}

cplx eval_Q(const NonlinearPotential& potential, double x, cplx u) {
  if (x < 0.0 || x > potential.support()) return {};
  const auto coeffs = potential.coefficients();
  cplx acc{};
  for (std::size_t n = coeffs.size(); n-- > 0;) acc = acc * u + coeffs[n](x);
  return acc;
}

double sup_bound(const NonlinearPotential& potential, double r) {
  if (!(r > 0.0)) throw ContractError("amplitude bound r must be positive");
  double c = 0.0;
  double power = 1.0;
  for (const auto& q : potential.coefficients()) {
    c += q.sup_norm() * power;
    power *= r;
  }
  return c;
}

ExistenceEstimate epsilon_bound(const NonlinearPotential& potential, double r) {
  const double c = sup_bound(potential, r);
  const double b = potential.support();
  return {r, c, 0.5 * r * std::exp(-c * b * b)};
}

}  // namespace gnls
