#include "gnls/fourier_special.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

#include "gnls/errors.hpp"

namespace gnls {

namespace {

using Rule = boost::math::quadrature::gauss<double, 8>;

SpecialReconstruction realify(const std::vector<cplx>& raw) {
  SpecialReconstruction out;
  out.q.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    out.q[i] = raw[i].real();
    out.imag_residual = std::max(out.imag_residual, std::abs(raw[i].imag()));
  }
  return out;
}

}  // namespace

SpecialReconstruction fourier_invert_integral(const std::function<cplx(double)>& coefficient,
                                              SpecialCoefficient which, double k_cutoff, const SpatialGrid& grid,
                                              double panel_width) {
  if (!(k_cutoff > 0.0) || !(panel_width > 0.0)) throw ContractError("k_cutoff and panel width must be positive");
  // even panel count keeps k = 0 on a panel boundary, never on a node
  auto half = static_cast<std::size_t>(std::ceil(k_cutoff / panel_width));
  const double h = k_cutoff / static_cast<double>(half);
  const auto& nodes = Rule::abscissa();
  const auto& weights = Rule::weights();

  std::vector<double> ks;
  std::vector<cplx> fk;
  const double freq = which == SpecialCoefficient::A3 ? 4.0 : 2.0;
  const cplx pre = which == SpecialCoefficient::A3 ? 4.0 * kI / std::numbers::pi : -2.0 * kI / std::numbers::pi;
  for (std::size_t p = 0; p < 2 * half; ++p) {
    const double mid = -k_cutoff + (static_cast<double>(p) + 0.5) * h;
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      for (double sign : {-1.0, 1.0}) {
        if (nodes[j] == 0.0 && sign > 0.0) continue;
        const double k = mid + sign * nodes[j] * h / 2.0;
        ks.push_back(freq * k);
        fk.push_back(pre * weights[j] * h / 2.0 * k * coefficient(k));
      }
    }
  }

  std::vector<cplx> raw(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.node(i);
    cplx acc{};
    for (std::size_t j = 0; j < ks.size(); ++j) acc += fk[j] * std::polar(1.0, ks[j] * x);
    raw[i] = acc;
  }
  return realify(raw);
}

SpecialReconstruction fourier_invert_series(const std::function<cplx(cplx)>& coefficient, SpecialCoefficient which,
                                            double xi, std::size_t M, const SpatialGrid& grid) {
  if (!(xi > 0.0)) throw ContractError("contour offset xi must be > 0");
  const double b = grid.width();
  const double pi = std::numbers::pi;
  const long mm = static_cast<long>(M);

  std::vector<cplx> weight;
  weight.reserve(2 * M + 1);
  for (long m = -mm; m <= mm; ++m) {
    const double md = static_cast<double>(m);
    if (which == SpecialCoefficient::A3) {
      weight.push_back((kI * md * pi - 2.0 * b * xi) * coefficient(cplx(md * pi / (2.0 * b), xi)));
    } else {
      weight.push_back((2.0 * b * xi - 2.0 * kI * md * pi) * coefficient(cplx(md * pi / b, xi)));
    }
  }
  const double damp = which == SpecialCoefficient::A3 ? 4.0 * xi : 2.0 * xi;

  std::vector<cplx> raw(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.node(i);
    const double theta = 2.0 * pi * x / b;
    cplx acc{};
    for (long m = -mm; m <= mm; ++m) acc += weight[static_cast<std::size_t>(m + mm)] * std::polar(1.0, theta * m);
    raw[i] = std::exp(-damp * x) * acc / (b * b);
  }
  return realify(raw);
}

std::function<cplx(double)> conjugate_extension(std::function<cplx(double)> positive_axis) {
  return [f = std::move(positive_axis)](double k) { return k >= 0.0 ? f(k) : std::conj(f(-k)); };
}

}  // namespace gnls
