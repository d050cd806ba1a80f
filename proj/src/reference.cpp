#include "kinetic/reference.hpp"

#include "kinetic/errors.hpp"

namespace kinetic {

double LwrRiemann::sample(double xi) const {
  switch (kind) {
    case LwrWaveKind::constant:
      return rho_left;
    case LwrWaveKind::shock:
      return xi < speed_left ? rho_left : rho_right;
    case LwrWaveKind::rarefaction:
      break;
  }
  if (xi <= speed_left) return rho_left;
  if (xi >= speed_right) return rho_right;
  // F' is decreasing: solve F'(rho) = xi on [rho_right, rho_left].
  double lo = rho_right;
  double hi = rho_left;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (diagram.derivative(mid) > xi) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

LwrRiemann lwr_riemann_reference(double rho_left, double rho_right,
                                 const FundamentalDiagram& diagram) {
  if (!(rho_left >= 0.0 && rho_left <= 1.0 && rho_right >= 0.0 && rho_right <= 1.0)) {
    throw ConfigError("lwr reference: densities must lie in [0, 1]");
  }
  for (int k = 0; k <= 100; ++k) {
    const double rho = k / 100.0;
    if (diagram.second_derivative(rho) > 1e-9) {
      throw ConfigError("lwr reference: diagram '" + diagram.name() +
                        "' is not concave; only concave fluxes are supported");
    }
  }
  LwrRiemann wave;
  wave.rho_left = rho_left;
  wave.rho_right = rho_right;
  wave.diagram = diagram;
  if (rho_left == rho_right) {
    wave.kind = LwrWaveKind::constant;
    wave.speed_left = wave.speed_right = diagram.derivative(rho_left);
  } else if (rho_left < rho_right) {
    wave.kind = LwrWaveKind::shock;
    wave.speed_left = wave.speed_right =
        (diagram(rho_right) - diagram(rho_left)) / (rho_right - rho_left);
  } else {
    wave.kind = LwrWaveKind::rarefaction;
    wave.speed_left = diagram.derivative(rho_left);
    wave.speed_right = diagram.derivative(rho_right);
  }
  return wave;
}

std::vector<double> sample_reference(const LwrRiemann& wave, const SpatialGrid& space, double t,
                                     double x0) {
  std::vector<double> out(space.cells());
  for (std::size_t j = 0; j < space.cells(); ++j) {
    const double dx = space.center(j) - x0;
    if (t > 0.0) {
      out[j] = wave.sample(dx / t);
    } else {
      out[j] = dx <= 0.0 ? wave.rho_left : wave.rho_right;
    }
  }
  return out;
}

}  // namespace kinetic
