#include "kinetic/equilibria.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "kinetic/errors.hpp"

namespace kinetic {

namespace {

constexpr double kDerivativeStep = 1e-7;
constexpr double kSecondDerivativeStep = 1e-4;
constexpr double kEquilibriumClamp = 1e-13;
constexpr double kSweepTolerance = 1e-12;
constexpr int kSweepPoints = 1001;

ScalarFn central_difference(ScalarFn f) {
  return [f = std::move(f)](double x) {
    return (f(x + kDerivativeStep) - f(x - kDerivativeStep)) / (2.0 * kDerivativeStep);
  };
}

ScalarFn central_second_difference(ScalarFn f) {
  return [f = std::move(f)](double x) {
    const double h = kSecondDerivativeStep;
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
  };
}

// Quintic Hermite basis on s in [0, 1]: value, first and second derivative at
// s = 0 followed by the same at s = 1.
struct QuinticBasis {
  double h[6];
  double dh[6];

  explicit QuinticBasis(double s) {
    const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
    h[0] = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
    h[1] = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5;
    h[2] = 0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5;
    h[3] = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;
    h[4] = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
    h[5] = 0.5 * s3 - s4 + 0.5 * s5;
    dh[0] = -30.0 * s2 + 60.0 * s3 - 30.0 * s4;
    dh[1] = 1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4;
    dh[2] = s - 4.5 * s2 + 6.0 * s3 - 2.5 * s4;
    dh[3] = 30.0 * s2 - 60.0 * s3 + 30.0 * s4;
    dh[4] = -12.0 * s2 + 28.0 * s3 - 15.0 * s4;
    dh[5] = 1.5 * s2 - 4.0 * s3 + 2.5 * s4;
  }
};

std::string bound_name(std::size_t index, std::size_t last) {
  if (last == 1) return index == 0 ? "F <= rho" : "F >= 0";
  if (index == 0) return "F - (1 - lambda_w)/(gamma - 1) (rho - F) <= E";
  if (index == last) return "lambda_w F <= E";
  return "E <= F";
}

double free_space_or_throw(double rho, const char* what) {
  const double free_space = 1.0 - rho;
  if (!(free_space >= kRhoFloor)) {
    std::ostringstream msg;
    msg << what << ": near-jam density rho = " << rho;
    throw NearJamError(msg.str(), free_space);
  }
  return free_space;
}

// Checked equilibrium written into `out`.
void equilibrium_into(const EquilibriumModel& model, double rho, std::span<double> out,
                      std::span<double> scratch_derivatives) {
  if (!(rho >= 0.0 && rho <= 1.0)) {
    std::ostringstream msg;
    msg << "equilibrium_f: density " << rho << " outside [0, 1]";
    throw DomainError(msg.str());
  }
  equilibrium_components(model, rho, out, scratch_derivatives);
  const std::size_t last = model.grid().n();
  for (std::size_t i = 0; i <= last; ++i) {
    if (out[i] < -kEquilibriumClamp) {
      std::ostringstream msg;
      msg << "equilibrium_f: realizability bound '" << bound_name(i, last)
          << "' violated at rho = " << rho << " (f_" << i << "^e = " << out[i] << ")";
      throw RealizabilityError(msg.str(), bound_name(i, last), rho);
    }
    if (out[i] < 0.0) out[i] = 0.0;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// FundamentalDiagram

FundamentalDiagram::FundamentalDiagram(std::string name, ScalarFn value, ScalarFn derivative,
                                       ScalarFn second_derivative)
    : name_(std::move(name)), value_(std::move(value)) {
  if (!value_) throw std::invalid_argument("FundamentalDiagram: missing evaluator");
  derivative_ = derivative ? std::move(derivative) : central_difference(value_);
  second_ = second_derivative ? std::move(second_derivative) : central_second_difference(value_);
}

FundamentalDiagram FundamentalDiagram::lwr() {
  return FundamentalDiagram(
      "lwr", [](double r) { return r * (1.0 - r); }, [](double r) { return 1.0 - 2.0 * r; },
      [](double) { return -2.0; });
}

FundamentalDiagram FundamentalDiagram::cubic() {
  return FundamentalDiagram(
      "cubic", [](double r) { return r * (1.0 - r) * (1.0 - r); },
      [](double r) { return (1.0 - r) * (1.0 - 3.0 * r); }, [](double r) { return 6.0 * r - 4.0; });
}

FundamentalDiagram FundamentalDiagram::from_name(const std::string& name) {
  if (name == "lwr") return lwr();
  if (name == "cubic") return cubic();
  throw ConfigError("unknown fundamental diagram '" + name + "' (expected lwr or cubic)");
}

// ---------------------------------------------------------------------------
// SecondMoment

SecondMoment::SecondMoment(std::string name, ScalarFn value, ScalarFn derivative)
    : name_(std::move(name)), value_(std::move(value)) {
  if (!value_) throw std::invalid_argument("SecondMoment: missing evaluator");
  derivative_ = derivative ? std::move(derivative) : central_difference(value_);
}

SecondMoment SecondMoment::equal(const FundamentalDiagram& diagram) {
  return SecondMoment(
      "equal", [diagram](double r) { return diagram(r); },
      [diagram](double r) { return diagram.derivative(r); });
}

SecondMoment SecondMoment::linear_factor(const FundamentalDiagram& diagram, double alpha) {
  std::ostringstream name;
  name << "linear_factor:" << alpha;
  return SecondMoment(
      name.str(), [diagram, alpha](double r) { return diagram(r) * (1.0 - alpha * r); },
      [diagram, alpha](double r) {
        return diagram.derivative(r) * (1.0 - alpha * r) - alpha * diagram(r);
      });
}

SecondMoment SecondMoment::spline(std::string name, const FundamentalDiagram& diagram,
                                  ScalarFn outer, ScalarFn outer_derivative,
                                  ScalarFn outer_second_derivative, double lo, double hi) {
  if (!(lo > 0.0 && hi < 1.0 && lo < hi)) {
    throw std::invalid_argument("SecondMoment::spline: need 0 < lo < hi < 1");
  }
  const double width = hi - lo;
  // Hermite data scaled to the unit interval.
  const std::array<double, 6> coeff = {diagram(lo),
                                       width * diagram.derivative(lo),
                                       width * width * diagram.second_derivative(lo),
                                       outer(hi),
                                       width * outer_derivative(hi),
                                       width * width * outer_second_derivative(hi)};

  auto value = [diagram, outer, coeff, lo, hi, width](double r) {
    if (r <= lo) return diagram(r);
    if (r >= hi) return outer(r);
    const QuinticBasis b((r - lo) / width);
    double p = 0.0;
    for (int k = 0; k < 6; ++k) p += coeff[k] * b.h[k];
    return p;
  };
  auto derivative = [diagram, outer_derivative, coeff, lo, hi, width](double r) {
    if (r <= lo) return diagram.derivative(r);
    if (r >= hi) return outer_derivative(r);
    const QuinticBasis b((r - lo) / width);
    double p = 0.0;
    for (int k = 0; k < 6; ++k) p += coeff[k] * b.dh[k];
    return p / width;
  };
  return SecondMoment(std::move(name), value, derivative);
}

SecondMoment SecondMoment::spline_e1(const FundamentalDiagram& diagram, double lo, double hi) {
  return spline(
      "spline_e1", diagram, [](double r) { return 0.25 * (r - 1.0) * (r - 3.0); },
      [](double r) { return 0.5 * r - 1.0; }, [](double) { return 0.5; }, lo, hi);
}

SecondMoment SecondMoment::spline_e2(const FundamentalDiagram& diagram, WeightMoments weights,
                                     double lo, double hi) {
  const double lw = weights.lambda_w;
  return spline(
      "spline_e2", diagram, [diagram, lw](double r) { return lw * diagram(r); },
      [diagram, lw](double r) { return lw * diagram.derivative(r); },
      [diagram, lw](double r) { return lw * diagram.second_derivative(r); }, lo, hi);
}

SecondMoment SecondMoment::from_name(const std::string& spec, const FundamentalDiagram& diagram,
                                     WeightMoments weights, double lo, double hi) {
  if (spec == "equal") return equal(diagram);
  if (spec == "spline_e1") return spline_e1(diagram, lo, hi);
  if (spec == "spline_e2") return spline_e2(diagram, weights, lo, hi);
  const std::string prefix = "linear_factor:";
  if (spec.rfind(prefix, 0) == 0) {
    const std::string arg = spec.substr(prefix.size());
    std::size_t used = 0;
    double alpha = 0.0;
    try {
      alpha = std::stod(arg, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != arg.size() || !std::isfinite(alpha)) {
      throw ConfigError("second moment '" + spec + "': malformed factor");
    }
    return linear_factor(diagram, alpha);
  }
  throw ConfigError("unknown second moment '" + spec +
                    "' (expected equal, linear_factor:<a>, spline_e1, spline_e2)");
}

// ---------------------------------------------------------------------------
// EquilibriumModel

std::vector<double> EquilibriumModel::default_weights(std::size_t n) {
  if (n < 2) {
    throw std::invalid_argument("default_weights: N >= 2 required (N = 1 has no interior weights)");
  }
  std::vector<double> alpha(n - 1);
  const double denom = static_cast<double>(n) * static_cast<double>(n - 1);
  for (std::size_t i = 1; i < n; ++i) alpha[i - 1] = 2.0 * static_cast<double>(i) / denom;
  return alpha;
}

WeightMoments EquilibriumModel::weight_moments(const VelocityGrid& grid,
                                               std::span<const double> weights) {
  WeightMoments m;
  for (std::size_t i = 1; i < grid.n(); ++i) {
    m.lambda_w += weights[i - 1] * grid[i];
    m.gamma += weights[i - 1] / grid[i];
  }
  return m;
}

EquilibriumModel::EquilibriumModel(VelocityGrid grid, FundamentalDiagram diagram,
                                   SecondMoment second_moment, std::vector<double> weights)
    : grid_(std::move(grid)),
      diagram_(std::move(diagram)),
      second_moment_(std::move(second_moment)),
      weights_(std::move(weights)) {
  const std::size_t n = grid_.n();
  if (n == 1) {
    if (!weights_.empty()) {
      throw std::invalid_argument("EquilibriumModel: N = 1 takes no interior weights");
    }
  } else {
    if (weights_.size() != n - 1) {
      std::ostringstream msg;
      msg << "EquilibriumModel: expected " << n - 1 << " weights, got " << weights_.size();
      throw std::invalid_argument(msg.str());
    }
    double total = 0.0;
    for (double a : weights_) {
      if (!(a >= 0.0 && a <= 1.0)) {
        throw std::invalid_argument("EquilibriumModel: weights must lie in [0, 1]");
      }
      total += a;
    }
    if (std::abs(total - 1.0) > 1e-12) {
      throw std::invalid_argument("EquilibriumModel: weights must sum to 1");
    }
    moments_ = weight_moments(grid_, weights_);
  }

  if (std::abs(diagram_(0.0)) > kSweepTolerance || std::abs(diagram_(1.0)) > kSweepTolerance) {
    throw std::invalid_argument("EquilibriumModel: fundamental diagram must vanish at 0 and 1");
  }
  for (int k = 0; k < kSweepPoints; ++k) {
    const double rho = static_cast<double>(k) / (kSweepPoints - 1);
    if (diagram_.derivative(rho) > 1.0 + kSweepTolerance) {
      std::ostringstream msg;
      msg << "EquilibriumModel: F'(" << rho << ") exceeds 1";
      throw std::invalid_argument(msg.str());
    }
    if (n == 1 && std::abs(second_moment_(rho) - diagram_(rho)) > kSweepTolerance) {
      throw std::invalid_argument("EquilibriumModel: N = 1 requires E = F");
    }
    const RealizabilitySlack slack = realizability_margin(*this, rho);
    const char* bound = nullptr;
    if (slack.lower < -kSweepTolerance) bound = n == 1 ? "F <= rho" : "lower bound";
    else if (slack.moment < -kSweepTolerance) bound = n == 1 ? "F >= 0" : "lambda_w F <= E";
    else if (slack.upper < -kSweepTolerance) bound = "E <= F";
    if (bound != nullptr) {
      std::ostringstream msg;
      msg << "EquilibriumModel: (F = " << diagram_.name() << ", E = " << second_moment_.name()
          << ") violates realizability bound '" << bound << "' at rho = " << rho;
      throw RealizabilityError(msg.str(), bound, rho);
    }
  }
}

void equilibrium_components(const EquilibriumModel& model, double rho, std::span<double> values,
                            std::span<double> derivatives) {
  const VelocityGrid& grid = model.grid();
  const std::size_t last = grid.n();
  const double flux = model.diagram()(rho);
  const double dflux = model.diagram().derivative(rho);
  if (last == 1) {
    values[0] = rho - flux;
    values[1] = flux;
    derivatives[0] = 1.0 - dflux;
    derivatives[1] = dflux;
    return;
  }
  const double e = model.second_moment()(rho);
  const double de = model.second_moment().derivative(rho);
  const double scale = 1.0 / (1.0 - model.lambda_w());
  const double c = (flux - e) * scale;
  const double dc = (dflux - de) * scale;
  const auto alpha = model.weights();

  double interior_flux = 0.0, interior_dflux = 0.0;
  for (std::size_t i = 1; i < last; ++i) {
    values[i] = alpha[i - 1] * c / grid[i];
    derivatives[i] = alpha[i - 1] * dc / grid[i];
    interior_flux += grid[i] * values[i];
    interior_dflux += grid[i] * derivatives[i];
  }
  values[last] = flux - interior_flux;
  derivatives[last] = dflux - interior_dflux;

  double mass = 0.0, dmass = 0.0;
  for (std::size_t i = 1; i <= last; ++i) {
    mass += values[i];
    dmass += derivatives[i];
  }
  values[0] = rho - mass;
  derivatives[0] = 1.0 - dmass;
}

KineticState equilibrium_f(const EquilibriumModel& model, double rho) {
  KineticState out{std::vector<double>(model.grid().size())};
  std::vector<double> derivatives(model.grid().size());
  equilibrium_into(model, rho, out.f, derivatives);
  return out;
}

RealizabilitySlack realizability_margin(const EquilibriumModel& model, double rho) {
  const double flux = model.diagram()(rho);
  const double e = model.second_moment()(rho);
  RealizabilitySlack slack;
  if (model.grid().n() == 1) {
    slack.lower = rho - flux;
    slack.moment = flux;
    slack.upper = flux - e;
    return slack;
  }
  const double lw = model.lambda_w();
  const double ratio = (1.0 - lw) / (model.gamma() - 1.0);
  slack.lower = e - (flux - ratio * (rho - flux));
  slack.moment = e - lw * flux;
  slack.upper = flux - e;
  return slack;
}

double stability_D_closed(const FundamentalDiagram& diagram, const SecondMoment& second_moment,
                          double rho) {
  const double free_space = free_space_or_throw(rho, "stability_D_closed");
  const double flux = diagram(rho);
  const double dflux = diagram.derivative(rho);
  const double e = second_moment(rho);
  const double de = second_moment.derivative(rho);
  return -dflux * dflux + de + (e - (dflux - de) * flux - dflux * e) / free_space;
}

double stability_D_closed(const EquilibriumModel& model, double rho) {
  return stability_D_closed(model.diagram(), model.second_moment(), rho);
}

double stability_D_general(const EquilibriumModel& model, double rho) {
  const double free_space = free_space_or_throw(rho, "stability_D_general");
  const VelocityGrid& grid = model.grid();
  std::vector<double> fe(grid.size()), dfe(grid.size());
  equilibrium_components(model, rho, fe, dfe);
  double double_sum = 0.0;
  for (std::size_t i = 1; i <= grid.n(); ++i) {
    double inner = 0.0;
    for (std::size_t j = 0; j < i; ++j) {
      const double dv = grid[i] - grid[j];
      inner += dv * dv * dfe[j];
    }
    double_sum += fe[i] * inner;
  }
  const double dflux = model.diagram().derivative(rho);
  const double de = model.second_moment().derivative(rho);
  return -dflux * dflux + de + double_sum / free_space;
}

std::vector<SubcharacteristicSample> subcharacteristic_check(const FundamentalDiagram& diagram,
                                                             std::span<const double> samples) {
  std::vector<SubcharacteristicSample> out;
  out.reserve(samples.size());
  for (double rho : samples) {
    SubcharacteristicSample s;
    s.rho = rho;
    s.lower = -diagram(rho) / (1.0 - rho);
    s.slope = diagram.derivative(rho);
    s.passed = s.slope >= s.lower - kSweepTolerance && s.slope <= 1.0 + kSweepTolerance;
    out.push_back(s);
  }
  return out;
}

void relax_implicit_inplace(std::span<double> f, const EquilibriumModel& model, double dt,
                            double tau, std::span<double> scratch) {
  if (!(tau > 0.0) || !(dt >= 0.0)) {
    throw std::invalid_argument("relax_implicit: need tau > 0 and dt >= 0");
  }
  const std::size_t size = model.grid().size();
  if (f.size() != size || scratch.size() < 2 * size) {
    throw std::invalid_argument("relax_implicit: length mismatch");
  }
  double rho = 0.0;
  for (double x : f) rho += x;

  const std::span<double> fe = scratch.first(size);
  equilibrium_into(model, std::clamp(rho, 0.0, 1.0), fe, scratch.subspan(size, size));

  const double ratio = dt / tau;
  const double inv = 1.0 / (1.0 + ratio);
  for (std::size_t i = 0; i < size; ++i) f[i] = (f[i] + ratio * fe[i]) * inv;

  // The update is mass-conserving in exact arithmetic; absorb the round-off so
  // the density is reproduced bitwise under the same summation order. The
  // rounded sum is monotone in each component but ties can make it step over
  // rho, so components are tried largest first until one lands exactly.
  const auto summed = [&] {
    double now = 0.0;
    for (double x : f) now += x;
    return now;
  };
  double now = summed();
  if (now == rho) return;
  const std::span<double> order = scratch.first(size);
  std::iota(order.begin(), order.end(), 0.0);
  std::sort(order.begin(), order.end(), [&](double a, double b) {
    return f[static_cast<std::size_t>(a)] > f[static_cast<std::size_t>(b)];
  });
  for (double slot : order) {
    double& x = f[static_cast<std::size_t>(slot)];
    const double original = x;
    if (!(x > 1e3 * std::abs(rho - now))) break;
    x += rho - now;
    now = summed();
    const bool below = now < rho;
    for (int step = 0; step < 16 && now != rho && (now < rho) == below; ++step) {
      x = std::nextafter(x, below ? 2.0 : -1.0);
      now = summed();
    }
    if (now == rho) return;
    x = original;
    now = summed();
  }
}

KineticState relax_implicit(const KineticState& state, const EquilibriumModel& model, double dt,
                            double tau) {
  KineticState out = state;
  std::vector<double> scratch(2 * model.grid().size());
  relax_implicit_inplace(out.f, model, dt, tau, scratch);
  return out;
}

}  // namespace kinetic
