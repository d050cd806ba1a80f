#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "kinetic/equilibria.hpp"
#include "kinetic/errors.hpp"
#include "oracles.hpp"

using namespace kinetic;

namespace {

EquilibriumModel make_model(std::size_t n, const FundamentalDiagram& F,
                            const std::function<SecondMoment(WeightMoments)>& second) {
  VelocityGrid grid = VelocityGrid::equidistant(n);
  std::vector<double> weights;
  WeightMoments wm;
  if (n >= 2) {
    weights = EquilibriumModel::default_weights(n);
    wm = EquilibriumModel::weight_moments(grid, weights);
  }
  return EquilibriumModel(std::move(grid), F, second(wm), std::move(weights));
}

EquilibriumModel lwr_linear(std::size_t n, double alpha) {
  const auto F = FundamentalDiagram::lwr();
  return make_model(n, F, [&](WeightMoments) { return SecondMoment::linear_factor(F, alpha); });
}

EquilibriumModel lwr_equal(std::size_t n) {
  const auto F = FundamentalDiagram::lwr();
  return make_model(n, F, [&](WeightMoments) { return SecondMoment::equal(F); });
}

EquilibriumModel cubic_linear(std::size_t n, double alpha) {
  const auto F = FundamentalDiagram::cubic();
  return make_model(n, F, [&](WeightMoments) { return SecondMoment::linear_factor(F, alpha); });
}

EquilibriumModel tc4(bool second) {
  const auto F = FundamentalDiagram::lwr();
  return make_model(2, F, [&](WeightMoments wm) {
    return second ? SecondMoment::spline_e2(F, wm) : SecondMoment::spline_e1(F);
  });
}

// Double sum written out with the density derivative of f^e taken by central
// differences of the library equilibrium.
double D_double_sum(const EquilibriumModel& model, double rho) {
  const VelocityGrid& g = model.grid();
  const double h = 1e-6;
  const auto fe = equilibrium_f(model, rho).f;
  const auto fp = equilibrium_f(model, rho + h).f;
  const auto fm = equilibrium_f(model, rho - h).f;
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const double dfj = (fp[j] - fm[j]) / (2 * h);
      s += (g[i] - g[j]) * (g[i] - g[j]) * fe[i] * dfj;
    }
  }
  const double dF = model.diagram().derivative(rho);
  return -dF * dF + model.second_moment().derivative(rho) + s / (1.0 - rho);
}

}  // namespace

TEST_CASE("fundamental diagrams") {
  const auto lwr = FundamentalDiagram::lwr();
  const auto cubic = FundamentalDiagram::cubic();
  for (double rho = 0.0; rho <= 1.0; rho += 0.05) {
    CHECK(lwr(rho) == doctest::Approx(rho * (1 - rho)));
    CHECK(lwr.derivative(rho) == doctest::Approx(1 - 2 * rho));
    CHECK(cubic(rho) == doctest::Approx(rho * (1 - rho) * (1 - rho)));
    CHECK(cubic.derivative(rho) == doctest::Approx((1 - rho) * (1 - 3 * rho)));
    CHECK(lwr.derivative(rho) <= 1.0);
    CHECK(cubic.derivative(rho) <= 1.0);
  }
  CHECK(lwr(0.0) == 0.0);
  CHECK(lwr(1.0) == 0.0);
  CHECK(cubic(1.0) == 0.0);
  CHECK_THROWS_AS(FundamentalDiagram::from_name("parabolic"), ConfigError);

  // Finite-difference fallback for user diagrams.
  const FundamentalDiagram user("user", [](double r) { return r * (1 - r) * (1 - r / 2); });
  CHECK(user.derivative(0.3) == doctest::Approx(1 - 3 * 0.3 + 1.5 * 0.09).epsilon(1e-8));
}

TEST_CASE("default weights and weight moments") {
  CHECK(EquilibriumModel::default_weights(2) == std::vector<double>{1.0});
  const auto w3 = EquilibriumModel::default_weights(3);
  REQUIRE(w3.size() == 2);
  CHECK(w3[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(w3[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  const auto w20 = EquilibriumModel::default_weights(20);
  CHECK(oracle::sum(w20) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(EquilibriumModel::default_weights(1), std::invalid_argument);

  const auto wm = EquilibriumModel::weight_moments(VelocityGrid::equidistant(20), w20);
  CHECK(wm.gamma == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(wm.lambda_w == doctest::Approx(39.0 / 60.0).epsilon(1e-13));
}

TEST_CASE("model construction validates its inputs") {
  const auto F = FundamentalDiagram::lwr();
  const auto grid = VelocityGrid::equidistant(3);
  CHECK_THROWS_AS(EquilibriumModel(grid, F, SecondMoment::equal(F), {0.5, 0.6}),
                  std::invalid_argument);
  CHECK_THROWS_AS(EquilibriumModel(grid, F, SecondMoment::equal(F), {1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(EquilibriumModel(grid, F, SecondMoment::equal(F), {-0.5, 1.5}),
                  std::invalid_argument);
  const FundamentalDiagram leaky("leaky", [](double r) { return 0.5 * r; });
  CHECK_THROWS_AS(EquilibriumModel(grid, leaky, SecondMoment::equal(leaky), {0.5, 0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(EquilibriumModel(VelocityGrid::equidistant(1), F,
                                   SecondMoment::linear_factor(F, 0.3), {}),
                  std::invalid_argument);
  CHECK_THROWS_AS(lwr_linear(2, 0.501), RealizabilityError);
  CHECK_NOTHROW(lwr_linear(2, 0.5));
}

TEST_CASE("equilibrium examples") {
  const auto model = lwr_equal(2);
  const auto fe = equilibrium_f(model, 0.5).f;
  CHECK(fe[0] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(std::abs(fe[1]) < 1e-16);
  CHECK(fe[2] == doctest::Approx(0.25).epsilon(1e-15));

  for (double x : equilibrium_f(model, 0.0).f) CHECK(x == 0.0);

  // N = 1: (rho - F, F).
  const auto one = lwr_equal(1);
  const auto f1 = equilibrium_f(one, 0.3).f;
  CHECK(f1[0] == doctest::Approx(0.3 - 0.21).epsilon(1e-15));
  CHECK(f1[1] == doctest::Approx(0.21).epsilon(1e-15));
}

TEST_CASE("N = 2 equilibrium matches the closed forms for any interior velocity") {
  const auto F = FundamentalDiagram::lwr();
  for (double v1 : {0.25, 0.5, 0.7}) {
    const VelocityGrid grid({0.0, v1, 1.0});
    const auto E = SecondMoment::linear_factor(F, 0.2);
    const EquilibriumModel model(grid, F, E, {1.0});
    for (double rho = 0.05; rho < 1.0; rho += 0.05) {
      const double f = F(rho);
      const double e = E(rho);
      const double d = v1 * (1 - v1);
      const auto fe = equilibrium_f(model, rho).f;
      CHECK(fe[0] == doctest::Approx(rho - ((1 - v1 * v1) * f - e * (1 - v1)) / d).epsilon(1e-12));
      CHECK(fe[1] == doctest::Approx((f - e) / d).epsilon(1e-12));
      CHECK(fe[2] == doctest::Approx((v1 * e - v1 * v1 * f) / d).epsilon(1e-12));
    }
  }
}

TEST_CASE("moment consistency of the equilibrium family") {
  const std::vector<EquilibriumModel> models = {
      lwr_equal(1),         lwr_equal(2),           lwr_linear(2, 0.5), lwr_equal(10),
      cubic_linear(20, 1.0 / 3.0), lwr_linear(5, 0.3), tc4(false),         tc4(true)};
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& model : models) {
    const auto& g = model.grid();
    for (int k = 0; k < 200; ++k) {
      const double rho = u(rng);
      const auto fe = equilibrium_f(model, rho);
      const MacroMoments m = moments(fe, g);
      CHECK(std::abs(m.rho - rho) <= 1e-12);
      CHECK(std::abs(m.q - model.diagram()(rho)) <= 1e-12);
      CHECK(std::abs(m.e - model.second_moment()(rho)) <= 1e-12);
      for (double x : fe.f) CHECK(x >= 0.0);
      // Interior components follow alpha_i / v_i.
      for (std::size_t i = 2; i + 1 < g.size(); ++i) {
        const double a = fe.f[i] * g[i] / model.weights()[i - 1];
        const double b = fe.f[1] * g[1] / model.weights()[0];
        CHECK(std::abs(a - b) <= 1e-12);
      }
    }
  }
}

TEST_CASE("realizability margins") {
  const auto eq = lwr_equal(2);
  for (double rho = 0.05; rho < 1.0; rho += 0.05) {
    const auto s = realizability_margin(eq, rho);
    CHECK(s.upper == 0.0);
    CHECK(s.moment >= 0.0);
    CHECK(s.realizable());
  }
  const auto half = lwr_linear(2, 0.5);
  const auto s = realizability_margin(half, 0.5);
  CHECK(s.lower >= 0.0);
  CHECK(s.moment >= 0.0);
  CHECK(s.upper >= 0.0);

  // N = 2, v_1 = 1/2: E = F(1 - alpha rho) is realizable iff alpha <= 1/2.
  // The lower bound reads alpha (1 - rho) <= 1/2 and fails first near vacuum.
  for (double alpha : {0.1, 0.3, 0.5}) CHECK_NOTHROW(lwr_linear(2, alpha));
  for (double alpha : {0.51, 0.6, 2.0 / 3.0}) CHECK_THROWS_AS(lwr_linear(2, alpha), RealizabilityError);
  try {
    lwr_linear(2, 0.6);
  } catch (const RealizabilityError& e) {
    CHECK(e.rho() < 0.2);
  }
}

TEST_CASE("stability coefficient examples") {
  const auto F = FundamentalDiagram::lwr();
  const auto E = SecondMoment::equal(F);
  CHECK(stability_D_closed(F, E, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(stability_D_closed(F, E, 0.0) == doctest::Approx(E.derivative(0.0) - 1.0));
  CHECK(stability_D_general(lwr_equal(2), 0.5) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK_THROWS_AS(stability_D_closed(F, E, 1.0), NearJamError);

  // E = F: D = (1 - F')(F' + F/(1 - rho)) = 2 rho (1 - rho) for lwr.
  for (double rho = 0.0; rho < 1.0; rho += 0.01) {
    const double d = F.derivative(rho);
    CHECK(std::abs(stability_D_closed(F, E, rho) - (1 - d) * (d + F(rho) / (1 - rho))) <= 1e-12);
    CHECK(std::abs(stability_D_closed(F, E, rho) - 2 * rho * (1 - rho)) <= 1e-12);
  }
}

TEST_CASE("alpha = 2/3 stability threshold for lwr") {
  const auto F = FundamentalDiagram::lwr();
  const auto min_D = [&](double alpha) {
    const auto E = SecondMoment::linear_factor(F, alpha);
    double m = 1e300;
    for (int k = 0; k <= 100000; ++k) m = std::min(m, stability_D_closed(F, E, k * 0.99999 / 1e5));
    return m;
  };
  CHECK(min_D(2.0 / 3.0 - 1e-6) >= 0.0);
  CHECK(min_D(2.0 / 3.0 + 1e-3) < 0.0);
  CHECK(min_D(0.5) >= 0.0);
}

TEST_CASE("closed form and double sum agree") {
  const std::vector<EquilibriumModel> models = {
      lwr_equal(2),  lwr_linear(2, 0.5), lwr_equal(10), cubic_linear(20, 1.0 / 3.0),
      lwr_linear(5, 0.3), tc4(false),    tc4(true),     lwr_equal(1)};
  for (const auto& model : models) {
    for (int k = 1; k <= 99; ++k) {
      const double rho = k / 100.0;
      const double closed = stability_D_closed(model, rho);
      CHECK(std::abs(closed - stability_D_general(model, rho)) <= 1e-10);
      CHECK(std::abs(closed - D_double_sum(model, rho)) <= 1e-7);
    }
    CHECK(std::abs(stability_D_closed(model, 1e-8) - stability_D_general(model, 1e-8)) <= 1e-10);
  }
}

TEST_CASE("unstable cubic model") {
  const auto model = cubic_linear(20, 1.0 / 3.0);
  const double d = stability_D_closed(model, 0.7);
  CHECK(d < 0.0);
  // Hand evaluation: F = 0.063, F' = -0.33, E = 0.0483, E' = -0.274.
  CHECK(d == doctest::Approx(-0.1089 - 0.274 + (0.0483 + 0.056 * 0.063 + 0.33 * 0.0483) / 0.3)
                 .epsilon(1e-12));
}

TEST_CASE("sub-characteristic condition") {
  std::vector<double> samples;
  for (int k = 0; k <= 1000; ++k) samples.push_back(k * (1.0 - 1e-9) / 1000.0);
  for (const auto& s : subcharacteristic_check(FundamentalDiagram::lwr(), samples)) {
    CHECK(s.passed);
  }
  // Cubic: (1 - rho) F' + F = (1 - rho)^2 (1 - 2 rho), so the lower bound
  // holds exactly on [0, 1/2].
  for (const auto& s : subcharacteristic_check(FundamentalDiagram::cubic(), samples)) {
    CHECK(s.passed == (s.rho <= 0.5));
    CHECK(s.lower == doctest::Approx(-s.rho * (1 - s.rho)));
  }
  const auto zero = subcharacteristic_check(FundamentalDiagram::lwr(), std::vector<double>{0.0});
  CHECK(zero[0].passed);
  CHECK(zero[0].lower == 0.0);
}

TEST_CASE("second-moment splines join with C2 continuity") {
  const auto F = FundamentalDiagram::lwr();
  const auto wm = EquilibriumModel::weight_moments(VelocityGrid::equidistant(2), std::vector<double>{1.0});
  const auto e1 = SecondMoment::spline_e1(F);
  const auto e2 = SecondMoment::spline_e2(F, wm);
  CHECK(e1(0.3) == doctest::Approx(F(0.3)).epsilon(1e-15));
  CHECK(e1(0.95) == doctest::Approx((0.95 - 1) * (0.95 - 3) / 4).epsilon(1e-15));
  CHECK(e2(0.95) == doctest::Approx(0.5 * F(0.95)).epsilon(1e-15));

  const double h = 1e-4;
  for (const auto* e : {&e1, &e2}) {
    for (double join : {0.5, 0.9}) {
      const double left = (*e)(join - h);
      const double right = (*e)(join + h);
      CHECK(std::abs(left - right) < 3e-4);  // continuous value
      const double dl = e->derivative(join - 1e-12);
      const double dr = e->derivative(join + 1e-12);
      CHECK(std::abs(dl - dr) < 1e-9);
      // One-sided second differences, Richardson-extrapolated to O(h^2).
      const auto second = [&](double x, double s) {
        const auto d2 = [&](double t) {
          return ((*e)(x + 2 * t) - 2 * (*e)(x + t) + (*e)(x)) / (t * t);
        };
        return 2 * d2(s / 2) - d2(s);
      };
      CHECK(std::abs(second(join, -1e-3) - second(join, 1e-3)) < 1e-3);
    }
  }
  CHECK_THROWS_AS(SecondMoment::spline_e1(F, 0.9, 0.5), std::invalid_argument);
}

TEST_CASE("test-case 4 closures are realizable and weakly unstable near jam") {
  for (bool second : {false, true}) {
    const auto model = tc4(second);
    bool negative = false;
    for (int k = 1; k < 300; ++k) {
      const double rho = 0.7 + 0.3 * k / 300.0;
      CHECK(realizability_margin(model, rho).realizable(1e-12));
      if (stability_D_closed(model, rho) < 0.0) negative = true;
    }
    CHECK(negative);
    for (int k = 0; k <= 50; ++k) CHECK(stability_D_closed(model, 0.5 * k / 50.0) >= 0.0);
  }
}

TEST_CASE("second moment names") {
  const auto F = FundamentalDiagram::lwr();
  const WeightMoments wm{0.5, 2.0};
  CHECK(SecondMoment::from_name("equal", F, wm)(0.4) == F(0.4));
  CHECK(SecondMoment::from_name("linear_factor:0.5", F, wm)(0.4) ==
        doctest::Approx(F(0.4) * 0.8));
  CHECK_NOTHROW(SecondMoment::from_name("spline_e1", F, wm));
  CHECK_NOTHROW(SecondMoment::from_name("spline_e2", F, wm));
  CHECK_THROWS_AS(SecondMoment::from_name("linear_factor:x", F, wm), ConfigError);
  CHECK_THROWS_AS(SecondMoment::from_name("cubic", F, wm), ConfigError);
}

TEST_CASE("implicit relaxation") {
  const auto model = lwr_linear(2, 0.5);
  const KineticState f{{0.1, 0.4, 0.2}};
  const auto fe = equilibrium_f(model, 0.7).f;

  const auto full = relax_implicit(f, model, 1e12, 1.0).f;
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(full[i] - fe[i]) <= 1e-10);

  const auto fixed = relax_implicit(KineticState{fe}, model, 0.3, 0.01).f;
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(fixed[i] - fe[i]) <= 1e-15);

  const auto half = relax_implicit(f, model, 0.01, 0.01).f;
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(half[i] == doctest::Approx(0.5 * (f.f[i] + fe[i])).epsilon(1e-14));
  }
  CHECK_THROWS_AS(relax_implicit(f, model, 0.1, 0.0), std::invalid_argument);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 0.1);
  const auto m20 = cubic_linear(20, 1.0 / 3.0);
  for (int k = 0; k < 2000; ++k) {
    const auto& m = k % 2 ? model : m20;
    const KineticState s{oracle::random_state(rng, m.grid().size(), 0.999)};
    const auto r = relax_implicit(s, m, u(rng), 0.01);
    double before = 0.0, after = 0.0;
    for (double x : s.f) before += x;
    for (double x : r.f) after += x;
    CHECK(before == after);
    CHECK(validate_simplex(r, 0.0).ok);
  }
}
