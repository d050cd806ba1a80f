#pragma once

// Reference computations used only by the tests. Everything here is written
// from the model equations directly and shares no code with the library.

#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;
using Matrix = std::vector<Vec>;

inline Vec equidistant(std::size_t n) {
  Vec v(n + 1);
  for (std::size_t i = 0; i <= n; ++i) v[i] = static_cast<double>(i) / static_cast<double>(n);
  v[n] = 1.0;
  return v;
}

/// Uniform point of {f >= 0, sum f <= 1} scaled to density at most rho_max.
inline Vec random_simplex(std::mt19937_64& rng, std::size_t components, double rho_max) {
  std::exponential_distribution<double> expo(1.0);
  Vec f(components);
  double total = 0.0;
  for (double& x : f) total += (x = expo(rng));
  const double slack = expo(rng);
  total += slack;
  for (double& x : f) x = x / total * rho_max;
  return f;
}

/// Sampled state with density drawn uniformly in [0, rho_max].
inline Vec random_state(std::mt19937_64& rng, std::size_t components, double rho_max) {
  std::uniform_real_distribution<double> u(0.0, rho_max);
  const double rho = u(rng);
  Vec f = random_simplex(rng, components, 1.0);
  double s = 0.0;
  for (double x : f) s += x;
  for (double& x : f) x *= rho / s;
  return f;
}

inline double sum(const Vec& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s;
}

/// System matrix of the primitive hyperbolic part, f_t + A(f) f_x = 0:
/// A_ii = v_i - sum_{j>i} (v_j - v_i) f_j / (1 - rho),
/// A_ij = (v_i - v_j) f_i / (1 - rho) for j < i, zero above the diagonal.
inline Matrix system_matrix(const Vec& f, const Vec& v) {
  const std::size_t m = f.size();
  const double free_space = 1.0 - sum(f);
  Matrix a(m, Vec(m, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    double tail = 0.0;
    for (std::size_t j = i + 1; j < m; ++j) tail += (v[j] - v[i]) * f[j];
    a[i][i] = v[i] - tail / free_space;
    for (std::size_t j = 0; j < i; ++j) a[i][j] = (v[i] - v[j]) * f[i] / free_space;
  }
  return a;
}

inline Vec mat_vec(const Matrix& a, const Vec& x) {
  Vec y(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) y[i] += a[i][j] * x[j];
  }
  return y;
}

/// Riemann invariants written out as explicit ratios.
inline Vec diagonal_variables(const Vec& f) {
  Vec w(f.size());
  double head = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    w[k] = f[k] / (1.0 - head);
    head += f[k];
  }
  return w;
}

/// N_k = prod_{j>=k} (1 - w_j).
inline Vec conservative_from_w(const Vec& w) {
  Vec n(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) {
    double p = 1.0;
    for (std::size_t j = k; j < w.size(); ++j) p *= 1.0 - w[j];
    n[k] = p;
  }
  return n;
}

/// f_k = w_k prod_{j<k} (1 - w_j).
inline Vec primitive_from_w(const Vec& w) {
  Vec f(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) {
    double p = w[k];
    for (std::size_t j = 0; j < k; ++j) p *= 1.0 - w[j];
    f[k] = p;
  }
  return f;
}

/// Eigenvalues written in terms of the Riemann invariants.
inline Vec lambda_of_w(const Vec& w, const Vec& v) {
  const Matrix a = system_matrix(primitive_from_w(w), v);
  Vec lambda(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) lambda[i] = a[i][i];
  return lambda;
}

/// Central difference of a scalar function along direction d.
inline double directional(const std::function<double(const Vec&)>& fn, const Vec& x, const Vec& d,
                          double h) {
  Vec plus = x;
  Vec minus = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    plus[i] += h * d[i];
    minus[i] -= h * d[i];
  }
  return (fn(plus) - fn(minus)) / (2.0 * h);
}

/// Central difference along coordinate j.
inline double partial(const std::function<double(const Vec&)>& fn, const Vec& x, std::size_t j,
                      double h) {
  Vec e(x.size(), 0.0);
  e[j] = 1.0;
  return directional(fn, x, e, h);
}

/// Dense solve by Gaussian elimination with partial pivoting.
inline Vec solve(Matrix a, Vec b) {
  const std::size_t m = b.size();
  for (std::size_t c = 0; c < m; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < m; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    }
    std::swap(a[c], a[p]);
    std::swap(b[c], b[p]);
    for (std::size_t r = c + 1; r < m; ++r) {
      const double factor = a[r][c] / a[c][c];
      for (std::size_t k = c; k < m; ++k) a[r][k] -= factor * a[c][k];
      b[r] -= factor * b[c];
    }
  }
  Vec x(m);
  for (std::size_t r = m; r-- > 0;) {
    double s = b[r];
    for (std::size_t k = r + 1; k < m; ++k) s -= a[r][k] * x[k];
    x[r] = s / a[r][r];
  }
  return x;
}

/// Composite Simpson rule on [a, b] with an even number of panels.
inline double simpson(const std::function<double(double)>& fn, double a, double b,
                      std::size_t panels) {
  if (panels % 2) ++panels;
  const double h = (b - a) / static_cast<double>(panels);
  double s = fn(a) + fn(b);
  for (std::size_t k = 1; k < panels; ++k) {
    s += (k % 2 ? 4.0 : 2.0) * fn(a + static_cast<double>(k) * h);
  }
  return s * h / 3.0;
}

}  // namespace oracle
