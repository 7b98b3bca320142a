#pragma once

// Textbook Riemannian curvature from the metric coefficients a_ij(x), by
// nested fourth-order central differences. Plain vectors only, no library
// types, so it can serve as an independent check of the Finsler pipeline on
// Riemannian metrics.

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;
using MetricFn = std::function<Mat(const Vec&)>;

inline Mat inverse(Mat a) {
  const std::size_t n = a.size();
  Mat inv(n, Vec(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    std::swap(a[p], a[c]);
    std::swap(inv[p], inv[c]);
    const double d = a[c][c];
    for (std::size_t k = 0; k < n; ++k) {
      a[c][k] /= d;
      inv[c][k] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c];
      for (std::size_t k = 0; k < n; ++k) {
        a[r][k] -= f * a[c][k];
        inv[r][k] -= f * inv[c][k];
      }
    }
  }
  return inv;
}

// d/dx_k of a vector-valued function, five-point stencil.
template <class F>
auto derivative(const F& f, const Vec& x, std::size_t k, double h) {
  auto at = [&](double s) {
    Vec z = x;
    z[k] += s * h;
    return f(z);
  };
  auto a = at(-2), b = at(-1), c = at(1), d = at(2);
  auto out = c;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (a[i] - 8.0 * b[i] + 8.0 * c[i] - d[i]) / (12.0 * h);
  return out;
}

class RiemannOracle {
 public:
  explicit RiemannOracle(MetricFn a, double h1 = 1e-3, double h2 = 2e-3) : a_(std::move(a)), h1_(h1), h2_(h2) {}

  // Gamma^i_jk flattened as [i][j][k].
  Vec christoffel(const Vec& x) const {
    const std::size_t n = x.size();
    auto flat = [this](const Vec& z) {
      Vec v;
      for (const auto& row : a_(z)) v.insert(v.end(), row.begin(), row.end());
      return v;
    };
    std::vector<Vec> da(n);
    for (std::size_t k = 0; k < n; ++k) da[k] = derivative(flat, x, k, h1_);
    auto d = [&](std::size_t i, std::size_t j, std::size_t k) { return da[k][i * n + j]; };
    const Mat inv = inverse(a_(x));
    Vec gamma(n * n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
          double s = 0.0;
          for (std::size_t m = 0; m < n; ++m) s += inv[i][m] * (d(m, j, k) + d(m, k, j) - d(j, k, m));
          gamma[(i * n + j) * n + k] = 0.5 * s;
        }
    return gamma;
  }

  // R^i_jkl for R(d_k, d_l) d_j, flattened as [i][j][k][l].
  Vec riemann(const Vec& x) const {
    const std::size_t n = x.size();
    const Vec g = christoffel(x);
    std::vector<Vec> dg(n);
    for (std::size_t k = 0; k < n; ++k)
      dg[k] = derivative([this](const Vec& z) { return christoffel(z); }, x, k, h2_);
    auto G = [&](std::size_t i, std::size_t j, std::size_t k) { return g[(i * n + j) * n + k]; };
    auto dG = [&](std::size_t m, std::size_t i, std::size_t j, std::size_t k) { return dg[m][(i * n + j) * n + k]; };
    Vec r(n * n * n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
          for (std::size_t l = 0; l < n; ++l) {
            double v = dG(k, i, l, j) - dG(l, i, k, j);
            for (std::size_t m = 0; m < n; ++m) v += G(i, k, m) * G(m, l, j) - G(i, l, m) * G(m, k, j);
            r[((i * n + j) * n + k) * n + l] = v;
          }
    return r;
  }

  // Jacobi operator V -> R(V, y) y as a matrix [i][k].
  Mat jacobi(const Vec& x, const Vec& y) const {
    const std::size_t n = x.size();
    const Vec r = riemann(x);
    Mat h(n, Vec(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j)
          for (std::size_t l = 0; l < n; ++l) h[i][k] += r[((i * n + j) * n + k) * n + l] * y[j] * y[l];
    return h;
  }

  double sectional(const Vec& x, const Vec& u, const Vec& v) const {
    const std::size_t n = x.size();
    const Vec r = riemann(x);
    const Mat a = a_(x);
    auto ip = [&](const Vec& p, const Vec& q) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) s += a[i][j] * p[i] * q[j];
      return s;
    };
    // g(R(u, v) v, u)
    double num = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
          for (std::size_t l = 0; l < n; ++l) {
            const double rv = r[((i * n + j) * n + k) * n + l] * v[j] * u[k] * v[l];
            for (std::size_t m = 0; m < n; ++m) num += a[m][i] * rv * u[m];
          }
    return num / (ip(u, u) * ip(v, v) - ip(u, v) * ip(u, v));
  }

 private:
  MetricFn a_;
  double h1_, h2_;
};

}  // namespace oracle
