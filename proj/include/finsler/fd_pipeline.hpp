#pragma once

// Finite-difference analyzer: an oracle for the jet pipeline that shares none
// of its derivative code. Three nested levels of central differences:
//   level 1  E = L^2/2            -> g, spray G
//   level 2  G                    -> N, Gamma, Rhat, H, k
//   level 3  (L, ell, phi, Rhat, H, k) -> C, h-curvature, D2 H, horizontal derivatives
// Each level amplifies the rounding noise of the one below, so the outer
// levels use larger steps. The deeper ladder (B, A) is out of reach.

#include <cmath>
#include <span>
#include <vector>

#include "finsler/diff.hpp"
#include "finsler/frame.hpp"
#include "finsler/linalg.hpp"
#include "finsler/metric.hpp"
#include "finsler/point_data.hpp"
#include "finsler/tensor.hpp"

namespace finsler {

struct FdSteps {
  double level1 = 1e-3;
  double level2 = 3e-2;
  double level3 = 5e-2;
};

namespace detail {

inline std::vector<int> unit_exps(int size, std::initializer_list<int> vars) {
  std::vector<int> e(static_cast<std::size_t>(size), 0);
  for (int v : vars) ++e[static_cast<std::size_t>(v)];
  return e;
}

struct FdLevel1 {
  double L = 0.0;
  Tensor<double> g, g_inv, G;
};

struct FdLevel2 {
  FdLevel1 base;
  FrameOf<double> frame;
  Tensor<double> N, Gamma, Rhat, H;
  double k = 0.0;
};

class FdAnalyzer {
 public:
  FdAnalyzer(const FinslerMetric& metric, FdSteps steps) : metric_(metric), n_(metric.dim()), steps_(steps) {}

  FdLevel1 level1(std::span<const double> z) const {
    const int n = n_;
    const auto nz = static_cast<std::size_t>(n);
    const VectorFn energy = [this, nz](std::span<const double> w) {
      const auto x = w.first(nz);
      metric_.require_in_domain(x);
      const double L = metric_.L(x, w.subspan(nz));
      return std::vector<double>{0.5 * L * L};
    };
    FdOptions opt{steps_.level1, true};
    FdLevel1 out;
    out.L = metric_.L(z.first(nz), z.subspan(nz));
    if (!(out.L > 0.0)) throw DegenerateMetric(metric_.name + ": L must be positive", 0.0);
    out.g = Tensor<double>(n, {0, 2});
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        out.g(i, j) = out.g(j, i) = fd_partial(energy, z, unit_exps(2 * n, {n + i, n + j}), opt)[0];
    require_positive_definite(out.g, metric_.name);
    out.g_inv = invert(out.g, {2, 0});
    std::vector<double> rhs(nz);
    for (int h = 0; h < n; ++h) {
      double acc = -fd_partial(energy, z, unit_exps(2 * n, {h}), opt)[0];
      for (int k = 0; k < n; ++k)
        acc += z[nz + static_cast<std::size_t>(k)] * fd_partial(energy, z, unit_exps(2 * n, {n + h, k}), opt)[0];
      rhs[static_cast<std::size_t>(h)] = acc;
    }
    out.G = Tensor<double>(n, {1, 0});
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int h = 0; h < n; ++h) acc += out.g_inv(i, h) * rhs[static_cast<std::size_t>(h)];
      out.G(i) = 0.5 * acc;
    }
    return out;
  }

  FdLevel2 level2(std::span<const double> z) const {
    const int n = n_;
    const auto nz = static_cast<std::size_t>(n);
    const VectorFn spray = [this](std::span<const double> w) {
      const auto G = level1(w).G;
      return std::vector<double>(G.data().begin(), G.data().end());
    };
    const FdOptions opt{steps_.level2, false};
    FdLevel2 out;
    out.base = level1(z);
    out.frame = assemble_frame<double>(out.base.L, out.base.g, out.base.g_inv, z.subspan(nz));

    out.N = Tensor<double>(n, {1, 1});
    for (int j = 0; j < n; ++j) {
      const auto d = fd_partial(spray, z, unit_exps(2 * n, {n + j}), opt);
      for (int i = 0; i < n; ++i) out.N(i, j) = d[static_cast<std::size_t>(i)];
    }
    out.Gamma = Tensor<double>(n, {1, 2});
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k) {
        const auto d = fd_partial(spray, z, unit_exps(2 * n, {n + j, n + k}), opt);
        for (int i = 0; i < n; ++i) out.Gamma(i, j, k) = out.Gamma(i, k, j) = d[static_cast<std::size_t>(i)];
      }
    // dN[i][j][k] = d N^i_j / dx^k
    Tensor<double> dN(n, {1, 2});
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const auto d = fd_partial(spray, z, unit_exps(2 * n, {n + j, k}), opt);
        for (int i = 0; i < n; ++i) dN(i, j, k) = d[static_cast<std::size_t>(i)];
      }
    auto delta_N = [&](int i, int j, int k) {
      double v = dN(i, j, k);
      for (int m = 0; m < n; ++m) v -= out.N(m, k) * out.Gamma(i, j, m);
      return v;
    };
    out.Rhat = Tensor<double>(n, {1, 2});
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) out.Rhat(i, j, k) = j == k ? 0.0 : delta_N(i, j, k) - delta_N(i, k, j);
    out.H = contract_slot(out.Rhat, 1, z.subspan(nz));
    double trace = 0.0;
    for (int i = 0; i < n; ++i) trace += out.H(i, i);
    out.k = trace / ((n - 1) * out.base.L * out.base.L);
    return out;
  }

  PointData analyze(const SamplePoint& p) const {
    metric_.require_valid(p);
    const int n = n_;
    std::vector<double> z(p.x);
    z.insert(z.end(), p.y.begin(), p.y.end());
    const FdLevel2 c = level2(z);

    // Layout of the level-3 closure output.
    const std::size_t n1 = static_cast<std::size_t>(n), n2 = n1 * n1, n3 = n2 * n1;
    const std::size_t o_L = 0, o_ell = 1, o_phi = o_ell + n1, o_rhat = o_phi + n2, o_H = o_rhat + n3,
                      o_k = o_H + n2, total = o_k + 1;
    const VectorFn fields = [&](std::span<const double> w) {
      const FdLevel2 l = level2(w);
      std::vector<double> v(total);
      v[o_L] = l.base.L;
      std::copy(l.frame.ell.data().begin(), l.frame.ell.data().end(), v.begin() + static_cast<long>(o_ell));
      std::copy(l.frame.phi.data().begin(), l.frame.phi.data().end(), v.begin() + static_cast<long>(o_phi));
      std::copy(l.Rhat.data().begin(), l.Rhat.data().end(), v.begin() + static_cast<long>(o_rhat));
      std::copy(l.H.data().begin(), l.H.data().end(), v.begin() + static_cast<long>(o_H));
      v[o_k] = l.k;
      return v;
    };
    const FdOptions opt{steps_.level3, false};
    std::vector<std::vector<double>> dx, dy;
    for (int a = 0; a < n; ++a) dx.push_back(fd_partial(fields, z, unit_exps(2 * n, {a}), opt));
    for (int a = 0; a < n; ++a) dy.push_back(fd_partial(fields, z, unit_exps(2 * n, {n + a}), opt));

    // Appends a derivative slot to the block of `base` starting at `offset`.
    auto block = [&](const std::vector<std::vector<double>>& d, std::size_t offset, Signature sig) {
      Signature out_sig = sig;
      ++out_sig.covariant;
      Tensor<double> t(n, out_sig);
      const std::size_t size = detail::ipow(n, sig.rank());
      for (std::size_t s = 0; s < size; ++s)
        for (int a = 0; a < n; ++a) t[s * n1 + static_cast<std::size_t>(a)] = d[static_cast<std::size_t>(a)][offset + s];
      return t;
    };
    // delta_l on a block: dx - N^m_l dy_m.
    auto delta = [&](std::size_t offset, Signature sig) {
      Tensor<double> t = block(dx, offset, sig);
      const Tensor<double> ty = block(dy, offset, sig);
      const std::size_t size = detail::ipow(n, sig.rank());
      for (std::size_t s = 0; s < size; ++s)
        for (int l = 0; l < n; ++l)
          for (int m = 0; m < n; ++m)
            t[s * n1 + static_cast<std::size_t>(l)] -= c.N(m, l) * ty[s * n1 + static_cast<std::size_t>(m)];
      return t;
    };

    PointData d;
    d.point = p;
    d.backend = Backend::fd;
    d.frame = c.frame;
    d.spray = c.base.G;
    d.nonlinear = c.N;
    d.berwald = c.Gamma;
    d.rhat = c.Rhat;
    d.deviation = c.H;
    d.h_curvature = block(dy, o_rhat, {1, 2});
    d.h_curvature_lowered = lower_last(d.h_curvature, d.frame.g);
    d.k = c.k;
    d.C = Tensor<double>(n, {0, 1});
    for (int a = 0; a < n; ++a) d.C(a) = c.base.L * dy[static_cast<std::size_t>(a)][o_k];

    d.v_dL = block(dy, o_L, {0, 0});
    d.v_dell = block(dy, o_ell, {0, 1});
    d.v_dphi = block(dy, o_phi, {1, 1});
    d.v_dH = block(dy, o_H, {1, 1});

    d.h_dL = delta(o_L, {0, 0});
    d.h_dk = delta(o_k, {0, 0});
    d.h_dell = delta(o_ell, {0, 1});
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l)
        for (int m = 0; m < n; ++m) d.h_dell(j, l) -= c.Gamma(m, j, l) * c.frame.ell(m);
    d.h_dRhat = delta(o_rhat, {1, 2});
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            double v = 0.0;
            for (int m = 0; m < n; ++m)
              v += c.Gamma(i, m, l) * c.Rhat(m, j, k) - c.Gamma(m, j, l) * c.Rhat(i, m, k) -
                   c.Gamma(m, k, l) * c.Rhat(i, j, m);
            d.h_dRhat(i, j, k, l) += v;
          }
    return d;
  }

 private:
  const FinslerMetric& metric_;
  int n_;
  FdSteps steps_;
};

}  // namespace detail

inline PointData analyze_fd(const FinslerMetric& metric, const SamplePoint& p, FdSteps steps = {}) {
  return detail::FdAnalyzer(metric, steps).analyze(p);
}

inline PointData analyze(const FinslerMetric& metric, const SamplePoint& p, Backend backend) {
  return backend == Backend::jet ? analyze_jet(metric, p) : analyze_fd(metric, p);
}

}  // namespace finsler
