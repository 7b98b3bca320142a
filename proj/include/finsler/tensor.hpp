#pragma once

// Dense multi-index arrays with a variance signature, plus the slot algebra
// (contractions, antisymmetrization, cyclic sums) shared by values and jets.
//
// Components are stored row-major with the contravariant slots first, so a
// (1,2) tensor T^i_{jk} lives at offset (i*n + j)*n + k.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "finsler/error.hpp"

namespace finsler {

struct Signature {
  int contravariant = 0;
  int covariant = 0;

  constexpr int rank() const noexcept { return contravariant + covariant; }
  friend constexpr bool operator==(Signature, Signature) = default;
};

inline std::string to_string(Signature s) {
  return "(" + std::to_string(s.contravariant) + "," + std::to_string(s.covariant) + ")";
}

namespace detail {

inline std::size_t ipow(int base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= static_cast<std::size_t>(base);
  return r;
}

// Advances a multi-index over [0, dim)^rank; returns false after the last one.
inline bool next_index(std::span<int> idx, int dim) {
  for (int s = static_cast<int>(idx.size()) - 1; s >= 0; --s) {
    if (++idx[s] < dim) return true;
    idx[s] = 0;
  }
  return false;
}

}  // namespace detail

template <class T>
class Tensor {
 public:
  using value_type = T;

  Tensor() = default;
  Tensor(int dim, Signature sig, const T& fill = T{})
      : dim_(dim), sig_(sig), data_(detail::ipow(dim, sig.rank()), fill) {
    if (dim < 1) throw RankError("tensor dimension must be positive");
    if (sig.contravariant < 0 || sig.covariant < 0) throw RankError("negative rank");
  }

  int dim() const noexcept { return dim_; }
  Signature signature() const noexcept { return sig_; }
  int rank() const noexcept { return sig_.rank(); }
  std::size_t size() const noexcept { return data_.size(); }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }

  T& operator[](std::size_t flat) { return data_[flat]; }
  const T& operator[](std::size_t flat) const { return data_[flat]; }

  std::size_t offset(std::span<const int> idx) const {
    std::size_t off = 0;
    for (int i : idx) off = off * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(i);
    return off;
  }

  T& at(std::span<const int> idx) { return data_[offset(idx)]; }
  const T& at(std::span<const int> idx) const { return data_[offset(idx)]; }

  template <class... I>
  T& operator()(I... idx) {
    const std::array<int, sizeof...(I)> a{static_cast<int>(idx)...};
    return data_[offset(a)];
  }
  template <class... I>
  const T& operator()(I... idx) const {
    const std::array<int, sizeof...(I)> a{static_cast<int>(idx)...};
    return data_[offset(a)];
  }

  /// Calls fn(multi_index, component) for every component in storage order.
  template <class F>
  void for_each(F&& fn) {
    std::vector<int> idx(static_cast<std::size_t>(rank()), 0);
    std::size_t flat = 0;
    do {
      fn(std::span<const int>(idx), data_[flat++]);
    } while (detail::next_index(idx, dim_));
  }
  template <class F>
  void for_each(F&& fn) const {
    std::vector<int> idx(static_cast<std::size_t>(rank()), 0);
    std::size_t flat = 0;
    do {
      fn(std::span<const int>(idx), data_[flat++]);
    } while (detail::next_index(idx, dim_));
  }

  Tensor& operator+=(const Tensor& o) {
    check_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  Tensor& operator-=(const Tensor& o) {
    check_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  template <class S>
  Tensor& operator*=(const S& s) {
    for (auto& v : data_) v = v * s;
    return *this;
  }

  friend Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
  friend Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
  friend Tensor operator-(Tensor a) {
    for (auto& v : a.data_) v = -v;
    return a;
  }
  template <class S>
  friend Tensor operator*(Tensor a, const S& s) {
    return a *= s;
  }
  template <class S>
  friend Tensor operator*(const S& s, Tensor a)
    requires(!std::is_same_v<S, Tensor>)
  {
    for (auto& v : a.data_) v = s * v;
    return a;
  }

  void check_same_shape(const Tensor& o) const {
    if (dim_ != o.dim_ || sig_ != o.sig_)
      throw RankError("tensor shape mismatch: " + to_string(sig_) + " vs " + to_string(o.sig_));
  }

 private:
  int dim_ = 0;
  Signature sig_{};
  std::vector<T> data_;
};

/// Applies fn to every component, producing a tensor of the same shape.
template <class T, class F>
auto map_components(const Tensor<T>& t, F&& fn) {
  using U = std::decay_t<decltype(fn(t[0]))>;
  Tensor<U> out(t.dim(), t.signature());
  for (std::size_t i = 0; i < t.size(); ++i) out[i] = fn(t[i]);
  return out;
}

inline double frobenius_norm(const Tensor<double>& t) {
  double s = 0.0;
  for (double v : t.data()) s += v * v;
  return std::sqrt(s);
}

inline double max_abs(const Tensor<double>& t) {
  double m = 0.0;
  for (double v : t.data()) m = std::max(m, std::abs(v));
  return m;
}

inline bool all_finite(const Tensor<double>& t) {
  return std::all_of(t.data().begin(), t.data().end(), [](double v) { return std::isfinite(v); });
}

namespace detail {

inline void check_slot(int slot, int rank, const char* op) {
  if (slot < 0 || slot >= rank)
    throw RankError(std::string(op) + ": slot " + std::to_string(slot) + " out of range for rank " +
                    std::to_string(rank));
}

inline bool same_kind(Signature sig, int a, int b) {
  return (a < sig.contravariant) == (b < sig.contravariant);
}

}  // namespace detail

/// Builds a tensor whose slot s is the input's slot perm[s].
template <class T>
Tensor<T> permute_slots(const Tensor<T>& t, std::span<const int> perm, Signature out_sig) {
  if (static_cast<int>(perm.size()) != t.rank() || out_sig.rank() != t.rank())
    throw RankError("permute_slots: permutation length mismatch");
  Tensor<T> out(t.dim(), out_sig);
  std::vector<int> src(perm.size());
  out.for_each([&](std::span<const int> idx, T& v) {
    for (std::size_t s = 0; s < perm.size(); ++s) src[static_cast<std::size_t>(perm[s])] = idx[s];
    v = t.at(src);
  });
  return out;
}

template <class T>
Tensor<T> permute_slots(const Tensor<T>& t, std::initializer_list<int> perm) {
  return permute_slots(t, std::span<const int>(perm.begin(), perm.size()), t.signature());
}

/// Swaps two slots of the same variance.
template <class T>
Tensor<T> swap_slots(const Tensor<T>& t, int a, int b) {
  detail::check_slot(a, t.rank(), "swap_slots");
  detail::check_slot(b, t.rank(), "swap_slots");
  if (!detail::same_kind(t.signature(), a, b))
    throw RankError("swap_slots: slots have different variance");
  std::vector<int> perm(static_cast<std::size_t>(t.rank()));
  std::iota(perm.begin(), perm.end(), 0);
  std::swap(perm[static_cast<std::size_t>(a)], perm[static_cast<std::size_t>(b)]);
  return permute_slots(t, std::span<const int>(perm), t.signature());
}

/// out(..., X, ..., Y, ...) = in(..., X, ..., Y, ...) - in(..., Y, ..., X, ...).
template <class T>
Tensor<T> antisymmetrize(const Tensor<T>& t, int slot_a, int slot_b) {
  detail::check_slot(slot_a, t.rank(), "antisymmetrize");
  detail::check_slot(slot_b, t.rank(), "antisymmetrize");
  if (slot_a == slot_b) throw RankError("antisymmetrize: slots must differ");
  return t - swap_slots(t, slot_a, slot_b);
}

/// Sum over the three cyclic permutations of the designated slots.
template <class T>
Tensor<T> cyclic_sum(const Tensor<T>& t, int a, int b, int c) {
  for (int s : {a, b, c}) detail::check_slot(s, t.rank(), "cyclic_sum");
  if (a == b || b == c || a == c) throw RankError("cyclic_sum: slots must be distinct");
  if (!detail::same_kind(t.signature(), a, b) || !detail::same_kind(t.signature(), a, c))
    throw RankError("cyclic_sum: slots have different variance");
  std::vector<int> p1(static_cast<std::size_t>(t.rank()));
  std::iota(p1.begin(), p1.end(), 0);
  std::vector<int> p2 = p1;
  // (a,b,c) <- (b,c,a) and (c,a,b)
  p1[static_cast<std::size_t>(a)] = b;
  p1[static_cast<std::size_t>(b)] = c;
  p1[static_cast<std::size_t>(c)] = a;
  p2[static_cast<std::size_t>(a)] = c;
  p2[static_cast<std::size_t>(b)] = a;
  p2[static_cast<std::size_t>(c)] = b;
  return t + permute_slots(t, std::span<const int>(p1), t.signature()) +
         permute_slots(t, std::span<const int>(p2), t.signature());
}

/// Contracts one slot with a vector (covariant slot) or covector (contravariant
/// slot); the slot is removed.
template <class T, class V>
Tensor<T> contract_slot(const Tensor<T>& t, int slot, std::span<const V> v) {
  detail::check_slot(slot, t.rank(), "contract_slot");
  if (static_cast<int>(v.size()) != t.dim()) throw RankError("contract_slot: vector length mismatch");
  Signature sig = t.signature();
  if (slot < sig.contravariant)
    --sig.contravariant;
  else
    --sig.covariant;
  Tensor<T> out(t.dim(), sig, T{});
  std::vector<int> full(static_cast<std::size_t>(t.rank()));
  out.for_each([&](std::span<const int> idx, T& acc) {
    for (int s = 0, o = 0; s < t.rank(); ++s)
      if (s != slot) full[static_cast<std::size_t>(s)] = idx[static_cast<std::size_t>(o++)];
    for (int m = 0; m < t.dim(); ++m) {
      full[static_cast<std::size_t>(slot)] = m;
      acc += t.at(full) * v[static_cast<std::size_t>(m)];
    }
  });
  return out;
}

/// Applies a (1,1) tensor map^a_b to one slot. On a covariant slot s the result
/// is out_{..s..} = in_{..a..} map^a_s; on a contravariant slot it is
/// out^{..s..} = map^s_a in^{..a..}.
template <class T>
Tensor<T> apply_to_slot(const Tensor<T>& t, int slot, const Tensor<T>& map) {
  detail::check_slot(slot, t.rank(), "apply_to_slot");
  if (map.signature() != Signature{1, 1} || map.dim() != t.dim())
    throw RankError("apply_to_slot: map must be (1,1)");
  const bool contra = slot < t.signature().contravariant;
  Tensor<T> out(t.dim(), t.signature(), T{});
  std::vector<int> src(static_cast<std::size_t>(t.rank()));
  out.for_each([&](std::span<const int> idx, T& acc) {
    std::copy(idx.begin(), idx.end(), src.begin());
    const int s = idx[static_cast<std::size_t>(slot)];
    for (int a = 0; a < t.dim(); ++a) {
      const T& m = contra ? map(s, a) : map(a, s);
      src[static_cast<std::size_t>(slot)] = a;
      acc += t.at(src) * m;
    }
  });
  return out;
}

/// Tensor product; contravariant slots of a then b, then covariant of a then b.
template <class T>
Tensor<T> outer(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.dim() != b.dim()) throw RankError("outer: dimension mismatch");
  const Signature sa = a.signature(), sb = b.signature();
  Tensor<T> out(a.dim(), Signature{sa.contravariant + sb.contravariant, sa.covariant + sb.covariant});
  std::vector<int> ia(static_cast<std::size_t>(sa.rank())), ib(static_cast<std::size_t>(sb.rank()));
  out.for_each([&](std::span<const int> idx, T& v) {
    std::size_t p = 0;
    for (int s = 0; s < sa.contravariant; ++s) ia[static_cast<std::size_t>(s)] = idx[p++];
    for (int s = 0; s < sb.contravariant; ++s) ib[static_cast<std::size_t>(s)] = idx[p++];
    for (int s = 0; s < sa.covariant; ++s) ia[static_cast<std::size_t>(sa.contravariant + s)] = idx[p++];
    for (int s = 0; s < sb.covariant; ++s) ib[static_cast<std::size_t>(sb.contravariant + s)] = idx[p++];
    v = a.at(ia) * b.at(ib);
  });
  return out;
}

/// Lowers the (single) contravariant index of a (1,p) tensor with g, placing
/// it as the last covariant slot: out_{j..w} = g_{iw} T^i_{j..}.
template <class T>
Tensor<T> lower_last(const Tensor<T>& t, const Tensor<T>& g) {
  if (t.signature().contravariant != 1) throw RankError("lower_last: expects a (1,p) tensor");
  const int p = t.signature().covariant;
  Tensor<T> out(t.dim(), Signature{0, p + 1}, T{});
  std::vector<int> src(static_cast<std::size_t>(p + 1));
  out.for_each([&](std::span<const int> idx, T& acc) {
    for (int s = 0; s < p; ++s) src[static_cast<std::size_t>(s + 1)] = idx[static_cast<std::size_t>(s)];
    const int w = idx[static_cast<std::size_t>(p)];
    for (int i = 0; i < t.dim(); ++i) {
      src[0] = i;
      acc += t.at(src) * g(i, w);
    }
  });
  return out;
}

template <class T>
Tensor<T> make_vector(std::span<const T> v, Signature sig = {1, 0}) {
  Tensor<T> out(static_cast<int>(v.size()), sig);
  std::copy(v.begin(), v.end(), out.data().begin());
  return out;
}

template <class T>
Tensor<T> identity_map(int n) {
  Tensor<T> out(n, Signature{1, 1}, T{0.0});
  for (int i = 0; i < n; ++i) out(i, i) = T{1.0};
  return out;
}

}  // namespace finsler
