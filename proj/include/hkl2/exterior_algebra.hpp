#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "hkl2/core/error.hpp"
#include "hkl2/core/format.hpp"
#include "hkl2/core/numeric.hpp"

namespace hkl2::ext {

using Mask = std::uint32_t;

inline constexpr int max_dim = 12;

// ---------------------------------------------------------------------------
// canonical basis

struct BasisTable {
  int dim = 0;
  std::vector<std::vector<Mask>> by_degree;
  std::vector<int> position;
};

namespace detail {

inline bool lex_less(Mask a, Mask b) {
  while (a && b) {
    const int ia = std::countr_zero(a), ib = std::countr_zero(b);
    if (ia != ib) return ia < ib;
    a &= a - 1;
    b &= b - 1;
  }
  return !a && b;
}

inline BasisTable build_table(int dim) {
  BasisTable t;
  t.dim = dim;
  t.by_degree.resize(dim + 1);
  t.position.assign(std::size_t{1} << dim, 0);
  for (Mask m = 0; m < (Mask{1} << dim); ++m) t.by_degree[std::popcount(m)].push_back(m);
  for (auto& block : t.by_degree) {
    std::sort(block.begin(), block.end(), lex_less);
    for (std::size_t i = 0; i < block.size(); ++i) t.position[block[i]] = static_cast<int>(i);
  }
  return t;
}

} // namespace detail

inline void check_dim(int dim) {
  if (dim < 1 || dim > max_dim) throw DomainError("exterior algebra dimension out of range");
}

/// Canonical ordering of basis multi-indices, grouped by degree and
/// lexicographic within a degree.
inline const BasisTable& basis_table(int dim) {
  check_dim(dim);
  static const std::vector<BasisTable> tables = [] {
    std::vector<BasisTable> t(max_dim + 1);
    for (int d = 1; d <= max_dim; ++d) t[d] = detail::build_table(d);
    return t;
  }();
  return tables[dim];
}

inline int degree_size(int dim, int p) {
  if (p < 0 || p > dim) return 0;
  return static_cast<int>(basis_table(dim).by_degree[p].size());
}

/// Sign of e^a ^ e^b relative to e^{a|b}; zero when they share an index.
inline int wedge_sign(Mask a, Mask b) {
  if (a & b) return 0;
  int swaps = 0;
  for (Mask rest = b; rest; rest &= rest - 1) {
    const int j = std::countr_zero(rest);
    swaps += std::popcount(a >> (j + 1));
  }
  return swaps % 2 ? -1 : 1;
}

/// Strictly increasing 1-based index set.
class MultiIndex {
public:
  MultiIndex() = default;
  MultiIndex(std::initializer_list<int> idx) : idx_(idx) { check(); }
  explicit MultiIndex(std::vector<int> idx) : idx_(std::move(idx)) { check(); }

  static MultiIndex from_mask(Mask m) {
    std::vector<int> idx;
    for (; m; m &= m - 1) idx.push_back(std::countr_zero(m) + 1);
    return MultiIndex(std::move(idx));
  }

  Mask mask(int dim) const {
    Mask m = 0;
    for (int i : idx_) {
      if (i > dim) throw DomainError("multi-index entry exceeds dimension");
      m |= Mask{1} << (i - 1);
    }
    return m;
  }

  int size() const { return static_cast<int>(idx_.size()); }
  const std::vector<int>& indices() const { return idx_; }
  bool operator==(const MultiIndex&) const = default;

  std::string label() const {
    if (idx_.empty()) return "1";
    std::string s;
    for (std::size_t i = 0; i < idx_.size(); ++i) {
      if (i) s += '^';
      s += 'e' + std::to_string(idx_[i]);
    }
    return s;
  }

private:
  void check() const {
    for (std::size_t i = 0; i < idx_.size(); ++i) {
      if (idx_[i] < 1 || idx_[i] > max_dim) throw DomainError("multi-index entry out of range");
      if (i && idx_[i] <= idx_[i - 1]) throw DomainError("multi-index must be strictly increasing");
    }
  }

  std::vector<int> idx_;
};

// ---------------------------------------------------------------------------
// forms

/// Element of the complexified exterior algebra of R^dim, stored densely by
/// bitmask of the multi-index.
class FormVector {
public:
  FormVector() = default;
  explicit FormVector(int dim) : dim_(dim) {
    check_dim(dim);
    c_ = Eigen::VectorXcd::Zero(Eigen::Index{1} << dim);
  }

  static FormVector scalar(int dim, cplx c) {
    FormVector f(dim);
    f.c_(0) = c;
    return f;
  }

  static FormVector basis(int dim, const MultiIndex& idx, cplx c = 1.0) {
    FormVector f(dim);
    f.c_(idx.mask(dim)) = c;
    return f;
  }

  template <typename Derived>
  static FormVector one_form(const Eigen::MatrixBase<Derived>& coeffs) {
    FormVector f(static_cast<int>(coeffs.size()));
    for (Eigen::Index i = 0; i < coeffs.size(); ++i) f.c_(Eigen::Index{1} << i) = coeffs(i);
    return f;
  }

  /// Real 2-form with coefficients w(a,b) for a<b.
  static FormVector two_form(const Eigen::MatrixXd& w) {
    if (w.rows() != w.cols()) throw DimensionMismatch("two_form: matrix must be square");
    FormVector f(static_cast<int>(w.rows()));
    for (int a = 0; a < w.rows(); ++a)
      for (int b = a + 1; b < w.cols(); ++b) f.c_((Eigen::Index{1} << a) | (Eigen::Index{1} << b)) = w(a, b);
    return f;
  }

  static FormVector from_dense(int dim, Eigen::VectorXcd coeffs) {
    check_dim(dim);
    if (coeffs.size() != (Eigen::Index{1} << dim)) throw DimensionMismatch("from_dense: wrong length");
    FormVector f;
    f.dim_ = dim;
    f.c_ = std::move(coeffs);
    return f;
  }

  template <typename Derived>
  static FormVector from_block(int dim, int p, const Eigen::MatrixBase<Derived>& block) {
    const auto& masks = basis_table(dim).by_degree.at(p);
    if (block.size() != static_cast<Eigen::Index>(masks.size()))
      throw DimensionMismatch("from_block: wrong block length");
    FormVector f(dim);
    for (std::size_t i = 0; i < masks.size(); ++i) f.c_(masks[i]) = block(static_cast<Eigen::Index>(i));
    return f;
  }

  int dim() const { return dim_; }
  const Eigen::VectorXcd& dense() const { return c_; }
  cplx coeff(Mask m) const { return c_(m); }
  cplx operator[](const MultiIndex& idx) const { return c_(idx.mask(dim_)); }

  FormVector& set(const MultiIndex& idx, cplx v) {
    c_(idx.mask(dim_)) = v;
    return *this;
  }

  Eigen::VectorXcd block(int p) const {
    const auto& masks = basis_table(dim_).by_degree.at(p);
    Eigen::VectorXcd out(masks.size());
    for (std::size_t i = 0; i < masks.size(); ++i) out(static_cast<Eigen::Index>(i)) = c_(masks[i]);
    return out;
  }

  FormVector degree_part(int p) const { return from_block(dim_, p, block(p)); }

  /// Degree if all coefficients above tol share one degree; nullopt for zero or mixed.
  std::optional<int> pure_degree(double tol = 0.0) const {
    std::optional<int> deg;
    for (Eigen::Index m = 0; m < c_.size(); ++m) {
      if (std::abs(c_(m)) <= tol) continue;
      const int p = std::popcount(static_cast<Mask>(m));
      if (deg && *deg != p) return std::nullopt;
      deg = p;
    }
    return deg;
  }

  bool is_zero(double tol = 0.0) const { return c_.cwiseAbs().maxCoeff() <= tol; }
  double norm() const { return c_.norm(); }
  double max_abs() const { return c_.size() ? c_.cwiseAbs().maxCoeff() : 0.0; }
  bool is_real(double tol = 0.0) const { return c_.imag().cwiseAbs().maxCoeff() <= tol; }

  FormVector conj() const { return from_dense(dim_, c_.conjugate()); }
  FormVector real() const { return from_dense(dim_, c_.real().cast<cplx>()); }
  FormVector imag() const { return from_dense(dim_, c_.imag().cast<cplx>()); }

  std::vector<std::pair<MultiIndex, cplx>> terms(double tol = 0.0) const {
    std::vector<std::pair<MultiIndex, cplx>> out;
    for (const auto& block : basis_table(dim_).by_degree)
      for (Mask m : block)
        if (std::abs(c_(m)) > tol) out.emplace_back(MultiIndex::from_mask(m), c_(m));
    return out;
  }

  FormVector& operator+=(const FormVector& o) {
    same_dim(o);
    c_ += o.c_;
    return *this;
  }
  FormVector& operator-=(const FormVector& o) {
    same_dim(o);
    c_ -= o.c_;
    return *this;
  }
  FormVector& operator*=(cplx s) {
    c_ *= s;
    return *this;
  }

  friend FormVector operator+(FormVector a, const FormVector& b) { return a += b; }
  friend FormVector operator-(FormVector a, const FormVector& b) { return a -= b; }
  friend FormVector operator-(FormVector a) { return a *= -1.0; }
  friend FormVector operator*(cplx s, FormVector a) { return a *= s; }
  friend FormVector operator*(FormVector a, cplx s) { return a *= s; }
  friend FormVector operator*(double s, FormVector a) { return a *= s; }
  friend FormVector operator*(FormVector a, double s) { return a *= s; }
  friend FormVector operator/(FormVector a, double s) { return a *= 1.0 / s; }

  void same_dim(const FormVector& o) const {
    if (o.dim_ != dim_) throw DimensionMismatch("forms live on different dimensions");
  }

private:
  int dim_ = 0;
  Eigen::VectorXcd c_;
};

inline FormVector wedge(const FormVector& a, const FormVector& b) {
  a.same_dim(b);
  const int n = a.dim();
  FormVector out(n);
  Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(Eigen::Index{1} << n);
  const auto& ca = a.dense();
  const auto& cb = b.dense();
  for (Mask ma = 0; ma < (Mask{1} << n); ++ma) {
    if (ca(ma) == 0.0) continue;
    for (Mask mb = 0; mb < (Mask{1} << n); ++mb) {
      if (cb(mb) == 0.0 || (ma & mb)) continue;
      acc(ma | mb) += static_cast<double>(wedge_sign(ma, mb)) * ca(ma) * cb(mb);
    }
  }
  return FormVector::from_dense(n, std::move(acc));
}

/// dx^i ^ a, with i 0-based.
inline FormVector dx_wedge(int i, const FormVector& a) {
  const int n = a.dim();
  const Mask bit = Mask{1} << i;
  Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(Eigen::Index{1} << n);
  for (Mask m = 0; m < (Mask{1} << n); ++m)
    if (!(m & bit) && a.coeff(m) != 0.0) acc(m | bit) += static_cast<double>(wedge_sign(bit, m)) * a.coeff(m);
  return FormVector::from_dense(n, std::move(acc));
}

// ---------------------------------------------------------------------------
// linear maps

/// Induced map of a 1-form coefficient map M (target x source) on p-forms:
/// entries are minors det M[T, S].
inline Eigen::MatrixXd induced_block(const Eigen::MatrixXd& m, int p) {
  const int tgt = static_cast<int>(m.rows()), src = static_cast<int>(m.cols());
  const auto& rows = basis_table(tgt).by_degree.at(p);
  const auto& cols = basis_table(src).by_degree.at(p);
  Eigen::MatrixXd out(rows.size(), cols.size());
  if (p == 0) {
    out(0, 0) = 1.0;
    return out;
  }
  Eigen::MatrixXd sub(p, p);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      int i = 0;
      for (Mask tr = rows[r]; tr; tr &= tr - 1, ++i) {
        int j = 0;
        for (Mask tc = cols[c]; tc; tc &= tc - 1, ++j)
          sub(i, j) = m(std::countr_zero(tr), std::countr_zero(tc));
      }
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = p == 1 ? sub(0, 0) : sub.determinant();
    }
  }
  return out;
}

/// Apply the induced map of M to every degree of a.
inline FormVector induced_map(const Eigen::MatrixXd& m, const FormVector& a) {
  if (m.cols() != a.dim()) throw DimensionMismatch("induced_map: source dimension mismatch");
  const int tgt = static_cast<int>(m.rows());
  FormVector out(tgt);
  for (int p = 0; p <= std::min(tgt, a.dim()); ++p) {
    const Eigen::VectorXcd blk = a.block(p);
    if (blk.cwiseAbs().maxCoeff() == 0.0) continue;
    out += FormVector::from_block(tgt, p, induced_block(m, p).cast<cplx>() * blk);
  }
  return out;
}

/// Pullback of a form along a map with Jacobian jac(a, i) = du^a / dx^i.
inline FormVector pullback(const Eigen::MatrixXd& jac, const FormVector& a) {
  return induced_map(jac.transpose(), a);
}

// ---------------------------------------------------------------------------
// metric, Hodge star, inner product

/// Riemannian metric on R^n with an orientation sign; immutable.
class Metric {
public:
  explicit Metric(Eigen::MatrixXd g, int orientation = 1) : g_(std::move(g)), orientation_(orientation) {
    if (g_.rows() != g_.cols()) throw DimensionMismatch("metric must be square");
    check_dim(static_cast<int>(g_.rows()));
    if (orientation_ != 1 && orientation_ != -1) throw DomainError("orientation must be +1 or -1");
    if ((g_ - g_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + g_.cwiseAbs().maxCoeff()))
      throw DomainError("metric must be symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(g_);
    if (llt.info() != Eigen::Success) throw DomainError("metric must be positive definite");
    frame_ = llt.matrixL();
    coframe_inv_ = frame_.inverse();
  }

  static Metric euclidean(int n, int orientation = 1) {
    return Metric(Eigen::MatrixXd::Identity(n, n), orientation);
  }

  int dim() const { return static_cast<int>(g_.rows()); }
  int orientation() const { return orientation_; }
  const Eigen::MatrixXd& matrix() const { return g_; }
  /// L with g = L L^T; the 1-forms e^a = sum_i L_ia dx^i are orthonormal.
  const Eigen::MatrixXd& frame() const { return frame_; }
  /// Coefficient map from coordinate 1-forms to the orthonormal coframe.
  const Eigen::MatrixXd& to_orthonormal() const { return coframe_inv_; }

private:
  Eigen::MatrixXd g_;
  int orientation_ = 1;
  Eigen::MatrixXd frame_;
  Eigen::MatrixXd coframe_inv_;
};

/// Matrix of the Hodge star from degree p to degree n-p.
inline Eigen::MatrixXd hodge_block(const Metric& g, int p) {
  const int n = g.dim();
  const auto& src = basis_table(n).by_degree.at(p);
  const auto& pos = basis_table(n).position;
  const Mask full = (Mask{1} << n) - 1;
  Eigen::MatrixXd flat = Eigen::MatrixXd::Zero(degree_size(n, n - p), src.size());
  for (std::size_t c = 0; c < src.size(); ++c) {
    const Mask comp = full & ~src[c];
    flat(pos[comp], static_cast<Eigen::Index>(c)) = g.orientation() * wedge_sign(src[c], comp);
  }
  return induced_block(g.frame(), n - p) * flat * induced_block(g.to_orthonormal(), p);
}

inline FormVector hodge_star(const FormVector& a, const Metric& g) {
  if (a.dim() != g.dim()) throw DimensionMismatch("hodge_star: metric dimension mismatch");
  if (a.is_zero()) return FormVector(a.dim());
  const auto p = a.pure_degree();
  if (!p) throw DegreeError("hodge_star needs a pure-degree form");
  return FormVector::from_block(a.dim(), a.dim() - *p, hodge_block(g, *p).cast<cplx>() * a.block(*p));
}

/// Gram matrix of the induced inner product on p-forms.
inline Eigen::MatrixXd gram_block(const Metric& g, int p) {
  const Eigen::MatrixXd m = induced_block(g.to_orthonormal(), p);
  return m.transpose() * m;
}

/// Hermitian pointwise inner product, antilinear in the first slot.
inline cplx inner(const FormVector& a, const FormVector& b, const Metric& g) {
  a.same_dim(b);
  if (a.dim() != g.dim()) throw DimensionMismatch("inner: metric dimension mismatch");
  cplx acc = 0.0;
  for (int p = 0; p <= a.dim(); ++p) {
    const Eigen::VectorXcd ba = a.block(p), bb = b.block(p);
    if (ba.cwiseAbs().maxCoeff() == 0.0 || bb.cwiseAbs().maxCoeff() == 0.0) continue;
    acc += ba.dot(gram_block(g, p).cast<cplx>() * bb);
  }
  return acc;
}

/// Orthonormal basis (columns) of the (anti-)self-dual 2-forms in dimension 4.
inline Eigen::MatrixXd duality_eigenbasis(const Metric& g, int sign) {
  if (g.dim() != 4) throw DimensionMismatch("self-duality needs dimension 4");
  const Eigen::MatrixXd star = hodge_block(g, 2);
  return numeric::nullspace(Eigen::MatrixXd(star - sign * Eigen::MatrixXd::Identity(6, 6)));
}

// ---------------------------------------------------------------------------
// quaternionic structure

enum class Axis { I = 1, J = 2, K = 3 };

inline Axis axis_from_int(int i) {
  if (i < 1 || i > 3) throw DomainError("axis must be 1, 2 or 3");
  return static_cast<Axis>(i);
}

inline int axis_index(Axis a) { return static_cast<int>(a) - 1; }

/// Cyclic successor pair (j, k) of axis i.
inline std::pair<Axis, Axis> cyclic_next(Axis i) {
  const int n = axis_index(i);
  return {static_cast<Axis>((n + 1) % 3 + 1), static_cast<Axis>((n + 2) % 3 + 1)};
}

class QuaternionicStructure {
public:
  QuaternionicStructure(Metric metric, Eigen::MatrixXd i, Eigen::MatrixXd j, Eigen::MatrixXd k, double tol = 1e-12)
      : metric_(std::move(metric)), s_{std::move(i), std::move(j), std::move(k)} {
    const int n = metric_.dim();
    if (n % 4 != 0) throw DimensionMismatch("quaternionic structure needs dimension 4k");
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd& g = metric_.matrix();
    const double scale = 1.0 + g.cwiseAbs().maxCoeff();
    for (const auto& m : s_) {
      if (m.rows() != n || m.cols() != n) throw DimensionMismatch("complex structure has wrong shape");
      if ((m * m + id).cwiseAbs().maxCoeff() > tol) throw DomainError("complex structure must square to -1");
      if ((m.transpose() * g * m - g).cwiseAbs().maxCoeff() > tol * scale)
        throw DomainError("complex structure must be metric-orthogonal");
    }
    if ((s_[0] * s_[1] * s_[2] + id).cwiseAbs().maxCoeff() > tol) throw DomainError("IJK must equal -1");
  }

  /// Left multiplication by i, j, k on H^k in the real basis (1, i, j, k) of each factor.
  static QuaternionicStructure standard(int k, int orientation = 1) {
    if (k < 1 || 4 * k > max_dim) throw DomainError("standard structure needs 1 <= 4k <= max_dim");
    Eigen::Matrix4d qi, qj, qk;
    qi << 0, -1, 0, 0, 1, 0, 0, 0, 0, 0, 0, -1, 0, 0, 1, 0;
    qj << 0, 0, -1, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, -1, 0, 0;
    qk << 0, 0, 0, -1, 0, 0, -1, 0, 0, 1, 0, 0, 1, 0, 0, 0;
    const int n = 4 * k;
    Eigen::MatrixXd i = Eigen::MatrixXd::Zero(n, n), j = i, kk = i;
    for (int b = 0; b < k; ++b) {
      i.block<4, 4>(4 * b, 4 * b) = qi;
      j.block<4, 4>(4 * b, 4 * b) = qj;
      kk.block<4, 4>(4 * b, 4 * b) = qk;
    }
    return QuaternionicStructure(Metric::euclidean(n, orientation), i, j, kk);
  }

  int dim() const { return metric_.dim(); }
  int k() const { return metric_.dim() / 4; }
  const Metric& metric() const { return metric_; }
  const Eigen::MatrixXd& structure(Axis a) const { return s_[axis_index(a)]; }

  /// omega(X, Y) = g(I X, Y).
  Eigen::MatrixXd kahler_matrix(Axis a) const { return structure(a).transpose() * metric_.matrix(); }
  FormVector kahler_form(Axis a) const { return FormVector::two_form(kahler_matrix(a)); }
  FormVector holomorphic_symplectic() const {
    return kahler_form(Axis::J) + cplx(0.0, 1.0) * kahler_form(Axis::K);
  }

private:
  Metric metric_;
  std::array<Eigen::MatrixXd, 3> s_;
};

inline FormVector hodge_star(const FormVector& a, const QuaternionicStructure& q) {
  return hodge_star(a, q.metric());
}

// ---------------------------------------------------------------------------
// operators on the whole algebra

/// Dense block of an operator between two degrees (rows: target basis).
struct OperatorMatrix {
  int dim = 0;
  int source_degree = 0;
  int target_degree = 0;
  Eigen::MatrixXd matrix;
};

class AlgebraOperator {
public:
  AlgebraOperator() = default;
  AlgebraOperator(int dim, Eigen::MatrixXd m) : dim_(dim), m_(std::move(m)) {
    const Eigen::Index size = Eigen::Index{1} << dim;
    if (m_.rows() != size || m_.cols() != size) throw DimensionMismatch("operator matrix has wrong size");
  }

  static AlgebraOperator identity(int dim) {
    return AlgebraOperator(dim, Eigen::MatrixXd::Identity(Eigen::Index{1} << dim, Eigen::Index{1} << dim));
  }

  int dim() const { return dim_; }
  const Eigen::MatrixXd& matrix() const { return m_; }

  FormVector operator()(const FormVector& a) const {
    if (a.dim() != dim_) throw DimensionMismatch("operator applied to form of wrong dimension");
    return FormVector::from_dense(dim_, m_.cast<cplx>() * a.dense());
  }

  OperatorMatrix block(int source, int target) const {
    const auto& t = basis_table(dim_);
    const auto& rows = t.by_degree.at(target);
    const auto& cols = t.by_degree.at(source);
    OperatorMatrix out{dim_, source, target, Eigen::MatrixXd(rows.size(), cols.size())};
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t c = 0; c < cols.size(); ++c)
        out.matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = m_(rows[r], cols[c]);
    return out;
  }

  friend AlgebraOperator operator*(const AlgebraOperator& a, const AlgebraOperator& b) {
    return AlgebraOperator(a.dim_, a.m_ * b.m_);
  }
  friend AlgebraOperator operator+(const AlgebraOperator& a, const AlgebraOperator& b) {
    return AlgebraOperator(a.dim_, a.m_ + b.m_);
  }
  friend AlgebraOperator operator-(const AlgebraOperator& a, const AlgebraOperator& b) {
    return AlgebraOperator(a.dim_, a.m_ - b.m_);
  }
  friend AlgebraOperator operator*(double s, const AlgebraOperator& a) { return AlgebraOperator(a.dim_, s * a.m_); }

private:
  int dim_ = 0;
  Eigen::MatrixXd m_;
};

inline AlgebraOperator commutator(const AlgebraOperator& a, const AlgebraOperator& b) { return a * b - b * a; }

/// Left multiplication by a real form.
inline AlgebraOperator wedge_operator(const FormVector& w) {
  if (!w.is_real()) throw DomainError("wedge_operator needs a real form");
  const int n = w.dim();
  const Eigen::Index size = Eigen::Index{1} << n;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(size, size);
  for (Mask a = 0; a < size; ++a) {
    const double c = w.coeff(a).real();
    if (c == 0.0) continue;
    for (Mask b = 0; b < size; ++b)
      if (!(a & b)) m(a | b, b) += c * wedge_sign(a, b);
  }
  return AlgebraOperator(n, std::move(m));
}

/// Extension of a linear map on 1-form coefficients as a derivation.
inline AlgebraOperator derivation_operator(const Eigen::MatrixXd& a1) {
  const int n = static_cast<int>(a1.rows());
  const Eigen::Index size = Eigen::Index{1} << n;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(size, size);
  for (Mask s = 0; s < size; ++s) {
    for (Mask rest = s; rest; rest &= rest - 1) {
      const int j = std::countr_zero(rest);
      const Mask bj = Mask{1} << j;
      const Mask others = s & ~bj;
      const int front = wedge_sign(bj, others);
      for (int t = 0; t < n; ++t) {
        const Mask bt = Mask{1} << t;
        if (a1(t, j) == 0.0 || (others & bt)) continue;
        m(others | bt, s) += a1(t, j) * front * wedge_sign(bt, others);
      }
    }
  }
  return AlgebraOperator(n, std::move(m));
}

/// Metric adjoint with respect to the induced inner product on forms.
inline AlgebraOperator adjoint(const AlgebraOperator& op, const Metric& g) {
  const int n = op.dim();
  const Eigen::Index size = Eigen::Index{1} << n;
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(size, size), gram_inv = gram;
  const auto& t = basis_table(n);
  for (int p = 0; p <= n; ++p) {
    const Eigen::MatrixXd blk = gram_block(g, p);
    const Eigen::MatrixXd inv = blk.inverse();
    const auto& masks = t.by_degree[p];
    for (std::size_t r = 0; r < masks.size(); ++r)
      for (std::size_t c = 0; c < masks.size(); ++c) {
        gram(masks[r], masks[c]) = blk(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        gram_inv(masks[r], masks[c]) = inv(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      }
  }
  return AlgebraOperator(n, gram_inv * op.matrix().transpose() * gram);
}

/// Diagonal operator acting by (p - shift) on degree p.
inline AlgebraOperator grading_operator(int dim, double shift) {
  const Eigen::Index size = Eigen::Index{1} << dim;
  Eigen::VectorXd d(size);
  for (Mask m = 0; m < size; ++m) d(m) = std::popcount(m) - shift;
  return AlgebraOperator(dim, d.asDiagonal());
}

/// L_i, Lambda_i and sigma_i for a quaternionic structure, built once.
///
/// sigma_i is the derivation induced by alpha -> -alpha o I_i.
class LefschetzAlgebra {
public:
  explicit LefschetzAlgebra(const QuaternionicStructure& q) : q_(q) {
    for (int a = 0; a < 3; ++a) {
      const Axis ax = static_cast<Axis>(a + 1);
      l_[a] = wedge_operator(q.kahler_form(ax));
      lambda_[a] = adjoint(l_[a], q.metric());
      sigma_[a] = derivation_operator(-q.structure(ax).transpose());
    }
  }

  const QuaternionicStructure& structure() const { return q_; }
  int dim() const { return q_.dim(); }
  const AlgebraOperator& L(Axis a) const { return l_[axis_index(a)]; }
  const AlgebraOperator& Lambda(Axis a) const { return lambda_[axis_index(a)]; }
  const AlgebraOperator& sigma(Axis a) const { return sigma_[axis_index(a)]; }

  std::vector<AlgebraOperator> generators() const {
    return {l_[0], l_[1], l_[2], lambda_[0], lambda_[1], lambda_[2]};
  }

private:
  QuaternionicStructure q_;
  std::array<AlgebraOperator, 3> l_, lambda_, sigma_;
};

inline FormVector lefschetz(Axis i, const FormVector& a, const QuaternionicStructure& q) {
  if (a.dim() != q.dim()) throw DimensionMismatch("lefschetz: dimension mismatch");
  return wedge(q.kahler_form(i), a);
}

inline FormVector lefschetz_adjoint(Axis i, const FormVector& a, const QuaternionicStructure& q) {
  if (a.dim() != q.dim()) throw DimensionMismatch("lefschetz_adjoint: dimension mismatch");
  return adjoint(wedge_operator(q.kahler_form(i)), q.metric())(a);
}

inline FormVector su2_action(Axis i, const FormVector& a, const QuaternionicStructure& q) {
  if (a.dim() != q.dim()) throw DimensionMismatch("su2_action: dimension mismatch");
  return derivation_operator(-q.structure(i).transpose())(a);
}

// ---------------------------------------------------------------------------
// verification of the quaternionic Lefschetz relations

inline double spectral_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
}

/// Largest degree-block operator norm of op (all blocks, including off-diagonal).
inline double blockwise_norm(const AlgebraOperator& op) {
  double worst = 0.0;
  for (int p = 0; p <= op.dim(); ++p)
    for (int q = 0; q <= op.dim(); ++q) worst = std::max(worst, spectral_norm(op.block(p, q).matrix));
  return worst;
}

struct RelationResidual {
  std::string relation;
  int degree = 0;
  double residual = 0.0;
};

struct So5Report {
  int k = 0;
  std::vector<RelationResidual> so5;
  std::vector<RelationResidual> grading;
  std::vector<RelationResidual> su2;
  std::vector<RelationResidual> commuting;
  double max_so5 = 0.0;
  double max_grading = 0.0;
  double max_su2 = 0.0;
  double max_commuting = 0.0;
};

namespace detail {

inline void degree_residuals(const AlgebraOperator& op, const std::string& name, std::vector<RelationResidual>& out,
                             double& worst) {
  for (int p = 0; p <= op.dim(); ++p) {
    double r = 0.0;
    for (int q = 0; q <= op.dim(); ++q) r = std::max(r, spectral_norm(op.block(p, q).matrix));
    out.push_back({name, p, r});
    worst = std::max(worst, r);
  }
}

} // namespace detail

/// Residuals, degree by degree, of [L_i, Lambda_j] + sigma_k and
/// [Lambda_i, L_j] + sigma_k for cyclic (i, j, k), together with the grading
/// [L_i, Lambda_i] = (p - 2k) Id, [sigma_i, sigma_j] = 2 sigma_k and [L_i, L_j] = 0.
inline So5Report verify_so5(const LefschetzAlgebra& alg) {
  So5Report rep;
  rep.k = alg.structure().k();
  const int n = alg.dim();
  const AlgebraOperator h = grading_operator(n, 2.0 * rep.k);
  for (int a = 1; a <= 3; ++a) {
    const Axis i = static_cast<Axis>(a);
    const auto [j, k] = cyclic_next(i);
    const std::string si = std::to_string(a), sj = std::to_string(axis_index(j) + 1),
                      sk = std::to_string(axis_index(k) + 1);
    detail::degree_residuals(commutator(alg.L(i), alg.Lambda(j)) + alg.sigma(k),
                             "[L" + si + ",Lambda" + sj + "]+sigma" + sk, rep.so5, rep.max_so5);
    detail::degree_residuals(commutator(alg.Lambda(i), alg.L(j)) + alg.sigma(k),
                             "[Lambda" + si + ",L" + sj + "]+sigma" + sk, rep.so5, rep.max_so5);
    detail::degree_residuals(commutator(alg.L(i), alg.Lambda(i)) - h, "[L" + si + ",Lambda" + si + "]-H",
                             rep.grading, rep.max_grading);
    detail::degree_residuals(commutator(alg.sigma(i), alg.sigma(j)) - 2.0 * alg.sigma(k),
                             "[sigma" + si + ",sigma" + sj + "]-2sigma" + sk, rep.su2, rep.max_su2);
    detail::degree_residuals(commutator(alg.L(i), alg.L(j)), "[L" + si + ",L" + sj + "]", rep.commuting,
                             rep.max_commuting);
  }
  return rep;
}

inline So5Report verify_so5(const QuaternionicStructure& q) { return verify_so5(LefschetzAlgebra(q)); }

struct ClosureResult {
  int generator_rank = 0;
  int dimension = 0;
  int rounds = 0;
};

/// Dimension of the span of a list of operators.
inline int operator_span_dimension(const std::vector<AlgebraOperator>& ops, double rel_tol = 1e-9) {
  if (ops.empty()) return 0;
  const Eigen::Index len = ops.front().matrix().size();
  Eigen::MatrixXd flat(len, static_cast<Eigen::Index>(ops.size()));
  for (std::size_t c = 0; c < ops.size(); ++c)
    flat.col(static_cast<Eigen::Index>(c)) = ops[c].matrix().reshaped();
  return numeric::rank(flat, rel_tol);
}

/// Lie algebra generated by L_i and Lambda_i under repeated commutators.
///
/// Throws ConvergenceError if the span is still growing after max_rounds.
inline ClosureResult lie_closure(const LefschetzAlgebra& alg, int max_rounds = 50, double rel_tol = 1e-9) {
  using Sparse = Eigen::SparseMatrix<double>;
  std::vector<Sparse> elems;
  std::vector<Eigen::VectorXd> ortho;

  auto try_add = [&](const Sparse& m) {
    Eigen::VectorXd v = Eigen::MatrixXd(m).reshaped();
    const double scale = v.norm();
    if (scale == 0.0) return false;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : ortho) v -= q.dot(v) * q;
    if (v.norm() <= rel_tol * scale) return false;
    ortho.push_back(v / v.norm());
    elems.push_back(m);
    return true;
  };

  ClosureResult res;
  for (const auto& g : alg.generators()) try_add(g.matrix().sparseView(1.0, 1e-14));
  res.generator_rank = static_cast<int>(elems.size());

  std::size_t fresh_begin = 0;
  for (int round = 1;; ++round) {
    if (round > max_rounds) throw ConvergenceError("lie_closure: span still growing");
    const std::size_t fresh_end = elems.size();
    bool grew = false;
    for (std::size_t a = fresh_begin; a < fresh_end; ++a)
      for (std::size_t b = 0; b < fresh_end; ++b) {
        if (b >= fresh_begin && b <= a) continue;
        Sparse c = Sparse(elems[a] * elems[b]) - Sparse(elems[b] * elems[a]);
        c.prune(1e-14, 1.0);
        grew = try_add(c) || grew;
      }
    res.rounds = round;
    if (!grew) break;
    fresh_begin = fresh_end;
  }
  res.dimension = static_cast<int>(elems.size());
  return res;
}

inline int lie_closure_dimension(const QuaternionicStructure& q) { return lie_closure(LefschetzAlgebra(q)).dimension; }

// ---------------------------------------------------------------------------
// type decomposition

/// sigma_eigenvalue: (p, q) labels the sigma_i-eigenvalue i(p - q).
/// holomorphic: (p, q) counts 1-forms with alpha o I = i alpha as p.
enum class TypeConvention { sigma_eigenvalue, holomorphic };

struct TypeComponent {
  int p = 0;
  int q = 0;
  FormVector form;
};

/// Splits a pure-degree form into sigma_i eigencomponents by Lagrange
/// interpolation projectors on its degree block.
inline std::vector<TypeComponent> type_components(const FormVector& a, Axis axis, const QuaternionicStructure& qs,
                                                  TypeConvention conv = TypeConvention::sigma_eigenvalue,
                                                  double tol = 1e-10) {
  if (a.dim() != qs.dim()) throw DimensionMismatch("type_components: dimension mismatch");
  std::vector<TypeComponent> out;
  if (a.is_zero()) return out;
  const auto deg = a.pure_degree();
  if (!deg) throw DegreeError("type_components needs a pure-degree form");
  const int d = *deg, half = qs.dim() / 2;
  const Eigen::MatrixXcd s =
      derivation_operator(-qs.structure(axis).transpose()).block(d, d).matrix.cast<cplx>();
  const Eigen::VectorXcd v = a.block(d);
  const double scale = v.norm();

  std::vector<int> ps;
  for (int p = std::max(0, d - half); p <= std::min(d, half); ++p) ps.push_back(p);

  Eigen::VectorXcd total = Eigen::VectorXcd::Zero(v.size());
  for (int p : ps) {
    const cplx lam(0.0, static_cast<double>(2 * p - d));
    Eigen::VectorXcd c = v;
    for (int r : ps) {
      if (r == p) continue;
      const cplx mu(0.0, static_cast<double>(2 * r - d));
      c = ((s * c - mu * c) / (lam - mu)).eval();
    }
    if ((s * c - lam * c).norm() > tol * std::max(1.0, scale))
      throw ToleranceError("type_components: eigenprojection residual too large");
    total += c;
    if (c.norm() <= 1e-12 * std::max(1.0, scale)) continue;
    const int q = d - p;
    if (conv == TypeConvention::sigma_eigenvalue)
      out.push_back({p, q, FormVector::from_block(a.dim(), d, c)});
    else
      out.push_back({q, p, FormVector::from_block(a.dim(), d, c)});
  }
  if ((total - v).norm() > tol * std::max(1.0, scale))
    throw ToleranceError("type_components: components do not sum to the input");
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.p > y.p; });
  return out;
}

/// Orthonormal basis of the joint kernel of all L_i and Lambda_i in the middle degree.
inline std::vector<FormVector> middle_kernel(const LefschetzAlgebra& alg) {
  const int n = alg.dim(), mid = n / 2;
  const int rows_up = degree_size(n, mid + 2), rows_down = degree_size(n, mid - 2), cols = degree_size(n, mid);
  Eigen::MatrixXd stacked(3 * (rows_up + rows_down), cols);
  Eigen::Index r = 0;
  for (int a = 1; a <= 3; ++a) {
    const Axis ax = static_cast<Axis>(a);
    stacked.middleRows(r, rows_up) = alg.L(ax).block(mid, mid + 2).matrix;
    r += rows_up;
    stacked.middleRows(r, rows_down) = alg.Lambda(ax).block(mid, mid - 2).matrix;
    r += rows_down;
  }
  const Eigen::MatrixXd ker = numeric::nullspace(stacked);
  std::vector<FormVector> out;
  for (Eigen::Index c = 0; c < ker.cols(); ++c) out.push_back(FormVector::from_block(n, mid, ker.col(c)));
  return out;
}

inline std::vector<FormVector> middle_kernel(const QuaternionicStructure& q) { return middle_kernel(LefschetzAlgebra(q)); }

/// Columns of a form list restricted to one degree block.
inline Eigen::MatrixXcd stack_blocks(const std::vector<FormVector>& forms, int p) {
  if (forms.empty()) return {};
  Eigen::MatrixXcd m(degree_size(forms.front().dim(), p), static_cast<Eigen::Index>(forms.size()));
  for (std::size_t c = 0; c < forms.size(); ++c) m.col(static_cast<Eigen::Index>(c)) = forms[c].block(p);
  return m;
}

// ---------------------------------------------------------------------------
// export

inline void write_csv(std::ostream& os, const OperatorMatrix& op) {
  const auto& t = basis_table(op.dim);
  const auto& rows = t.by_degree.at(op.target_degree);
  const auto& cols = t.by_degree.at(op.source_degree);
  os << "target\\source";
  for (Mask c : cols) os << ',' << MultiIndex::from_mask(c).label();
  os << '\n';
  for (std::size_t r = 0; r < rows.size(); ++r) {
    os << MultiIndex::from_mask(rows[r]).label();
    for (std::size_t c = 0; c < cols.size(); ++c)
      os << ',' << format_double(op.matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
    os << '\n';
  }
}

} // namespace hkl2::ext
