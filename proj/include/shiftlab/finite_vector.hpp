#pragma once

#include <cstdint>
#include <initializer_list>
#include <map>
#include <string>
#include <utility>

namespace shiftlab {

// Norm of the ambient sequence space: l_p(Z) for p in [1, inf) or c_0(Z).
struct NormKind {
  enum class Kind { Lp, Sup };

  Kind kind = Kind::Sup;
  double p = 1.0;

  static NormKind sup() { return {Kind::Sup, 0.0}; }
  static NormKind lp(double p);

  bool is_sup() const { return kind == Kind::Sup; }
  std::string name() const;
  static NormKind parse(const std::string& text);

  friend bool operator==(const NormKind&, const NormKind&) = default;
};

// Finitely supported real sequence over integer indices. Exact zeros are
// never stored, so `support_size()` counts the nonzero coefficients.
class FiniteVector {
 public:
  using Map = std::map<std::int64_t, double>;

  FiniteVector() = default;
  explicit FiniteVector(NormKind norm) : norm_(norm) {}
  FiniteVector(std::initializer_list<std::pair<const std::int64_t, double>> coeffs,
               NormKind norm = NormKind::sup());

  static FiniteVector basis(std::int64_t n, double scale = 1.0, NormKind norm = NormKind::sup());

  double operator[](std::int64_t n) const;
  void set(std::int64_t n, double value);
  void add(std::int64_t n, double value);

  const Map& coefficients() const { return coeffs_; }
  std::size_t support_size() const { return coeffs_.size(); }
  bool empty() const { return coeffs_.empty(); }
  std::int64_t min_index() const;
  std::int64_t max_index() const;

  NormKind norm_kind() const { return norm_; }
  void set_norm_kind(NormKind norm) { norm_ = norm; }

  double norm() const;
  double distance(const FiniteVector& other) const;

  FiniteVector& operator+=(const FiniteVector& other);
  FiniteVector& operator-=(const FiniteVector& other);
  FiniteVector& operator*=(double s);

  friend FiniteVector operator+(FiniteVector a, const FiniteVector& b) { return a += b; }
  friend FiniteVector operator-(FiniteVector a, const FiniteVector& b) { return a -= b; }
  friend FiniteVector operator*(double s, FiniteVector a) { return a *= s; }

  // Coefficient-wise equality (norm kind ignored).
  friend bool operator==(const FiniteVector& a, const FiniteVector& b) {
    return a.coeffs_ == b.coeffs_;
  }

  // max_n |a_n - b_n| / max(1, max_n |b_n|).
  static double relative_difference(const FiniteVector& a, const FiniteVector& b);

  std::string to_string() const;

 private:
  Map coeffs_;
  NormKind norm_ = NormKind::sup();
};

}  // namespace shiftlab
