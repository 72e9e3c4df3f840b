#include "shiftlab/finite_vector.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "shiftlab/errors.hpp"

namespace shiftlab {

NormKind NormKind::lp(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw PreconditionError("l_p norm requires p in [1, inf)");
  return {Kind::Lp, p};
}

std::string NormKind::name() const {
  if (is_sup()) return "sup";
  std::ostringstream os;
  os << 'l' << p;
  return os.str();
}

NormKind NormKind::parse(const std::string& text) {
  if (text == "sup" || text == "c0") return sup();
  if (text.size() > 1 && text[0] == 'l') {
    std::size_t used = 0;
    double p = 0.0;
    try {
      p = std::stod(text.substr(1), &used);
    } catch (const std::exception&) {
      throw ParseError(1, "expected a number after 'l' in norm '" + text + "'");
    }
    if (used != text.size() - 1) throw ParseError(1 + used, "trailing characters in norm '" + text + "'");
    return lp(p);
  }
  throw ParseError(0, "unknown norm '" + text + "' (expected sup or l<p>)");
}

FiniteVector::FiniteVector(std::initializer_list<std::pair<const std::int64_t, double>> coeffs,
                           NormKind norm)
    : norm_(norm) {
  for (const auto& [n, v] : coeffs) add(n, v);
}

FiniteVector FiniteVector::basis(std::int64_t n, double scale, NormKind norm) {
  FiniteVector v(norm);
  v.set(n, scale);
  return v;
}

double FiniteVector::operator[](std::int64_t n) const {
  auto it = coeffs_.find(n);
  return it == coeffs_.end() ? 0.0 : it->second;
}

void FiniteVector::set(std::int64_t n, double value) {
  if (value == 0.0)
    coeffs_.erase(n);
  else
    coeffs_[n] = value;
}

void FiniteVector::add(std::int64_t n, double value) {
  if (value == 0.0) return;
  auto [it, inserted] = coeffs_.try_emplace(n, value);
  if (!inserted) {
    it->second += value;
    if (it->second == 0.0) coeffs_.erase(it);
  }
}

std::int64_t FiniteVector::min_index() const {
  if (coeffs_.empty()) throw DomainError("empty vector has no support");
  return coeffs_.begin()->first;
}

std::int64_t FiniteVector::max_index() const {
  if (coeffs_.empty()) throw DomainError("empty vector has no support");
  return coeffs_.rbegin()->first;
}

double FiniteVector::norm() const {
  if (norm_.is_sup()) {
    double m = 0.0;
    for (const auto& [n, v] : coeffs_) m = std::max(m, std::abs(v));
    return m;
  }
  // Scale by the largest entry so that large p does not overflow.
  double scale = 0.0;
  for (const auto& [n, v] : coeffs_) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return 0.0;
  double s = 0.0;
  for (const auto& [n, v] : coeffs_) s += std::pow(std::abs(v) / scale, norm_.p);
  return scale * std::pow(s, 1.0 / norm_.p);
}

double FiniteVector::distance(const FiniteVector& other) const {
  FiniteVector d = *this;
  d -= other;
  d.norm_ = norm_;
  return d.norm();
}

FiniteVector& FiniteVector::operator+=(const FiniteVector& other) {
  for (const auto& [n, v] : other.coeffs_) add(n, v);
  return *this;
}

FiniteVector& FiniteVector::operator-=(const FiniteVector& other) {
  for (const auto& [n, v] : other.coeffs_) add(n, -v);
  return *this;
}

FiniteVector& FiniteVector::operator*=(double s) {
  if (s == 0.0) {
    coeffs_.clear();
    return *this;
  }
  for (auto& [n, v] : coeffs_) v *= s;
  return *this;
}

double FiniteVector::relative_difference(const FiniteVector& a, const FiniteVector& b) {
  double diff = 0.0, scale = 1.0;
  for (const auto& [n, v] : b.coeffs_) scale = std::max(scale, std::abs(v));
  for (const auto& [n, v] : a.coeffs_) diff = std::max(diff, std::abs(v - b[n]));
  for (const auto& [n, v] : b.coeffs_)
    if (!a.coeffs_.contains(n)) diff = std::max(diff, std::abs(v));
  return diff / scale;
}

std::string FiniteVector::to_string() const {
  if (coeffs_.empty()) return "0";
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (const auto& [n, v] : coeffs_) {
    if (!first) os << " + ";
    os << v << "*e_" << n;
    first = false;
  }
  return os.str();
}

}  // namespace shiftlab
