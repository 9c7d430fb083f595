#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "multitrek/scalar.hpp"

namespace multitrek {

/// Sparse multivariate polynomial with exact rational coefficients.
/// Variables are integer ids; a monomial is a list of (variable, exponent)
/// sorted by variable.
class Polynomial {
 public:
  using Monomial = std::vector<std::pair<int, int>>;

  Polynomial() = default;
  Polynomial(int c) : Polynomial(Rational(c)) {}
  Polynomial(const Rational& c) {
    if (!multitrek::is_zero(c)) terms_[{}] = c;
  }

  static Polynomial variable(int id) {
    Polynomial p;
    p.terms_[{{id, 1}}] = 1;
    return p;
  }

  const std::map<Monomial, Rational>& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }

  std::size_t degree() const {
    std::size_t d = 0;
    for (const auto& [m, c] : terms_) {
      std::size_t s = 0;
      for (const auto& [v, e] : m) s += static_cast<std::size_t>(e);
      d = std::max(d, s);
    }
    return d;
  }

  Polynomial& operator+=(const Polynomial& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  Polynomial& operator*=(const Polynomial& o) {
    *this = *this * o;
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator-(const Polynomial& a) { return Polynomial() - a; }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial out;
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) out.add_term(multiply(ma, mb), ca * cb);
    return out;
  }

  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.terms_ == b.terms_; }

  /// Substitutes values[var] for every variable.
  template <class Lookup>
  Rational evaluate(Lookup&& value_of) const {
    Rational sum = 0;
    for (const auto& [m, c] : terms_) {
      Rational t = c;
      for (const auto& [v, e] : m)
        for (int i = 0; i < e; ++i) t *= value_of(v);
      sum += t;
    }
    return sum;
  }

  /// Terms in monomial order, e.g. "2*a^2*b - c". `name_of(id)` names variables.
  template <class Namer>
  std::string to_string(Namer&& name_of) const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [m, c] : terms_) {
      Rational mag = abs(c);
      if (first)
        out += sgn(c) < 0 ? "-" : "";
      else
        out += sgn(c) < 0 ? " - " : " + ";
      first = false;
      bool need_star = false;
      if (m.empty() || mag != 1) {
        out += mag.get_str();
        need_star = true;
      }
      for (const auto& [v, e] : m) {
        if (need_star) out += "*";
        out += name_of(v);
        if (e > 1) out += "^" + std::to_string(e);
        need_star = true;
      }
    }
    return out;
  }

 private:
  static Monomial multiply(const Monomial& a, const Monomial& b) {
    Monomial out;
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
      if (j == b.size() || (i < a.size() && a[i].first < b[j].first))
        out.push_back(a[i++]);
      else if (i == a.size() || b[j].first < a[i].first)
        out.push_back(b[j++]);
      else {
        out.emplace_back(a[i].first, a[i].second + b[j].second);
        ++i;
        ++j;
      }
    }
    return out;
  }

  void add_term(const Monomial& m, const Rational& c) {
    if (multitrek::is_zero(c)) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (multitrek::is_zero(it->second)) terms_.erase(it);
    }
  }

  std::map<Monomial, Rational> terms_;
};

inline bool is_zero(const Polynomial& p) { return p.is_zero(); }

}  // namespace multitrek
