#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "smexp/rational.hpp"

namespace smexp {

// Thrown when two representations of the same function disagree on a
// retained coefficient.
class InconsistentRepresentations : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Thrown when a reciprocal or quotient is requested for an expansion whose
// leading retained coefficient is zero.
class NonPivotalOperand : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Certified power-type bound on a truncation remainder:
/// |f(eps) - retained polynomial| <= G * eps^(k + delta) for 0 < eps <= eps_bar.
/// G == 0 marks an identically zero remainder (exact polynomial data).
struct RemainderBound {
  Rational delta;        // exponent increment, in (0, 1]
  double G = 0.0;        // nonnegative, finite
  double eps_bar = 1.0;  // validity radius, in (0, 1]
};

inline bool operator==(const RemainderBound& x, const RemainderBound& y) {
  return x.delta == y.delta && x.G == y.G && x.eps_bar == y.eps_bar;
}

namespace detail {

inline double abs_d(const Rational& r) { return std::fabs(to_double(r)); }

// Order-canonical accumulation: the result depends only on the multiset of
// terms, which makes commutativity / permutation-invariance of the derived
// G parameters exact at the double level.
inline double sorted_sum(std::vector<double> terms) {
  std::sort(terms.begin(), terms.end());
  double s = 0.0;
  for (double t : terms) s += t;
  return s;
}

inline double sorted_product(std::vector<double> factors) {
  std::sort(factors.begin(), factors.end());
  double p = 1.0;
  for (double f : factors) p *= f;
  return p;
}

// eps_bar^exponent. Every exponent fed to this from a bound formula must be
// nonnegative; a negative one means the formula was assembled wrongly.
inline double checked_pow(double eps, const Rational& expo) {
  if (expo < 0)
    throw std::logic_error("remainder-bound formula produced a negative eps_bar exponent");
  if (expo == 0) return 1.0;
  return std::pow(eps, to_double(expo));
}

inline double plain_pow(double eps, const Rational& expo) {
  if (expo == 0) return 1.0;
  return std::pow(eps, to_double(expo));
}

}  // namespace detail

/// Truncated Laurent polynomial sum_{l=h}^{k} a_l eps^l with an optional
/// certified remainder bound. Leading zero coefficients are preserved as
/// declared; use trim() to drop them explicitly.
class LaurentExpansion {
 public:
  LaurentExpansion(int h, int k, std::vector<Rational> coeffs,
                   std::optional<RemainderBound> bound = std::nullopt)
      : h_(h), k_(k), coeffs_(std::move(coeffs)), bound_(std::move(bound)) {
    if (h_ > k_) throw std::invalid_argument("LaurentExpansion: h > k");
    if (coeffs_.size() != static_cast<size_t>(k_ - h_ + 1))
      throw std::invalid_argument("LaurentExpansion: need exactly k - h + 1 coefficients");
    if (bound_) validate_bound(*bound_);
  }

  // Normalizing factory: a bound with delta > 1 is re-indexed to the
  // canonical delta in (0, 1] form by retaining extra zero coefficients
  // (k grows, G and eps_bar are unchanged).
  static LaurentExpansion normalized(int h, int k, std::vector<Rational> coeffs,
                                     RemainderBound bound) {
    if (bound.delta > 1) {
      BigInt fl = numerator(bound.delta) / denominator(bound.delta);
      BigInt shift = denominator(bound.delta) == 1 ? fl - 1 : fl;
      int s = shift.convert_to<int>();
      bound.delta -= Rational(shift);
      k += s;
      coeffs.resize(coeffs.size() + static_cast<size_t>(s), Rational(0));
    }
    return LaurentExpansion(h, k, std::move(coeffs), std::move(bound));
  }

  int h() const { return h_; }
  int k() const { return k_; }
  const std::vector<Rational>& coeffs() const { return coeffs_; }

  /// Coefficient of eps^power; zero outside the retained range [h, k].
  Rational coeff(int power) const {
    if (power < h_ || power > k_) return Rational(0);
    return coeffs_[static_cast<size_t>(power - h_)];
  }

  /// True iff the leading retained coefficient a_h is nonzero.
  bool is_pivotal() const { return coeffs_.front() != 0; }

  const std::optional<RemainderBound>& bound() const { return bound_; }

  LaurentExpansion without_bound() const { return LaurentExpansion(h_, k_, coeffs_); }

 private:
  static void validate_bound(const RemainderBound& b) {
    if (!(b.delta > 0) || b.delta > 1)
      throw std::invalid_argument("RemainderBound: delta must lie in (0, 1]");
    if (!(b.G >= 0.0) || !std::isfinite(b.G))
      throw std::invalid_argument("RemainderBound: G must be finite and nonnegative");
    if (!(b.eps_bar > 0.0) || b.eps_bar > 1.0)
      throw std::invalid_argument("RemainderBound: eps_bar must lie in (0, 1]");
  }

  int h_;
  int k_;
  std::vector<Rational> coeffs_;
  std::optional<RemainderBound> bound_;
};

inline bool operator==(const LaurentExpansion& x, const LaurentExpansion& y) {
  return x.h() == y.h() && x.k() == y.k() && x.coeffs() == y.coeffs() &&
         x.bound() == y.bound();
}

enum class DivisionMode { ViaReciprocal, Direct };

/// Embeds the constant c as c * eps^0 over the retained range [h, k].
/// A nonzero constant requires 0 to be representable (h <= 0 <= k).
/// The remainder is identically zero, hence G = 0 on all of (0, 1].
inline LaurentExpansion embed_constant(const Rational& c, int h, int k) {
  if (h > k) throw std::invalid_argument("embed_constant: h > k");
  if (c != 0 && (h > 0 || k < 0))
    throw std::invalid_argument("embed_constant: nonzero constant needs h <= 0 <= k");
  std::vector<Rational> coeffs(static_cast<size_t>(k - h + 1), Rational(0));
  if (h <= 0 && 0 <= k) coeffs[static_cast<size_t>(-h)] = c;
  return LaurentExpansion(h, k, std::move(coeffs), RemainderBound{Rational(1), 0.0, 1.0});
}

/// Merges two representations of the same function into the more informative
/// one: larger k wins the coefficients; among bounds valid for the winning k,
/// larger delta wins, then smaller G, with eps_bar = min on ties.
/// Coefficients must agree wherever both representations speak.
inline LaurentExpansion combine_representations(const LaurentExpansion& a1,
                                                const LaurentExpansion& a2) {
  const int lo = std::min(a1.h(), a2.h());
  const int overlap_hi = std::min(a1.k(), a2.k());
  for (int l = lo; l <= overlap_hi; ++l) {
    if (a1.coeff(l) != a2.coeff(l))
      throw InconsistentRepresentations(
          "combine_representations: coefficient mismatch at power " + std::to_string(l));
  }
  const int h = std::max(a1.h(), a2.h());
  const int k = std::max(a1.k(), a2.k());
  const LaurentExpansion& donor = a1.k() >= a2.k() ? a1 : a2;
  std::vector<Rational> coeffs;
  coeffs.reserve(static_cast<size_t>(k - h + 1));
  for (int l = h; l <= k; ++l) coeffs.push_back(donor.coeff(l));

  std::optional<RemainderBound> b1 = a1.k() == k ? a1.bound() : std::nullopt;
  std::optional<RemainderBound> b2 = a2.k() == k ? a2.bound() : std::nullopt;
  std::optional<RemainderBound> bound;
  if (b1 && b2) {
    if (b1->delta < b2->delta) {
      bound = *b2;
    } else if (b2->delta < b1->delta) {
      bound = *b1;
    } else {
      bound = RemainderBound{b1->delta, std::min(b1->G, b2->G),
                             std::min(b1->eps_bar, b2->eps_bar)};
    }
  } else if (b1 || b2) {
    bound = b1 ? *b1 : *b2;
  }
  if (bound) return LaurentExpansion::normalized(h, k, std::move(coeffs), *bound);
  return LaurentExpansion(h, k, std::move(coeffs));
}

inline LaurentExpansion scale(const Rational& c, const LaurentExpansion& a) {
  std::vector<Rational> coeffs;
  coeffs.reserve(a.coeffs().size());
  for (const Rational& x : a.coeffs()) coeffs.push_back(c * x);
  std::optional<RemainderBound> bound;
  if (a.bound())
    bound = RemainderBound{a.bound()->delta, detail::abs_d(c) * a.bound()->G,
                           a.bound()->eps_bar};
  return LaurentExpansion(a.h(), a.k(), std::move(coeffs), std::move(bound));
}

inline LaurentExpansion add(const LaurentExpansion& a, const LaurentExpansion& b) {
  const int h = std::min(a.h(), b.h());
  const int k = std::min(a.k(), b.k());
  std::vector<Rational> coeffs;
  coeffs.reserve(static_cast<size_t>(k - h + 1));
  for (int l = h; l <= k; ++l) coeffs.push_back(a.coeff(l) + b.coeff(l));

  std::optional<RemainderBound> bound;
  if (a.bound() && b.bound()) {
    const RemainderBound& ba = *a.bound();
    const RemainderBound& bb = *b.bound();
    Rational delta = a.k() < b.k()   ? ba.delta
                     : b.k() < a.k() ? bb.delta
                                     : std::min(ba.delta, bb.delta);
    double eps = std::min(ba.eps_bar, bb.eps_bar);
    std::vector<double> terms;
    terms.push_back(ba.G * detail::checked_pow(eps, Rational(a.k() - k) + ba.delta - delta));
    for (int i = k + 1; i <= a.k(); ++i)
      terms.push_back(detail::abs_d(a.coeff(i)) *
                      detail::checked_pow(eps, Rational(i - k) - delta));
    terms.push_back(bb.G * detail::checked_pow(eps, Rational(b.k() - k) + bb.delta - delta));
    for (int j = k + 1; j <= b.k(); ++j)
      terms.push_back(detail::abs_d(b.coeff(j)) *
                      detail::checked_pow(eps, Rational(j - k) - delta));
    bound = RemainderBound{std::move(delta), detail::sorted_sum(std::move(terms)), eps};
  }
  return LaurentExpansion(h, k, std::move(coeffs), std::move(bound));
}

namespace detail {

// Coefficients of the product truncated to [h, k].
inline std::vector<Rational> convolve(const LaurentExpansion& a, const LaurentExpansion& b,
                                      int h, int k) {
  std::vector<Rational> coeffs(static_cast<size_t>(k - h + 1), Rational(0));
  for (int l = h; l <= k; ++l) {
    Rational s(0);
    const int ilo = std::max(a.h(), l - b.k());
    const int ihi = std::min(a.k(), l - b.h());
    for (int i = ilo; i <= ihi; ++i) s += a.coeff(i) * b.coeff(l - i);
    coeffs[static_cast<size_t>(l - h)] = s;
  }
  return coeffs;
}

}  // namespace detail

inline LaurentExpansion mul(const LaurentExpansion& a, const LaurentExpansion& b) {
  const int h = a.h() + b.h();
  const int k = std::min(a.k() + b.h(), b.k() + a.h());
  std::vector<Rational> coeffs = detail::convolve(a, b, h, k);

  std::optional<RemainderBound> bound;
  if (a.bound() && b.bound()) {
    const RemainderBound& ba = *a.bound();
    const RemainderBound& bb = *b.bound();
    const int da = a.k() + b.h();
    const int db = b.k() + a.h();
    Rational delta = da < db ? ba.delta : db < da ? bb.delta : std::min(ba.delta, bb.delta);
    double eps = std::min(ba.eps_bar, bb.eps_bar);
    std::vector<double> terms;
    for (int i = a.h(); i <= a.k(); ++i)
      for (int j = b.h(); j <= b.k(); ++j)
        if (i + j > k)
          terms.push_back(detail::abs_d(a.coeff(i)) * detail::abs_d(b.coeff(j)) *
                          detail::checked_pow(eps, Rational(i + j - k) - delta));
    for (int j = b.h(); j <= b.k(); ++j)
      terms.push_back(ba.G * detail::abs_d(b.coeff(j)) *
                      detail::checked_pow(eps, Rational(j + a.k() - k) + ba.delta - delta));
    for (int i = a.h(); i <= a.k(); ++i)
      terms.push_back(bb.G * detail::abs_d(a.coeff(i)) *
                      detail::checked_pow(eps, Rational(i + b.k() - k) + bb.delta - delta));
    terms.push_back(ba.G * bb.G *
                    detail::checked_pow(eps, Rational(a.k() + b.k() - k) + ba.delta +
                                                 bb.delta - delta));
    bound = RemainderBound{std::move(delta), detail::sorted_sum(std::move(terms)), eps};
  }
  return LaurentExpansion(h, k, std::move(coeffs), std::move(bound));
}

namespace detail {

// Radius below which |b_h + b_{h+1} eps + ... + remainder/eps^h| stays
// above |b_h| / 2, i.e. where the reciprocal is certified to exist.
// +infinity when b is a single exact monomial.
inline double reciprocal_radius(const LaurentExpansion& b) {
  const RemainderBound& bb = *b.bound();
  std::vector<double> terms;
  for (int i = b.h() + 1; i <= b.k(); ++i)
    terms.push_back(abs_d(b.coeff(i)) * checked_pow(bb.eps_bar, Rational(i - b.h()) - bb.delta));
  double denom = 2.0 * (sorted_sum(std::move(terms)) +
                        bb.G * checked_pow(bb.eps_bar, Rational(b.k() - b.h())));
  if (denom == 0.0) return std::numeric_limits<double>::infinity();
  return std::pow(abs_d(b.coeffs().front()) / denom, to_double(Rational(1) / bb.delta));
}

}  // namespace detail

inline LaurentExpansion reciprocal(const LaurentExpansion& b) {
  if (!b.is_pivotal())
    throw NonPivotalOperand("reciprocal: leading retained coefficient is zero");
  const int hc = -b.h();
  const int kc = b.k() - 2 * b.h();
  const int len = b.k() - b.h();
  const Rational lead = b.coeffs().front();
  std::vector<Rational> c(static_cast<size_t>(len + 1), Rational(0));
  c[0] = Rational(1) / lead;
  for (int n = 1; n <= len; ++n) {
    Rational s(0);
    for (int m = 1; m <= n; ++m) s += b.coeff(b.h() + m) * c[static_cast<size_t>(n - m)];
    c[static_cast<size_t>(n)] = -s / lead;
  }

  std::optional<RemainderBound> bound;
  if (b.bound()) {
    const RemainderBound& bb = *b.bound();
    double eps = std::min(bb.eps_bar, detail::reciprocal_radius(b));
    std::vector<double> terms;
    for (int i = b.h(); i <= b.k(); ++i)
      for (int j = hc; j <= kc; ++j)
        if (i + j > len)
          terms.push_back(detail::abs_d(b.coeff(i)) *
                          detail::abs_d(c[static_cast<size_t>(j - hc)]) *
                          detail::checked_pow(eps, Rational(i + j - len) - bb.delta));
    for (int j = hc; j <= kc; ++j)
      terms.push_back(bb.G * detail::abs_d(c[static_cast<size_t>(j - hc)]) *
                      detail::checked_pow(eps, Rational(j + b.h())));
    double g = (2.0 / detail::abs_d(lead)) * detail::sorted_sum(std::move(terms));
    bound = RemainderBound{bb.delta, g, eps};
  }
  return LaurentExpansion(hc, kc, std::move(c), std::move(bound));
}

/// Quotient a / b for pivotal b. Both modes produce identical coefficients;
/// they differ in how the bound parameters are assembled. ViaReciprocal
/// composes mul(a, reciprocal(b)); Direct bounds the quotient remainder in
/// one step from the back-substituted coefficients.
inline LaurentExpansion div(const LaurentExpansion& a, const LaurentExpansion& b,
                            DivisionMode mode = DivisionMode::ViaReciprocal) {
  if (!b.is_pivotal())
    throw NonPivotalOperand("div: leading retained coefficient of divisor is zero");
  LaurentExpansion inv = reciprocal(b);
  LaurentExpansion via = mul(a, inv);
  if (mode == DivisionMode::ViaReciprocal) return via;

  if (!a.bound() || !b.bound()) return via;  // coefficients only either way
  const RemainderBound& ba = *a.bound();
  const RemainderBound& bb = *b.bound();
  const int hd = via.h();
  const int kd = via.k();
  const int ka_side = a.k() - b.h();
  const int kb_side = b.k() - 2 * b.h() + a.h();
  Rational delta = ka_side < kb_side   ? ba.delta
                   : kb_side < ka_side ? bb.delta
                                       : std::min(ba.delta, bb.delta);
  double eps = std::min(ba.eps_bar, std::min(bb.eps_bar, detail::reciprocal_radius(b)));
  const int cutoff = std::min(a.k(), b.k() + a.h() - b.h());  // == kd + b.h()
  std::vector<double> terms;
  for (int l = cutoff + 1; l <= a.k(); ++l)
    terms.push_back(detail::abs_d(a.coeff(l)) *
                    detail::checked_pow(eps, Rational(l - kd - b.h()) - delta));
  for (int i = b.h(); i <= b.k(); ++i)
    for (int j = hd; j <= kd; ++j)
      if (i + j > cutoff)
        terms.push_back(detail::abs_d(b.coeff(i)) * detail::abs_d(via.coeff(j)) *
                        detail::checked_pow(eps, Rational(i + j - kd - b.h()) - delta));
  terms.push_back(ba.G *
                  detail::checked_pow(eps, Rational(a.k() - b.h() - kd) + ba.delta - delta));
  for (int j = hd; j <= kd; ++j)
    terms.push_back(bb.G * detail::abs_d(via.coeff(j)) *
                    detail::checked_pow(eps, Rational(j + b.k() - b.h() - kd) + bb.delta -
                                                 delta));
  double g = (2.0 / detail::abs_d(b.coeffs().front())) * detail::sorted_sum(std::move(terms));
  return LaurentExpansion(hd, kd, via.coeffs(), RemainderBound{std::move(delta), g, eps});
}

/// Sum of a nonempty sequence. The derived bound parameters are invariant
/// under permutation of the terms.
inline LaurentExpansion sum_many(std::span<const LaurentExpansion> terms) {
  if (terms.empty()) throw std::invalid_argument("sum_many: empty sequence");
  int h = terms[0].h();
  int k = terms[0].k();
  for (const LaurentExpansion& t : terms) {
    h = std::min(h, t.h());
    k = std::min(k, t.k());
  }
  std::vector<Rational> coeffs(static_cast<size_t>(k - h + 1), Rational(0));
  for (const LaurentExpansion& t : terms)
    for (int l = h; l <= k; ++l) coeffs[static_cast<size_t>(l - h)] += t.coeff(l);

  bool bounded = std::all_of(terms.begin(), terms.end(),
                             [](const LaurentExpansion& t) { return t.bound().has_value(); });
  std::optional<RemainderBound> bound;
  if (bounded) {
    Rational delta(1);
    bool first = true;
    for (const LaurentExpansion& t : terms) {
      if (t.k() != k) continue;
      if (first || t.bound()->delta < delta) delta = t.bound()->delta;
      first = false;
    }
    double eps = 1.0;
    for (const LaurentExpansion& t : terms) eps = std::min(eps, t.bound()->eps_bar);
    std::vector<double> gterms;
    for (const LaurentExpansion& t : terms) {
      gterms.push_back(t.bound()->G *
                       detail::checked_pow(eps, Rational(t.k() - k) + t.bound()->delta - delta));
      for (int j = k + 1; j <= t.k(); ++j)
        gterms.push_back(detail::abs_d(t.coeff(j)) *
                         detail::checked_pow(eps, Rational(j - k) - delta));
    }
    bound = RemainderBound{std::move(delta), detail::sorted_sum(std::move(gterms)), eps};
  }
  return LaurentExpansion(h, k, std::move(coeffs), std::move(bound));
}

inline LaurentExpansion sum_many(std::initializer_list<LaurentExpansion> terms) {
  return sum_many(std::span<const LaurentExpansion>(terms.begin(), terms.size()));
}

/// Product of a nonempty sequence. Bound parameters follow the dedicated
/// multi-factor rule (not a fold of binary products) and are invariant under
/// permutation of the factors.
inline LaurentExpansion prod_many(std::span<const LaurentExpansion> factors) {
  if (factors.empty()) throw std::invalid_argument("prod_many: empty sequence");
  const size_t n = factors.size();
  int hsum = 0;
  for (const LaurentExpansion& f : factors) hsum += f.h();
  int k = std::numeric_limits<int>::max();
  for (size_t m = 0; m < n; ++m)
    k = std::min(k, factors[m].k() - factors[m].h() + hsum);

  // Coefficients by folding exact truncated convolutions; the truncation
  // orders compose associatively, so the fold equals the multi-convolution.
  LaurentExpansion acc = factors[0].without_bound();
  for (size_t m = 1; m < n; ++m) {
    const LaurentExpansion& f = factors[m];
    int hh = acc.h() + f.h();
    int kk = std::min(acc.k() + f.h(), f.k() + acc.h());
    acc = LaurentExpansion(hh, kk, detail::convolve(acc, f, hh, kk));
  }
  std::vector<Rational> coeffs = acc.coeffs();

  bool bounded = std::all_of(factors.begin(), factors.end(),
                             [](const LaurentExpansion& f) { return f.bound().has_value(); });
  std::optional<RemainderBound> bound;
  if (bounded) {
    Rational delta(1);
    bool first = true;
    for (size_t m = 0; m < n; ++m) {
      if (factors[m].k() - factors[m].h() + hsum != k) continue;
      if (first || factors[m].bound()->delta < delta) delta = factors[m].bound()->delta;
      first = false;
    }
    double eps = 1.0;
    for (const LaurentExpansion& f : factors) eps = std::min(eps, f.bound()->eps_bar);

    std::vector<double> terms;
    // All discarded coefficient tuples: power ranges are small, enumerate.
    std::vector<int> idx(n);
    for (size_t i = 0; i < n; ++i) idx[i] = factors[i].h();
    while (true) {
      int total = 0;
      for (size_t i = 0; i < n; ++i) total += idx[i];
      if (total > k) {
        std::vector<double> fs;
        fs.reserve(n);
        for (size_t i = 0; i < n; ++i) fs.push_back(detail::abs_d(factors[i].coeff(idx[i])));
        terms.push_back(detail::sorted_product(std::move(fs)) *
                        detail::checked_pow(eps, Rational(total - k) - delta));
      }
      size_t pos = 0;
      while (pos < n && idx[pos] == factors[pos].k()) {
        idx[pos] = factors[pos].h();
        ++pos;
      }
      if (pos == n) break;
      ++idx[pos];
    }
    // Remainder cross terms: for each factor j, every other factor enters
    // through its full absolute value plus its own remainder budget.
    for (size_t j = 0; j < n; ++j) {
      const double gj = factors[j].bound()->G;
      if (gj == 0.0) continue;
      std::vector<double> inner;
      inner.reserve(n - 1);
      for (size_t i = 0; i < n; ++i) {
        if (i == j) continue;
        double v = 0.0;
        for (int l = factors[i].h(); l <= factors[i].k(); ++l)
          v += detail::abs_d(factors[i].coeff(l)) * detail::plain_pow(eps, Rational(l));
        v += factors[i].bound()->G *
             detail::plain_pow(eps, Rational(factors[i].k()) + factors[i].bound()->delta);
        inner.push_back(v);
      }
      terms.push_back(detail::sorted_product(std::move(inner)) * gj *
                      detail::plain_pow(eps, Rational(factors[j].k() - k) +
                                                 factors[j].bound()->delta - delta));
    }
    bound = RemainderBound{std::move(delta), detail::sorted_sum(std::move(terms)), eps};
  }
  return LaurentExpansion(hsum, k, std::move(coeffs), std::move(bound));
}

inline LaurentExpansion prod_many(std::initializer_list<LaurentExpansion> factors) {
  return prod_many(std::span<const LaurentExpansion>(factors.begin(), factors.size()));
}

/// Rewrites the bound at a smaller exponent delta_star <= delta, with
/// G* = G * eps_bar^(delta - delta_star). Coefficients are unchanged.
inline LaurentExpansion rebase_delta(const LaurentExpansion& a, const Rational& delta_star) {
  if (!a.bound()) throw std::invalid_argument("rebase_delta: expansion carries no bound");
  if (!(delta_star > 0) || delta_star > 1)
    throw std::invalid_argument("rebase_delta: delta_star must lie in (0, 1]");
  const RemainderBound& b = *a.bound();
  if (delta_star > b.delta)
    throw std::invalid_argument("rebase_delta: delta_star exceeds the current delta");
  double g = b.G * detail::checked_pow(b.eps_bar, b.delta - delta_star);
  return LaurentExpansion(a.h(), a.k(), a.coeffs(), RemainderBound{delta_star, g, b.eps_bar});
}

/// Exact value of the retained polynomial part at eps > 0.
inline Rational evaluate(const LaurentExpansion& a, const Rational& eps) {
  if (!(eps > 0)) throw std::invalid_argument("evaluate: eps must be positive");
  Rational v(0);
  Rational p = rat_pow(eps, a.h());
  for (const Rational& c : a.coeffs()) {
    v += c * p;
    p *= eps;
  }
  return v;
}

/// Drops leading zero coefficients (never applied implicitly by any
/// operation). An all-zero expansion keeps its last coefficient.
inline LaurentExpansion trim(const LaurentExpansion& a) {
  size_t s = 0;
  while (s + 1 < a.coeffs().size() && a.coeffs()[s] == 0) ++s;
  std::vector<Rational> coeffs(a.coeffs().begin() + static_cast<std::ptrdiff_t>(s),
                               a.coeffs().end());
  return LaurentExpansion(a.h() + static_cast<int>(s), a.k(), std::move(coeffs), a.bound());
}

}  // namespace smexp
