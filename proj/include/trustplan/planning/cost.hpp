#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace trustplan::planning {

/// Exact rational with 64-bit numerator and denominator, always normalized
/// (gcd-reduced, positive denominator). Arithmetic throws std::overflow_error
/// instead of wrapping.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t value) : num_(value) {}  // NOLINT(google-explicit-constructor)
  Rational(std::int64_t numerator, std::int64_t denominator);

  std::int64_t numerator() const { return num_; }
  std::int64_t denominator() const { return den_; }

  Rational operator-() const;
  friend Rational operator+(const Rational& l, const Rational& r);
  friend Rational operator-(const Rational& l, const Rational& r);
  friend Rational operator*(const Rational& l, const Rational& r);
  friend Rational operator/(const Rational& l, const Rational& r);
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }

  friend bool operator==(const Rational&, const Rational&) = default;
  friend std::strong_ordering operator<=>(const Rational& l, const Rational& r);

 private:
  static Rational from_wide(__int128 numerator, __int128 denominator);

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// Parses "3", "5/2" or "0.25" into an exact rational. Throws std::invalid_argument.
Rational parse_rational(std::string_view text);

/// Canonical text form: "3" or "5/2".
std::string format_rational(const Rational& value);

double to_double(const Rational& value);

/// A non-negative rational or +infinity. Used for plan costs.
class Cost {
 public:
  Cost() = default;
  Cost(Rational value);  // NOLINT(google-explicit-constructor)
  Cost(std::int64_t value) : Cost(Rational(value)) {}  // NOLINT

  static Cost infinite();

  bool is_finite() const { return finite_; }
  /// Precondition: is_finite().
  const Rational& value() const;
  double as_double() const;

  Cost operator+(const Cost& other) const;
  Cost& operator+=(const Cost& other);

  bool operator==(const Cost& other) const;
  std::strong_ordering operator<=>(const Cost& other) const;

  std::string str() const;

 private:
  bool finite_ = true;
  Rational value_{0};
};

/// An explicability score: a rational <= 0 or -infinity.
class Score {
 public:
  Score() = default;
  Score(Rational value);  // NOLINT(google-explicit-constructor)

  static Score negative_infinity();

  /// -(a - b) for finite a >= b; -inf when a is infinite.
  static Score negated_gap(const Cost& actual, const Cost& best);

  bool is_finite() const { return finite_; }
  const Rational& value() const;
  double as_double() const;
  bool is_perfect() const { return finite_ && value_ == 0; }

  bool operator==(const Score& other) const;
  std::strong_ordering operator<=>(const Score& other) const;

  std::string str() const;

 private:
  bool finite_ = true;
  Rational value_{0};
};

}  // namespace trustplan::planning
