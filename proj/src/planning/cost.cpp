#include "trustplan/planning/cost.hpp"

#include <charconv>
#include <limits>
#include <stdexcept>

namespace trustplan::planning {

namespace {

std::int64_t parse_digits(std::string_view digits, std::string_view whole) {
  if (digits.empty()) {
    throw std::invalid_argument("malformed number '" + std::string(whole) + "'");
  }
  std::int64_t out = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), out);
  if (ec != std::errc() || ptr != digits.data() + digits.size()) {
    throw std::invalid_argument("malformed number '" + std::string(whole) + "'");
  }
  return out;
}

__int128 gcd_wide(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

}  // namespace

Rational::Rational(std::int64_t numerator, std::int64_t denominator) {
  *this = from_wide(numerator, denominator);
}

Rational Rational::from_wide(__int128 numerator, __int128 denominator) {
  if (denominator == 0) throw std::invalid_argument("rational with zero denominator");
  if (denominator < 0) {
    numerator = -numerator;
    denominator = -denominator;
  }
  __int128 g = gcd_wide(numerator, denominator);
  if (g > 1) {
    numerator /= g;
    denominator /= g;
  }
  constexpr __int128 lo = std::numeric_limits<std::int64_t>::min();
  constexpr __int128 hi = std::numeric_limits<std::int64_t>::max();
  if (numerator < lo || numerator > hi || denominator > hi) throw std::overflow_error("rational overflow");
  Rational r;
  r.num_ = static_cast<std::int64_t>(numerator);
  r.den_ = static_cast<std::int64_t>(denominator);
  return r;
}

Rational Rational::operator-() const { return from_wide(-static_cast<__int128>(num_), den_); }

Rational operator+(const Rational& l, const Rational& r) {
  return Rational::from_wide(static_cast<__int128>(l.num_) * r.den_ + static_cast<__int128>(r.num_) * l.den_,
                             static_cast<__int128>(l.den_) * r.den_);
}

Rational operator-(const Rational& l, const Rational& r) { return l + (-r); }

Rational operator*(const Rational& l, const Rational& r) {
  return Rational::from_wide(static_cast<__int128>(l.num_) * r.num_, static_cast<__int128>(l.den_) * r.den_);
}

Rational operator/(const Rational& l, const Rational& r) {
  return Rational::from_wide(static_cast<__int128>(l.num_) * r.den_, static_cast<__int128>(l.den_) * r.num_);
}

std::strong_ordering operator<=>(const Rational& l, const Rational& r) {
  __int128 a = static_cast<__int128>(l.num_) * r.den_;
  __int128 b = static_cast<__int128>(r.num_) * l.den_;
  if (a < b) return std::strong_ordering::less;
  if (a > b) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

Rational parse_rational(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("empty number");
  bool negative = false;
  std::string_view body = text;
  if (body.front() == '-') {
    negative = true;
    body.remove_prefix(1);
  }
  Rational result;
  if (auto slash = body.find('/'); slash != std::string_view::npos) {
    std::int64_t num = parse_digits(body.substr(0, slash), text);
    std::int64_t den = parse_digits(body.substr(slash + 1), text);
    if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    result = Rational(num, den);
  } else if (auto dot = body.find('.'); dot != std::string_view::npos) {
    std::string_view int_part = body.substr(0, dot);
    std::string_view frac_part = body.substr(dot + 1);
    if (frac_part.size() > 15) {
      throw std::invalid_argument("too many decimals in '" + std::string(text) + "'");
    }
    std::int64_t whole = int_part.empty() ? 0 : parse_digits(int_part, text);
    std::int64_t frac = parse_digits(frac_part, text);
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac_part.size(); ++i) scale *= 10;
    result = Rational(whole) + Rational(frac, scale);
  } else {
    result = Rational(parse_digits(body, text));
  }
  return negative ? -result : result;
}

std::string format_rational(const Rational& value) {
  if (value.denominator() == 1) return std::to_string(value.numerator());
  return std::to_string(value.numerator()) + "/" + std::to_string(value.denominator());
}

double to_double(const Rational& value) {
  return static_cast<double>(value.numerator()) / static_cast<double>(value.denominator());
}

Cost::Cost(Rational value) : value_(value) {}

Cost Cost::infinite() {
  Cost c;
  c.finite_ = false;
  return c;
}

const Rational& Cost::value() const {
  if (!finite_) throw std::logic_error("value() of infinite cost");
  return value_;
}

double Cost::as_double() const {
  return finite_ ? to_double(value_) : std::numeric_limits<double>::infinity();
}

Cost Cost::operator+(const Cost& other) const {
  if (!finite_ || !other.finite_) return infinite();
  return Cost(value_ + other.value_);
}

Cost& Cost::operator+=(const Cost& other) {
  *this = *this + other;
  return *this;
}

bool Cost::operator==(const Cost& other) const {
  if (finite_ != other.finite_) return false;
  return !finite_ || value_ == other.value_;
}

std::strong_ordering Cost::operator<=>(const Cost& other) const {
  if (!finite_ || !other.finite_) {
    if (finite_ == other.finite_) return std::strong_ordering::equal;
    return finite_ ? std::strong_ordering::less : std::strong_ordering::greater;
  }
  if (value_ < other.value_) return std::strong_ordering::less;
  if (other.value_ < value_) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::string Cost::str() const { return finite_ ? format_rational(value_) : "inf"; }

Score::Score(Rational value) : value_(value) {}

Score Score::negative_infinity() {
  Score s;
  s.finite_ = false;
  return s;
}

Score Score::negated_gap(const Cost& actual, const Cost& best) {
  if (!actual.is_finite()) return negative_infinity();
  if (!best.is_finite()) throw std::logic_error("negated_gap: best cost is infinite");
  return Score(-(actual.value() - best.value()));
}

const Rational& Score::value() const {
  if (!finite_) throw std::logic_error("value() of -inf score");
  return value_;
}

double Score::as_double() const {
  return finite_ ? to_double(value_) : -std::numeric_limits<double>::infinity();
}

bool Score::operator==(const Score& other) const {
  if (finite_ != other.finite_) return false;
  return !finite_ || value_ == other.value_;
}

std::strong_ordering Score::operator<=>(const Score& other) const {
  if (!finite_ || !other.finite_) {
    if (finite_ == other.finite_) return std::strong_ordering::equal;
    return finite_ ? std::strong_ordering::greater : std::strong_ordering::less;
  }
  if (value_ < other.value_) return std::strong_ordering::less;
  if (other.value_ < value_) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::string Score::str() const { return finite_ ? format_rational(value_) : "-inf"; }

}  // namespace trustplan::planning
