#include "placer/common.h"

#include <algorithm>
#include <cctype>
#include <numeric>

namespace placer {

ExtendedCost &ExtendedCost::operator+=(ExtendedCost other) {
  if (_infinite || other._infinite) {
    _infinite = true;
    _value = 0;
    return *this;
  }
  _value = checked_add(_value, other._value);
  return *this;
}

std::string ExtendedCost::to_string() const {
  return _infinite ? std::string("inf") : std::to_string(_value);
}

Rational Rational::normalized() const {
  if (den == 0) {
    throw std::invalid_argument("rational with zero denominator");
  }
  Cost n = num;
  Cost d = den;
  if (d < 0) {
    n = -n;
    d = -d;
  }
  const Cost g = std::gcd(n < 0 ? -n : n, d);
  return g == 0 ? Rational{0, 1} : Rational{n / g, d / g};
}

Rational Rational::parse(const std::string &text) {
  if (text.empty()) {
    throw std::invalid_argument("empty rational");
  }
  auto parse_digits = [&](const std::string &s) -> Cost {
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) {
          return std::isdigit(c) != 0;
        })) {
      throw std::invalid_argument("malformed rational '" + text + "'");
    }
    return std::stoll(s);
  };

  if (const auto slash = text.find('/'); slash != std::string::npos) {
    return Rational{parse_digits(text.substr(0, slash)), parse_digits(text.substr(slash + 1))}
        .normalized();
  }
  if (const auto dot = text.find('.'); dot != std::string::npos) {
    const std::string whole = text.substr(0, dot);
    const std::string frac = text.substr(dot + 1);
    if (frac.size() > 9) {
      throw std::invalid_argument("too many decimals in '" + text + "'");
    }
    Cost den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) {
      den *= 10;
    }
    const Cost w = whole.empty() ? 0 : parse_digits(whole);
    const Cost f = frac.empty() ? 0 : parse_digits(frac);
    return Rational{checked_add(checked_mul(w, den), f), den}.normalized();
  }
  return Rational{parse_digits(text), 1};
}

std::string Rational::to_string() const {
  const Rational r = normalized();
  return r.den == 1 ? std::to_string(r.num) : std::to_string(r.num) + "/" + std::to_string(r.den);
}

bool operator==(const Rational &a, const Rational &b) {
  return static_cast<__int128>(a.num) * b.den == static_cast<__int128>(b.num) * a.den;
}

bool operator<(const Rational &a, const Rational &b) {
  return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
}

Cost scale_by_slack(Cost value, const Rational &slack) {
  const __int128 scaled =
      static_cast<__int128>(value) * (slack.den + slack.num) / static_cast<__int128>(slack.den);
  if (scaled > std::numeric_limits<Cost>::max()) {
    return std::numeric_limits<Cost>::max();
  }
  return static_cast<Cost>(scaled);
}

ParseError::ParseError(const std::string &what, std::size_t line, std::size_t column)
    : std::runtime_error(
          line == 0 ? what
                    : what + " (line " + std::to_string(line) + ", column " +
                          std::to_string(column) + ")"
      ),
      _line(line),
      _column(column) {}

ValidationError::ValidationError(const std::string &what, std::string subject)
    : std::runtime_error(what),
      _subject(std::move(subject)) {}

Cost checked_add(Cost a, Cost b) {
  Cost out;
  if (__builtin_add_overflow(a, b, &out)) {
    throw std::overflow_error("64-bit overflow in addition");
  }
  return out;
}

Cost checked_mul(Cost a, Cost b) {
  Cost out;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw std::overflow_error("64-bit overflow in multiplication");
  }
  return out;
}

bool is_valid_id(const std::string &id) {
  if (id.empty()) {
    return false;
  }
  return std::none_of(id.begin(), id.end(), [](unsigned char c) {
    return std::isspace(c) != 0 || c == '#' || std::iscntrl(c) != 0;
  });
}

} // namespace placer
