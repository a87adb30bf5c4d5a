/*******************************************************************************
 * Shared scalar types, diagnostics and error types.
 *
 * @file:   common.h
 ******************************************************************************/
#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace placer {

/// All sizes, costs and capacities are exact 64-bit integers.
using Cost = std::int64_t;

/// A nonnegative cost that may also be infinite (pinned edges, unmovable views).
class ExtendedCost {
public:
  constexpr ExtendedCost() = default;
  constexpr ExtendedCost(Cost value) : _value(value) {}

  static constexpr ExtendedCost infinite() {
    ExtendedCost c;
    c._infinite = true;
    return c;
  }

  [[nodiscard]] constexpr bool is_infinite() const { return _infinite; }
  [[nodiscard]] constexpr bool is_finite() const { return !_infinite; }

  /// Finite value; 0 for infinite costs, callers check `is_infinite()` first.
  [[nodiscard]] constexpr Cost value() const { return _infinite ? 0 : _value; }

  ExtendedCost &operator+=(ExtendedCost other);

  friend ExtendedCost operator+(ExtendedCost a, ExtendedCost b) {
    a += b;
    return a;
  }

  friend constexpr bool operator==(ExtendedCost a, ExtendedCost b) {
    return a._infinite == b._infinite && a.value() == b.value();
  }

  friend constexpr bool operator<(ExtendedCost a, ExtendedCost b) {
    if (a._infinite) {
      return false;
    }
    return b._infinite || a._value < b._value;
  }

  [[nodiscard]] std::string to_string() const;

private:
  Cost _value = 0;
  bool _infinite = false;
};

/// Exact nonnegative fraction; used for slack factors and balance ratios.
struct Rational {
  Cost num = 0;
  Cost den = 1;

  [[nodiscard]] double to_double() const {
    return static_cast<double>(num) / static_cast<double>(den);
  }

  /// Reduced form, den > 0.
  [[nodiscard]] Rational normalized() const;

  /// Parses "3/4", "0.25" or "2".
  static Rational parse(const std::string &text);

  [[nodiscard]] std::string to_string() const;

  friend bool operator==(const Rational &a, const Rational &b);
  friend bool operator<(const Rational &a, const Rational &b);
};

/// floor(value * (1 + slack)), computed without intermediate overflow.
Cost scale_by_slack(Cost value, const Rational &slack);

enum class Severity { kWarning, kError };

struct Diagnostic {
  Severity severity = Severity::kWarning;
  std::string code;
  std::string message;
};

/// Malformed document: carries a 1-based line and column when known.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string &what, std::size_t line = 0, std::size_t column = 0);

  [[nodiscard]] std::size_t line() const { return _line; }
  [[nodiscard]] std::size_t column() const { return _column; }

private:
  std::size_t _line;
  std::size_t _column;
};

/// Well-formed document that violates a model invariant (dangling reference,
/// negative quantity, duplicate id, cycle, ...). `subject` names the offender.
class ValidationError : public std::runtime_error {
public:
  ValidationError(const std::string &what, std::string subject);

  [[nodiscard]] const std::string &subject() const { return _subject; }

private:
  std::string _subject;
};

/// Overflow-checked arithmetic; throws std::overflow_error.
Cost checked_add(Cost a, Cost b);
Cost checked_mul(Cost a, Cost b);

/// Ids appear unquoted in text formats, so they must be nonempty and free of
/// whitespace and '#'.
bool is_valid_id(const std::string &id);

} // namespace placer
