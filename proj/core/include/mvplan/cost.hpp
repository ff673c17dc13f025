#pragma once

#include <compare>
#include <limits>
#include <ostream>

namespace mvplan {

// Non-negative violation cost. Infinity is a real value (never an error) and
// saturates under addition.
class Cost {
 public:
  constexpr Cost() = default;
  constexpr explicit Cost(double v) : v_(v) {}

  static constexpr Cost infinity() { return Cost(std::numeric_limits<double>::infinity()); }
  static constexpr Cost zero() { return Cost(0.0); }

  constexpr bool is_infinite() const { return v_ == std::numeric_limits<double>::infinity(); }
  constexpr bool is_zero() const { return v_ == 0.0; }
  constexpr double value() const { return v_; }

  constexpr Cost& operator+=(Cost o) {
    v_ = (is_infinite() || o.is_infinite()) ? std::numeric_limits<double>::infinity() : v_ + o.v_;
    return *this;
  }
  friend constexpr Cost operator+(Cost a, Cost b) { return a += b; }

  friend constexpr bool operator==(Cost a, Cost b) { return a.v_ == b.v_; }
  friend constexpr std::partial_ordering operator<=>(Cost a, Cost b) { return a.v_ <=> b.v_; }

 private:
  double v_ = 0.0;
};

inline std::ostream& operator<<(std::ostream& os, Cost c) {
  if (c.is_infinite()) return os << "inf";
  return os << c.value();
}

}  // namespace mvplan
