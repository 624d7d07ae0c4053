#ifndef STRONGFLOW_VALUE_HPP
#define STRONGFLOW_VALUE_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace strongflow {

// Error thrown on arithmetic the solver must never perform (inf - inf,
// inf * 0, division by zero or by inf) and on malformed numeric input.
struct value_error : std::runtime_error {
  explicit value_error(const std::string& what) : std::runtime_error(what) {}
};

// Sign-magnitude arbitrary-precision integer, base 2^32 limbs.
// Magnitude is little-endian with no leading zero limbs; zero has sign 0
// and an empty magnitude.
class BigInt {
 public:
  BigInt() : sign_(0) {}
  BigInt(long long v);

  static BigInt from_string(const std::string& s);
  std::string to_string() const;

  bool is_zero() const { return sign_ == 0; }
  bool is_negative() const { return sign_ < 0; }
  bool is_positive() const { return sign_ > 0; }
  int sign() const { return sign_; }

  BigInt operator-() const;
  BigInt abs() const;

  BigInt operator+(const BigInt& o) const;
  BigInt operator-(const BigInt& o) const;
  BigInt operator*(const BigInt& o) const;

  // Truncated division: quotient rounds toward zero, remainder has the
  // sign of the dividend. divisor must be nonzero.
  static void divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r);
  BigInt operator/(const BigInt& o) const;
  BigInt operator%(const BigInt& o) const;

  bool operator==(const BigInt& o) const {
    return sign_ == o.sign_ && mag_ == o.mag_;
  }
  bool operator!=(const BigInt& o) const { return !(*this == o); }
  bool operator<(const BigInt& o) const { return cmp(*this, o) < 0; }
  bool operator<=(const BigInt& o) const { return cmp(*this, o) <= 0; }
  bool operator>(const BigInt& o) const { return cmp(*this, o) > 0; }
  bool operator>=(const BigInt& o) const { return cmp(*this, o) >= 0; }

  static BigInt gcd(BigInt a, BigInt b);
  static BigInt pow(const BigInt& base, unsigned exp);

  // Returns -1, 0, +1.
  static int cmp(const BigInt& a, const BigInt& b);

  double to_double() const;

  // Fits in long long? (used by code paths that index with small ints)
  bool fits_longlong() const;
  long long to_longlong() const;

 private:
  static int cmp_mag(const std::vector<uint32_t>& a,
                     const std::vector<uint32_t>& b);
  static std::vector<uint32_t> add_mag(const std::vector<uint32_t>& a,
                                       const std::vector<uint32_t>& b);
  // Requires |a| >= |b|.
  static std::vector<uint32_t> sub_mag(const std::vector<uint32_t>& a,
                                       const std::vector<uint32_t>& b);
  static std::vector<uint32_t> mul_mag(const std::vector<uint32_t>& a,
                                       const std::vector<uint32_t>& b);
  static void divmod_mag(const std::vector<uint32_t>& a,
                         const std::vector<uint32_t>& b,
                         std::vector<uint32_t>& q, std::vector<uint32_t>& r);
  void trim();

  int sign_;
  std::vector<uint32_t> mag_;
};

// Exact rational with a distinguished +infinity. Finite values are kept
// normalized: den > 0, gcd(num, den) = 1, zero is 0/1. Infinity compares
// greater than every finite value; the operations the flow algorithms
// never need (inf - inf, inf * 0, x / inf, negating inf) throw.
class Value {
 public:
  Value() : inf_(false), num_(0), den_(1) {}
  Value(long long v) : inf_(false), num_(v), den_(1) {}
  Value(BigInt v) : inf_(false), num_(std::move(v)), den_(1) {}
  Value(BigInt num, BigInt den);

  static Value infinity() {
    Value v;
    v.inf_ = true;
    return v;
  }

  bool is_infinite() const { return inf_; }
  bool is_finite() const { return !inf_; }
  bool is_zero() const { return !inf_ && num_.is_zero(); }
  bool is_negative() const { return !inf_ && num_.is_negative(); }
  bool is_positive() const { return inf_ || num_.is_positive(); }

  const BigInt& num() const { return num_; }
  const BigInt& den() const { return den_; }

  Value operator+(const Value& o) const;
  Value operator-(const Value& o) const;
  Value operator*(const Value& o) const;
  Value operator/(const Value& o) const;
  Value operator-() const;

  Value& operator+=(const Value& o) { return *this = *this + o; }
  Value& operator-=(const Value& o) { return *this = *this - o; }
  Value& operator*=(const Value& o) { return *this = *this * o; }
  Value& operator/=(const Value& o) { return *this = *this / o; }

  bool operator==(const Value& o) const;
  bool operator!=(const Value& o) const { return !(*this == o); }
  bool operator<(const Value& o) const { return cmp(*this, o) < 0; }
  bool operator<=(const Value& o) const { return cmp(*this, o) <= 0; }
  bool operator>(const Value& o) const { return cmp(*this, o) > 0; }
  bool operator>=(const Value& o) const { return cmp(*this, o) >= 0; }

  // Total order with infinity as the maximum; -1, 0, +1.
  static int cmp(const Value& a, const Value& b);

  static Value min(const Value& a, const Value& b) { return a <= b ? a : b; }
  static Value max(const Value& a, const Value& b) { return a >= b ? a : b; }

  // max(x, 0); infinity stays infinity.
  Value positive_part() const;

  // Largest integer <= value; errors on infinity.
  BigInt floor() const;

  // "inf", "123", or "123/7". parse accepts the same forms plus "*"
  // as an alias for infinity (capacity file syntax).
  std::string to_string() const;
  static Value parse(const std::string& s);

  double to_double() const;

 private:
  void normalize();

  bool inf_;
  BigInt num_;
  BigInt den_;
};

}  // namespace strongflow

#endif
