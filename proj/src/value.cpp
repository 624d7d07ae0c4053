#include "strongflow/value.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace strongflow {

// ---------------------------------------------------------------------------
// BigInt
// ---------------------------------------------------------------------------

BigInt::BigInt(long long v) : sign_(0) {
  if (v == 0) return;
  sign_ = v > 0 ? 1 : -1;
  // Avoid overflow negating LLONG_MIN by widening first.
  unsigned long long mag =
      v > 0 ? static_cast<unsigned long long>(v)
            : ~static_cast<unsigned long long>(v) + 1ULL;
  while (mag) {
    mag_.push_back(static_cast<uint32_t>(mag & 0xffffffffULL));
    mag >>= 32;
  }
}

void BigInt::trim() {
  while (!mag_.empty() && mag_.back() == 0) mag_.pop_back();
  if (mag_.empty()) sign_ = 0;
}

int BigInt::cmp_mag(const std::vector<uint32_t>& a,
                    const std::vector<uint32_t>& b) {
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  for (size_t i = a.size(); i-- > 0;) {
    if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
  }
  return 0;
}

std::vector<uint32_t> BigInt::add_mag(const std::vector<uint32_t>& a,
                                      const std::vector<uint32_t>& b) {
  const std::vector<uint32_t>& hi = a.size() >= b.size() ? a : b;
  const std::vector<uint32_t>& lo = a.size() >= b.size() ? b : a;
  std::vector<uint32_t> out(hi.size(), 0);
  uint64_t carry = 0;
  for (size_t i = 0; i < hi.size(); ++i) {
    uint64_t sum = carry + hi[i] + (i < lo.size() ? lo[i] : 0);
    out[i] = static_cast<uint32_t>(sum);
    carry = sum >> 32;
  }
  if (carry) out.push_back(static_cast<uint32_t>(carry));
  return out;
}

std::vector<uint32_t> BigInt::sub_mag(const std::vector<uint32_t>& a,
                                      const std::vector<uint32_t>& b) {
  std::vector<uint32_t> out(a.size(), 0);
  int64_t borrow = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    int64_t diff = static_cast<int64_t>(a[i]) - borrow -
                   (i < b.size() ? static_cast<int64_t>(b[i]) : 0);
    if (diff < 0) {
      diff += (1LL << 32);
      borrow = 1;
    } else {
      borrow = 0;
    }
    out[i] = static_cast<uint32_t>(diff);
  }
  while (!out.empty() && out.back() == 0) out.pop_back();
  return out;
}

std::vector<uint32_t> BigInt::mul_mag(const std::vector<uint32_t>& a,
                                      const std::vector<uint32_t>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<uint32_t> out(a.size() + b.size(), 0);
  for (size_t i = 0; i < a.size(); ++i) {
    uint64_t carry = 0;
    for (size_t j = 0; j < b.size(); ++j) {
      uint64_t cur = out[i + j] +
                     static_cast<uint64_t>(a[i]) * static_cast<uint64_t>(b[j]) +
                     carry;
      out[i + j] = static_cast<uint32_t>(cur);
      carry = cur >> 32;
    }
    size_t k = i + b.size();
    while (carry) {
      uint64_t cur = out[k] + carry;
      out[k] = static_cast<uint32_t>(cur);
      carry = cur >> 32;
      ++k;
    }
  }
  while (!out.empty() && out.back() == 0) out.pop_back();
  return out;
}

// Knuth algorithm D with 32-bit digits (64-bit intermediates).
void BigInt::divmod_mag(const std::vector<uint32_t>& a,
                        const std::vector<uint32_t>& b,
                        std::vector<uint32_t>& q, std::vector<uint32_t>& r) {
  q.clear();
  r.clear();
  if (cmp_mag(a, b) < 0) {
    r = a;
    return;
  }
  if (b.size() == 1) {
    uint64_t d = b[0];
    q.assign(a.size(), 0);
    uint64_t rem = 0;
    for (size_t i = a.size(); i-- > 0;) {
      uint64_t cur = (rem << 32) | a[i];
      q[i] = static_cast<uint32_t>(cur / d);
      rem = cur % d;
    }
    while (!q.empty() && q.back() == 0) q.pop_back();
    if (rem) {
      r.push_back(static_cast<uint32_t>(rem & 0xffffffffULL));
      if (rem >> 32) r.push_back(static_cast<uint32_t>(rem >> 32));
    }
    return;
  }

  // Normalize so the divisor's top limb has its high bit set.
  int shift = 0;
  uint32_t top = b.back();
  while (!(top & 0x80000000u)) {
    top <<= 1;
    ++shift;
  }
  size_t n = b.size(), m = a.size() - n;
  std::vector<uint32_t> u(a.size() + 1, 0), v(n, 0);
  for (size_t i = a.size(); i-- > 0;) {
    u[i] = a[i] << shift;
    if (shift && i > 0) u[i] |= static_cast<uint32_t>(a[i - 1] >> (32 - shift));
  }
  if (shift) u[a.size()] = static_cast<uint32_t>(a.back() >> (32 - shift));
  for (size_t i = n; i-- > 0;) {
    v[i] = b[i] << shift;
    if (shift && i > 0) v[i] |= static_cast<uint32_t>(b[i - 1] >> (32 - shift));
  }

  q.assign(m + 1, 0);
  const uint64_t base = 1ULL << 32;
  for (size_t j = m + 1; j-- > 0;) {
    uint64_t num2 = (static_cast<uint64_t>(u[j + n]) << 32) | u[j + n - 1];
    uint64_t qhat = num2 / v[n - 1];
    uint64_t rhat = num2 % v[n - 1];
    while (qhat >= base ||
           qhat * v[n - 2] > ((rhat << 32) | u[j + n - 2])) {
      --qhat;
      rhat += v[n - 1];
      if (rhat >= base) break;
    }
    // Multiply-and-subtract, possibly with one add-back.
    int64_t borrow = 0;
    uint64_t carry = 0;
    for (size_t i = 0; i < n; ++i) {
      uint64_t prod = qhat * v[i] + carry;
      carry = prod >> 32;
      int64_t diff = static_cast<int64_t>(u[i + j]) -
                     static_cast<int64_t>(prod & 0xffffffffULL) - borrow;
      if (diff < 0) {
        diff += static_cast<int64_t>(base);
        borrow = 1;
      } else {
        borrow = 0;
      }
      u[i + j] = static_cast<uint32_t>(diff);
    }
    int64_t diff = static_cast<int64_t>(u[j + n]) -
                   static_cast<int64_t>(carry) - borrow;
    if (diff < 0) {
      diff += static_cast<int64_t>(base);
      // Add back one multiple of v.
      --qhat;
      uint64_t c2 = 0;
      for (size_t i = 0; i < n; ++i) {
        uint64_t sum = static_cast<uint64_t>(u[i + j]) + v[i] + c2;
        u[i + j] = static_cast<uint32_t>(sum);
        c2 = sum >> 32;
      }
      diff += static_cast<int64_t>(c2);
    }
    u[j + n] = static_cast<uint32_t>(diff);
    q[j] = static_cast<uint32_t>(qhat);
  }
  while (!q.empty() && q.back() == 0) q.pop_back();

  r.assign(n, 0);
  for (size_t i = 0; i < n; ++i) {
    r[i] = u[i] >> shift;
    if (shift && i + 1 < u.size())
      r[i] |= static_cast<uint32_t>(static_cast<uint64_t>(u[i + 1])
                                    << (32 - shift));
  }
  while (!r.empty() && r.back() == 0) r.pop_back();
}

int BigInt::cmp(const BigInt& a, const BigInt& b) {
  if (a.sign_ != b.sign_) return a.sign_ < b.sign_ ? -1 : 1;
  int c = cmp_mag(a.mag_, b.mag_);
  return a.sign_ >= 0 ? c : -c;
}

BigInt BigInt::operator-() const {
  BigInt out = *this;
  out.sign_ = -out.sign_;
  return out;
}

BigInt BigInt::abs() const {
  BigInt out = *this;
  if (out.sign_ < 0) out.sign_ = 1;
  return out;
}

BigInt BigInt::operator+(const BigInt& o) const {
  if (sign_ == 0) return o;
  if (o.sign_ == 0) return *this;
  BigInt out;
  if (sign_ == o.sign_) {
    out.sign_ = sign_;
    out.mag_ = add_mag(mag_, o.mag_);
    return out;
  }
  int c = cmp_mag(mag_, o.mag_);
  if (c == 0) return BigInt();
  if (c > 0) {
    out.sign_ = sign_;
    out.mag_ = sub_mag(mag_, o.mag_);
  } else {
    out.sign_ = o.sign_;
    out.mag_ = sub_mag(o.mag_, mag_);
  }
  return out;
}

BigInt BigInt::operator-(const BigInt& o) const { return *this + (-o); }

BigInt BigInt::operator*(const BigInt& o) const {
  BigInt out;
  if (sign_ == 0 || o.sign_ == 0) return out;
  out.sign_ = sign_ * o.sign_;
  out.mag_ = mul_mag(mag_, o.mag_);
  return out;
}

void BigInt::divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r) {
  if (b.sign_ == 0) throw value_error("BigInt division by zero");
  std::vector<uint32_t> qm, rm;
  divmod_mag(a.mag_, b.mag_, qm, rm);
  q.mag_ = std::move(qm);
  r.mag_ = std::move(rm);
  q.sign_ = q.mag_.empty() ? 0 : a.sign_ * b.sign_;
  r.sign_ = r.mag_.empty() ? 0 : a.sign_;
}

BigInt BigInt::operator/(const BigInt& o) const {
  BigInt q, r;
  divmod(*this, o, q, r);
  return q;
}

BigInt BigInt::operator%(const BigInt& o) const {
  BigInt q, r;
  divmod(*this, o, q, r);
  return r;
}

BigInt BigInt::gcd(BigInt a, BigInt b) {
  a.sign_ = a.mag_.empty() ? 0 : 1;
  b.sign_ = b.mag_.empty() ? 0 : 1;
  while (!b.is_zero()) {
    BigInt q, r;
    divmod(a, b, q, r);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

BigInt BigInt::pow(const BigInt& base, unsigned exp) {
  BigInt out(1), cur = base;
  while (exp) {
    if (exp & 1) out = out * cur;
    exp >>= 1;
    if (exp) cur = cur * cur;
  }
  return out;
}

BigInt BigInt::from_string(const std::string& s) {
  size_t i = 0;
  int sign = 1;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
    if (s[i] == '-') sign = -1;
    ++i;
  }
  if (i >= s.size()) throw value_error("empty integer literal");
  BigInt out;
  BigInt ten(10);
  for (; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9')
      throw value_error("bad integer literal: " + s);
    out = out * ten + BigInt(s[i] - '0');
  }
  if (sign < 0) out = -out;
  return out;
}

std::string BigInt::to_string() const {
  if (sign_ == 0) return "0";
  // Peel 9 decimal digits at a time.
  std::vector<uint32_t> cur = mag_;
  std::vector<uint32_t> chunks;
  while (!cur.empty()) {
    uint64_t rem = 0;
    for (size_t i = cur.size(); i-- > 0;) {
      uint64_t v = (rem << 32) | cur[i];
      cur[i] = static_cast<uint32_t>(v / 1000000000ULL);
      rem = v % 1000000000ULL;
    }
    while (!cur.empty() && cur.back() == 0) cur.pop_back();
    chunks.push_back(static_cast<uint32_t>(rem));
  }
  std::string out = sign_ < 0 ? "-" : "";
  out += std::to_string(chunks.back());
  for (size_t i = chunks.size() - 1; i-- > 0;) {
    std::string part = std::to_string(chunks[i]);
    out += std::string(9 - part.size(), '0') + part;
  }
  return out;
}

double BigInt::to_double() const {
  double out = 0;
  for (size_t i = mag_.size(); i-- > 0;) out = out * 4294967296.0 + mag_[i];
  return sign_ < 0 ? -out : out;
}

bool BigInt::fits_longlong() const {
  if (mag_.size() > 2) return false;
  unsigned long long v = 0;
  for (size_t i = mag_.size(); i-- > 0;) v = (v << 32) | mag_[i];
  if (sign_ >= 0) return v <= 0x7fffffffffffffffULL;
  return v <= 0x8000000000000000ULL;
}

long long BigInt::to_longlong() const {
  if (!fits_longlong()) throw value_error("BigInt out of long long range");
  unsigned long long v = 0;
  for (size_t i = mag_.size(); i-- > 0;) v = (v << 32) | mag_[i];
  if (sign_ >= 0) return static_cast<long long>(v);
  return -static_cast<long long>(v - 1) - 1;
}

// ---------------------------------------------------------------------------
// Value
// ---------------------------------------------------------------------------

Value::Value(BigInt num, BigInt den)
    : inf_(false), num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero()) throw value_error("rational with zero denominator");
  normalize();
}

void Value::normalize() {
  if (den_.is_negative()) {
    num_ = -num_;
    den_ = -den_;
  }
  if (num_.is_zero()) {
    den_ = BigInt(1);
    return;
  }
  BigInt g = BigInt::gcd(num_, den_);
  if (g != BigInt(1)) {
    num_ = num_ / g;
    den_ = den_ / g;
  }
}

Value Value::operator+(const Value& o) const {
  if (inf_ || o.inf_) return infinity();
  return Value(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}

Value Value::operator-(const Value& o) const {
  if (o.inf_) throw value_error("cannot subtract infinity");
  if (inf_) return infinity();
  return Value(num_ * o.den_ - o.num_ * den_, den_ * o.den_);
}

Value Value::operator*(const Value& o) const {
  if (inf_ || o.inf_) {
    const Value& fin = inf_ ? o : *this;
    if (fin.is_finite() && fin.num_.is_zero())
      throw value_error("infinity times zero");
    if (fin.is_finite() && fin.num_.is_negative())
      throw value_error("infinity times negative");
    return infinity();
  }
  return Value(num_ * o.num_, den_ * o.den_);
}

Value Value::operator/(const Value& o) const {
  if (o.inf_) throw value_error("division by infinity");
  if (o.num_.is_zero()) throw value_error("division by zero");
  if (inf_) {
    if (o.num_.is_negative()) throw value_error("infinity divided by negative");
    return infinity();
  }
  return Value(num_ * o.den_, den_ * o.num_);
}

Value Value::operator-() const {
  if (inf_) throw value_error("cannot negate infinity");
  Value out = *this;
  out.num_ = -out.num_;
  return out;
}

bool Value::operator==(const Value& o) const {
  if (inf_ || o.inf_) return inf_ == o.inf_;
  return num_ == o.num_ && den_ == o.den_;
}

int Value::cmp(const Value& a, const Value& b) {
  if (a.inf_ || b.inf_) {
    if (a.inf_ && b.inf_) return 0;
    return a.inf_ ? 1 : -1;
  }
  return BigInt::cmp(a.num_ * b.den_, b.num_ * a.den_);
}

Value Value::positive_part() const {
  if (inf_) return *this;
  return num_.is_negative() ? Value() : *this;
}

BigInt Value::floor() const {
  if (inf_) throw value_error("floor of infinity");
  BigInt q, r;
  BigInt::divmod(num_, den_, q, r);
  if (num_.is_negative() && !r.is_zero()) q = q - BigInt(1);
  return q;
}

std::string Value::to_string() const {
  if (inf_) return "inf";
  if (den_ == BigInt(1)) return num_.to_string();
  return num_.to_string() + "/" + den_.to_string();
}

Value Value::parse(const std::string& s) {
  if (s == "inf" || s == "*") return infinity();
  size_t slash = s.find('/');
  if (slash == std::string::npos) return Value(BigInt::from_string(s));
  return Value(BigInt::from_string(s.substr(0, slash)),
               BigInt::from_string(s.substr(slash + 1)));
}

double Value::to_double() const {
  if (inf_) return std::numeric_limits<double>::infinity();
  // Guard against overflow in huge numerators by scaling both sides down.
  double n = num_.to_double(), d = den_.to_double();
  if (std::isinf(n) || std::isinf(d)) {
    BigInt q, r;
    BigInt::divmod(num_, den_, q, r);
    return q.to_double();
  }
  return n / d;
}

}  // namespace strongflow
