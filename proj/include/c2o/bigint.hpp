#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace c2o {

// Arbitrary-precision signed integer, sign-magnitude over 32-bit limbs.
// Schoolbook arithmetic; contract values stay small, exactness is what matters.
class BigInt {
  public:
    BigInt() = default;
    BigInt(int64_t v);
    static BigInt from_string(const std::string& digits); // optional leading '-'

    bool is_zero() const { return limbs_.empty(); }
    bool negative() const { return neg_; }
    int sign() const { return is_zero() ? 0 : (neg_ ? -1 : 1); }

    BigInt operator-() const;
    BigInt abs() const;

    BigInt operator+(const BigInt& o) const;
    BigInt operator-(const BigInt& o) const;
    BigInt operator*(const BigInt& o) const;

    // Truncated division (C semantics): quotient rounds toward zero,
    // remainder has the dividend's sign. Divisor must be nonzero.
    static void divrem(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r);
    BigInt div_trunc(const BigInt& o) const;
    BigInt rem_trunc(const BigInt& o) const;
    // Divisor-sign modulo (MATLAB mod convention).
    BigInt mod_divisor_sign(const BigInt& o) const;

    int compare(const BigInt& o) const; // -1, 0, 1
    bool operator==(const BigInt& o) const { return compare(o) == 0; }
    bool operator!=(const BigInt& o) const { return compare(o) != 0; }
    bool operator<(const BigInt& o) const { return compare(o) < 0; }
    bool operator<=(const BigInt& o) const { return compare(o) <= 0; }
    bool operator>(const BigInt& o) const { return compare(o) > 0; }
    bool operator>=(const BigInt& o) const { return compare(o) >= 0; }

    bool fits_int64() const;
    int64_t to_int64() const; // valid only if fits_int64()
    double to_double() const; // may round; used for reporting only

    std::string to_string() const;

    static BigInt gcd(BigInt a, BigInt b);
    static BigInt pow2(unsigned n);

    size_t limb_count() const { return limbs_.size(); }

  private:
    bool neg_ = false;
    std::vector<uint32_t> limbs_; // little-endian, no trailing zeros

    void trim();
    static int cmp_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b);
    static std::vector<uint32_t> add_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b);
    // requires |a| >= |b|
    static std::vector<uint32_t> sub_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b);
    static std::vector<uint32_t> mul_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b);
};

// Exact rational with normalized representation (gcd-reduced, positive denominator).
class BigRational {
  public:
    BigRational() : num_(0), den_(1) {}
    BigRational(BigInt n) : num_(std::move(n)), den_(1) {}
    BigRational(int64_t n) : num_(n), den_(1) {}
    BigRational(BigInt n, BigInt d); // normalizes; d must be nonzero
    static BigRational from_decimal_string(const std::string& text); // e.g. "-12.50"
    static BigRational from_double(double v);                        // exact (binary) value

    const BigInt& num() const { return num_; }
    const BigInt& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    bool is_integer() const { return den_ == BigInt(1); }
    int sign() const { return num_.sign(); }

    BigRational operator-() const;
    BigRational operator+(const BigRational& o) const;
    BigRational operator-(const BigRational& o) const;
    BigRational operator*(const BigRational& o) const;
    BigRational operator/(const BigRational& o) const; // o must be nonzero

    int compare(const BigRational& o) const;
    bool operator==(const BigRational& o) const { return compare(o) == 0; }
    bool operator!=(const BigRational& o) const { return compare(o) != 0; }
    bool operator<(const BigRational& o) const { return compare(o) < 0; }
    bool operator<=(const BigRational& o) const { return compare(o) <= 0; }
    bool operator>(const BigRational& o) const { return compare(o) > 0; }
    bool operator>=(const BigRational& o) const { return compare(o) >= 0; }

    BigRational abs() const;
    double to_double() const; // approximate, reporting only
    std::string to_string() const; // "n" or "n/d"

  private:
    BigInt num_;
    BigInt den_; // > 0
    void normalize();
};

} // namespace c2o
