#include "c2o/bigint.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace c2o {

BigInt::BigInt(int64_t v) {
    neg_ = v < 0;
    uint64_t mag = neg_ ? (~static_cast<uint64_t>(v) + 1) : static_cast<uint64_t>(v);
    while (mag) {
        limbs_.push_back(static_cast<uint32_t>(mag & 0xffffffffu));
        mag >>= 32;
    }
}

BigInt BigInt::from_string(const std::string& digits) {
    size_t i = 0;
    bool neg = false;
    if (i < digits.size() && (digits[i] == '-' || digits[i] == '+')) {
        neg = digits[i] == '-';
        ++i;
    }
    if (i >= digits.size()) throw std::invalid_argument("empty integer literal");
    BigInt r;
    const BigInt ten(10);
    for (; i < digits.size(); ++i) {
        if (digits[i] < '0' || digits[i] > '9') throw std::invalid_argument("bad digit in integer literal");
        r = r * ten + BigInt(digits[i] - '0');
    }
    r.neg_ = neg && !r.is_zero();
    return r;
}

void BigInt::trim() {
    while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
    if (limbs_.empty()) neg_ = false;
}

int BigInt::cmp_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    for (size_t i = a.size(); i-- > 0;) {
        if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    }
    return 0;
}

std::vector<uint32_t> BigInt::add_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
    std::vector<uint32_t> r;
    r.reserve(std::max(a.size(), b.size()) + 1);
    uint64_t carry = 0;
    for (size_t i = 0; i < std::max(a.size(), b.size()); ++i) {
        uint64_t s = carry;
        if (i < a.size()) s += a[i];
        if (i < b.size()) s += b[i];
        r.push_back(static_cast<uint32_t>(s & 0xffffffffu));
        carry = s >> 32;
    }
    if (carry) r.push_back(static_cast<uint32_t>(carry));
    return r;
}

std::vector<uint32_t> BigInt::sub_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
    std::vector<uint32_t> r;
    r.reserve(a.size());
    int64_t borrow = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        int64_t d = static_cast<int64_t>(a[i]) - borrow - (i < b.size() ? static_cast<int64_t>(b[i]) : 0);
        if (d < 0) {
            d += (1ll << 32);
            borrow = 1;
        } else {
            borrow = 0;
        }
        r.push_back(static_cast<uint32_t>(d));
    }
    while (!r.empty() && r.back() == 0) r.pop_back();
    return r;
}

std::vector<uint32_t> BigInt::mul_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
    if (a.empty() || b.empty()) return {};
    std::vector<uint32_t> r(a.size() + b.size(), 0);
    for (size_t i = 0; i < a.size(); ++i) {
        uint64_t carry = 0;
        for (size_t j = 0; j < b.size(); ++j) {
            uint64_t cur = r[i + j] + static_cast<uint64_t>(a[i]) * b[j] + carry;
            r[i + j] = static_cast<uint32_t>(cur & 0xffffffffu);
            carry = cur >> 32;
        }
        size_t k = i + b.size();
        while (carry) {
            uint64_t cur = r[k] + carry;
            r[k] = static_cast<uint32_t>(cur & 0xffffffffu);
            carry = cur >> 32;
            ++k;
        }
    }
    while (!r.empty() && r.back() == 0) r.pop_back();
    return r;
}

BigInt BigInt::operator-() const {
    BigInt r = *this;
    if (!r.is_zero()) r.neg_ = !r.neg_;
    return r;
}

BigInt BigInt::abs() const {
    BigInt r = *this;
    r.neg_ = false;
    return r;
}

BigInt BigInt::operator+(const BigInt& o) const {
    BigInt r;
    if (neg_ == o.neg_) {
        r.limbs_ = add_mag(limbs_, o.limbs_);
        r.neg_ = neg_;
    } else {
        int c = cmp_mag(limbs_, o.limbs_);
        if (c == 0) return BigInt();
        if (c > 0) {
            r.limbs_ = sub_mag(limbs_, o.limbs_);
            r.neg_ = neg_;
        } else {
            r.limbs_ = sub_mag(o.limbs_, limbs_);
            r.neg_ = o.neg_;
        }
    }
    r.trim();
    return r;
}

BigInt BigInt::operator-(const BigInt& o) const { return *this + (-o); }

BigInt BigInt::operator*(const BigInt& o) const {
    BigInt r;
    r.limbs_ = mul_mag(limbs_, o.limbs_);
    r.neg_ = !r.limbs_.empty() && (neg_ != o.neg_);
    return r;
}

void BigInt::divrem(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r) {
    if (b.is_zero()) throw std::domain_error("division by zero");
    if (cmp_mag(a.limbs_, b.limbs_) < 0) {
        q = BigInt();
        r = a;
        return;
    }
    // Bit-by-bit long division on magnitudes.
    const size_t bits = a.limbs_.size() * 32;
    BigInt quo, rem;
    quo.limbs_.assign(a.limbs_.size(), 0);
    for (size_t i = bits; i-- > 0;) {
        // rem = rem * 2 + bit_i(a)
        uint32_t carry = 0;
        for (size_t k = 0; k < rem.limbs_.size(); ++k) {
            uint32_t nxt = rem.limbs_[k] >> 31;
            rem.limbs_[k] = (rem.limbs_[k] << 1) | carry;
            carry = nxt;
        }
        if (carry) rem.limbs_.push_back(carry);
        uint32_t bit = (a.limbs_[i / 32] >> (i % 32)) & 1u;
        if (bit) {
            if (rem.limbs_.empty()) rem.limbs_.push_back(1u);
            else {
                uint64_t s = static_cast<uint64_t>(rem.limbs_[0]) + 1;
                rem.limbs_[0] = static_cast<uint32_t>(s & 0xffffffffu);
                uint64_t c = s >> 32;
                size_t k = 1;
                while (c) {
                    if (k == rem.limbs_.size()) { rem.limbs_.push_back(static_cast<uint32_t>(c)); break; }
                    s = static_cast<uint64_t>(rem.limbs_[k]) + c;
                    rem.limbs_[k] = static_cast<uint32_t>(s & 0xffffffffu);
                    c = s >> 32;
                    ++k;
                }
            }
        }
        if (cmp_mag(rem.limbs_, b.limbs_) >= 0) {
            rem.limbs_ = sub_mag(rem.limbs_, b.limbs_);
            quo.limbs_[i / 32] |= (1u << (i % 32));
        }
    }
    quo.trim();
    rem.trim();
    quo.neg_ = !quo.is_zero() && (a.neg_ != b.neg_);
    rem.neg_ = !rem.is_zero() && a.neg_;
    q = std::move(quo);
    r = std::move(rem);
}

BigInt BigInt::div_trunc(const BigInt& o) const {
    BigInt q, r;
    divrem(*this, o, q, r);
    return q;
}

BigInt BigInt::rem_trunc(const BigInt& o) const {
    BigInt q, r;
    divrem(*this, o, q, r);
    return r;
}

BigInt BigInt::mod_divisor_sign(const BigInt& o) const {
    BigInt r = rem_trunc(o);
    if (!r.is_zero() && r.sign() != o.sign()) r = r + o;
    return r;
}

int BigInt::compare(const BigInt& o) const {
    if (neg_ != o.neg_) return neg_ ? -1 : 1;
    int c = cmp_mag(limbs_, o.limbs_);
    return neg_ ? -c : c;
}

bool BigInt::fits_int64() const {
    if (limbs_.size() > 2) return false;
    uint64_t mag = 0;
    for (size_t i = limbs_.size(); i-- > 0;) mag = (mag << 32) | limbs_[i];
    if (neg_) return mag <= (1ull << 63);
    return mag < (1ull << 63);
}

int64_t BigInt::to_int64() const {
    uint64_t mag = 0;
    for (size_t i = limbs_.size(); i-- > 0;) mag = (mag << 32) | limbs_[i];
    return neg_ ? -static_cast<int64_t>(mag) : static_cast<int64_t>(mag);
}

double BigInt::to_double() const {
    double r = 0;
    for (size_t i = limbs_.size(); i-- > 0;) r = r * 4294967296.0 + limbs_[i];
    return neg_ ? -r : r;
}

std::string BigInt::to_string() const {
    if (is_zero()) return "0";
    std::string out;
    BigInt cur = abs();
    const BigInt ten(10);
    while (!cur.is_zero()) {
        BigInt q, r;
        divrem(cur, ten, q, r);
        out.push_back(static_cast<char>('0' + (r.is_zero() ? 0 : r.limbs_[0])));
        cur = q;
    }
    if (neg_) out.push_back('-');
    std::reverse(out.begin(), out.end());
    return out;
}

BigInt BigInt::gcd(BigInt a, BigInt b) {
    a = a.abs();
    b = b.abs();
    while (!b.is_zero()) {
        BigInt r = a.rem_trunc(b);
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

BigInt BigInt::pow2(unsigned n) {
    BigInt r;
    r.limbs_.assign(n / 32 + 1, 0);
    r.limbs_[n / 32] = 1u << (n % 32);
    r.trim();
    return r;
}

BigRational::BigRational(BigInt n, BigInt d) : num_(std::move(n)), den_(std::move(d)) {
    if (den_.is_zero()) throw std::domain_error("rational with zero denominator");
    normalize();
}

void BigRational::normalize() {
    if (den_.negative()) {
        num_ = -num_;
        den_ = -den_;
    }
    if (num_.is_zero()) {
        den_ = BigInt(1);
        return;
    }
    BigInt g = BigInt::gcd(num_, den_);
    if (g != BigInt(1)) {
        num_ = num_.div_trunc(g);
        den_ = den_.div_trunc(g);
    }
}

BigRational BigRational::from_decimal_string(const std::string& text) {
    size_t dot = text.find('.');
    if (dot == std::string::npos) return BigRational(BigInt::from_string(text));
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    size_t frac_len = text.size() - dot - 1;
    BigInt den(1);
    const BigInt ten(10);
    for (size_t i = 0; i < frac_len; ++i) den = den * ten;
    return BigRational(BigInt::from_string(digits), den);
}

BigRational BigRational::from_double(double v) {
    if (v == 0.0) return BigRational();
    if (!std::isfinite(v)) throw std::domain_error("non-finite double to rational");
    int exp = 0;
    double frac = std::frexp(v, &exp); // v = frac * 2^exp, |frac| in [0.5, 1)
    // 53 doublings make the mantissa integral.
    int64_t mant = static_cast<int64_t>(std::ldexp(frac, 53));
    exp -= 53;
    BigInt n(mant);
    if (exp >= 0) return BigRational(n * BigInt::pow2(static_cast<unsigned>(exp)));
    return BigRational(std::move(n), BigInt::pow2(static_cast<unsigned>(-exp)));
}

BigRational BigRational::operator-() const {
    BigRational r = *this;
    r.num_ = -r.num_;
    return r;
}

BigRational BigRational::operator+(const BigRational& o) const {
    return BigRational(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}

BigRational BigRational::operator-(const BigRational& o) const {
    return BigRational(num_ * o.den_ - o.num_ * den_, den_ * o.den_);
}

BigRational BigRational::operator*(const BigRational& o) const {
    return BigRational(num_ * o.num_, den_ * o.den_);
}

BigRational BigRational::operator/(const BigRational& o) const {
    if (o.is_zero()) throw std::domain_error("division by zero");
    return BigRational(num_ * o.den_, den_ * o.num_);
}

int BigRational::compare(const BigRational& o) const {
    return (num_ * o.den_).compare(o.num_ * den_);
}

BigRational BigRational::abs() const {
    BigRational r = *this;
    r.num_ = r.num_.abs();
    return r;
}

double BigRational::to_double() const {
    if (num_.is_zero()) return 0.0;
    if (num_.fits_int64() && den_.fits_int64())
        return static_cast<double>(num_.to_int64()) / static_cast<double>(den_.to_int64());
    return num_.to_double() / den_.to_double();
}

std::string BigRational::to_string() const {
    if (is_integer()) return num_.to_string();
    return num_.to_string() + "/" + den_.to_string();
}

} // namespace c2o
