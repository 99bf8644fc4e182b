#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace dsum {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exact rational on int64, always normalized: gcd(num,den) == 1, den > 0.
// Exponent arithmetic in this tool never leaves the ±2^40 range, but every
// operation still widens to __int128 and checks before narrowing.
class Rational {
  public:
    Rational() = default;
    Rational(std::int64_t n) : num_(n), den_(1) {}
    Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) { normalize(); }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_integer() const { return den_ == 1; }
    int sign() const { return num_ > 0 ? 1 : num_ < 0 ? -1 : 0; }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return make_checked((__int128)a.num_ * b.den_ + (__int128)b.num_ * a.den_,
                            (__int128)a.den_ * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return make_checked((__int128)a.num_ * b.den_ - (__int128)b.num_ * a.den_,
                            (__int128)a.den_ * b.den_);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return make_checked((__int128)a.num_ * b.num_, (__int128)a.den_ * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw Error("rational division by zero");
        return make_checked((__int128)a.num_ * b.den_, (__int128)a.den_ * b.num_);
    }
    Rational operator-() const { return Rational(-num_, den_); }
    Rational& operator+=(const Rational& b) { return *this = *this + b; }
    Rational& operator-=(const Rational& b) { return *this = *this - b; }
    Rational& operator*=(const Rational& b) { return *this = *this * b; }
    Rational& operator/=(const Rational& b) { return *this = *this / b; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return (__int128)a.num_ * b.den_ < (__int128)b.num_ * a.den_;
    }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    // Largest integer <= this (exact).
    std::int64_t floor() const {
        std::int64_t q = num_ / den_;
        if (num_ % den_ != 0 && num_ < 0) --q;
        return q;
    }
    std::int64_t ceil() const { return -(-*this).floor(); }

    double to_double() const { return (double)num_ / (double)den_; }

    std::string str() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    // Accepts "p", "p/q", and plain decimals ("-0.25"), all converted exactly.
    static Rational parse(const std::string& text);

    // Exact log2 for rationals that are powers of two; throws otherwise.
    static Rational log2_of_power_of_two(const Rational& value);

  private:
    static Rational make_checked(__int128 n, __int128 d) {
        if (d == 0) throw Error("rational with zero denominator");
        if (d < 0) { n = -n; d = -d; }
        __int128 g = gcd128(n < 0 ? -n : n, d);
        if (g > 1) { n /= g; d /= g; }
        if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX)
            throw Error("rational overflow");
        Rational r;
        r.num_ = (std::int64_t)n;
        r.den_ = (std::int64_t)d;
        return r;
    }
    static __int128 gcd128(__int128 a, __int128 b) {
        while (b != 0) { __int128 t = a % b; a = b; b = t; }
        return a < 0 ? -a : a;
    }
    void normalize() {
        Rational r = make_checked(num_, den_);
        num_ = r.num_;
        den_ = r.den_;
    }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

inline Rational Rational::parse(const std::string& text) {
    if (text.empty()) throw Error("empty rational literal");
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        std::string ns = text.substr(0, slash), ds = text.substr(slash + 1);
        try {
            return Rational(std::stoll(ns), std::stoll(ds));
        } catch (const std::exception&) {
            throw Error("bad rational literal: " + text);
        }
    }
    auto dot = text.find('.');
    if (dot != std::string::npos) {
        std::string digits = text.substr(0, dot) + text.substr(dot + 1);
        std::size_t places = text.size() - dot - 1;
        if (places == 0 || places > 15) throw Error("bad decimal literal: " + text);
        std::int64_t den = 1;
        for (std::size_t i = 0; i < places; ++i) den *= 10;
        try {
            return Rational(std::stoll(digits), den);
        } catch (const std::exception&) {
            throw Error("bad decimal literal: " + text);
        }
    }
    try {
        return Rational(std::stoll(text));
    } catch (const std::exception&) {
        throw Error("bad integer literal: " + text);
    }
}

inline Rational Rational::log2_of_power_of_two(const Rational& value) {
    if (value.sign() <= 0) throw Error("log2 of non-positive value");
    auto log2_int = [](std::int64_t v) -> std::int64_t {
        std::int64_t k = 0;
        while (v > 1) {
            if (v % 2 != 0) throw Error("not a power of two: " + std::to_string(v));
            v /= 2;
            ++k;
        }
        return k;
    };
    return Rational(log2_int(value.num()) - log2_int(value.den()));
}

} // namespace dsum
