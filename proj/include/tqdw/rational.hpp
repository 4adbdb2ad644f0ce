#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace tqdw {

// Exact rational arithmetic on int64 with __int128 intermediates.
// Denominators stay tiny here (divisors of group orders and twist
// denominators), but we guard against silent overflow anyway.
struct Rat {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rat() = default;
    Rat(std::int64_t n) : num(n), den(1) {}
    Rat(std::int64_t n, std::int64_t d) : num(n), den(d) { normalize(); }

    static constexpr std::int64_t kDenCap = 1'000'000'000'000LL;

    void normalize() {
        if (den == 0) throw std::domain_error("Rat: zero denominator");
        if (den < 0) { num = -num; den = -den; }
        std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
        if (den > kDenCap) throw std::overflow_error("Rat: denominator cap exceeded");
    }

    static Rat make(__int128 n, __int128 d) {
        if (d == 0) throw std::domain_error("Rat: zero denominator");
        if (d < 0) { n = -n; d = -d; }
        __int128 a = n < 0 ? -n : n;
        __int128 b = d;
        while (b) { __int128 t = a % b; a = b; b = t; }
        if (a > 1) { n /= a; d /= a; }
        if (n > INT64_MAX || n < INT64_MIN || d > kDenCap)
            throw std::overflow_error("Rat: overflow");
        Rat r;
        r.num = (std::int64_t)n;
        r.den = (std::int64_t)d;
        return r;
    }

    friend Rat operator+(const Rat& a, const Rat& b) {
        return make((__int128)a.num * b.den + (__int128)b.num * a.den,
                    (__int128)a.den * b.den);
    }
    friend Rat operator-(const Rat& a, const Rat& b) {
        return make((__int128)a.num * b.den - (__int128)b.num * a.den,
                    (__int128)a.den * b.den);
    }
    friend Rat operator*(const Rat& a, const Rat& b) {
        return make((__int128)a.num * b.num, (__int128)a.den * b.den);
    }
    friend Rat operator/(const Rat& a, const Rat& b) {
        if (b.num == 0) throw std::domain_error("Rat: division by zero");
        return make((__int128)a.num * b.den, (__int128)a.den * b.num);
    }
    Rat operator-() const { Rat r; r.num = -num; r.den = den; return r; }
    Rat& operator+=(const Rat& o) { *this = *this + o; return *this; }
    Rat& operator-=(const Rat& o) { *this = *this - o; return *this; }
    Rat& operator*=(const Rat& o) { *this = *this * o; return *this; }

    friend bool operator==(const Rat& a, const Rat& b) {
        return a.num == b.num && a.den == b.den;
    }
    friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
    friend bool operator<(const Rat& a, const Rat& b) {
        return (__int128)a.num * b.den < (__int128)b.num * a.den;
    }

    bool is_zero() const { return num == 0; }
    bool is_integer() const { return den == 1; }
    double to_double() const { return (double)num / (double)den; }

    std::string str() const {
        if (den == 1) return std::to_string(num);
        return std::to_string(num) + "/" + std::to_string(den);
    }
};

// A rational in [0,1) representing the phase e^{2*pi*i*q}.
struct RationalPhase {
    Rat q;

    RationalPhase() = default;
    explicit RationalPhase(Rat r) : q(reduce_mod1(r)) {}

    static Rat reduce_mod1(Rat r) {
        std::int64_t f = r.num / r.den;
        r.num -= f * r.den;
        if (r.num < 0) r.num += r.den;
        return r;
    }

    RationalPhase operator+(const RationalPhase& o) const { return RationalPhase(q + o.q); }
    RationalPhase operator-(const RationalPhase& o) const { return RationalPhase(q - o.q); }
    RationalPhase operator-() const { return RationalPhase(-q); }
    bool operator==(const RationalPhase& o) const { return q == o.q; }
    bool operator!=(const RationalPhase& o) const { return !(q == o.q); }
    bool is_trivial() const { return q.num == 0; }
    std::string str() const { return q.str(); }
};

inline Rat parse_rat(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rat(std::stoll(s));
    return Rat(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
}

} // namespace tqdw
