#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace equikh {

// Coefficient fields. Everything downstream is exact; no floating point
// enters any computation.

/// The two-element field.
struct F2 {
    std::uint8_t v = 0;

    static F2 zero() { return F2{0}; }
    static F2 one() { return F2{1}; }
    static F2 from_int(long long n) { return F2{static_cast<std::uint8_t>(((n % 2) + 2) % 2)}; }
    static long long characteristic() { return 2; }
    static std::string name() { return "f2"; }

    bool is_zero() const { return v == 0; }
    F2 inverse() const {
        if (v == 0) throw std::domain_error("F2: inverse of zero");
        return F2{1};
    }
    F2 operator+(F2 o) const { return F2{static_cast<std::uint8_t>(v ^ o.v)}; }
    F2 operator-(F2 o) const { return *this + o; }
    F2 operator-() const { return *this; }
    F2 operator*(F2 o) const { return F2{static_cast<std::uint8_t>(v & o.v)}; }
    F2 operator/(F2 o) const { return *this * o.inverse(); }
    bool operator==(F2 o) const { return v == o.v; }
    bool operator!=(F2 o) const { return v != o.v; }
    std::string str() const { return v ? "1" : "0"; }
};

/// Prime field with a process-wide runtime modulus. The modulus is chosen
/// once per run (CLI flag or test setup) before any element is created;
/// elements from different moduli must never mix.
class Fp {
  public:
    Fp() = default;
    explicit Fp(std::uint64_t raw) : v_(static_cast<std::uint32_t>(raw % modulus_)) {}

    static void set_modulus(std::uint32_t p) {
        if (p < 2) throw std::invalid_argument("Fp: modulus must be a prime >= 2");
        for (std::uint32_t d = 2; d * d <= p; ++d)
            if (p % d == 0) throw std::invalid_argument("Fp: modulus must be prime");
        modulus_ = p;
    }
    static std::uint32_t modulus() { return modulus_; }

    static Fp zero() { return Fp{}; }
    static Fp one() { return Fp{1}; }
    static Fp from_int(long long n) {
        long long m = n % static_cast<long long>(modulus_);
        if (m < 0) m += modulus_;
        return Fp{static_cast<std::uint64_t>(m)};
    }
    static long long characteristic() { return modulus_; }
    static std::string name() { return "fp:" + std::to_string(modulus_); }

    bool is_zero() const { return v_ == 0; }
    Fp inverse() const {
        if (v_ == 0) throw std::domain_error("Fp: inverse of zero");
        // Fermat: v^(p-2)
        std::uint64_t base = v_, acc = 1, e = modulus_ - 2;
        while (e) {
            if (e & 1) acc = acc * base % modulus_;
            base = base * base % modulus_;
            e >>= 1;
        }
        Fp r;
        r.v_ = static_cast<std::uint32_t>(acc);
        return r;
    }
    Fp operator+(Fp o) const {
        Fp r;
        r.v_ = v_ + o.v_;
        if (r.v_ >= modulus_) r.v_ -= modulus_;
        return r;
    }
    Fp operator-(Fp o) const {
        Fp r;
        r.v_ = v_ + modulus_ - o.v_;
        if (r.v_ >= modulus_) r.v_ -= modulus_;
        return r;
    }
    Fp operator-() const { return zero() - *this; }
    Fp operator*(Fp o) const {
        Fp r;
        r.v_ = static_cast<std::uint32_t>(static_cast<std::uint64_t>(v_) * o.v_ % modulus_);
        return r;
    }
    Fp operator/(Fp o) const { return *this * o.inverse(); }
    bool operator==(Fp o) const { return v_ == o.v_; }
    bool operator!=(Fp o) const { return v_ != o.v_; }
    std::string str() const { return std::to_string(v_); }

  private:
    static inline std::uint32_t modulus_ = 3;
    std::uint32_t v_ = 0;
};

/// Arbitrary-precision rationals (characteristic zero).
struct Rational {
    boost::multiprecision::cpp_rational v;

    static Rational zero() { return Rational{}; }
    static Rational one() { return Rational{1}; }
    static Rational from_int(long long n) { return Rational{n}; }
    static long long characteristic() { return 0; }
    static std::string name() { return "q"; }

    bool is_zero() const { return v == 0; }
    Rational inverse() const {
        if (v == 0) throw std::domain_error("Rational: inverse of zero");
        return Rational{1 / v};
    }
    Rational operator+(const Rational& o) const { return Rational{v + o.v}; }
    Rational operator-(const Rational& o) const { return Rational{v - o.v}; }
    Rational operator-() const { return Rational{-v}; }
    Rational operator*(const Rational& o) const { return Rational{v * o.v}; }
    Rational operator/(const Rational& o) const { return *this * o.inverse(); }
    bool operator==(const Rational& o) const { return v == o.v; }
    bool operator!=(const Rational& o) const { return v != o.v; }
    std::string str() const { return v.str(); }
};

template <class F>
concept CoefficientField = requires(F a, F b) {
    { F::zero() } -> std::same_as<F>;
    { F::one() } -> std::same_as<F>;
    { F::from_int(0LL) } -> std::same_as<F>;
    { F::characteristic() } -> std::same_as<long long>;
    { a.is_zero() } -> std::same_as<bool>;
    { a.inverse() } -> std::same_as<F>;
    { a + b } -> std::same_as<F>;
    { a - b } -> std::same_as<F>;
    { -a } -> std::same_as<F>;
    { a* b } -> std::same_as<F>;
    { a == b } -> std::same_as<bool>;
};

} // namespace equikh
