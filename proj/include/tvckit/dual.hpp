#pragma once

#include <cmath>

namespace tvckit {

/// Forward-mode dual number value + deriv*eps with eps^2 = 0.
/// Nesting (Dual<Dual<double>>) carries mixed second derivatives.
template <class T>
struct Dual {
    T value{};
    T deriv{};

    constexpr Dual() = default;
    constexpr Dual(T v, T d) : value(v), deriv(d) {}
    constexpr Dual(double v) : value(v), deriv(0.0) {}  // NOLINT: scalars promote

    Dual& operator+=(const Dual& o) {
        value += o.value;
        deriv += o.deriv;
        return *this;
    }
    Dual& operator-=(const Dual& o) {
        value -= o.value;
        deriv -= o.deriv;
        return *this;
    }
    Dual& operator*=(const Dual& o) { return *this = *this * o; }
    Dual& operator/=(const Dual& o) { return *this = *this / o; }

    friend Dual operator-(const Dual& a) { return {-a.value, -a.deriv}; }
    friend Dual operator+(const Dual& a, const Dual& b) {
        return {a.value + b.value, a.deriv + b.deriv};
    }
    friend Dual operator-(const Dual& a, const Dual& b) {
        return {a.value - b.value, a.deriv - b.deriv};
    }
    friend Dual operator*(const Dual& a, const Dual& b) {
        return {a.value * b.value, a.value * b.deriv + a.deriv * b.value};
    }
    friend Dual operator/(const Dual& a, const Dual& b) {
        const T q = a.value / b.value;
        return {q, (a.deriv - q * b.deriv) / b.value};
    }
};

inline double primal(double x) { return x; }

template <class T>
double primal(const Dual<T>& x) {
    return primal(x.value);
}

template <class T>
Dual<T> log(const Dual<T>& a) {
    using std::log;
    return {log(a.value), a.deriv / a.value};
}

template <class T>
Dual<T> exp(const Dual<T>& a) {
    using std::exp;
    const T e = exp(a.value);
    return {e, e * a.deriv};
}

/// a^b for a constant real exponent; the caller guarantees a > 0 unless
/// b is an integer (see ipow).
inline double pow_const(double a, double b) { return std::pow(a, b); }

template <class T>
Dual<T> pow_const(const Dual<T>& a, double b) {
    return {pow_const(a.value, b), b * pow_const(a.value, b - 1.0) * a.deriv};
}

/// a^k by repeated squaring; exact derivatives for any sign of a.
template <class T>
T ipow(const T& a, long long k) {
    if (k < 0) return T(1.0) / ipow(a, -k);
    T result(1.0);
    T base = a;
    while (k > 0) {
        if (k & 1) result = result * base;
        k >>= 1;
        if (k) base = base * base;
    }
    return result;
}

}  // namespace tvckit
