#pragma once

#include <cmath>

namespace csirl::nn {

// First-order forward-mode dual number: value plus one directional derivative.
// Running an existing reverse-mode gradient routine with Dual scalars yields
// the directional derivative of that gradient, i.e. a mixed-partial
// contraction, exact up to floating point.
struct Dual {
    double v = 0.0;
    double d = 0.0;

    Dual() = default;
    Dual(double value) : v(value) {}  // NOLINT: implicit promotion from double is intended
    Dual(double value, double deriv) : v(value), d(deriv) {}

    Dual& operator+=(const Dual& o) { v += o.v; d += o.d; return *this; }
    Dual& operator-=(const Dual& o) { v -= o.v; d -= o.d; return *this; }
    Dual& operator*=(const Dual& o) { d = d * o.v + v * o.d; v *= o.v; return *this; }
    Dual& operator/=(const Dual& o) { d = (d * o.v - v * o.d) / (o.v * o.v); v /= o.v; return *this; }
};

inline Dual operator+(Dual a, const Dual& b) { return a += b; }
inline Dual operator-(Dual a, const Dual& b) { return a -= b; }
inline Dual operator*(Dual a, const Dual& b) { return a *= b; }
inline Dual operator/(Dual a, const Dual& b) { return a /= b; }
inline Dual operator-(const Dual& a) { return {-a.v, -a.d}; }
inline Dual operator+(const Dual& a) { return a; }

// Comparisons look at the primal value only; branch choices are part of the
// function being differentiated.
inline bool operator<(const Dual& a, const Dual& b) { return a.v < b.v; }
inline bool operator>(const Dual& a, const Dual& b) { return a.v > b.v; }
inline bool operator<=(const Dual& a, const Dual& b) { return a.v <= b.v; }
inline bool operator>=(const Dual& a, const Dual& b) { return a.v >= b.v; }
inline bool operator==(const Dual& a, const Dual& b) { return a.v == b.v; }

inline Dual tanh(const Dual& x) {
    const double t = std::tanh(x.v);
    return {t, (1.0 - t * t) * x.d};
}

inline Dual exp(const Dual& x) {
    const double e = std::exp(x.v);
    return {e, e * x.d};
}

inline Dual log(const Dual& x) { return {std::log(x.v), x.d / x.v}; }

inline Dual log1p(const Dual& x) { return {std::log1p(x.v), x.d / (1.0 + x.v)}; }

inline Dual sqrt(const Dual& x) {
    const double s = std::sqrt(x.v);
    return {s, 0.5 * x.d / s};
}

inline bool is_finite(double x) { return std::isfinite(x); }
inline bool is_finite(const Dual& x) { return std::isfinite(x.v) && std::isfinite(x.d); }

inline double primal(double x) { return x; }
inline double primal(const Dual& x) { return x.v; }

}  // namespace csirl::nn
