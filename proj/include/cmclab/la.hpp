#pragma once
// la.hpp — fixed-size vectors and 2x2 matrices for per-node geometry.

#include <array>
#include <cmath>

namespace cmclab {

struct Vec2 {
    double x = 0.0, y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline Vec2 operator*(Vec2 a, double s) { return s * a; }
inline Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
inline Vec2& operator+=(Vec2& a, Vec2 b) { a.x += b.x; a.y += b.y; return a; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm2(Vec2 a) { return dot(a, a); }
inline double norm(Vec2 a) { return std::sqrt(norm2(a)); }

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;
};

inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
inline Vec3 operator/(Vec3 a, double s) { return {a.x / s, a.y / s, a.z / s}; }
inline Vec3& operator+=(Vec3& a, Vec3 b) { a.x += b.x; a.y += b.y; a.z += b.z; return a; }
inline double euclid_dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double euclid_norm(Vec3 a) { return std::sqrt(euclid_dot(a, a)); }

// Row-major 2x2 matrix.
struct Mat2 {
    double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    double trace() const { return a11 + a22; }
    double det() const { return a11 * a22 - a12 * a21; }
    double frob2() const { return a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22; }
    Mat2 transposed() const { return {a11, a21, a12, a22}; }
};

inline Mat2 operator+(Mat2 a, Mat2 b) { return {a.a11 + b.a11, a.a12 + b.a12, a.a21 + b.a21, a.a22 + b.a22}; }
inline Mat2 operator-(Mat2 a, Mat2 b) { return {a.a11 - b.a11, a.a12 - b.a12, a.a21 - b.a21, a.a22 - b.a22}; }
inline Mat2 operator*(double s, Mat2 a) { return {s * a.a11, s * a.a12, s * a.a21, s * a.a22}; }

inline Mat2 operator*(Mat2 a, Mat2 b) {
    return {a.a11 * b.a11 + a.a12 * b.a21, a.a11 * b.a12 + a.a12 * b.a22,
            a.a21 * b.a11 + a.a22 * b.a21, a.a21 * b.a12 + a.a22 * b.a22};
}

inline Vec2 operator*(Mat2 a, Vec2 v) {
    return {a.a11 * v.x + a.a12 * v.y, a.a21 * v.x + a.a22 * v.y};
}

inline Mat2 inverse(Mat2 a) {
    const double d = a.det();
    return {a.a22 / d, -a.a12 / d, -a.a21 / d, a.a11 / d};
}

inline Mat2 outer(Vec2 a, Vec2 b) {
    return {a.x * b.x, a.x * b.y, a.y * b.x, a.y * b.y};
}

// Rotation by angle t (counterclockwise in the (x, y) gauge).
inline Mat2 rotation(double t) {
    const double c = std::cos(t), s = std::sin(t);
    return {c, -s, s, c};
}

// Solve a 2x2 linear system a * x = rhs.
inline Vec2 solve2(Mat2 a, Vec2 rhs) {
    const double d = a.det();
    return {(a.a22 * rhs.x - a.a12 * rhs.y) / d, (a.a11 * rhs.y - a.a21 * rhs.x) / d};
}

} // namespace cmclab
