#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace hamflow {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

// Phase point on (R^4, omega0). Coordinates y1..y4, omega0 pairs 1<->3, 2<->4.
using Phase4 = Vec4;

// omega0 = dy1 ^ dy3 + dy2 ^ dy4, represented by J with omega0(v,w) = v' J w.
// J = [[0, I2], [-I2, 0]] in the (y1,y2 | y3,y4) block split; J*J = -I.
inline const Mat4& symplectic_J() {
    static const Mat4 J = [] {
        Mat4 m = Mat4::Zero();
        m(0, 2) = 1.0;
        m(1, 3) = 1.0;
        m(2, 0) = -1.0;
        m(3, 1) = -1.0;
        return m;
    }();
    return J;
}

inline double omega0(const Vec4& v, const Vec4& w) {
    return v(0) * w(2) - v(2) * w(0) + v(1) * w(3) - v(3) * w(1);
}

// || F' J F - J ||, the symplecticity defect of a tangent matrix.
inline double symplectic_residual(const Mat4& F) {
    const Mat4& J = symplectic_J();
    return (F.transpose() * J * F - J).norm();
}

inline bool finite(const Vec4& v) { return v.allFinite(); }
inline bool finite(const Mat4& m) { return m.allFinite(); }

// Axis-aligned working box standing in for a compact phase space; orbits
// leaving it are flagged/escaped.
struct Box4 {
    Vec4 lo{-1000.0, -1000.0, -1000.0, -1000.0};
    Vec4 hi{1000.0, 1000.0, 1000.0, 1000.0};

    bool contains(const Vec4& y) const {
        for (int i = 0; i < 4; ++i)
            if (!(y(i) >= lo(i) && y(i) <= hi(i))) return false;
        return true;
    }
    static Box4 cube(double half_width) {
        Box4 b;
        b.lo = Vec4::Constant(-half_width);
        b.hi = Vec4::Constant(half_width);
        return b;
    }
};

// Angle between two directions (lines, not vectors), in [0, pi/2].
inline double line_angle(const Vec2& a, const Vec2& b) {
    double c = std::abs(a.normalized().dot(b.normalized()));
    if (c > 1.0) c = 1.0;
    return std::acos(c);
}

}  // namespace hamflow
