#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

// Common scalar/matrix aliases and the fixed model dimensions. Everything in
// this library works in meters and radians; angles are axis-angle unless a
// rotation matrix is spelled out.

namespace gskin {

using Index = Eigen::Index;

template <typename Scalar>
using Vec3T = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Mat3T = Eigen::Matrix<Scalar, 3, 3>;
template <typename Scalar>
using Mat4T = Eigen::Matrix<Scalar, 4, 4>;
template <typename Scalar>
using PointsT = Eigen::Matrix<Scalar, Eigen::Dynamic, 3>;  // one row per vertex
template <typename Scalar>
using MatXT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VecXT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Vec2 = Eigen::Vector2d;
using Vec3 = Vec3T<double>;
using Mat3 = Mat3T<double>;
using Mat4 = Mat4T<double>;
using Points = PointsT<double>;
using Faces = Eigen::Matrix<int, Eigen::Dynamic, 3>;
using MatX = Eigen::MatrixXd;
using VecX = Eigen::VectorXd;

inline constexpr int kJointCount = 24;
inline constexpr int kShapeDim = 10;
inline constexpr int kPoseBlendDim = 207;  // 23 non-root joints x 9 matrix entries
inline constexpr int kThetaDim = 72;       // 24 joints x axis-angle
inline constexpr int kPcaDim = 64;

// Row-major flattening of an n x 3 point block into a 3n vector
// (x0,y0,z0,x1,...), the layout used by all blend-shape bases.
template <typename Derived>
VecXT<typename Derived::Scalar> flatten_rows(const Eigen::MatrixBase<Derived>& points) {
  PointsT<typename Derived::Scalar> p = points;
  return p.template reshaped<Eigen::RowMajor>();
}

template <typename Derived>
PointsT<typename Derived::Scalar> unflatten_rows(const Eigen::MatrixBase<Derived>& flat) {
  VecXT<typename Derived::Scalar> v = flat;
  return v.template reshaped<Eigen::RowMajor>(v.size() / 3, 3);
}

}  // namespace gskin
