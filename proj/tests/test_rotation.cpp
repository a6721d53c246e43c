// Copyright 2026 The quadplan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "quadplan/rotation.hpp"

#include <cmath>

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "doctest.h"
#include "quadplan/rng.hpp"

namespace quadplan {
namespace {

constexpr double kPi = 3.14159265358979323846;

Eigen::Vector3d random_vec(Rng& rng, double scale) {
  return {rng.normal() * scale, rng.normal() * scale, rng.normal() * scale};
}

Eigen::Quaterniond random_quat(Rng& rng) {
  Eigen::Quaterniond q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
  q.normalize();
  return q;
}

TEST_CASE("quat_exp matches the axis-angle constructor") {
  CHECK(quat_exp(Eigen::Vector3d::Zero()).angularDistance(Eigen::Quaterniond::Identity()) ==
        doctest::Approx(0.0));
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const Eigen::Vector3d v = random_vec(rng, 1.0);
    const Eigen::Quaterniond ref(Eigen::AngleAxisd(v.norm(), v.normalized()));
    CHECK(quat_exp(v).angularDistance(ref) <= 1e-12);
  }
}

TEST_CASE("quat_log inverts quat_exp below pi") {
  Rng rng(2);
  for (int i = 0; i < 500; ++i) {
    Eigen::Vector3d v = random_vec(rng, 0.8);
    if (v.norm() >= kPi) v *= 0.9 * kPi / v.norm();
    CHECK((quat_log(quat_exp(v)) - v).norm() <= 1e-9);
  }
  // Tiny angles go through the series branch.
  const Eigen::Vector3d tiny(1e-12, -2e-12, 3e-13);
  CHECK((quat_log(quat_exp(tiny)) - tiny).norm() <= 1e-15);
}

TEST_CASE("quat_exp inverts quat_log for random orientations") {
  Rng rng(3);
  for (int i = 0; i < 500; ++i) {
    const Eigen::Quaterniond q = random_quat(rng);
    CHECK(quat_exp(quat_log(q)).angularDistance(q) <= 1e-9);
    CHECK(quat_log(q).norm() <= kPi + 1e-12);
  }
}

TEST_CASE("quat_log at pi picks the non-negative branch") {
  // Rotation by pi about -x equals rotation by pi about +x; the returned
  // vector must have a non-negative first nonzero component.
  const Eigen::Quaterniond q(Eigen::AngleAxisd(kPi, -Eigen::Vector3d::UnitX()));
  const Eigen::Vector3d v = quat_log(q);
  CHECK(v.x() == doctest::Approx(kPi).epsilon(1e-12));
  const Eigen::Quaterniond qy(Eigen::AngleAxisd(kPi, -Eigen::Vector3d::UnitY()));
  CHECK(quat_log(qy).y() == doctest::Approx(kPi).epsilon(1e-12));
}

TEST_CASE("boxminus of equal orientations is zero") {
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    const Eigen::Quaterniond q = random_quat(rng);
    CHECK(quat_boxminus(q, q).norm() <= 1e-12);
  }
}

TEST_CASE("boxminus of a yaw against identity is the yaw vector") {
  const Eigen::Quaterniond yaw(Eigen::AngleAxisd(kPi / 2, Eigen::Vector3d::UnitZ()));
  const Eigen::Vector3d d = quat_boxminus(yaw, Eigen::Quaterniond::Identity());
  CHECK((d - Eigen::Vector3d(0, 0, kPi / 2)).norm() <= 1e-12);
}

TEST_CASE("boxminus is antisymmetric for nearby orientations") {
  Rng rng(5);
  for (int i = 0; i < 300; ++i) {
    const Eigen::Quaterniond b = random_quat(rng);
    const Eigen::Quaterniond a = quat_boxplus(b, random_vec(rng, 0.5));
    CHECK((quat_boxminus(a, b) + quat_boxminus(b, a)).norm() <= 1e-9);
  }
}

TEST_CASE("boxplus undoes boxminus") {
  Rng rng(6);
  for (int i = 0; i < 500; ++i) {
    const Eigen::Quaterniond a = random_quat(rng);
    const Eigen::Quaterniond b = random_quat(rng);
    const Eigen::Quaterniond back = quat_boxplus(b, quat_boxminus(a, b));
    CHECK(back.angularDistance(a) <= 1e-9);
    CHECK(std::abs(back.norm() - 1.0) <= 1e-9);
  }
}

TEST_CASE("boxminus undoes boxplus below the pi radius") {
  Rng rng(7);
  for (int i = 0; i < 500; ++i) {
    const Eigen::Quaterniond b = random_quat(rng);
    Eigen::Vector3d v = random_vec(rng, 1.0);
    if (v.norm() >= kPi) v *= 0.9 * kPi / v.norm();
    CHECK((quat_boxminus(quat_boxplus(b, v), b) - v).norm() <= 1e-9);
  }
}

TEST_CASE("quat_angle matches Eigen's angularDistance") {
  Rng rng(8);
  for (int i = 0; i < 200; ++i) {
    const Eigen::Quaterniond a = random_quat(rng);
    const Eigen::Quaterniond b = random_quat(rng);
    CHECK(quat_angle(a, b) == doctest::Approx(a.angularDistance(b)).epsilon(1e-9));
    CHECK(quat_angle(a, b) >= 0.0);
    CHECK(quat_angle(a, b) <= kPi + 1e-12);
  }
}

TEST_CASE("quat_from_rpy composes z-y-x elementary rotations") {
  Rng rng(9);
  for (int i = 0; i < 200; ++i) {
    const double r = (rng.uniform() - 0.5) * 2 * kPi;
    const double p = (rng.uniform() - 0.5) * 2 * kPi;
    const double y = (rng.uniform() - 0.5) * 2 * kPi;
    const Eigen::Quaterniond ref = Eigen::AngleAxisd(y, Eigen::Vector3d::UnitZ()) *
                                   Eigen::AngleAxisd(p, Eigen::Vector3d::UnitY()) *
                                   Eigen::AngleAxisd(r, Eigen::Vector3d::UnitX());
    CHECK(quat_from_rpy(r, p, y).angularDistance(ref) <= 1e-12);
  }
}

TEST_CASE("rpy round trip inside the gimbal-safe range") {
  Rng rng(10);
  for (int i = 0; i < 300; ++i) {
    const double r = (rng.uniform() - 0.5) * 1.9 * kPi;
    const double p = (rng.uniform() - 0.5) * 0.98 * kPi / 2 * 2;
    const double y = (rng.uniform() - 0.5) * 1.9 * kPi;
    const Eigen::Vector3d rpy = rpy_from_quat(quat_from_rpy(r, p, y));
    CHECK(std::abs(wrap_angle(rpy.x() - r)) <= 1e-9);
    CHECK(std::abs(rpy.y() - p) <= 1e-9);
    CHECK(std::abs(wrap_angle(rpy.z() - y)) <= 1e-9);
  }
}

TEST_CASE("rpy pitch is clamped at the gimbal limit") {
  const Eigen::Vector3d rpy = rpy_from_quat(quat_from_rpy(0.0, kPi / 2, 0.0));
  CHECK(std::abs(rpy.y()) <= kPi / 2 + 1e-12);
  // The recovered rotation still matches even at the singularity.
  const Eigen::Quaterniond q = quat_from_rpy(rpy.x(), rpy.y(), rpy.z());
  CHECK(q.angularDistance(quat_from_rpy(0.0, kPi / 2, 0.0)) <= 1e-6);
}

TEST_CASE("skew reproduces the cross product") {
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    const Eigen::Vector3d a = random_vec(rng, 2.0);
    const Eigen::Vector3d b = random_vec(rng, 2.0);
    CHECK((skew(a) * b - a.cross(b)).norm() <= 1e-14);
    CHECK((skew(a) + skew(a).transpose()).norm() == doctest::Approx(0.0));
  }
}

TEST_CASE("wrap_angle maps into the half-open interval") {
  CHECK(wrap_angle(kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(-kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(3 * kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(2 * kPi) == doctest::Approx(0.0));
  CHECK(wrap_angle(0.0) == doctest::Approx(0.0));
  Rng rng(12);
  for (int i = 0; i < 300; ++i) {
    const double a = (rng.uniform() - 0.5) * 40.0;
    const double w = wrap_angle(a);
    CHECK(w > -kPi - 1e-12);
    CHECK(w <= kPi + 1e-12);
    CHECK(std::abs(std::remainder(w - a, 2 * kPi)) <= 1e-9);
  }
}

TEST_CASE("chained box operations preserve unit norm") {
  Rng rng(13);
  Eigen::Quaterniond q = Eigen::Quaterniond::Identity();
  for (int i = 0; i < 2000; ++i) q = quat_boxplus(q, random_vec(rng, 0.3));
  CHECK(std::abs(q.norm() - 1.0) <= 1e-9);
}

}  // namespace
}  // namespace quadplan
