#pragma once

#include <numbers>

namespace orbitedge {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kDegToRad = kPi / 180.0;
inline constexpr double kRadToDeg = 180.0 / kPi;

inline constexpr double kSpeedOfLight = 299'792'458.0;        // m/s
inline constexpr double kEarthMu = 3.986004418e14;             // m^3/s^2
inline constexpr double kEarthRadiusKm = 6371.0;               // mean radius
inline constexpr double kEarthRotationRate = 7.2921159e-5;     // rad/s

constexpr double deg2rad(double deg) { return deg * kDegToRad; }
constexpr double rad2deg(double rad) { return rad * kRadToDeg; }

}  // namespace orbitedge
