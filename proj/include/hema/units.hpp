#pragma once

#include <numbers>

// Unit conversions at the ingestion boundary. Everything inside the library is SI.
namespace hema::units {

inline constexpr double kMega = 1.0e6;

constexpr double MW(double v) { return v * kMega; }
constexpr double MJ(double v) { return v * kMega; }
constexpr double to_MW(double watts) { return watts / kMega; }
constexpr double to_MJ(double joules) { return joules / kMega; }

/// kg/MJ -> kg/J
constexpr double kg_per_MJ(double v) { return v / kMega; }
constexpr double to_kg_per_MJ(double kg_per_J) { return kg_per_J * kMega; }

constexpr double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / std::numbers::pi; }

}  // namespace hema::units
