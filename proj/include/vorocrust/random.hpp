#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "vorocrust/geometry.hpp"

namespace vorocrust {

using Rng = std::mt19937_64;

/// Independent generator for one pipeline stage: the stage name is hashed
/// into the stream so stages can be re-run in isolation.
Rng stage_rng(std::uint64_t seed, std::string_view stage);

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

/// Uniform point on a triangle.
Point3 sample_triangle(Rng& rng, const Point3& a, const Point3& b, const Point3& c);
/// Uniform unit vector in 3D, or in the xy-plane when `planar` is set.
Vec3 random_direction(Rng& rng, bool planar = false);

}  // namespace vorocrust
