#include "vorocrust/parameters.hpp"

#include <string>

#include "vorocrust/random.hpp"

namespace vorocrust {

void Parameters::validate() const {
  if (!(theta_sharp > 0.0 && theta_sharp < kPi / 2.0)) throw Error("theta_sharp must be in (0, 90) degrees");
  if (!(lipschitz > 0.0 && lipschitz < 1.0)) throw Error("lipschitz must be in (0, 1)");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("alpha must be in (0, 1)");
  if (!(sizing > 0.0)) throw Error("sizing must be positive");
  if (smoothing_iterations < 0) throw Error("smoothing_iterations must be non-negative");
  if (miss_limit < 1) throw Error("miss_limit must be positive");
  if (!(density_rejection_prob >= 0.0 && density_rejection_prob <= 1.0))
    throw Error("density_rejection_prob must be in [0, 1]");
  if (max_sliver_iterations < 1) throw Error("max_sliver_iterations must be positive");
}

Parameters Parameters::desk_profile() {
  Parameters p;
  p.crease_supersamples = 10000;
  p.surface_supersamples = 100000;
  return p;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

Rng stage_rng(std::uint64_t seed, std::string_view stage) {
  return Rng(splitmix64(seed ^ splitmix64(fnv1a(stage))));
}

Point3 sample_triangle(Rng& rng, const Point3& a, const Point3& b, const Point3& c) {
  double u = uniform01(rng);
  double v = uniform01(rng);
  if (u + v > 1.0) {
    u = 1.0 - u;
    v = 1.0 - v;
  }
  return a + (b - a) * u + (c - a) * v;
}

Vec3 random_direction(Rng& rng, bool planar) {
  if (planar) {
    const double t = 2.0 * kPi * uniform01(rng);
    return {std::cos(t), std::sin(t), 0.0};
  }
  const double z = 2.0 * uniform01(rng) - 1.0;
  const double t = 2.0 * kPi * uniform01(rng);
  const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {s * std::cos(t), s * std::sin(t), z};
}

}  // namespace vorocrust
