#pragma once

// Seed derivation. Every replica, scale and experiment arm draws from its own
// generator whose seed is a pure function of the master seed, so results do
// not depend on how work is scheduled across threads.
//
// Contract (part of the lfpp/1 file format):
//   splitmix64(z):   z += 0x9E3779B97F4A7C15;
//                    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9;
//                    z = (z ^ (z >> 27)) * 0x94D049BB133111EB;
//                    return z ^ (z >> 31);
//   derive_seed(master, index) = splitmix64(master ^ splitmix64(index))
//   stream tags are mixed the same way: derive_seed(master, tag).
// Samples come from std::mt19937_64 seeded with the derived seed and
// std::normal_distribution<double>.

#include <cstdint>
#include <random>
#include <string_view>

namespace lfpp {

constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index));
}

/// FNV-1a of a short label; used to give named experiment arms their own stream.
constexpr std::uint64_t stream_tag(std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::string_view label) {
  return derive_seed(master, stream_tag(label));
}

class NormalSource {
 public:
  explicit NormalSource(std::uint64_t seed) : engine_(seed) {}
  double operator()() { return dist_(engine_); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> dist_{0.0, 1.0};
};

}  // namespace lfpp
