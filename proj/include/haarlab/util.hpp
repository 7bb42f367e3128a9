#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace haarlab {

// Thrown on any violated operation precondition; the message names the
// precondition that failed.
struct precondition_error : std::invalid_argument {
  explicit precondition_error(const std::string& what) : std::invalid_argument(what) {}
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw precondition_error(msg);
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic per-task stream derivation: stream i of master seed s is
// seeded with splitmix64(s ^ i), so parallel reductions over streams do not
// depend on scheduling.
inline std::mt19937_64 make_stream(std::uint64_t master, std::uint64_t stream) {
  return std::mt19937_64(splitmix64(master ^ (0x100000001b3ULL * (stream + 1))));
}

}  // namespace haarlab
