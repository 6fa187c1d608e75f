#include "cospomdp/agent.hpp"

#include <cstring>

namespace cospomdp {

std::uint64_t hash_distribution(const std::vector<double>& p) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double x : p) {
    unsigned char bytes[sizeof x];
    std::memcpy(bytes, &x, sizeof x);
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

std::uint64_t Agent::belief_hash() const { return hash_distribution(target_belief()); }

}  // namespace cospomdp
