#include "test_support.hpp"

#include <cstdio>
#include <cstdlib>

namespace lpbound::test {

std::uint64_t test_seed(const std::string& suite, std::uint64_t fallback) {
  std::uint64_t seed = fallback;
  if (const char* env = std::getenv("LPBOUND_SEED")) seed = std::strtoull(env, nullptr, 10);
  std::printf("[seed] %s = %llu\n", suite.c_str(), static_cast<unsigned long long>(seed));
  return seed;
}

}  // namespace lpbound::test
