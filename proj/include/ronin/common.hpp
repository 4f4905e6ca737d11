#ifndef RONIN_COMMON_HPP
#define RONIN_COMMON_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace ronin {

// ---------------------------------------------------------------------------
// Error hierarchy. Everything user-facing throws one of these; the CLI maps
// them to nonzero exit codes.
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad argument or out-of-range parameter.
struct ParameterError : Error {
  using Error::Error;
};

// File system / serialization failure.
struct IoError : Error {
  using Error::Error;
};

// Client unreachable, timed out, or broke the wire protocol; retriable.
struct TransportError : Error {
  using Error::Error;
};

// A grounding client answered, but the answer is unusable.
struct GroundingError : Error {
  using Error::Error;
};

// Missing external tool (e.g. video encoder) with fallback disabled.
struct EnvironmentError : Error {
  using Error::Error;
};

// Non-finite activation or loss; training fails fast on these.
struct NumericError : Error {
  using Error::Error;
};

inline void check_arg(bool cond, const std::string& msg) {
  if (!cond) throw ParameterError(msg);
}

// ---------------------------------------------------------------------------
// Deterministic hashing and RNG.
//
// All randomness in the project flows through Rng so that results are
// reproducible bit-for-bit regardless of the standard library version.
// Streams are split from a root seed by hashing a label path, which keeps
// parallel and serial runs in agreement.
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// FNV-1a, used for content hashes and stream labels.
inline std::uint64_t hash_bytes(const void* data, std::size_t n,
                                std::uint64_t seed = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t hash_str(std::string_view s,
                              std::uint64_t seed = 0xcbf29ce484222325ull) {
  return hash_bytes(s.data(), s.size(), seed);
}

// xoshiro256** by Blackman & Vigna; tiny, fast, stable across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) {
    std::uint64_t x = seed;
    for (auto& w : s_) w = x = splitmix64(x);
    has_spare_ = false;
  }

  // Derived stream: same root seed + same labels -> same stream.
  Rng child(std::uint64_t label) const {
    return Rng(splitmix64(s_[0] ^ splitmix64(label ^ 0xa0761d6478bd642full)));
  }
  Rng child(std::string_view label) const { return child(hash_str(label)); }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n) {
    // Modulo bias is negligible for n << 2^64 and keeps the stream simple.
    return next_u64() % n;
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Standard normal via Box-Muller (explicit, stdlib-independent).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Poisson(lambda). Knuth for small lambda, rounded normal approximation
  // for large lambda (exactness is irrelevant above ~30 counts).
  std::int64_t poisson(double lambda) {
    if (lambda <= 0.0) return 0;
    if (lambda < 30.0) {
      const double limit = std::exp(-lambda);
      double prod = uniform();
      std::int64_t k = 0;
      while (prod > limit) {
        prod *= uniform();
        ++k;
      }
      return k;
    }
    const double x = std::round(normal(lambda, std::sqrt(lambda)));
    return x < 0.0 ? 0 : static_cast<std::int64_t>(x);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_;
};

// ---------------------------------------------------------------------------
// Minimal parallel-for. Work items must be independent and write disjoint
// outputs; with jobs <= 1 it degenerates to a serial loop.
// ---------------------------------------------------------------------------

inline void parallel_for(std::size_t n, int jobs,
                         const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const int workers = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(jobs), n));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::vector<std::exception_ptr> errors(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = static_cast<std::size_t>(w); i < n;
             i += static_cast<std::size_t>(workers)) {
          fn(i);
        }
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace ronin

#endif  // RONIN_COMMON_HPP
