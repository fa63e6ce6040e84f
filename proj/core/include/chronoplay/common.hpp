#pragma once
// Shared primitives: time, content hashing, text utilities, errors,
// and the seeded RNG every stochastic step draws from.

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace chronoplay {

// UTC seconds since the Unix epoch.
using Instant = std::int64_t;

constexpr Instant kSecondsPerDay = 86400;
// Calendar-free fixed span: 1 month = 30 days.
constexpr Instant kSecondsPerMonth = 30 * kSecondsPerDay;

// A normalized entity string (lowercase, single-spaced, trimmed).
using EntityId = std::string;

enum class ErrorKind {
  config,
  validation,
  parse,
  contract,
  provider,
  judge,
  synthesis,
  grounding,
  sampling,
  extraction,
  classification,
  retrieval,
  exhausted,
  lookup,
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

  // Process exit code: provider/judge failures are transport-class (2),
  // everything else is a validation-class failure (1).
  int exit_code() const {
    return (kind_ == ErrorKind::provider || kind_ == ErrorKind::judge) ? 2 : 1;
  }

private:
  ErrorKind kind_;
};

const char* error_kind_name(ErrorKind kind);

// FNV-1a 64-bit. The one hash used for content ids, kb versions, and the
// mock providers; must stay byte-stable across platforms.
std::uint64_t fnv1a64(std::string_view data,
                      std::uint64_t seed = 1469598103934665603ULL);
std::uint64_t fnv1a64_u64(std::uint64_t value, std::uint64_t seed);
std::string hex64(std::uint64_t value);

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);
// Trim plus inner whitespace runs collapsed to single spaces.
std::string collapse_whitespace(std::string_view s);
// Lowercased alphanumeric tokens; everything else is a separator.
std::vector<std::string> tokenize(std::string_view s);

bool starts_with_any(std::string_view s, const std::vector<std::string>& prefixes);

// Proleptic Gregorian civil date to UTC midnight.
Instant civil_to_instant(int year, int month, int day);
// Accepts integer epoch seconds or YYYY-MM-DD.
std::optional<Instant> parse_instant(std::string_view s);
// Durations like "90s", "15m", "2h", "5d", "1w", "6mo" (mo = 30 days).
std::optional<Instant> parse_duration(std::string_view s);

// splitmix64-based deterministic generator with named substreams so that
// one run seed fans out into independent, reproducible streams.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  Rng substream(std::string_view name) const {
    return Rng(fnv1a64(name, state_ ^ 0x9e3779b97f4a7c15ULL));
  }

  std::uint64_t next_u64();

  // Uniform draw in [0, n); n must be > 0.
  std::size_t bounded(std::size_t n);

private:
  std::uint64_t state_;
};

// Runs fn(i) for i in [0, n) across `jobs` threads. Results must be written
// to pre-sized storage indexed by i so aggregation stays order-independent.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace chronoplay
