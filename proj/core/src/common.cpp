#include "chronoplay/common.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <future>
#include <thread>

namespace chronoplay {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config: return "config";
    case ErrorKind::validation: return "validation";
    case ErrorKind::parse: return "parse";
    case ErrorKind::contract: return "contract";
    case ErrorKind::provider: return "provider";
    case ErrorKind::judge: return "judge";
    case ErrorKind::synthesis: return "synthesis";
    case ErrorKind::grounding: return "grounding";
    case ErrorKind::sampling: return "sampling";
    case ErrorKind::extraction: return "extraction";
    case ErrorKind::classification: return "classification";
    case ErrorKind::retrieval: return "retrieval";
    case ErrorKind::exhausted: return "exhausted";
    case ErrorKind::lookup: return "lookup";
  }
  return "unknown";
}

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= static_cast<std::uint64_t>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t fnv1a64_u64(std::uint64_t value, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (int i = 0; i < 8; ++i) {
    h ^= (value >> (i * 8)) & 0xffULL;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[value & 0xf];
    value >>= 4;
  }
  return out;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool in_space = true;  // leading whitespace drops
  for (unsigned char c : s) {
    if (std::isspace(c)) {
      if (!in_space) out.push_back(' ');
      in_space = true;
    } else {
      out.push_back(static_cast<char>(c));
      in_space = false;
    }
  }
  if (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : s) {
    if (std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

bool starts_with_any(std::string_view s, const std::vector<std::string>& prefixes) {
  for (const auto& p : prefixes) {
    if (s.substr(0, p.size()) == p) return true;
  }
  return false;
}

Instant civil_to_instant(int year, int month, int day) {
  // Days-from-civil (proleptic Gregorian), era-based.
  const int y = year - (month <= 2 ? 1 : 0);
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy =
      static_cast<unsigned>((153 * (month + (month > 2 ? -3 : 9)) + 2) / 5 + day - 1);
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  const std::int64_t days =
      static_cast<std::int64_t>(era) * 146097 + static_cast<std::int64_t>(doe) - 719468;
  return days * kSecondsPerDay;
}

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isdigit(c); });
}

int days_in_month(int year, int month) {
  static const int lengths[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (month == 2) {
    bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    return leap ? 29 : 28;
  }
  return lengths[month - 1];
}

}  // namespace

std::optional<Instant> parse_instant(std::string_view s) {
  std::string t = trim(s);
  if (t.empty()) return std::nullopt;
  bool negative = t[0] == '-';
  if (all_digits(negative ? std::string_view(t).substr(1) : std::string_view(t))) {
    Instant v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec == std::errc() && ptr == t.data() + t.size()) return v;
    return std::nullopt;
  }
  // YYYY-MM-DD
  if (t.size() == 10 && t[4] == '-' && t[7] == '-') {
    std::string_view ys = std::string_view(t).substr(0, 4);
    std::string_view ms = std::string_view(t).substr(5, 2);
    std::string_view ds = std::string_view(t).substr(8, 2);
    if (!all_digits(ys) || !all_digits(ms) || !all_digits(ds)) return std::nullopt;
    int y = std::stoi(std::string(ys));
    int m = std::stoi(std::string(ms));
    int d = std::stoi(std::string(ds));
    if (m < 1 || m > 12 || d < 1 || d > days_in_month(y, m)) return std::nullopt;
    return civil_to_instant(y, m, d);
  }
  return std::nullopt;
}

std::optional<Instant> parse_duration(std::string_view s) {
  std::string t = trim(s);
  if (t.empty()) return std::nullopt;
  std::size_t i = 0;
  while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) ++i;
  if (i == 0) return std::nullopt;
  Instant value = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + i, value);
  if (ec != std::errc()) return std::nullopt;
  std::string unit = to_lower(std::string_view(t).substr(i));
  if (unit == "s") return value;
  if (unit == "m" || unit == "min") return value * 60;
  if (unit == "h") return value * 3600;
  if (unit == "d" || unit.empty()) return value * kSecondsPerDay;
  if (unit == "w") return value * 7 * kSecondsPerDay;
  if (unit == "mo") return value * kSecondsPerMonth;
  return std::nullopt;
}

std::uint64_t Rng::next_u64() {
  // splitmix64
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::size_t Rng::bounded(std::size_t n) {
  if (n == 0) throw Error(ErrorKind::contract, "Rng::bounded: n must be > 0");
  // Multiply-shift reduction; bias is negligible for the draw sizes used here.
  unsigned __int128 wide = static_cast<unsigned __int128>(next_u64()) *
                           static_cast<unsigned __int128>(n);
  return static_cast<std::size_t>(wide >> 64);
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  if (jobs <= 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
  std::vector<std::future<void>> futures;
  futures.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    futures.push_back(std::async(std::launch::async, [&, w]() {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    }));
  }
  for (auto& f : futures) f.get();  // rethrows the first captured exception
}

}  // namespace chronoplay
