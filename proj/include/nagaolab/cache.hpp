#pragma once

// Per-curve on-disk cache of Frobenius traces.
//
//   NAGAOLAB-CACHE v1
//   <degree> <fingerprint>
//   p,a
//   ...
//
// Text, LF line endings, decimal integers, strictly ascending p. The file is
// append-only and covers every good prime up to its last record.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "nagaolab/curves.hpp"
#include "nagaolab/error.hpp"

namespace nagaolab {

inline constexpr const char* kCacheMagic = "NAGAOLAB-CACHE v1";

// FNV-1a over the canonical printed form of f.
inline std::uint64_t curve_fingerprint(const IntPolynomial& f) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : f.to_string()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

class TraceCache {
 public:
  TraceCache(std::filesystem::path dir, const CurveSpec& curve)
      : curve_(curve),
        path_(std::move(dir) / ("curve-" + std::to_string(curve_fingerprint(curve.f())) + ".cache")),
        fingerprint_line_(std::to_string(curve.degree()) + " " + std::to_string(curve_fingerprint(curve.f()))) {}

  const std::filesystem::path& path() const noexcept { return path_; }

  // Reads and validates the cache. A missing file is an empty cache; a
  // malformed one is quarantined and reported as cache_corrupt.
  std::vector<TraceRecord> load() const {
    std::vector<TraceRecord> out;
    std::ifstream in(path_, std::ios::binary);
    if (!in) return out;
    std::string line;
    if (!std::getline(in, line) || line != kCacheMagic) corrupt("bad header");
    if (!std::getline(in, line) || line != fingerprint_line_) corrupt("fingerprint does not match the curve");
    std::size_t line_no = 2;
    while (std::getline(in, line)) {
      ++line_no;
      const auto comma = line.find(',');
      if (comma == std::string::npos) corrupt("line " + std::to_string(line_no) + " is not 'p,a'");
      u64 p = 0;
      i64 a = 0;
      try {
        std::size_t used = 0;
        p = std::stoull(line.substr(0, comma), &used);
        if (used != comma) throw std::invalid_argument("p");
        const std::string tail = line.substr(comma + 1);
        a = std::stoll(tail, &used);
        if (used != tail.size()) throw std::invalid_argument("a");
      } catch (const std::exception&) {
        corrupt("line " + std::to_string(line_no) + " has malformed integers");
      }
      if (!out.empty() && p <= out.back().p.value()) corrupt("line " + std::to_string(line_no) + " is not ascending");
      if (p >= kPrimeLimit || !is_prime(p) || curve_.is_bad(p))
        corrupt("line " + std::to_string(line_no) + " names a prime the curve does not sweep");
      try {
        detail::check_weil_bound(curve_, p, a);
      } catch (const Error&) {
        corrupt("line " + std::to_string(line_no) + " violates the Weil bound");
      }
      out.push_back({Prime::unchecked(p), a});
    }
    return out;
  }

  // Appends ascending records that all lie beyond the current contents.
  void append(const std::vector<TraceRecord>& records) const {
    if (records.empty()) return;
    const bool fresh = !std::filesystem::exists(path_);
    if (fresh) std::filesystem::create_directories(path_.parent_path());
    std::ostringstream buf;
    if (fresh) buf << kCacheMagic << '\n' << fingerprint_line_ << '\n';
    for (const auto& r : records) buf << r.p.value() << ',' << r.a << '\n';
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    out << buf.str();
    out.flush();
    if (!out) throw Error(ErrorKind::internal, "failed writing cache " + path_.string());
  }

  // Recomputes every cached record; any disagreement quarantines the file.
  void verify(unsigned workers = 1) const {
    const auto records = load();
    std::vector<Prime> primes;
    for (const auto& r : records) primes.push_back(r.p);
    auto fresh = sweep_primes<TraceRecord>(primes, workers, [&](Prime p) -> std::optional<TraceRecord> {
      return TraceRecord{p, trace_with_table(curve_, ResidueTable::make(p))};
    });
    for (std::size_t i = 0; i < records.size(); ++i)
      if (fresh.values[i] != records[i])
        corrupt("cached a_" + std::to_string(records[i].p.value()) + " = " + std::to_string(records[i].a) +
                " disagrees with recomputed " + std::to_string(fresh.values[i].a));
  }

 private:
  [[noreturn]] void corrupt(const std::string& why) const {
    std::filesystem::path quarantine = path_;
    quarantine += ".corrupt";
    std::error_code ec;
    std::filesystem::rename(path_, quarantine, ec);
    throw Error(ErrorKind::cache_corrupt,
                "trace cache " + path_.string() + " is corrupt (" + why + "); moved to " + quarantine.string());
  }

  CurveSpec curve_;
  std::filesystem::path path_;
  std::string fingerprint_line_;
};

}  // namespace nagaolab
