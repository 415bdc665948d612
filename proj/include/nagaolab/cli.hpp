#pragma once

// Experiment driver behind the nagaolab command-line tool: configuration,
// trace caching, prime-sweep orchestration and CSV/JSON reports.

#include <json.hpp>

#include <atomic>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "nagaolab/cache.hpp"
#include "nagaolab/curves.hpp"
#include "nagaolab/error.hpp"
#include "nagaolab/parse.hpp"
#include "nagaolab/sato_tate.hpp"
#include "nagaolab/twist_surface.hpp"

namespace nagaolab::cli {

inline constexpr u64 kHardCap = 10'000'000;

enum class ExitCode : int {
  ok = 0,
  config = 1,
  bad_curve = 2,
  cap_exceeded = 3,
  cache_corrupt = 4,
  internal = 10,
  interrupted = 130,
};

inline ExitCode exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::parse:
    case ErrorKind::domain:
    case ErrorKind::bad_prime: return ExitCode::config;
    case ErrorKind::bad_curve: return ExitCode::bad_curve;
    case ErrorKind::cap_exceeded: return ExitCode::cap_exceeded;
    case ErrorKind::cache_corrupt: return ExitCode::cache_corrupt;
    case ErrorKind::internal: return ExitCode::internal;
  }
  return ExitCode::internal;
}

struct ExperimentConfig {
  std::string command;  // trace | lpoly | nagao | moments | st-classify | peterson | factor-check
  std::string f;
  std::string D;        // empty: D = f for nagao; "auto-peterson" for factor-check
  std::string sigma;
  u64 N = 100000;
  std::string grid;     // "", "geometric:k" or comma-separated cutoffs
  std::string mode = "fast-twist";
  i64 r = 2;
  std::vector<std::string> s_curves;
  unsigned threads = 1;
  std::string cache_dir;  // NAGAOLAB_CACHE overrides
  std::string output;     // empty: standard output
  std::string format = "csv";
  bool verify_cache = false;
  double tolerance = kDefaultClassTolerance;
  std::string st_table;  // data file; empty: compiled-in table
  bool quiet = false;
};

// Set by the interrupt handler; sweeps stop at the next block boundary.
inline std::atomic<bool>& interrupt_flag() {
  static std::atomic<bool> flag{false};
  return flag;
}

class Interrupted : public std::exception {
 public:
  const char* what() const noexcept override { return "interrupted"; }
};

using Cell = std::variant<std::monostate, std::string, i64, u64, double>;

struct Report {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
  nlohmann::ordered_json metadata = nlohmann::ordered_json::object();
};

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string csv_cell(const Cell& c) {
  struct V {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(const std::string& s) const {
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string q = "\"";
      for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
      return q + "\"";
    }
    std::string operator()(i64 v) const { return std::to_string(v); }
    std::string operator()(u64 v) const { return std::to_string(v); }
    std::string operator()(double v) const { return format_double(v); }
  };
  return std::visit(V{}, c);
}

inline std::string render_csv(const Report& r) {
  std::string out;
  for (std::size_t i = 0; i < r.header.size(); ++i) out += (i ? "," : "") + r.header[i];
  out += '\n';
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_cell(row[i]);
    out += '\n';
  }
  return out;
}

inline std::string render_json(const Report& r, const std::string& command) {
  nlohmann::ordered_json doc;
  doc["command"] = command;
  doc["metadata"] = r.metadata;
  doc["columns"] = r.header;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : r.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      struct V {
        nlohmann::ordered_json operator()(std::monostate) const { return nullptr; }
        nlohmann::ordered_json operator()(const std::string& s) const { return s; }
        nlohmann::ordered_json operator()(i64 v) const { return v; }
        nlohmann::ordered_json operator()(u64 v) const { return v; }
        nlohmann::ordered_json operator()(double v) const { return v; }
      };
      obj[r.header[i]] = std::visit(V{}, row[i]);
    }
    rows.push_back(std::move(obj));
  }
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

namespace detail {

inline std::vector<u64> parse_grid(const std::string& text, u64 n_max) {
  if (text.empty()) return geometric_grid(n_max);
  if (text.rfind("geometric:", 0) == 0) {
    try {
      const int k = std::stoi(text.substr(10));
      if (k < 1) throw std::invalid_argument("k");
      return geometric_grid(n_max, static_cast<std::size_t>(k));
    } catch (const std::exception&) {
      throw Error(ErrorKind::parse, "grid \"" + text + "\": expected geometric:<k> with k >= 1");
    }
  }
  std::vector<u64> grid;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      grid.push_back(std::stoull(item, &used));
      if (used != item.size()) throw std::invalid_argument("grid");
    } catch (const std::exception&) {
      throw Error(ErrorKind::parse, "grid entry \"" + item + "\" is not an integer");
    }
  }
  return grid;
}

inline TwistMode parse_mode(const std::string& m) {
  if (m == "fast-twist") return TwistMode::fast_twist;
  if (m == "fiberwise") return TwistMode::fiberwise;
  throw Error(ErrorKind::parse, "mode must be fast-twist or fiberwise, got \"" + m + "\"");
}

inline void progress(const ExperimentConfig& cfg, const std::string& msg) {
  if (!cfg.quiet) std::cerr << "[nagaolab] " << msg << '\n';
}

inline std::string resolved_cache_dir(const ExperimentConfig& cfg) {
  if (const char* env = std::getenv("NAGAOLAB_CACHE"); env && *env) return env;
  return cfg.cache_dir;
}

inline std::string trace_convention_note() {
  return "a_p = p + 1 - #C(F_p) for both genera (sum of Frobenius eigenvalues; the negative of the linear "
         "coefficient of L_p(T))";
}

// Traces of y^2 = f at all good primes <= n, served from the cache where
// possible and extended in ascending blocks otherwise. Only fully completed
// blocks ever reach the cache file.
inline std::vector<TraceRecord> obtain_traces(const CurveSpec& curve, u64 n, const ExperimentConfig& cfg) {
  const std::string dir = resolved_cache_dir(cfg);
  std::optional<TraceCache> cache;
  std::vector<TraceRecord> records;
  if (!dir.empty()) {
    cache.emplace(dir, curve);
    if (cfg.verify_cache) {
      cache->verify(cfg.threads);
      progress(cfg, "cache " + cache->path().string() + " verified");
    }
    records = cache->load();
  }
  const u64 start = records.empty() ? 3 : records.back().p.value() + 1;
  if (start <= n) {
    const auto primes = primes_in(start, n + 1);
    const std::size_t chunk = kSweepBlock * std::max(1u, cfg.threads) * 4;
    for (std::size_t lo = 0; lo < primes.size(); lo += chunk) {
      const auto span = std::span<const Prime>(primes).subspan(lo, std::min(chunk, primes.size() - lo));
      auto res = sweep_primes<TraceRecord>(
          span, cfg.threads,
          [&](Prime p) -> std::optional<TraceRecord> {
            if (curve.is_bad(p)) return std::nullopt;
            const i64 a = trace_with_table(curve, ResidueTable::make(p));
            nagaolab::detail::check_weil_bound(curve, p, a);
            return TraceRecord{p, a};
          },
          &interrupt_flag());
      if (cache) cache->append(res.values);
      records.insert(records.end(), res.values.begin(), res.values.end());
      if (res.primes_done != span.size()) throw Interrupted();
      progress(cfg, "traces of y^2 = " + curve.f().to_string() + " complete to p = " +
                        std::to_string(span.back().value()));
    }
  }
  std::erase_if(records, [n](const TraceRecord& r) { return r.p.value() > n; });
  return records;
}

template <typename BadFn>
inline void write_bad_primes_sidecar(const ExperimentConfig& cfg, u64 n, BadFn&& bad_reason) {
  if (cfg.output.empty()) return;
  std::ofstream out(cfg.output + ".bad-primes.csv", std::ios::binary);
  out << "p,reason\n";
  for (Prime p : primes_in(2, n + 1))
    if (auto r = bad_reason(p.value())) out << p.value() << ',' << to_string(*r) << '\n';
}

inline void require_cap(u64 n, u64 cap, const char* what) {
  if (n > cap)
    throw Error(ErrorKind::cap_exceeded,
                std::string(what) + " = " + std::to_string(n) + " exceeds the cap " + std::to_string(cap));
}

inline IntPolynomial require_poly(const std::string& text, const char* flag) {
  if (text.empty()) throw Error(ErrorKind::parse, std::string("missing required option ") + flag);
  return parse_polynomial(text);
}

inline Report run_trace(const ExperimentConfig& cfg) {
  const CurveSpec curve = curve_from_poly(require_poly(cfg.f, "--f"));
  require_cap(cfg.N, kHardCap, "N");
  Report r;
  r.header = {"p", "a"};
  for (const auto& t : obtain_traces(curve, cfg.N, cfg)) r.rows.push_back({t.p.value(), t.a});
  r.metadata["trace_convention"] = trace_convention_note();
  write_bad_primes_sidecar(cfg, cfg.N, [&](u64 p) { return curve.bad_reason(p); });
  return r;
}

inline Report run_lpoly(const ExperimentConfig& cfg) {
  const CurveSpec curve = curve_from_poly(require_poly(cfg.f, "--f"));
  if (curve.genus() != 2) throw Error(ErrorKind::bad_curve, "lpoly needs a genus 2 curve (deg f = 5 or 6)");
  require_cap(cfg.N, kDefaultLPolyCap, "N");
  Report r;
  r.header = {"p", "a", "b"};
  const auto primes = primes_in(3, cfg.N + 1);
  auto res = sweep_primes<LPolynomial2>(
      primes, cfg.threads,
      [&](Prime p) -> std::optional<LPolynomial2> {
        if (curve.is_bad(p)) return std::nullopt;
        return l_polynomial_genus2(curve, p);
      },
      &interrupt_flag());
  if (res.primes_done != primes.size()) throw Interrupted();
  for (const auto& l : res.values) r.rows.push_back({l.p.value(), l.a, l.b});
  r.metadata["trace_convention"] = trace_convention_note();
  r.metadata["l_polynomial"] = "L_p(T) = 1 - a T + b T^2 - p a T^3 + p^2 T^4";
  write_bad_primes_sidecar(cfg, cfg.N, [&](u64 p) { return curve.bad_reason(p); });
  return r;
}

inline Report run_nagao(const ExperimentConfig& cfg) {
  const IntPolynomial f = require_poly(cfg.f, "--f");
  const IntPolynomial D = cfg.D.empty() ? f : parse_polynomial(cfg.D);
  const TwistSurfaceSpec surface = TwistSurfaceSpec::make(f, D, parse_mode(cfg.mode));
  require_cap(cfg.N, kHardCap, "N");
  auto grid = parse_grid(cfg.grid, cfg.N);
  nagaolab::detail::validate_grid(grid, cfg.N, kHardCap);
  const auto fiber = obtain_traces(surface.fiber_curve(), cfg.N, cfg);
  auto records = average_traces_from(surface, fiber, cfg.threads, &interrupt_flag());
  const NagaoSeries series = nagao_series_from_records(std::move(records), std::move(grid));
  Report r;
  r.header = {"N", "S1", "S2", "n_primes"};
  for (std::size_t i = 0; i < series.grid.size(); ++i)
    r.rows.push_back({series.grid[i], series.s1[i], series.s2[i], static_cast<u64>(series.n_primes[i])});
  r.metadata["trace_convention"] = trace_convention_note();
  r.metadata["singular_fibers"] = "fibers with p | D(t) contribute 0 (chi(0) = 0); no singular-fiber cohomology";
  r.metadata["S2_denominator"] = "number of good primes <= N";
  write_bad_primes_sidecar(cfg, cfg.N, [&](u64 p) { return surface.bad_reason(p); });
  return r;
}

inline Report run_moments(const ExperimentConfig& cfg) {
  const CurveSpec curve = curve_from_poly(require_poly(cfg.f, "--f"));
  require_cap(cfg.N, kHardCap, "N");
  const auto traces = obtain_traces(curve, cfg.N, cfg);
  if (traces.empty()) throw Error(ErrorKind::domain, "no good primes <= N");
  const MomentReport m = empirical_moments(traces, cfg.N);
  Report r;
  r.header = {"N",          "n_primes",     "second_moment", "fourth_moment",
              "zero_fraction", "ks_sato_tate", "ks_uniform",    "ks_half_uniform_dirac"};
  std::vector<Cell> row{m.n, static_cast<u64>(m.n_primes), m.second_moment, m.fourth_moment, m.zero_fraction};
  if (curve.genus() == 1) {
    std::vector<double> angles;
    for (const auto& t : traces) angles.push_back(normalized_angle(t));
    for (auto kind : {STMeasure1D::Kind::sato_tate, STMeasure1D::Kind::uniform, STMeasure1D::Kind::half_uniform_dirac})
      row.emplace_back(ks_distance(angles, STMeasure1D(kind)));
  } else {
    row.insert(row.end(), 3, std::monostate{});
  }
  r.rows.push_back(std::move(row));
  r.metadata["trace_convention"] = trace_convention_note();
  write_bad_primes_sidecar(cfg, cfg.N, [&](u64 p) { return curve.bad_reason(p); });
  return r;
}

inline Report run_st_classify(const ExperimentConfig& cfg) {
  const CurveSpec curve = curve_from_poly(require_poly(cfg.f, "--f"));
  require_cap(cfg.N, kHardCap, "N");
  const auto table = load_st_table(cfg.st_table);
  const auto traces = obtain_traces(curve, cfg.N, cfg);
  if (traces.empty()) throw Error(ErrorKind::domain, "no good primes <= N");
  const MomentReport m = empirical_moments(traces, cfg.N);
  const STClassification cls = identify_st_class(m, cfg.tolerance, table);
  Report r;
  r.header = {"N", "second_moment", "moment_class", "candidates", "predicted_rank"};
  std::string names;
  for (const auto& row : cls.candidates) names += (names.empty() ? "" : ";") + row.name;
  if (cls.moment_class)
    r.rows.push_back({cfg.N, m.second_moment, static_cast<i64>(*cls.moment_class), names,
                      static_cast<i64>(predict_rank(curve.f(), *cls.moment_class))});
  else
    r.rows.push_back({cfg.N, m.second_moment, std::monostate{}, std::string{}, std::monostate{}});
  r.metadata["no_class_within_tolerance"] = cls.no_class;
  r.metadata["identification"] = "by second-moment class only; groups within a class are not distinguished";
  if (cls.no_class) progress(cfg, "no Sato-Tate moment class within tolerance " + format_double(cfg.tolerance));
  write_bad_primes_sidecar(cfg, cfg.N, [&](u64 p) { return curve.bad_reason(p); });
  return r;
}

inline PetersonCurve peterson_from(const ExperimentConfig& cfg, const IntPolynomial& f) {
  if (cfg.sigma.empty()) throw Error(ErrorKind::parse, "missing required option --sigma");
  try {
    return peterson_D(f, parse_mobius(cfg.sigma));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::domain) throw Error(ErrorKind::parse, e.what());
    throw;
  }
}

inline Report run_peterson(const ExperimentConfig& cfg) {
  const IntPolynomial f = require_poly(cfg.f, "--f");
  const PetersonCurve pc = peterson_from(cfg, f);
  Report r;
  r.header = {"f", "sigma", "D", "square_scale"};
  r.rows.push_back({f.to_string(), parse_mobius(cfg.sigma).to_string(), pc.integral.to_string('T'),
                    BigInt(pc.denominator_lcm * pc.denominator_lcm).str()});
  return r;
}

inline Report run_factor_check(const ExperimentConfig& cfg) {
  const IntPolynomial f = require_poly(cfg.f, "--f");
  require_cap(cfg.N, kHardCap, "N");
  IntPolynomial D;
  if (cfg.D == "auto-peterson")
    D = peterson_from(cfg, f).integral;
  else
    D = require_poly(cfg.D, "--D");
  std::vector<IntPolynomial> others;
  for (const auto& s : cfg.s_curves) others.push_back(parse_polynomial(s));
  const FactorizationReport rep = verify_mixed_factorization(D, f, cfg.r, others, cfg.N, cfg.threads);
  Report r;
  r.header = {"result", "least_failing_prime", "a_D", "predicted", "primes_checked"};
  if (rep.pass)
    r.rows.push_back({std::string("pass"), std::monostate{}, std::monostate{}, std::monostate{},
                      static_cast<u64>(rep.primes_checked)});
  else
    r.rows.push_back({std::string("fail"), rep.first_failure->value(), rep.lhs, rep.rhs,
                      static_cast<u64>(rep.primes_checked)});
  r.metadata["D"] = D.to_string('T');
  r.metadata["certificate"] = "trace identity at good primes: a necessary condition for the isogeny, not a proof";
  return r;
}

}  // namespace detail

inline Report execute(const ExperimentConfig& cfg) {
  if (cfg.threads < 1) throw Error(ErrorKind::parse, "thread count must be >= 1");
  if (cfg.N < 2) throw Error(ErrorKind::parse, "N must be at least 2");
  if (cfg.format != "csv" && cfg.format != "json") throw Error(ErrorKind::parse, "format must be csv or json");
  if (cfg.command == "trace") return detail::run_trace(cfg);
  if (cfg.command == "lpoly") return detail::run_lpoly(cfg);
  if (cfg.command == "nagao") return detail::run_nagao(cfg);
  if (cfg.command == "moments") return detail::run_moments(cfg);
  if (cfg.command == "st-classify") return detail::run_st_classify(cfg);
  if (cfg.command == "peterson") return detail::run_peterson(cfg);
  if (cfg.command == "factor-check") return detail::run_factor_check(cfg);
  throw Error(ErrorKind::parse, "unknown command \"" + cfg.command + "\"");
}

inline std::string render(const Report& r, const ExperimentConfig& cfg) {
  return cfg.format == "json" ? render_json(r, cfg.command) : render_csv(r);
}

// Runs one experiment, writes the report and maps failures to exit codes.
inline int run(const ExperimentConfig& cfg, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  try {
    const Report report = execute(cfg);
    const std::string text = render(report, cfg);
    if (cfg.output.empty()) {
      out << text;
    } else {
      std::ofstream file(cfg.output, std::ios::binary);
      file << text;
      if (!file) throw Error(ErrorKind::internal, "cannot write " + cfg.output);
    }
    return static_cast<int>(ExitCode::ok);
  } catch (const Interrupted&) {
    err << "nagaolab: interrupted; completed blocks were flushed to the cache\n";
    return static_cast<int>(ExitCode::interrupted);
  } catch (const Error& e) {
    err << "nagaolab: " << e.what() << '\n';
    return static_cast<int>(exit_code_for(e.kind()));
  } catch (const std::exception& e) {
    err << "nagaolab: " << e.what() << '\n';
    return static_cast<int>(ExitCode::internal);
  }
}

}  // namespace nagaolab::cli
