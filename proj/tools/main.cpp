#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include "permcorr/accumulate.hpp"
#include "permcorr/cdf.hpp"
#include "permcorr/dataset.hpp"
#include "permcorr/error.hpp"
#include "permcorr/moments.hpp"
#include "permcorr/oracle.hpp"
#include "permcorr/random.hpp"

using json = nlohmann::ordered_json;
using namespace permcorr;

namespace {

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::degenerate: return 3;
    case Errc::too_large: return 4;
    default: return 2;
  }
}

Tail parse_tail(const std::string& tail) {
  if (tail == "two") return Tail::two_sided;
  if (tail == "right") return Tail::right;
  if (tail == "left") return Tail::left;
  throw Error(Errc::range, "unknown tail: " + tail);
}

Mode parse_mode(const std::string& mode) {
  if (mode == "pearson") return Mode::pearson;
  if (mode == "spearman") return Mode::spearman;
  throw Error(Errc::range, "unknown mode: " + mode);
}

Dataset load_input(const std::string& path, bool header_flag) {
  if (header_flag) return load_csv(path, true);
  try {
    return load_csv(path, false);
  } catch (const Error& e) {
    // a non-numeric first line is a header; anything else is a real error
    if (e.code() == Errc::parse && std::string(e.what()).find("line 1") != std::string::npos) {
      std::cerr << "note: treating the first line as a header\n";
      return load_csv(path, true);
    }
    throw;
  }
}

std::string format_double(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

void emit(const json& out) { std::cout << out.dump(2) << "\n"; }

struct MomentsConfig {
  std::string input;
  bool header = false;
  int k = 8;
  std::string mode = "pearson";
  std::string output = "json";
};

int run_moments(const MomentsConfig& cfg) {
  const Dataset data = load_input(cfg.input, cfg.header);
  const MomentVector mv = moment_vector(data, cfg.k, parse_mode(cfg.mode));

  if (cfg.output == "json") {
    json out;
    out["n"] = mv.n;
    out["mode"] = to_string(mv.mode);
    out["moments"] = mv.values;
    json methods = json::array();
    for (MomentMethod m : mv.method_per_k) methods.push_back(to_string(m));
    out["method_per_k"] = methods;
    emit(out);
  } else if (cfg.output == "csv") {
    std::cout << "k,moment,method\n";
    for (std::size_t k = 0; k < mv.values.size(); ++k) {
      std::cout << k << "," << format_double(mv.values[k]) << ","
                << to_string(mv.method_per_k[k]) << "\n";
    }
  } else {
    std::cout << "permutation moments of " << to_string(mv.mode) << " correlation, n = " << mv.n
              << "\n";
    for (std::size_t k = 0; k < mv.values.size(); ++k) {
      std::printf("  <rho^%zu> = %- .12e  (%s)\n", k, mv.values[k],
                  to_string(mv.method_per_k[k]));
    }
  }
  return 0;
}

struct PvalueConfig {
  std::string input;
  bool header = false;
  std::string method = "auto";
  std::string tail = "two";
  std::string mode = "pearson";
  int k = 8;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0;
  std::size_t cap = 10;
  int threads = 1;
};

int run_pvalue(const PvalueConfig& cfg) {
  const Dataset data = load_input(cfg.input, cfg.header);
  const Tail tail = parse_tail(cfg.tail);
  const Mode mode = parse_mode(cfg.mode);
  const Dataset working = mode == Mode::spearman ? rank_transform(data) : data;

  std::string method = cfg.method;
  if (method == "auto") {
    method = data.size() <= cfg.cap ? "exact" : "mc";
    std::cerr << "note: method auto-selected as " << method << " (n = " << data.size() << ")\n";
  }

  PvalueEstimate est;
  json diagnostics;
  if (method == "exact") {
    OracleOptions options;
    options.max_n = cfg.cap;
    options.threads = cfg.threads;
    try {
      est = oracle_pvalue_exact(working, tail, options);
    } catch (const Error& e) {
      if (e.code() == Errc::too_large) {
        std::cerr << "error: " << e.what()
                  << "\nhint: use --method mc or a moment method (hausdorff, legendre)\n";
        return 4;
      }
      throw;
    }
    diagnostics["permutations"] = est.count;
    diagnostics["hits"] = est.hits;
  } else if (method == "mc") {
    est = mc_pvalue(working, tail, cfg.samples, cfg.seed, cfg.threads);
    diagnostics["samples"] = est.count;
    diagnostics["seed"] = cfg.seed;
    diagnostics["hits"] = est.hits;
    diagnostics["std_error"] = est.std_error;
  } else if (method == "hausdorff" || method == "legendre") {
    const CdfMethod cdf_method =
        method == "hausdorff" ? CdfMethod::hausdorff : CdfMethod::legendre;
    est = moment_pvalue(data, cfg.k, cdf_method, tail, mode);
    diagnostics["K"] = est.order;
    diagnostics["clip_correction"] = est.clip_correction;
    diagnostics["monotonicity_correction"] = est.monotonicity_correction;
    diagnostics["clamped"] = est.clamped;
  } else {
    throw Error(Errc::range, "unknown method: " + method);
  }

  json out;
  out["rho_obs"] = est.rho_obs;
  out["p"] = est.p;
  out["method"] = method;
  out["tail"] = cfg.tail;
  out["diagnostics"] = diagnostics;
  emit(out);
  return 0;
}

struct ValidateConfig {
  std::size_t n_min = 3;
  std::size_t n_max = 8;
  std::uint64_t trials = 100;
  std::uint64_t seed = 1;
  std::string generator = "uniform";
  std::size_t cap = 10;
  int threads = 1;
  std::string output = "json";
};

int run_validate(const ValidateConfig& cfg) {
  if (cfg.n_min < 3 || cfg.n_min > cfg.n_max) {
    throw Error(Errc::range, "validate needs 3 <= n-min <= n-max");
  }
  if (cfg.n_max > cfg.cap) {
    throw Error(Errc::too_large, "validate n-range exceeds the enumeration cap of " +
                                     std::to_string(cfg.cap));
  }
  if (cfg.trials < 1) throw Error(Errc::range, "need trials >= 1");
  if (cfg.generator != "uniform" && cfg.generator != "normal") {
    throw Error(Errc::range, "unknown generator: " + cfg.generator);
  }

  constexpr int kLow = 2, kHigh = 5;
  OracleOptions options;
  options.max_n = cfg.cap;
  options.threads = cfg.threads;

  struct Row {
    std::size_t n;
    std::vector<double> mse;
  };
  std::vector<Row> rows;
  SplitMix64 rng(cfg.seed);
  for (std::size_t n = cfg.n_min; n <= cfg.n_max; ++n) {
    std::vector<KahanSum<>> sq_err(kHigh + 1);
    for (std::uint64_t trial = 0; trial < cfg.trials; ++trial) {
      std::vector<double> x(n), y(n);
      for (std::size_t i = 0; i < n; ++i) {
        x[i] = cfg.generator == "uniform" ? rng.uniform01() : rng.gauss();
        y[i] = cfg.generator == "uniform" ? rng.uniform01() : rng.gauss();
      }
      const Dataset d{std::move(x), std::move(y)};
      const MomentVector oracle = oracle_moments_exact(d, kHigh, options);
      const MomentEngine engine(central_moments(d.x, kHigh), central_moments(d.y, kHigh));
      for (int k = kLow; k <= kHigh; ++k) {
        const double diff = oracle.values[static_cast<std::size_t>(k)] - engine.closed(k);
        sq_err[static_cast<std::size_t>(k)].add(diff * diff);
      }
    }
    Row row;
    row.n = n;
    for (int k = kLow; k <= kHigh; ++k) {
      row.mse.push_back(sq_err[static_cast<std::size_t>(k)].value() /
                        static_cast<double>(cfg.trials));
    }
    rows.push_back(std::move(row));
  }

  if (cfg.output == "json") {
    json out;
    out["generator"] = cfg.generator;
    out["seed"] = cfg.seed;
    out["trials"] = cfg.trials;
    out["k"] = {2, 3, 4, 5};
    json jrows = json::array();
    for (const Row& row : rows) {
      json r;
      r["n"] = row.n;
      r["mse"] = row.mse;
      jrows.push_back(r);
    }
    out["rows"] = jrows;
    emit(out);
  } else if (cfg.output == "csv") {
    std::cout << "n,mse_k2,mse_k3,mse_k4,mse_k5\n";
    for (const Row& row : rows) {
      std::cout << row.n;
      for (double v : row.mse) std::cout << "," << format_double(v);
      std::cout << "\n";
    }
  } else {
    std::printf("MSE of closed-form moments vs direct enumeration (%s data, %llu trials)\n",
                cfg.generator.c_str(), static_cast<unsigned long long>(cfg.trials));
    std::printf("%6s %12s %12s %12s %12s\n", "n", "k=2", "k=3", "k=4", "k=5");
    for (const Row& row : rows) {
      std::printf("%6zu %12.3e %12.3e %12.3e %12.3e\n", row.n, row.mse[0], row.mse[1],
                  row.mse[2], row.mse[3]);
    }
  }
  return 0;
}

struct SpearmanTableConfig {
  std::size_t n_min = 3;
  std::size_t n_max = 10;
  int k = 8;
  std::string output = "csv";
};

int run_spearman_table(const SpearmanTableConfig& cfg) {
  if (cfg.n_min < 3 || cfg.n_min > cfg.n_max) {
    throw Error(Errc::range, "spearman-table needs 3 <= n-min <= n-max");
  }
  if (cfg.k < 2) throw Error(Errc::range, "spearman-table needs K >= 2");

  json jrows = json::array();
  if (cfg.output == "csv") std::cout << "n,k,moment\n";
  for (std::size_t n = cfg.n_min; n <= cfg.n_max; ++n) {
    std::vector<double> ranks(n);
    std::iota(ranks.begin(), ranks.end(), 1.0);
    const Dataset d{ranks, ranks};
    const MomentVector mv = moment_vector(d, cfg.k, Mode::spearman);
    for (int k = 1; k <= cfg.k; ++k) {
      const double value = mv.values[static_cast<std::size_t>(k)];
      if (cfg.output == "csv") {
        std::cout << n << "," << k << "," << format_double(value) << "\n";
      } else if (cfg.output == "json") {
        json r;
        r["n"] = n;
        r["k"] = k;
        r["moment"] = value;
        jrows.push_back(r);
      } else {
        std::printf("n=%zu  <rho^%d> = %- .12e\n", n, k, value);
      }
    }
  }
  if (cfg.output == "json") emit(jrows);
  return 0;
}

struct BenchConfig {
  std::size_t n_min = 3;
  std::size_t n_max = 10;
  int k = 8;
  std::uint64_t samples = 10000;
  std::uint64_t seed = 1;
  std::size_t cap = 10;
  int threads = 1;
};

volatile double bench_sink = 0.0;

template <typename F>
double time_seconds(F&& fn) {
  using clock = std::chrono::steady_clock;
  double best = std::numeric_limits<double>::infinity();
  for (int run = 0; run < 3; ++run) {
    std::size_t reps = 1;
    for (;;) {
      const auto start = clock::now();
      for (std::size_t r = 0; r < reps; ++r) fn();
      const double elapsed = std::chrono::duration<double>(clock::now() - start).count();
      if (elapsed > 0.01 || reps >= 1 << 20) {
        best = std::min(best, elapsed / static_cast<double>(reps));
        break;
      }
      reps *= 4;
    }
  }
  return best;
}

int run_bench(const BenchConfig& cfg) {
  if (cfg.n_min < 2 || cfg.n_min > cfg.n_max) {
    throw Error(Errc::range, "bench needs 2 <= n-min <= n-max");
  }
  json out = json::array();
  SplitMix64 rng(cfg.seed);
  for (std::size_t n = cfg.n_min; n <= cfg.n_max; ++n) {
    std::vector<double> x(n), y(n);
    for (auto& v : x) v = rng.uniform01();
    for (auto& v : y) v = rng.uniform01();
    const Dataset d{std::move(x), std::move(y)};

    auto add_row = [&](const char* method, std::uint64_t k_or_samples, double seconds) {
      json row;
      row["method"] = method;
      row["n"] = n;
      row["k_or_samples"] = k_or_samples;
      row["seconds"] = seconds;
      out.push_back(row);
      std::fprintf(stderr, "bench n=%zu %-12s %10.3es\n", n, method, seconds);
    };

    const int closed_k = std::min(cfg.k, 5);
    add_row("closed-form", static_cast<std::uint64_t>(closed_k), time_seconds([&] {
              const MomentEngine engine(central_moments(d.x, std::max(closed_k, 2)),
                                        central_moments(d.y, std::max(closed_k, 2)));
              double sink = 0;
              for (int k = 1; k <= closed_k; ++k) sink += engine.closed(k);
              bench_sink = sink;
            }));
    add_row("inductive", static_cast<std::uint64_t>(cfg.k), time_seconds([&] {
              MomentEngine engine(central_moments(d.x, std::max(cfg.k, 2)),
                                  central_moments(d.y, std::max(cfg.k, 2)));
              double sink = 0;
              for (int k = 1; k <= cfg.k; ++k) sink += engine.inductive(k);
              bench_sink = sink;
            }));
    if (n <= cfg.cap) {
      OracleOptions options;
      options.max_n = cfg.cap;
      options.threads = cfg.threads;
      add_row("oracle-exact", factorial_u64(n),
              time_seconds([&] { oracle_moments_exact(d, cfg.k, options); }));
    }
    add_row("oracle-mc", cfg.samples, time_seconds([&] {
              oracle_moments_mc(d, cfg.k, cfg.samples, cfg.seed, cfg.threads);
            }));
  }
  emit(out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact permutation-null moments and p-values for Pearson/Spearman correlation"};
  app.require_subcommand(1);

  MomentsConfig moments_cfg;
  auto* moments = app.add_subcommand("moments", "exact null moments from a CSV dataset");
  moments->add_option("--input", moments_cfg.input, "two-column CSV")->required();
  moments->add_flag("--header", moments_cfg.header, "treat the first line as a header");
  moments->add_option("--k", moments_cfg.k, "highest moment order");
  moments->add_option("--mode", moments_cfg.mode, "pearson or spearman");
  moments->add_option("--output", moments_cfg.output, "json, csv, or text")
      ->check(CLI::IsMember({"json", "csv", "text"}));

  PvalueConfig pvalue_cfg;
  auto* pvalue = app.add_subcommand("pvalue", "permutation-test p-value");
  pvalue->add_option("--input", pvalue_cfg.input, "two-column CSV")->required();
  pvalue->add_flag("--header", pvalue_cfg.header, "treat the first line as a header");
  pvalue->add_option("--method", pvalue_cfg.method,
                     "exact, mc, hausdorff, or legendre (default: auto)");
  pvalue->add_option("--tail", pvalue_cfg.tail, "two, right, or left");
  pvalue->add_option("--mode", pvalue_cfg.mode, "pearson or spearman");
  pvalue->add_option("--k", pvalue_cfg.k, "moment order for hausdorff/legendre");
  pvalue->add_option("--samples", pvalue_cfg.samples, "mc sample count");
  pvalue->add_option("--seed", pvalue_cfg.seed, "mc seed");
  pvalue->add_option("--cap", pvalue_cfg.cap, "exact-enumeration cap on n");
  pvalue->add_option("--threads", pvalue_cfg.threads, "worker threads");

  ValidateConfig validate_cfg;
  auto* validate = app.add_subcommand("validate",
                                      "MSE of closed-form moments vs direct enumeration");
  validate->add_option("--n-min", validate_cfg.n_min, "smallest sample size");
  validate->add_option("--n-max", validate_cfg.n_max, "largest sample size");
  validate->add_option("--trials", validate_cfg.trials, "datasets per size");
  validate->add_option("--seed", validate_cfg.seed, "generator seed");
  validate->add_option("--gen", validate_cfg.generator, "uniform or normal");
  validate->add_option("--cap", validate_cfg.cap, "exact-enumeration cap on n");
  validate->add_option("--threads", validate_cfg.threads, "worker threads");
  validate->add_option("--output", validate_cfg.output, "json, csv, or text")
      ->check(CLI::IsMember({"json", "csv", "text"}));

  SpearmanTableConfig spearman_cfg;
  auto* spearman = app.add_subcommand("spearman-table",
                                      "tabulated Spearman null moments (tie-free, n alone)");
  spearman->add_option("--n-min", spearman_cfg.n_min, "smallest sample size");
  spearman->add_option("--n-max", spearman_cfg.n_max, "largest sample size");
  spearman->add_option("--k", spearman_cfg.k, "highest moment order");
  spearman->add_option("--output", spearman_cfg.output, "csv, json, or text")
      ->check(CLI::IsMember({"json", "csv", "text"}));

  BenchConfig bench_cfg;
  auto* bench = app.add_subcommand("bench", "timing comparison of the methods");
  bench->add_option("--n-min", bench_cfg.n_min, "smallest sample size");
  bench->add_option("--n-max", bench_cfg.n_max, "largest sample size");
  bench->add_option("--k", bench_cfg.k, "highest moment order");
  bench->add_option("--samples", bench_cfg.samples, "mc sample count");
  bench->add_option("--seed", bench_cfg.seed, "data seed");
  bench->add_option("--cap", bench_cfg.cap, "exact-enumeration cap on n");
  bench->add_option("--threads", bench_cfg.threads, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (moments->parsed()) return run_moments(moments_cfg);
    if (pvalue->parsed()) return run_pvalue(pvalue_cfg);
    if (validate->parsed()) return run_validate(validate_cfg);
    if (spearman->parsed()) return run_spearman_table(spearman_cfg);
    if (bench->parsed()) return run_bench(bench_cfg);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
