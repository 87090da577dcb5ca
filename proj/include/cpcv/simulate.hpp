#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <mutex>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "cpcv/error.hpp"
#include "cpcv/pipeline.hpp"
#include "cpcv/signal.hpp"

namespace cpcv {

enum class NoiseKind {
  gaussian,
  student_t5,
  centered_exp,
  hetero_segments,
  hetero_blocks32,
  gaussian_poisson_outliers,
};

/// Error distribution of a scenario. Every kind except the heteroscedastic
/// ones has marginal standard deviation `sigma`.
struct NoiseModel {
  NoiseKind kind = NoiseKind::gaussian;
  double sigma = 1.0;
  double sd_low = 3.0;  // hetero_*: sd ~ U[sd_low, sd_high]
  double sd_high = 11.0;
  std::size_t block = 32;  // hetero_blocks32
  double outlier_rate = 0.0;  // Poisson intensity of each added outlier
  std::size_t outlier_count = 10;
  std::uint64_t seed = 1;
};

struct Scenario {
  std::string name;
  PiecewiseSignal signal;
  NoiseModel noise;
};

// ---------------------------------------------------------------------------
// Seeding

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of replication `rep`; a pure function of (master, rep), so any
/// assignment of replications to threads draws the same data.
inline std::uint64_t replication_seed(std::uint64_t master, std::uint64_t rep) noexcept {
  return splitmix64(splitmix64(master) ^ splitmix64(rep + 0x632be59bd9b4e019ULL));
}

// ---------------------------------------------------------------------------
// Scenarios

/// Two changes close together, the second one large (underestimation setting).
/// tau = (n/2 - lambda, n/2), levels (delta1, 0, D delta1).
inline Scenario scenario_underestimation(double d, std::size_t n = 202, double delta1 = 10.0, double sigma = 1.0,
                                         std::size_t lambda = 5) {
  if (!(d > 0.0) || n % 2 != 0 || (n / 2) % 2 != 1 || lambda % 2 != 1 || 4 * lambda >= n || !(delta1 > 0.0) ||
      sigma < 0.0) {
    throw error(errc::bad_params, "underestimation scenario needs n even with n/2 odd, odd lambda < n/4, D > 0");
  }
  char name[64];
  std::snprintf(name, sizeof name, "underestimation-D%g", d);
  return {name, make_signal(ChangePointSet(n, {n / 2 - lambda, n / 2}), std::vector<double>{delta1, 0.0, d * delta1}),
          NoiseModel{NoiseKind::gaussian, sigma}};
}

/// Single change of size delta1 at n/2 (odd half-scale location) or n/2 + 1.
inline Scenario scenario_overestimation(double sigma, bool shift_even = false, std::size_t n = 202,
                                        double delta1 = 1.0) {
  if (sigma < 0.0 || n < 4 || n % 2 != 0 || delta1 == 0.0) throw error(errc::bad_params, "bad overestimation params");
  char name[64];
  std::snprintf(name, sizeof name, "overestimation-sigma%g%s", sigma, shift_even ? "-even" : "");
  const std::size_t tau = n / 2 + (shift_even ? 1 : 0);
  return {name, make_signal(ChangePointSet(n, {tau}), std::vector<double>{0.0, delta1}),
          NoiseModel{NoiseKind::gaussian, sigma}};
}

/// Single bump of length lambda and height delta in the middle of n points.
inline Scenario scenario_bump(std::size_t lambda, double delta, std::size_t n = 200, double sigma = 1.0) {
  if (lambda == 0 || lambda >= n || (n - lambda) % 2 != 0 || delta == 0.0) {
    throw error(errc::bad_params, "bump needs 0 < lambda < n with n - lambda even and delta != 0");
  }
  char name[64];
  std::snprintf(name, sizeof name, "bump-l%zu-d%g", lambda, delta);
  return {name,
          make_signal(ChangePointSet(n, {(n - lambda) / 2, (n + lambda) / 2}), std::vector<double>{0.0, delta, 0.0}),
          NoiseModel{NoiseKind::gaussian, sigma}};
}

/// n = 2048, K = 11 signal with one large change at 883 (odd) or 884 (even).
inline Scenario scenario_larger(bool shifted) {
  std::vector<std::size_t> taus{204, 470, 778, 878, 883, 894, 984, 1414, 1638, 1680, 1740};
  if (shifted) taus[4] = 884;
  return {shifted ? "larger-even" : "larger-odd",
          make_signal(ChangePointSet(2048, taus),
                      std::vector<double>{-2.32, 15.98, 5, 20, 0, 70, 0, -15, -7.32, 8.42, -2.93, 4.76}),
          NoiseModel{NoiseKind::gaussian, 7.0}};
}

inline PiecewiseSignal blocks_signal() {
  return make_signal(ChangePointSet(2048, {205, 267, 308, 472, 512, 820, 902, 1332, 1557, 1598, 1659}),
                     std::vector<double>{0, 14.64, -3.66, 7.32, -7.32, 10.98, -4.39, 3.29, 19.03, 7.68, 15.37, 0});
}

/// Blocks signal with one of the noise variants.
inline Scenario scenario_blocks(NoiseKind kind = NoiseKind::gaussian, double outlier_rate = 0.0) {
  NoiseModel noise{kind, 7.0};
  std::string name = "blocks";
  switch (kind) {
    case NoiseKind::gaussian: break;
    case NoiseKind::student_t5: name += "-t5"; break;
    case NoiseKind::centered_exp: name += "-exp"; break;
    case NoiseKind::hetero_segments: name += "-hetero-segments"; break;
    case NoiseKind::hetero_blocks32: name += "-hetero-blocks32"; break;
    case NoiseKind::gaussian_poisson_outliers:
      if (!(outlier_rate > 0.0)) throw error(errc::bad_params, "outlier intensity must be positive");
      noise.outlier_rate = outlier_rate;
      name += "-outliers-" + std::to_string(static_cast<long long>(std::llround(outlier_rate)));
      break;
  }
  return {name, blocks_signal(), noise};
}

/// Every named setting with its exact parameters.
inline std::vector<Scenario> scenario_catalog() {
  std::vector<Scenario> out;
  for (double d : {2.0, 3.0, 5.0}) out.push_back(scenario_underestimation(d));
  for (double s : {1.0, 0.1, 0.01, 0.001, 0.0001}) out.push_back(scenario_overestimation(s));
  out.push_back(scenario_overestimation(0.0001, true));
  out.push_back(scenario_larger(false));
  out.push_back(scenario_larger(true));
  out.push_back(scenario_blocks());
  out.push_back(scenario_blocks(NoiseKind::student_t5));
  out.push_back(scenario_blocks(NoiseKind::centered_exp));
  out.push_back(scenario_blocks(NoiseKind::hetero_segments));
  out.push_back(scenario_blocks(NoiseKind::hetero_blocks32));
  out.push_back(scenario_blocks(NoiseKind::gaussian_poisson_outliers, 20.0));
  out.push_back(scenario_blocks(NoiseKind::gaussian_poisson_outliers, 30.0));
  for (auto [l, d] : {std::pair{6, 2.0}, {6, 3.0}, {6, 4.0}, {8, 2.0}, {12, 2.0}, {20, 2.0}}) {
    out.push_back(scenario_bump(static_cast<std::size_t>(l), d));
  }
  return out;
}

namespace detail {
inline std::optional<double> parse_number(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::string buf(s);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}
}  // namespace detail

/// Looks up a catalog name, or builds a parameterised one:
/// underestimation-D<factor>, overestimation-sigma<sd>[-even], bump-l<len>-d<height>.
inline Scenario find_scenario(std::string_view name) {
  for (auto& s : scenario_catalog()) {
    if (s.name == name) return s;
  }
  auto starts = [&](std::string_view p) { return name.substr(0, p.size()) == p; };
  if (starts("underestimation-D")) {
    if (auto d = detail::parse_number(name.substr(17))) return scenario_underestimation(*d);
  } else if (starts("overestimation-sigma")) {
    auto rest = name.substr(20);
    const bool even = rest.size() > 5 && rest.substr(rest.size() - 5) == "-even";
    if (even) rest = rest.substr(0, rest.size() - 5);
    if (auto s = detail::parse_number(rest)) return scenario_overestimation(*s, even);
  } else if (starts("bump-l")) {
    auto rest = name.substr(6);
    if (auto dash = rest.find("-d"); dash != std::string_view::npos) {
      auto l = detail::parse_number(rest.substr(0, dash));
      auto d = detail::parse_number(rest.substr(dash + 2));
      if (l && d && *l >= 1 && std::floor(*l) == *l) return scenario_bump(static_cast<std::size_t>(*l), *d);
    }
  }
  throw error(errc::parse_error, "unknown scenario '" + std::string(name) + "'");
}

/// Largest L examined by default: the true K plus a margin, at least 10.
inline std::size_t default_k_max(const Scenario& s) { return std::max<std::size_t>(10, s.signal.cps().size() + 4); }

// ---------------------------------------------------------------------------
// Data generation

/// Noise draws for one replication; row-major n x d.
inline std::vector<double> draw_noise(const NoiseModel& noise, const ChangePointSet& segments, std::size_t d,
                                      std::mt19937_64& rng) {
  const std::size_t n = segments.n();
  std::vector<double> eps(n * d, 0.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  switch (noise.kind) {
    case NoiseKind::gaussian:
    case NoiseKind::gaussian_poisson_outliers:
      for (auto& e : eps) e = noise.sigma * normal(rng);
      break;
    case NoiseKind::student_t5: {
      std::student_t_distribution<double> t5(5.0);
      const double scale = noise.sigma / std::sqrt(5.0 / 3.0);
      for (auto& e : eps) e = scale * t5(rng);
      break;
    }
    case NoiseKind::centered_exp: {
      std::exponential_distribution<double> ex(1.0);
      for (auto& e : eps) e = noise.sigma * (ex(rng) - 1.0);
      break;
    }
    case NoiseKind::hetero_segments:
    case NoiseKind::hetero_blocks32: {
      std::uniform_real_distribution<double> sd_dist(noise.sd_low, noise.sd_high);
      std::vector<std::size_t> b;
      if (noise.kind == NoiseKind::hetero_segments) {
        b = segments.boundaries();
      } else {
        // A trailing partial block gets its own draw.
        for (std::size_t i = 0; i < n; i += noise.block) b.push_back(i);
        b.push_back(n);
      }
      for (std::size_t k = 0; k + 1 < b.size(); ++k) {
        const double sd = sd_dist(rng);
        for (std::size_t i = b[k] * d; i < b[k + 1] * d; ++i) eps[i] = sd * normal(rng);
      }
      break;
    }
  }
  if (noise.kind == NoiseKind::gaussian_poisson_outliers) {
    const std::size_t count = std::min(noise.outlier_count, n);
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::poisson_distribution<long long> pois(noise.outlier_rate);
    for (std::size_t k = 0; k < count; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, n - 1);
      std::swap(idx[k], idx[pick(rng)]);
      for (std::size_t j = 0; j < d; ++j) eps[idx[k] * d + j] += static_cast<double>(pois(rng));
    }
  }
  return eps;
}

/// Y = mu + eps for replication `rep`.
inline Series generate(const Scenario& scenario, std::uint64_t rep) {
  std::mt19937_64 rng(replication_seed(scenario.noise.seed, rep));
  const Series mu = scenario.signal.to_series();
  auto eps = draw_noise(scenario.noise, scenario.signal.cps(), mu.d(), rng);
  const auto m = mu.data();
  for (std::size_t i = 0; i < eps.size(); ++i) eps[i] += m[i];
  return Series(mu.n(), mu.d(), std::move(eps));
}

// ---------------------------------------------------------------------------
// Replication runner

struct SimulationReport {
  std::string method;
  std::size_t m = 0;
  std::size_t under = 0;
  std::size_t correct = 0;
  std::size_t over = 0;
  double mise_mean = 0.0;
  std::vector<std::uint64_t> seeds;  // per replication
  std::vector<std::size_t> k_hats;   // per replication
  std::vector<double> mises;         // per replication
};

/// M replications of `scenario`; every method sees the same data in a given
/// replication. Results do not depend on `workers`.
inline std::vector<SimulationReport> run_simulation(const Scenario& scenario, const std::vector<Estimator>& methods,
                                                    std::size_t m, std::size_t k_max, std::size_t workers = 1) {
  if (m == 0) throw error(errc::bad_params, "need at least one replication");
  if (methods.empty()) throw error(errc::bad_params, "no methods");
  const std::size_t nm = methods.size();
  std::vector<std::size_t> k_hat(m * nm);
  std::vector<double> err(m * nm);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t r = next++; r < m; r = next++) {
      try {
        const Series y = generate(scenario, r);
        for (std::size_t j = 0; j < nm; ++j) {
          const FitResult fit = run_estimator(y, methods[j], k_max);
          k_hat[r * nm + j] = fit.k_hat;
          err[r * nm + j] = mise(fit.f_hat, scenario.signal);
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = m;
      }
    }
  };
  workers = std::clamp<std::size_t>(workers, 1, m);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  const std::size_t k_true = scenario.signal.cps().size();
  std::vector<SimulationReport> out;
  for (std::size_t j = 0; j < nm; ++j) {
    SimulationReport rep;
    rep.method = methods[j].name();
    rep.m = m;
    double sum = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      const auto k = k_hat[r * nm + j];
      if (k < k_true) {
        ++rep.under;
      } else if (k == k_true) {
        ++rep.correct;
      } else {
        ++rep.over;
      }
      sum += err[r * nm + j];
      rep.seeds.push_back(replication_seed(scenario.noise.seed, r));
      rep.k_hats.push_back(k);
      rep.mises.push_back(err[r * nm + j]);
    }
    rep.mise_mean = sum / static_cast<double>(m);
    out.push_back(std::move(rep));
  }
  return out;
}

/// method,M,pct_under,pct_correct,pct_over,mise with percentages to two
/// decimals and MISE to four significant figures.
inline void write_report_csv(std::ostream& os, const std::vector<SimulationReport>& reports) {
  os << "method,M,pct_under,pct_correct,pct_over,mise\n";
  char buf[256];
  for (const auto& r : reports) {
    const double m = static_cast<double>(r.m);
    std::snprintf(buf, sizeof buf, "%s,%zu,%.2f,%.2f,%.2f,%.4g\n", r.method.c_str(), r.m, 100.0 * r.under / m,
                  100.0 * r.correct / m, 100.0 * r.over / m, r.mise_mean);
    os << buf;
  }
}

}  // namespace cpcv
