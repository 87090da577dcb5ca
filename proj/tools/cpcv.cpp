// cpcv: fit change-points to a CSV series, or run a simulation study.

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cpcv/cpcv.hpp"

namespace {

constexpr int kExitParse = 2;
constexpr int kExitInfeasible = 3;

int exit_code_for(cpcv::errc code) {
  switch (code) {
    case cpcv::errc::parse_error:
    case cpcv::errc::bad_series:
      return kExitParse;
    default:
      return kExitInfeasible;
  }
}

struct DetectOptions {
  std::string input = "-";
  std::string method = "cv1-vfold";
  std::size_t folds = 5;
  std::size_t k_max = 10;
  bool header = false;
  std::string out = "text";
};

struct SimulateOptions {
  std::string scenario;
  std::string methods = "copps,cv1,cv1-vfold";
  std::size_t reps = 100;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  long long k_max = -1;
  std::size_t folds = 5;
  std::string out = "-";
};

std::string fmt(double v) {
  if (std::isinf(v)) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

cpcv::Series read_input(const DetectOptions& opt) {
  if (opt.input == "-") return cpcv::read_series_csv(std::cin, opt.header);
  std::ifstream in(opt.input);
  if (!in) throw cpcv::error(cpcv::errc::parse_error, "cannot open '" + opt.input + "'");
  return cpcv::read_series_csv(in, opt.header);
}

void print_text(std::ostream& os, const cpcv::Estimator& est, const cpcv::Series& y, const cpcv::FitResult& fit) {
  os << "method: " << est.name() << "\n";
  os << "n: " << y.n() << "  d: " << y.d() << "\n";
  os << "k_hat: " << fit.k_hat << "\n";
  os << "change_points:";
  for (auto t : fit.final_cps.taus()) os << ' ' << t;
  os << "\nsegments:\n";
  const auto b = fit.final_cps.boundaries();
  for (std::size_t k = 0; k + 1 < b.size(); ++k) {
    os << "  (" << b[k] << ", " << b[k + 1] << "]";
    for (double v : fit.f_hat.levels()[k]) os << ' ' << fmt(v);
    os << "\n";
  }
  os << "criterion:\n";
  for (std::size_t g = 0; g < fit.curve.params.size(); ++g) {
    os << "  L=" << fit.curve.params[g] << ' ' << fmt(fit.curve.values[g]) << "\n";
  }
}

void print_json(std::ostream& os, const cpcv::Estimator& est, const cpcv::Series& y, const cpcv::FitResult& fit) {
  nlohmann::json j;
  j["method"] = est.name();
  j["n"] = y.n();
  j["d"] = y.d();
  j["k_hat"] = fit.k_hat;
  j["change_points"] = fit.final_cps.taus();
  j["levels"] = fit.f_hat.levels();
  auto curve = nlohmann::json::array();
  for (std::size_t g = 0; g < fit.curve.params.size(); ++g) {
    const double v = fit.curve.values[g];
    curve.push_back({{"L", fit.curve.params[g]}, {"value", std::isfinite(v) ? nlohmann::json(v) : nlohmann::json()}});
  }
  j["curve"] = curve;
  os << j.dump(2) << "\n";
}

// One row per segment and one per criterion value:
// kind,index,start,end,value_1..value_d
void print_csv(std::ostream& os, const cpcv::Series& y, const cpcv::FitResult& fit) {
  os << "kind,index,start,end";
  for (std::size_t j = 1; j <= y.d(); ++j) os << ",value_" << j;
  os << "\n";
  const auto b = fit.final_cps.boundaries();
  for (std::size_t k = 0; k + 1 < b.size(); ++k) {
    os << "segment," << k << ',' << b[k] + 1 << ',' << b[k + 1];
    for (double v : fit.f_hat.levels()[k]) os << ',' << fmt(v);
    os << "\n";
  }
  for (std::size_t g = 0; g < fit.curve.params.size(); ++g) {
    os << "criterion," << fit.curve.params[g] << ",,," << fmt(fit.curve.values[g]);
    for (std::size_t j = 1; j < y.d(); ++j) os << ',';
    os << "\n";
  }
}

int run_detect(const DetectOptions& opt) {
  const auto est = cpcv::Estimator::parse(opt.method, opt.folds);
  const auto y = read_input(opt);
  const auto fit = cpcv::run_estimator(y, est, opt.k_max);
  if (opt.out == "json") {
    print_json(std::cout, est, y, fit);
  } else if (opt.out == "csv") {
    print_csv(std::cout, y, fit);
  } else {
    print_text(std::cout, est, y, fit);
  }
  return 0;
}

int run_simulate(SimulateOptions opt) {
  if (const char* env = std::getenv("CPCV_SEED"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    errno = 0;
    const unsigned long long s = std::strtoull(env, &end, 10);
    if (*end != '\0' || errno == ERANGE || env[0] == '-') {
      throw cpcv::error(cpcv::errc::parse_error, "CPCV_SEED is not an unsigned integer");
    }
    opt.seed = s;
  }
  auto scenario = cpcv::find_scenario(opt.scenario);
  scenario.noise.seed = opt.seed;

  std::vector<cpcv::Estimator> methods;
  std::stringstream list(opt.methods);
  for (std::string item; std::getline(list, item, ',');) {
    if (!item.empty()) methods.push_back(cpcv::Estimator::parse(item, opt.folds));
  }
  if (methods.empty()) throw cpcv::error(cpcv::errc::parse_error, "no methods given");

  const std::size_t k_max = opt.k_max < 0 ? cpcv::default_k_max(scenario) : static_cast<std::size_t>(opt.k_max);
  const std::size_t workers = opt.workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : opt.workers;
  const auto reports = cpcv::run_simulation(scenario, methods, opt.reps, k_max, workers);

  if (opt.out == "-") {
    cpcv::write_report_csv(std::cout, reports);
  } else {
    std::ofstream os(opt.out);
    if (!os) throw cpcv::error(cpcv::errc::parse_error, "cannot write '" + opt.out + "'");
    cpcv::write_report_csv(os, reports);
    if (!os) throw cpcv::error(cpcv::errc::parse_error, "write failed for '" + opt.out + "'");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Change-point detection with cross-validated model selection"};
  app.require_subcommand(1);

  DetectOptions det;
  auto* detect = app.add_subcommand("detect", "Estimate change-points in a CSV series (one column per dimension)");
  detect->add_option("input", det.input, "Input CSV file, '-' for stdin");
  detect->add_option("--method", det.method, "Selection rule")
      ->check(CLI::IsMember({"copps", "cv1", "cvmod", "cv1-vfold"}));
  detect->add_option("--folds", det.folds, "Number of folds for cv1-vfold")->capture_default_str();
  detect->add_option("--kmax", det.k_max, "Largest number of change-points considered")->capture_default_str();
  detect->add_flag("--header", det.header, "Skip the first line of the input");
  detect->add_option("--out", det.out, "Output format")->check(CLI::IsMember({"text", "json", "csv"}));

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Run replications of a named scenario and print a report");
  simulate->add_option("--scenario", sim.scenario, "Scenario name")->required();
  simulate->add_option("--methods", sim.methods, "Comma-separated selection rules")->capture_default_str();
  simulate->add_option("--reps", sim.reps, "Number of replications")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Master seed (CPCV_SEED overrides)")->capture_default_str();
  simulate->add_option("--workers", sim.workers, "Worker threads, 0 for all cores")->capture_default_str();
  simulate->add_option("--kmax", sim.k_max, "Largest number of change-points considered");
  simulate->add_option("--folds", sim.folds, "Folds for the V-fold rules")->capture_default_str();
  simulate->add_option("--out", sim.out, "Report path, '-' for stdout")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParse;
  }

  try {
    if (*detect) return run_detect(det);
    return run_simulate(sim);
  } catch (const cpcv::error& e) {
    std::cerr << "cpcv: " << to_string(e.code()) << ": " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "cpcv: " << e.what() << "\n";
    return kExitParse;
  }
}
