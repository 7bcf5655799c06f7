// Command-line front end: batch analysis of study records plus emission of
// curve data (Bayes factor profiles, success regions, power, type I error)
// and a Monte Carlo cross-check of the analytic rates.
//
// Exit codes: 0 success, 1 fatal I/O, 2 validation failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "repbayes/io.hpp"

namespace {

using namespace repbayes;

double parse_gamma(const std::string& s) {
  const auto slash = s.find('/');
  double v;
  if (slash == std::string::npos) {
    v = std::stod(s);
  } else {
    v = std::stod(s.substr(0, slash)) / std::stod(s.substr(slash + 1));
  }
  if (!(v > 0.0 && v < 1.0))
    throw CLI::ValidationError("--gamma", "level must be in (0,1)");
  return v;
}

freq::Method parse_method(const std::string& s) {
  if (s == "sceptical_bf") return freq::Method::sceptical_bf;
  if (s == "two_trials") return freq::Method::two_trials;
  if (s == "replication_bf") return freq::Method::replication_bf;
  if (s == "sceptical_p") return freq::Method::sceptical_p;
  throw CLI::ValidationError("--method", "unknown method '" + s + "'");
}

void write_output(const std::string& out_path, const std::string& payload) {
  if (out_path.empty() || out_path == "-") {
    std::cout << payload;
    return;
  }
  std::ofstream out(out_path);
  out << payload;
  if (!out) throw std::ios_base::failure("cannot write '" + out_path + "'");
}

int run(int argc, char** argv) {
  CLI::App app{"Bayesian measures of replication success"};
  app.require_subcommand(1);

  std::string gamma_str = "1/3";
  std::string format = "csv";
  std::string out_path;

  // ---- analyze ----
  auto* analyze_cmd = app.add_subcommand(
      "analyze", "compute the results table for study records from CSV files");
  std::vector<std::string> files;
  bool truncate = false, exact = false, quiet = false;
  analyze_cmd->add_option("files", files, "input CSV files")->required();
  analyze_cmd->add_option("--gamma", gamma_str, "success level (e.g. 1/3 or 0.1)");
  analyze_cmd->add_flag("--truncate", truncate, "truncate the advocacy prior");
  analyze_cmd->add_flag("--exact", exact, "add exact-likelihood columns where data allow");
  analyze_cmd->add_option("--format", format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  analyze_cmd->add_option("--out", out_path, "output file (default stdout)");
  analyze_cmd->add_flag("--quiet", quiet, "suppress row diagnostics on stderr");

  // ---- curves ----
  auto* curves_cmd = app.add_subcommand(
      "curves", "emit curve data: bf_vs_g or success_region");
  std::string kind = "bf_vs_g";
  std::vector<double> zo_list, c_list;
  int points = 200;
  curves_cmd->add_option("--kind", kind, "bf_vs_g or success_region")
      ->check(CLI::IsMember({"bf_vs_g", "success_region"}));
  curves_cmd->add_option("--zo", zo_list, "original z-values");
  curves_cmd->add_option("--c", c_list, "relative variances");
  curves_cmd->add_option("--gamma", gamma_str, "success level");
  curves_cmd->add_option("--points", points, "grid points per series");
  curves_cmd->add_option("--format", format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  curves_cmd->add_option("--out", out_path, "output file")->required();

  // ---- power ----
  auto* power_cmd = app.add_subcommand("power", "emit power curves against c");
  power_cmd->add_option("--zo", zo_list, "original z-values");
  power_cmd->add_option("--gamma", gamma_str, "success level");
  power_cmd->add_option("--points", points, "grid points per series");
  double c_min = 0.1, c_max = 64.0;
  power_cmd->add_option("--c-min", c_min, "smallest relative variance");
  power_cmd->add_option("--c-max", c_max, "largest relative variance");
  power_cmd->add_option("--format", format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  power_cmd->add_option("--out", out_path, "output file")->required();

  // ---- t1e ----
  auto* t1e_cmd = app.add_subcommand("t1e", "emit type I error curves against c");
  std::vector<std::string> gamma_list_str;
  t1e_cmd->add_option("--gamma", gamma_list_str, "levels (repeatable)");
  t1e_cmd->add_option("--points", points, "grid points per series");
  t1e_cmd->add_option("--c-min", c_min, "smallest relative variance");
  t1e_cmd->add_option("--c-max", c_max, "largest relative variance");
  t1e_cmd->add_option("--format", format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  t1e_cmd->add_option("--out", out_path, "output file")->required();

  // ---- mc-check ----
  auto* mc_cmd = app.add_subcommand(
      "mc-check", "compare an analytic success rate against Monte Carlo");
  std::string method_str = "sceptical_bf", truth_str = "null";
  double zo = 2.5, c_val = 1.0;
  std::int64_t n_sims = 1000000;
  std::uint64_t seed = 42;
  mc_cmd->add_option("--method", method_str,
                     "sceptical_bf, two_trials, replication_bf or sceptical_p");
  mc_cmd->add_option("--gamma", gamma_str, "success level");
  mc_cmd->add_option("--c", c_val, "relative variance");
  mc_cmd->add_option("--truth", truth_str, "null, conditional or predictive")
      ->check(CLI::IsMember({"null", "conditional", "predictive"}));
  mc_cmd->add_option("--zo", zo, "original z-value (conditional/predictive)");
  mc_cmd->add_option("--n-sims", n_sims, "number of draws");
  mc_cmd->add_option("--seed", seed, "RNG seed");
  mc_cmd->add_option("--format", format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  mc_cmd->add_option("--out", out_path, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  const double gamma = parse_gamma(gamma_str);

  if (*analyze_cmd) {
    std::vector<io::StudyRecord> records;
    for (const auto& f : files) {
      auto loaded = io::load_studies(f);
      if (!quiet) {
        for (const auto& d : loaded.diagnostics)
          std::fprintf(stderr, "%s:%d: skipped row: %s\n", f.c_str(), d.line,
                       d.message.c_str());
      }
      records.insert(records.end(), loaded.records.begin(), loaded.records.end());
    }
    const auto rows = io::analyze(records, io::AnalyzeOptions{gamma, truncate, exact});
    write_output(out_path, format == "json" ? io::to_json(rows).dump(1) + "\n"
                                            : io::to_csv(rows));
    return 0;
  }

  io::CurveParams params;
  if (!zo_list.empty()) params.z_o_list = zo_list;
  if (!c_list.empty()) params.c_list = c_list;
  params.gamma = gamma;
  params.grid_points = points;
  params.c_min = c_min;
  params.c_max = c_max;

  if (*curves_cmd) {
    const auto k = (kind == "bf_vs_g") ? io::CurveKind::bf_vs_g
                                       : io::CurveKind::success_region;
    io::emit_curves(k, params, out_path, format);
    return 0;
  }
  if (*power_cmd) {
    io::emit_curves(io::CurveKind::power, params, out_path, format);
    return 0;
  }
  if (*t1e_cmd) {
    params.gamma_list.clear();
    if (gamma_list_str.empty()) gamma_list_str = {"1/3"};
    for (const auto& s : gamma_list_str) params.gamma_list.push_back(parse_gamma(s));
    io::emit_curves(io::CurveKind::t1e, params, out_path, format);
    return 0;
  }
  if (*mc_cmd) {
    const auto method = parse_method(method_str);
    const normal::Level level{gamma};
    freq::McTruth truth = freq::McTruth::null();
    double analytic;
    if (truth_str == "conditional") {
      truth = freq::McTruth::fixed_effect(zo);
      analytic = freq::prob_success(method, zo, c_val, level,
                                    freq::SamplingHypothesis::conditional(zo, c_val))
                     .probability;
    } else if (truth_str == "predictive") {
      truth = freq::McTruth::predictive(zo);
      analytic = freq::prob_success(method, zo, c_val, level,
                                    freq::SamplingHypothesis::predictive(zo, c_val))
                     .probability;
    } else {
      analytic = freq::type1_error(method, level, c_val).probability;
    }
    const auto mc = freq::monte_carlo_rate(method, level, c_val, truth, n_sims, seed);
    const double se = *mc.mc_std_error;
    const double zdiff = (se > 0.0) ? (analytic - mc.probability) / se : 0.0;
    std::string payload;
    if (format == "json") {
      nlohmann::json j{{"method", method_str}, {"gamma", gamma},
                       {"c", c_val},           {"truth", truth_str},
                       {"analytic", analytic}, {"monte_carlo", mc.probability},
                       {"mc_std_error", se},   {"z", zdiff},
                       {"n_sims", n_sims},     {"seed", seed}};
      payload = j.dump(1) + "\n";
    } else {
      payload = "method,gamma,c,truth,analytic,monte_carlo,mc_std_error,z\n";
      char buf[256];
      std::snprintf(buf, sizeof buf, "%s,%g,%g,%s,%.8g,%.8g,%.3g,%.2f\n",
                    method_str.c_str(), gamma, c_val, truth_str.c_str(), analytic,
                    mc.probability, se, zdiff);
      payload += buf;
    }
    write_output(out_path, payload);
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const repbayes::io::format_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::ios_base::failure& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
