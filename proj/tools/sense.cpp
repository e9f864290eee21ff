// sense: batch front-end for the AC-field sensing toolkit.
//
//   sense <experiment> --config <path> [--out <path>] [--seed <u64>] [--threads <n>]
//   sense diff <a.csv> <b.csv> [--abs <tol>] [--rel <tol>]
//
// Validation failures exit 1, numerical failures exit 2, both with a JSON
// error object on stderr: {"code", "message", "offending_keys"}.

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <json.hpp>

#include "sense/experiments.hpp"
#include "sense/gaussian.hpp"
#include "sense/metrology.hpp"
#include "sense/model.hpp"

namespace {

int fail(int code, const std::string& kind, const std::string& msg,
         const std::vector<std::string>& keys = {}) {
  nlohmann::json j;
  j["code"] = kind;
  j["message"] = msg;
  j["offending_keys"] = keys;
  std::cerr << j.dump() << "\n";
  return code;
}

const std::vector<std::string> kExperiments = {
    "evolve",   "gap-scan", "qfi-scan",  "gap-line",
    "scale",    "estimate", "ed-evolve", "square-pulse-scan"};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"steady-state AC-field sensing in kicked Ising chains"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;

  std::vector<CLI::App*> subs;
  for (const auto& name : kExperiments) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "flat key = value config file")->required();
    sub->add_option("--out", out_path, "output CSV path (overrides config key `out`)");
    sub->add_option("--seed", seed, "RNG master seed")->each([&](const std::string&) {
      seed_set = true;
    });
    sub->add_option("--threads", threads, "worker threads (SENSE_THREADS overrides)");
    subs.push_back(sub);
  }

  auto* diff = app.add_subcommand("diff", "compare two result tables");
  std::string file_a, file_b;
  double tol_abs = 0.0, tol_rel = 0.0;
  diff->add_option("a", file_a)->required();
  diff->add_option("b", file_b)->required();
  diff->add_option("--abs", tol_abs, "absolute tolerance");
  diff->add_option("--rel", tol_rel, "relative tolerance");

  CLI11_PARSE(app, argc, argv);

  try {
    if (diff->parsed()) {
      const auto a = sense::io::read_csv(file_a);
      const auto b = sense::io::read_csv(file_b);
      const auto rep = sense::io::diff_tables(a, b, {tol_abs, tol_rel});
      for (const auto& cdf : rep.columns)
        std::cout << cdf.column << ": max_abs=" << cdf.max_abs << " max_rel=" << cdf.max_rel
                  << (cdf.pass ? " pass" : " FAIL") << "\n";
      std::cout << (rep.pass ? "PASS" : "FAIL: " + rep.failing_column) << "\n";
      return rep.pass ? 0 : 2;
    }

    sense::experiments::RunOptions opt;
    for (std::size_t i = 0; i < kExperiments.size(); ++i)
      if (subs[i]->parsed()) opt.experiment = kExperiments[i];
    opt.config = sense::io::Config::parse_file(config_path);
    opt.out_path = !out_path.empty() ? out_path : opt.config.get_str("out", "");
    if (seed_set) opt.seed = seed;
    if (const char* env = std::getenv("SENSE_THREADS")) {
      opt.threads = std::atoi(env);
    } else if (threads > 0) {
      opt.threads = threads;
    } else {
      opt.threads = static_cast<int>(opt.config.get_long("threads", 1));
    }
    if (opt.threads < 1) opt.threads = 1;

    const auto table = sense::experiments::run(opt);
    std::cout << "rows: " << table.rows.size();
    if (!opt.out_path.empty()) std::cout << "  -> " << opt.out_path;
    std::cout << "\n";
    return 0;
  } catch (const sense::io::ConfigError& e) {
    return fail(1, "config", e.what(), e.offending_keys);
  } catch (const sense::InvalidParams& e) {
    return fail(1, "invalid_params", e.what(), e.violations);
  } catch (const sense::gaussian::NonPhysicalGamma& e) {
    return fail(2, "non_physical_gamma", e.what());
  } catch (const sense::metrology::AllZeroLikelihood& e) {
    return fail(2, "all_zero_likelihood", e.what());
  } catch (const sense::metrology::NonPositiveInput& e) {
    return fail(2, "non_positive_input", e.what());
  } catch (const std::exception& e) {
    return fail(2, "numerical", e.what());
  }
}
