#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "sense/config.hpp"
#include "sense/table.hpp"

namespace sense::experiments {

inline constexpr const char* kVersion = "0.1.0";

/// Experiment ids accepted by run(): evolve, gap-scan, qfi-scan, gap-line,
/// scale, estimate, ed-evolve, square-pulse-scan.
struct RunOptions {
  std::string experiment;
  io::Config config;
  std::string out_path;                // empty = do not write
  std::optional<std::uint64_t> seed;   // overrides config key `seed`
  int threads = 1;
};

io::ResultTable run(const RunOptions& opt);

// individual experiments (also used directly by tests and the acceptance suite)
io::ResultTable evolve(const io::Config& c, int threads);
io::ResultTable gap_scan(const io::Config& c, int threads);
io::ResultTable qfi_scan(const io::Config& c, int threads);
io::ResultTable gap_line_table(const io::Config& c, int threads);
io::ResultTable scale(const io::Config& c, int threads);
io::ResultTable estimate(const io::Config& c, int threads, std::uint64_t seed);
io::ResultTable ed_evolve(const io::Config& c, int threads);
io::ResultTable square_pulse_scan(const io::Config& c, int threads);

/// Index-ordered worker pool: results land in submission order regardless of
/// scheduling, keeping outputs byte-stable under any thread count.
void parallel_for(long n, int threads, const std::function<void(long)>& fn);

}  // namespace sense::experiments
