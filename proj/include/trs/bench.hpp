#pragma once

#include <iosfwd>
#include <string>

#include "trs/generators.hpp"
#include "trs/parser.hpp"
#include "trs/seq_engine.hpp"
#include "trs/sweep_engine.hpp"

namespace trs {

// process exit codes shared by every command
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitResourceError = 3;
inline constexpr int kExitDivergence = 4;

struct EngineConfig {
    std::uint32_t capacity = 0;  // initial store slots; 0 sizes automatically
    SweepOptions sweep;
    SeqOptions seq;
};

struct BenchReport {
    std::string engine;
    std::uint64_t total_rewrites = 0;
    std::uint64_t micros = 0;
    double terms_per_second = 0.0;
    // sweep engine only
    std::uint32_t sweep_count = 0;
    std::uint64_t max_sweep_width = 0;
    std::uint64_t median_sweep_width = 0;
};

struct EngineRun {
    Term normal_form;
    BenchReport report;
    SweepTrace trace;  // empty for the sequential engine
};

// engine is "seq" or "sweep"
EngineRun run_engine(const RewriteSystem& system, const DispatchTable& table,
                     const std::string& engine, const EngineConfig& config);

// Commands behind the CLI; they print diagnostics to err in
// file:line:col: kind: message form and return an exit code.
int cmd_normalize(const std::string& path, const std::string& engine, const EngineConfig& config,
                  const std::string& trace_path, std::ostream& out, std::ostream& err);

int cmd_gen(const GenSpec& spec, const std::string& out_path, std::ostream& err);

// Runs each engine `repetitions` times, checks the engines' normal forms and
// rewrite counts agree (divergence aborts with a differential dump), and
// reports median terms/s plus sweep width statistics.
int cmd_bench(const std::string& path, const std::vector<std::string>& engines,
              unsigned repetitions, const EngineConfig& config, const std::string& csv_path,
              std::ostream& out, std::ostream& err);

int cmd_dump_dispatch(const std::string& path, std::ostream& out, std::ostream& err);

}  // namespace trs
