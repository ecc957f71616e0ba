#pragma once

#include <iosfwd>

#include "trs/dispatch.hpp"
#include "trs/term_store.hpp"

namespace trs {

struct SweepRecord {
    std::uint32_t sweep = 0;  // 1-based
    std::uint64_t rewrites = 0;
    std::uint32_t live_terms = 0;
    std::uint32_t n = 0;
    std::uint32_t free_len = 0;
    std::uint64_t micros = 0;
};

// Per-sweep statistics; the rewrites column is the sweep width of the
// parallelism traces.
struct SweepTrace {
    std::vector<SweepRecord> records;

    std::uint64_t total_rewrites() const;
    std::uint64_t max_width() const;
    std::uint64_t median_width() const;
};

struct SweepOptions {
    unsigned workers = 0;            // 0 = hardware concurrency
    std::uint32_t chunk_size = 256;  // slots per work unit; never affects results
    std::uint64_t step_budget = 1'000'000'000;
    bool fixed_capacity = false;  // strict preallocation, hard failure when full
    bool subterm_cursor = true;   // resume subterm scans where the last sweep stopped
    bool validate = false;        // full invariant scans at quiescent points
};

// Bulk-synchronous rewriting to normal form: every sweep snapshots
// nf/refcounts into the read arrays, examines every slot of the term region
// in parallel (applying at most one inner-most rewrite per eligible slot),
// folds freshly claimed slots into the region, and runs a free-index
// collection pass whenever a sweep saw a dead slot. Returns when a sweep
// finds every live slot in normal form.
//
// Throws EngineError on step-budget or capacity exhaustion and
// std::logic_error when a validate scan finds an invariant violation.
SweepTrace run(TermStore& store, const DispatchTable& table, const SweepOptions& options = {});

// header: sweep,rewrites,live_terms,n,free_len,micros
void write_trace_csv(std::ostream& out, const SweepTrace& trace);

}  // namespace trs
