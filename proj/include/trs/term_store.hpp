#pragma once

#include <string>

#include "trs/error.hpp"
#include "trs/term.hpp"

namespace trs {

// Structure-of-arrays term store mutated in place by sweeps. Slot 0 is never
// a term; args entries of 0 denote absent arguments, and the declared arity
// of the head symbol is authoritative for how many argument entries are live.
// The *_read arrays are the per-sweep snapshots: sweeps write nf/refcounts
// and base every eligibility decision on nf_read/refcounts_read.
struct TermStore {
    std::uint32_t capacity = 0;
    std::uint32_t n = 1;     // term region is [1, n)
    std::uint32_t root = 0;  // pinned with one extra reference
    std::uint32_t maxarity = 0;
    std::vector<std::uint32_t> arity_of;  // per symbol id

    std::vector<SymbolId> hss;
    std::vector<std::vector<std::uint32_t>> args;  // args[j][i], j < maxarity
    std::vector<std::uint8_t> nf, nf_read;
    std::vector<std::uint32_t> refcounts, refcounts_read;

    // garbage collection
    std::vector<std::uint8_t> collected;      // already handed to the free list
    std::vector<std::uint32_t> free_indices;  // ring of capacity entries
    std::uint64_t next_free_begin = 0;        // claim cursor (front)
    std::uint64_t next_free_end = 0;          // append cursor (back)
    std::uint32_t next_fresh = 0;             // fresh slots claimed past n this sweep

    std::vector<std::uint8_t> sub_cursor;  // last subterm checked, per slot

    std::uint32_t arity_at(std::uint32_t slot) const { return arity_of[hss[slot]]; }
    std::uint32_t free_window() const {
        return next_free_begin < next_free_end
                   ? static_cast<std::uint32_t>(next_free_end - next_free_begin)
                   : 0;
    }

    // Barrier-synchronized only: no sweep may be in flight.
    void grow(std::uint32_t new_capacity);
};

// Flattens a ground term into slots starting at index 1 (root at slot 1);
// physically shared subterms of the input DAG occupy one slot with refcount
// equal to their in-degree, and the root carries one extra pinned reference.
// capacity 0 sizes the store automatically (the engine grows it on demand);
// an explicit capacity that cannot hold the term raises EngineError(Capacity).
TermStore load(const RewriteSystem& system, const Term& input, std::uint32_t capacity = 0);

// Tree unfolding from the root. Raises EngineError(DanglingReference) when a
// live slot references slot 0, a collected slot, or one outside the term
// region — an engine bug, surfaced rather than repaired.
Term extract(const TermStore& store);

// Two-cursor free-index claim with fresh-index fallback (region_n is the
// term-region size the current sweep was launched with). Returns 0 when the
// store is out of capacity. The returned slot is exclusively owned by the
// caller until published; safe to call concurrently.
std::uint32_t get_new_index(TermStore& store, std::uint32_t region_n);

// Hands every uncollected refcount-0 slot in [lo, hi) to the free list after
// dropping its references to its arguments. Cascading frees are picked up by
// later passes. Disjoint ranges may run concurrently; a collected mark
// guarantees no slot is freed twice.
void collect_free_indices(TermStore& store, std::uint32_t lo, std::uint32_t hi);

// One line per live slot: `idx  symbol  arg...  rc  nf`, ordered by index.
std::string dump_store(const Signature& sig, const TermStore& store);

}  // namespace trs
