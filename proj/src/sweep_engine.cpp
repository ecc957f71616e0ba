#include "trs/sweep_engine.hpp"

#include <algorithm>
#include <atomic>
#include <barrier>
#include <chrono>
#include <ostream>
#include <thread>

namespace trs {

namespace {

struct StoreAccessor {
    using Ref = std::uint32_t;
    const TermStore* store;
    SymbolId head(Ref r) const { return store->hss[r]; }
    Ref child(Ref r, std::uint32_t j) const { return store->args[j][r]; }
};

class SweepEngine {
public:
    SweepEngine(TermStore& store, const DispatchTable& table, const SweepOptions& options)
        : store_(store), table_(table), opt_(options) {
        workers_ = opt_.workers ? opt_.workers
                                : std::max(1u, std::thread::hardware_concurrency());
        chunk_ = std::max<std::uint32_t>(1, opt_.chunk_size);
        if (opt_.validate) init_debug();
    }

    SweepTrace run() {
        SweepTrace trace;
        std::exception_ptr pending;
        if (workers_ == 1) {
            pending = main_loop(trace);
        } else {
            std::barrier<> barrier(workers_);
            barrier_ = &barrier;
            std::vector<std::jthread> pool;
            for (unsigned w = 1; w < workers_; ++w) pool.emplace_back([this] { worker_loop(); });
            pending = main_loop(trace);
            phase_ = Phase::Stop;
            sync();  // release the pool
        }
        if (pending) std::rethrow_exception(pending);
        return trace;
    }

private:
    enum class Phase { Derive, Collect, Stop };

    void sync() {
        if (barrier_) barrier_->arrive_and_wait();
    }

    void worker_loop() {
        for (;;) {
            barrier_->arrive_and_wait();  // phase begin
            Phase phase = phase_;
            if (phase == Phase::Stop) return;
            if (phase == Phase::Derive)
                derive_phase();
            else
                collect_phase();
            barrier_->arrive_and_wait();  // phase end
        }
    }

    std::exception_ptr main_loop(SweepTrace& trace) {
        for (;;) {
            ++sweep_;
            auto start = std::chrono::steady_clock::now();

            // ---- sequential prep: workers are parked at the begin barrier
            try {
                ensure_headroom();
            } catch (...) {
                return std::current_exception();
            }
            std::copy_n(store_.nf.begin(), store_.n, store_.nf_read.begin());
            std::copy_n(store_.refcounts.begin(), store_.n, store_.refcounts_read.begin());
            done_.store(true, std::memory_order_relaxed);
            garbage_collecting_.store(false, std::memory_order_relaxed);
            sweep_rewrites_.store(0, std::memory_order_relaxed);
            chunk_cursor_.store(1, std::memory_order_relaxed);
            region_n_ = store_.n;
            phase_ = Phase::Derive;

            sync();
            derive_phase();
            sync();

            // ---- sequential fold
            bool aborted = abort_.load(std::memory_order_relaxed);
            std::uint64_t folded = static_cast<std::uint64_t>(store_.n) + store_.next_fresh;
            store_.n = static_cast<std::uint32_t>(
                std::min<std::uint64_t>(folded, store_.capacity));
            store_.next_fresh = 0;
            // racing claims may have pushed the front cursor past the end;
            // the skipped positions held no indices
            if (store_.next_free_begin > store_.next_free_end)
                store_.next_free_begin = store_.next_free_end;

            std::uint64_t width = sweep_rewrites_.load(std::memory_order_relaxed);
            total_rewrites_ += width;
            bool h_done = done_.load(std::memory_order_relaxed);

            if (garbage_collecting_.load(std::memory_order_relaxed)) {
                chunk_cursor_.store(1, std::memory_order_relaxed);
                phase_ = Phase::Collect;
                sync();
                collect_phase();
                sync();
                garbage_collecting_.store(false, std::memory_order_relaxed);
            }

            SweepRecord record;
            record.sweep = sweep_;
            record.rewrites = width;
            record.n = store_.n;
            record.free_len = store_.free_window();
            for (std::uint32_t i = 1; i < store_.n; ++i)
                if (store_.refcounts[i] > 0) ++record.live_terms;
            record.micros = static_cast<std::uint64_t>(
                std::chrono::duration_cast<std::chrono::microseconds>(
                    std::chrono::steady_clock::now() - start)
                    .count());
            trace.records.push_back(record);

            if (aborted)
                return std::make_exception_ptr(EngineError(
                    EngineFault::Capacity,
                    "term store capacity " + std::to_string(store_.capacity) +
                        " exhausted (fixed capacity; rerun with a larger --capacity)"));
            if (total_rewrites_ > opt_.step_budget)
                return std::make_exception_ptr(EngineError(
                    EngineFault::StepBudget,
                    "step budget of " + std::to_string(opt_.step_budget) +
                        " rewrites exceeded; the derivation may not terminate"));
            if (opt_.validate) {
                try {
                    validate_quiescent();
                } catch (...) {
                    return std::current_exception();
                }
            }
            if (h_done) return nullptr;
        }
    }

    // ---- derive sweep ------------------------------------------------------

    void derive_phase() {
        for (;;) {
            std::uint32_t lo = chunk_cursor_.fetch_add(chunk_, std::memory_order_relaxed);
            if (lo >= region_n_) return;
            if (abort_.load(std::memory_order_relaxed)) return;
            std::uint32_t hi = std::min(region_n_, lo + chunk_);
            for (std::uint32_t i = lo; i < hi; ++i) derive_slot(i);
        }
    }

    void derive_slot(std::uint32_t i) {
        if (store_.refcounts_read[i] == 0) {
            // dead slot: request a collection pass unless already recycled
            if (!std::atomic_ref<std::uint8_t>(store_.collected[i]).load(std::memory_order_relaxed))
                garbage_collecting_.store(true, std::memory_order_relaxed);
            return;
        }
        if (store_.nf_read[i]) return;
        done_.store(false, std::memory_order_relaxed);

        std::uint32_t ar = store_.arity_at(i);
        std::uint32_t j = opt_.subterm_cursor ? store_.sub_cursor[i] : 0;
        for (; j < ar; ++j)
            if (!store_.nf_read[store_.args[j][i]]) break;
        if (opt_.subterm_cursor) store_.sub_cursor[i] = static_cast<std::uint8_t>(j);
        if (j < ar) return;  // a subterm is still pending; wait a sweep

        StoreAccessor acc{&store_};
        auto match = try_rules(table_, store_.hss[i], acc, i);
        if (!match) {
            store_.nf[i] = true;
            if (opt_.validate) nf_set_sweep_[i] = sweep_;
            return;
        }
        apply_rule_at(i, *match);
    }

    void apply_rule_at(std::uint32_t i, const RuleMatch<StoreAccessor>& match) {
        const RhsTemplate& tmpl = match.rule->rhs;
        const std::vector<std::uint32_t>& bound = match.bindings;
        if (opt_.validate) check_inner_most(i, bound);

        // capture the references the matched left-hand side consumes before
        // overwriting the slot
        thread_local std::vector<std::uint32_t> old_children;
        std::uint32_t old_ar = store_.arity_at(i);
        old_children.assign(old_ar, 0);
        for (std::uint32_t j = 0; j < old_ar; ++j) old_children[j] = store_.args[j][i];

        if (tmpl.collapses()) {
            // copy head and argument indices of the bound subterm into place
            std::uint32_t src = bound[tmpl.root_ref.index];
            SymbolId sym = store_.hss[src];
            std::uint32_t ar = store_.arity_of[sym];
            store_.hss[i] = sym;
            for (std::uint32_t j = 0; j < ar; ++j) {
                std::uint32_t c = store_.args[j][src];
                store_.args[j][i] = c;
                rc_add(c, 1);
            }
            for (std::uint32_t j = ar; j < store_.maxarity; ++j) store_.args[j][i] = 0;
            store_.nf[i] = true;  // the bound subterm was in normal form
            if (opt_.validate) nf_set_sweep_[i] = sweep_;
        } else {
            std::uint32_t new_count = tmpl.new_slots();
            thread_local std::vector<std::uint32_t> fresh;
            fresh.assign(new_count, 0);
            // claim every slot up front so a capacity failure mutates nothing
            for (std::uint32_t k = 0; k < new_count; ++k) {
                fresh[k] = claim_slot();
                if (fresh[k] == 0) {
                    abort_.store(true, std::memory_order_relaxed);
                    return;
                }
            }
            auto resolve = [&](const RhsRef& ref) {
                return ref.kind == RhsRef::Kind::Var ? bound[ref.index] : fresh[ref.index];
            };
            for (std::uint32_t k = 0; k < new_count; ++k) {
                const RhsInstr& instr = tmpl.instructions[k];
                std::uint32_t s = fresh[k];
                store_.hss[s] = instr.symbol;
                std::uint32_t ar = store_.arity_of[instr.symbol];
                for (std::uint32_t j = 0; j < ar; ++j) store_.args[j][s] = resolve(instr.children[j]);
                for (std::uint32_t j = ar; j < store_.maxarity; ++j) store_.args[j][s] = 0;
                // in-degree within the built structure; published below
                std::atomic_ref<std::uint32_t>(store_.refcounts[s])
                    .store(instr.indegree, std::memory_order_relaxed);
                store_.nf[s] = false;
                store_.sub_cursor[s] = 0;
            }
            const RhsInstr& root = tmpl.instructions.back();
            store_.hss[i] = root.symbol;
            std::uint32_t root_ar = store_.arity_of[root.symbol];
            for (std::uint32_t j = 0; j < root_ar; ++j) store_.args[j][i] = resolve(root.children[j]);
            for (std::uint32_t j = root_ar; j < store_.maxarity; ++j) store_.args[j][i] = 0;
            store_.nf[i] = false;  // the rebuilt term may itself be a redex
            // every reuse of a bound variable adds one reference to its slot
            for (const RhsInstr& instr : tmpl.instructions)
                for (const RhsRef& ref : instr.children)
                    if (ref.kind == RhsRef::Kind::Var) rc_add(bound[ref.index], 1);
        }
        store_.sub_cursor[i] = 0;
        for (std::uint32_t j = 0; j < old_ar; ++j) rc_sub(old_children[j], 1);
        sweep_rewrites_.fetch_add(1, std::memory_order_relaxed);
    }

    std::uint32_t claim_slot() {
        std::uint32_t id = get_new_index(store_, region_n_);
        if (id != 0 && opt_.validate)
            std::atomic_ref<std::uint32_t>(alloc_gen_[id]).fetch_add(1, std::memory_order_relaxed);
        return id;
    }

    void rc_add(std::uint32_t slot, std::uint32_t delta) {
        std::atomic_ref<std::uint32_t>(store_.refcounts[slot])
            .fetch_add(delta, std::memory_order_relaxed);
    }

    void rc_sub(std::uint32_t slot, std::uint32_t delta) {
        std::atomic_ref<std::uint32_t>(store_.refcounts[slot])
            .fetch_sub(delta, std::memory_order_relaxed);
    }

    // ---- free-index collection ---------------------------------------------

    void collect_phase() {
        for (;;) {
            std::uint32_t lo = chunk_cursor_.fetch_add(chunk_, std::memory_order_relaxed);
            if (lo >= store_.n) return;
            std::uint32_t hi = std::min(store_.n, lo + chunk_);
            collect_free_indices(store_, lo, hi);
        }
    }

    // ---- capacity -----------------------------------------------------------

    void ensure_headroom() {
        if (opt_.fixed_capacity) return;
        // worst case every slot of the region rewrites with the largest
        // template and no index is recycled
        std::uint64_t needed = static_cast<std::uint64_t>(store_.n) +
                               static_cast<std::uint64_t>(store_.n - 1) * table_.max_new_slots + 1;
        if (needed <= store_.capacity) return;
        std::uint64_t target =
            std::max<std::uint64_t>({needed, static_cast<std::uint64_t>(store_.capacity) * 2, 64});
        if (target > UINT32_MAX)
            throw EngineError(EngineFault::Capacity, "term store would exceed 2^32 slots");
        store_.grow(static_cast<std::uint32_t>(target));
        if (opt_.validate) init_debug();
    }

    // ---- quiescent-point checks ---------------------------------------------

    void init_debug() {
        nf_set_sweep_.resize(store_.capacity, 0);
        alloc_gen_.resize(store_.capacity, 0);
        prev_nf_.resize(store_.capacity, 0);
        prev_gen_.resize(store_.capacity, 0);
    }

    void check_inner_most(std::uint32_t i, const std::vector<std::uint32_t>& bound) {
        std::uint32_t ar = store_.arity_at(i);
        for (std::uint32_t j = 0; j < ar; ++j) {
            std::uint32_t c = store_.args[j][i];
            if (!store_.nf_read[c])
                fail_check("inner-most safety: rewriting a slot with a non-normal argument");
            if (nf_set_sweep_[c] >= sweep_)
                fail_check("snapshot discipline: argument normality was not visible in nf_read");
        }
        for (std::uint32_t b : bound) {
            if (!store_.nf_read[b])
                fail_check("inner-most safety: binding a non-normal subterm");
            if (nf_set_sweep_[b] >= sweep_)
                fail_check("snapshot discipline: binding normality was not visible in nf_read");
        }
    }

    [[noreturn]] void fail_check(const std::string& message) {
        throw std::logic_error("sweep invariant violation: " + message);
    }

    void validate_quiescent() {
        // refcount ghost invariant: rc[i] = references from uncollected slots + root pin
        std::vector<std::uint64_t> counted(store_.n, 0);
        for (std::uint32_t i = 1; i < store_.n; ++i) {
            if (store_.collected[i]) continue;
            std::uint32_t ar = store_.arity_at(i);
            for (std::uint32_t j = 0; j < ar; ++j) {
                std::uint32_t c = store_.args[j][i];
                if (c == 0 || c >= store_.n)
                    fail_check("slot " + std::to_string(i) + " references invalid slot " +
                               std::to_string(c));
                ++counted[c];
            }
        }
        ++counted[store_.root];
        for (std::uint32_t i = 1; i < store_.n; ++i) {
            if (store_.collected[i]) {
                if (counted[i] != 0 || store_.refcounts[i] != 0)
                    fail_check("collected slot " + std::to_string(i) + " is still referenced");
            } else if (counted[i] != store_.refcounts[i]) {
                fail_check("refcount ghost invariant: slot " + std::to_string(i) + " has rc " +
                           std::to_string(store_.refcounts[i]) + ", expected " +
                           std::to_string(counted[i]));
            }
        }
        // nf never falls within one slot lifetime
        for (std::uint32_t i = 1; i < store_.n; ++i) {
            if (alloc_gen_[i] == prev_gen_[i] && prev_nf_[i] && !store_.nf[i] &&
                !store_.collected[i])
                fail_check("nf monotonicity: slot " + std::to_string(i) + " left normal form");
            prev_gen_[i] = alloc_gen_[i];
            prev_nf_[i] = store_.nf[i];
        }
        // free window sanity
        if (store_.next_free_begin > store_.next_free_end)
            fail_check("free window cursors crossed at a quiescent point");
        std::vector<std::uint8_t> seen(store_.n, 0);
        for (std::uint64_t p = store_.next_free_begin; p < store_.next_free_end; ++p) {
            std::uint32_t idx = store_.free_indices[p % store_.capacity];
            if (idx == 0 || idx >= store_.n) fail_check("free window holds an invalid index");
            if (!store_.collected[idx] || store_.refcounts[idx] != 0)
                fail_check("free window holds a live slot");
            if (seen[idx]++) fail_check("free window holds a duplicate index");
        }
    }

    TermStore& store_;
    const DispatchTable& table_;
    SweepOptions opt_;
    unsigned workers_ = 1;
    std::uint32_t chunk_ = 256;

    std::barrier<>* barrier_ = nullptr;
    Phase phase_ = Phase::Derive;
    std::uint32_t region_n_ = 1;
    std::uint32_t sweep_ = 0;
    std::uint64_t total_rewrites_ = 0;
    std::atomic<bool> done_{true};
    std::atomic<bool> garbage_collecting_{false};
    std::atomic<bool> abort_{false};
    std::atomic<std::uint64_t> sweep_rewrites_{0};
    std::atomic<std::uint32_t> chunk_cursor_{1};

    // validate-mode bookkeeping
    std::vector<std::uint32_t> nf_set_sweep_;
    std::vector<std::uint32_t> alloc_gen_;
    std::vector<std::uint8_t> prev_nf_;
    std::vector<std::uint32_t> prev_gen_;
};

}  // namespace

std::uint64_t SweepTrace::total_rewrites() const {
    std::uint64_t total = 0;
    for (const SweepRecord& r : records) total += r.rewrites;
    return total;
}

std::uint64_t SweepTrace::max_width() const {
    std::uint64_t best = 0;
    for (const SweepRecord& r : records) best = std::max(best, r.rewrites);
    return best;
}

std::uint64_t SweepTrace::median_width() const {
    if (records.empty()) return 0;
    std::vector<std::uint64_t> widths;
    widths.reserve(records.size());
    for (const SweepRecord& r : records) widths.push_back(r.rewrites);
    std::sort(widths.begin(), widths.end());
    return widths[widths.size() / 2];
}

SweepTrace run(TermStore& store, const DispatchTable& table, const SweepOptions& options) {
    return SweepEngine(store, table, options).run();
}

void write_trace_csv(std::ostream& out, const SweepTrace& trace) {
    out << "sweep,rewrites,live_terms,n,free_len,micros\n";
    for (const SweepRecord& r : trace.records)
        out << r.sweep << ',' << r.rewrites << ',' << r.live_terms << ',' << r.n << ','
            << r.free_len << ',' << r.micros << '\n';
}

}  // namespace trs
