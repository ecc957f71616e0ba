#include "trs/term_store.hpp"

#include <atomic>
#include <unordered_map>

namespace trs {

void TermStore::grow(std::uint32_t new_capacity) {
    if (new_capacity <= capacity) return;
    hss.resize(new_capacity, 0);
    for (auto& column : args) column.resize(new_capacity, 0);
    nf.resize(new_capacity, 0);
    nf_read.resize(new_capacity, 0);
    refcounts.resize(new_capacity, 0);
    refcounts_read.resize(new_capacity, 0);
    collected.resize(new_capacity, 0);
    sub_cursor.resize(new_capacity, 0);
    // the ring geometry changes with capacity: compact the live window
    std::vector<std::uint32_t> window;
    for (std::uint64_t p = next_free_begin; p < next_free_end; ++p)
        window.push_back(free_indices[p % capacity]);
    free_indices.assign(new_capacity, 0);
    for (std::size_t i = 0; i < window.size(); ++i) free_indices[i] = window[i];
    next_free_begin = 0;
    next_free_end = window.size();
    capacity = new_capacity;
}

TermStore load(const RewriteSystem& system, const Term& input, std::uint32_t capacity) {
    if (!is_ground(input)) throw std::invalid_argument("derivations need a ground input term");
    const Signature& sig = system.signature;

    // count distinct nodes of the input DAG
    std::unordered_map<const TermNode*, std::uint32_t> slots;
    std::vector<const TermNode*> order;  // pre-order, root first
    {
        std::vector<const TermNode*> stack{input.get()};
        while (!stack.empty()) {
            const TermNode* node = stack.back();
            stack.pop_back();
            if (slots.count(node)) continue;
            slots.emplace(node, static_cast<std::uint32_t>(order.size() + 1));
            order.push_back(node);
            const auto& children = node->children();
            for (auto it = children.rbegin(); it != children.rend(); ++it) stack.push_back(it->get());
        }
    }

    std::uint32_t needed = static_cast<std::uint32_t>(order.size()) + 1;
    if (capacity != 0 && capacity < needed)
        throw EngineError(EngineFault::Capacity,
                          "store capacity " + std::to_string(capacity) + " cannot hold " +
                              std::to_string(needed - 1) + " input term nodes");

    TermStore store;
    store.maxarity = sig.max_arity;
    store.arity_of.reserve(sig.symbols.size());
    for (const SymbolInfo& info : sig.symbols) store.arity_of.push_back(info.arity);
    store.args.resize(store.maxarity);
    store.grow(capacity == 0 ? needed : capacity);

    store.n = needed;
    store.root = 1;
    for (const TermNode* node : order) {
        std::uint32_t slot = slots.at(node);
        store.hss[slot] = node->symbol();
        for (std::size_t j = 0; j < node->children().size(); ++j) {
            std::uint32_t child = slots.at(node->children()[j].get());
            store.args[j][slot] = child;
            ++store.refcounts[child];  // in-degree
        }
    }
    ++store.refcounts[store.root];  // pin
    return store;
}

Term extract(const TermStore& store) {
    std::unordered_map<std::uint32_t, Term> memo;
    struct Frame {
        std::uint32_t slot;
        std::uint32_t next = 0;
        std::vector<Term> children;
    };
    auto check = [&](std::uint32_t slot) {
        if (slot == 0 || slot >= store.n || store.collected[slot])
            throw EngineError(EngineFault::DanglingReference,
                              "slot " + std::to_string(slot) + " is not a live term");
    };
    check(store.root);
    std::vector<Frame> stack{{store.root, 0, {}}};
    Term result;
    while (!stack.empty()) {
        Frame& f = stack.back();
        std::uint32_t ar = store.arity_at(f.slot);
        if (f.next < ar) {
            std::uint32_t child = store.args[f.next][f.slot];
            ++f.next;
            check(child);
            auto it = memo.find(child);
            if (it != memo.end()) {
                f.children.push_back(it->second);
            } else {
                stack.push_back({child, 0, {}});
            }
            continue;
        }
        Term built = TermNode::apply(store.hss[f.slot], std::move(f.children));
        memo.emplace(f.slot, built);
        stack.pop_back();
        if (stack.empty())
            result = std::move(built);
        else
            stack.back().children.push_back(std::move(built));
    }
    return result;
}

std::uint32_t get_new_index(TermStore& store, std::uint32_t region_n) {
    std::atomic_ref<std::uint64_t> begin(store.next_free_begin);
    std::atomic_ref<std::uint64_t> end(store.next_free_end);
    std::uint32_t new_id = 0;
    std::uint64_t n_begin = begin.load(std::memory_order_relaxed);
    std::uint64_t n_end = end.load(std::memory_order_relaxed);
    if (n_begin < n_end) {
        n_begin = begin.fetch_add(1, std::memory_order_relaxed);
        // the claim may have raced past the window end; fall through if so
        if (n_begin < n_end) new_id = store.free_indices[n_begin % store.capacity];
    }
    if (new_id == 0) {
        std::uint32_t fresh =
            std::atomic_ref<std::uint32_t>(store.next_fresh).fetch_add(1, std::memory_order_relaxed);
        std::uint64_t slot = static_cast<std::uint64_t>(region_n) + fresh;
        if (slot >= store.capacity) return 0;
        new_id = static_cast<std::uint32_t>(slot);
    }
    std::atomic_ref<std::uint8_t>(store.collected[new_id]).store(0, std::memory_order_relaxed);
    return new_id;
}

void collect_free_indices(TermStore& store, std::uint32_t lo, std::uint32_t hi) {
    std::atomic_ref<std::uint64_t> end(store.next_free_end);
    for (std::uint32_t i = lo; i < hi; ++i) {
        if (std::atomic_ref<std::uint32_t>(store.refcounts[i]).load(std::memory_order_relaxed) != 0)
            continue;
        std::atomic_ref<std::uint8_t> mark(store.collected[i]);
        if (mark.load(std::memory_order_relaxed)) continue;
        mark.store(1, std::memory_order_relaxed);
        // drop references to the arguments; children hitting zero are
        // gathered by a later pass
        std::uint32_t ar = store.arity_at(i);
        for (std::uint32_t j = 0; j < ar; ++j)
            std::atomic_ref<std::uint32_t>(store.refcounts[store.args[j][i]])
                .fetch_sub(1, std::memory_order_relaxed);
        std::uint64_t pos = end.fetch_add(1, std::memory_order_relaxed);
        store.free_indices[pos % store.capacity] = i;
    }
}

std::string dump_store(const Signature& sig, const TermStore& store) {
    std::string out;
    for (std::uint32_t i = 1; i < store.n; ++i) {
        if (store.collected[i]) continue;
        out += std::to_string(i) + "  " + sig.symbol(store.hss[i]).name;
        std::uint32_t ar = store.arity_at(i);
        for (std::uint32_t j = 0; j < ar; ++j) out += "  " + std::to_string(store.args[j][i]);
        out += "  rc=" + std::to_string(store.refcounts[i]);
        out += store.nf[i] ? "  nf" : "  -";
        out += '\n';
    }
    return out;
}

}  // namespace trs
