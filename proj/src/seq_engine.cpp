#include "trs/seq_engine.hpp"

#include <chrono>
#include <deque>
#include <unordered_map>

namespace trs {

namespace {

// Mutable in-place term graph. Rewrites overwrite the node so every parent
// observes the result, and RHS-duplicated variables share one node — the same
// representation rules as the array store, which keeps the engines' rewrite
// counts aligned.
struct SeqNode {
    SymbolId symbol;
    std::vector<SeqNode*> children;
    bool nf = false;
};

struct NodeAccessor {
    using Ref = SeqNode*;
    SymbolId head(Ref r) const { return r->symbol; }
    Ref child(Ref r, std::uint32_t j) const { return r->children[j]; }
};

class Graph {
public:
    SeqNode* make(SymbolId symbol, std::vector<SeqNode*> children) {
        arena_.push_back({symbol, std::move(children), false});
        return &arena_.back();
    }

    SeqNode* import(const Term& t) {
        // post-order over the input DAG; physically shared subterms import once
        if (!is_ground(t)) throw std::invalid_argument("derivations need a ground input term");
        std::unordered_map<const TermNode*, SeqNode*> memo;
        struct Frame {
            const TermNode* node;
            std::size_t next = 0;
            std::vector<SeqNode*> children;
        };
        std::vector<Frame> stack{{t.get(), 0, {}}};
        SeqNode* result = nullptr;
        while (!stack.empty()) {
            Frame& f = stack.back();
            if (f.next < f.node->children().size()) {
                const TermNode* child = f.node->children()[f.next].get();
                ++f.next;
                auto it = memo.find(child);
                if (it != memo.end()) {
                    f.children.push_back(it->second);
                } else {
                    stack.push_back({child, 0, {}});
                }
                continue;
            }
            SeqNode* built = make(f.node->symbol(), std::move(f.children));
            memo.emplace(f.node, built);
            result = built;
            stack.pop_back();
            if (!stack.empty()) stack.back().children.push_back(built);
        }
        return result;
    }

private:
    std::deque<SeqNode> arena_;  // stable addresses
};

Term export_term(const SeqNode* root) {
    std::unordered_map<const SeqNode*, Term> memo;
    struct Frame {
        const SeqNode* node;
        std::size_t next = 0;
        std::vector<Term> children;
    };
    std::vector<Frame> stack{{root, 0, {}}};
    Term result;
    while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.next < f.node->children.size()) {
            const SeqNode* child = f.node->children[f.next];
            ++f.next;
            auto it = memo.find(child);
            if (it != memo.end()) {
                f.children.push_back(it->second);
            } else {
                stack.push_back({child, 0, {}});
            }
            continue;
        }
        Term built = TermNode::apply(f.node->symbol, std::move(f.children));
        memo.emplace(f.node, built);
        stack.pop_back();
        if (stack.empty())
            result = std::move(built);
        else
            stack.back().children.push_back(std::move(built));
    }
    return result;
}

void apply_template(Graph& graph, SeqNode* at, const RhsTemplate& tmpl,
                    const std::vector<SeqNode*>& bindings) {
    if (tmpl.collapses()) {
        // copy the bound subterm's content into place; it was in normal form
        SeqNode* src = bindings[tmpl.root_ref.index];
        at->symbol = src->symbol;
        at->children = src->children;
        at->nf = true;
        return;
    }
    std::vector<SeqNode*> built(tmpl.instructions.size() - 1);
    auto resolve = [&](const RhsRef& ref) {
        return ref.kind == RhsRef::Kind::Var ? bindings[ref.index] : built[ref.index];
    };
    for (std::size_t k = 0; k + 1 < tmpl.instructions.size(); ++k) {
        const RhsInstr& instr = tmpl.instructions[k];
        std::vector<SeqNode*> children;
        children.reserve(instr.children.size());
        for (const RhsRef& ref : instr.children) children.push_back(resolve(ref));
        built[k] = graph.make(instr.symbol, std::move(children));
    }
    const RhsInstr& root = tmpl.instructions.back();
    std::vector<SeqNode*> children;
    children.reserve(root.children.size());
    for (const RhsRef& ref : root.children) children.push_back(resolve(ref));
    at->symbol = root.symbol;
    at->children = std::move(children);
    at->nf = false;  // the rebuilt term may itself be a redex
}

}  // namespace

SeqResult normalize(const RewriteSystem& system, const DispatchTable& table, const Term& input,
                    const SeqOptions& options) {
    (void)system;
    auto start = std::chrono::steady_clock::now();
    Graph graph;
    SeqNode* root = graph.import(input);
    SeqStats stats;

    struct Frame {
        SeqNode* node;
        std::uint32_t next_child = 0;
    };
    std::vector<Frame> stack{{root, 0}};
    NodeAccessor acc;
    while (!stack.empty()) {
        stats.peak_depth = std::max(stats.peak_depth, stack.size());
        Frame& f = stack.back();
        SeqNode* node = f.node;
        if (node->nf) {
            stack.pop_back();
            continue;
        }
        std::uint32_t ar = static_cast<std::uint32_t>(node->children.size());
        while (f.next_child < ar && node->children[f.next_child]->nf) ++f.next_child;
        if (f.next_child < ar) {
            stack.push_back({node->children[f.next_child]});
            continue;
        }
        auto match = try_rules(table, node->symbol, acc, node);
        if (!match) {
            node->nf = true;
            stack.pop_back();
            continue;
        }
        if (options.check_inner_most) {
            for (SeqNode* c : node->children)
                if (!c->nf) throw std::logic_error("inner-most discipline violated");
            for (SeqNode* b : match->bindings)
                if (!b->nf) throw std::logic_error("inner-most discipline violated");
        }
        if (++stats.rewritten_terms > options.step_budget)
            throw EngineError(EngineFault::StepBudget,
                              "step budget of " + std::to_string(options.step_budget) +
                                  " rewrites exceeded; the derivation may not terminate");
        apply_template(graph, node, match->rule->rhs, match->bindings);
        f.next_child = 0;  // re-normalization restarts at the new subterms
    }

    SeqResult result;
    result.normal_form = export_term(root);
    result.stats = stats;
    result.stats.micros = static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() -
                                                              start)
            .count());
    return result;
}

std::uint64_t count_oracle(const RewriteSystem& system, const DispatchTable& table,
                           const Term& input, const SeqOptions& options) {
    return normalize(system, table, input, options).stats.rewritten_terms;
}

}  // namespace trs
