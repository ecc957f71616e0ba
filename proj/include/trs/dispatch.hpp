#pragma once

#include <optional>
#include <string>
#include <vector>

#include "trs/term.hpp"

namespace trs {

// One step of a compiled left-hand-side match. Paths are child-index
// sequences from the candidate redex root; steps run in pre-order of the
// pattern, so every CheckHead path descends only through positions whose head
// symbol an earlier step (or the dispatch on the root head) confirmed.
struct MatchStep {
    enum class Kind { CheckHead, BindVar };
    Kind kind;
    std::vector<std::uint8_t> path;
    SymbolId symbol = 0;         // CheckHead
    std::uint32_t var_slot = 0;  // BindVar
};

struct MatchProgram {
    SymbolId head = 0;
    std::vector<MatchStep> steps;
    std::vector<VarId> slot_vars;  // var_slot -> declared variable, for diagnostics
};

// Reference inside an RHS build template: either a bound variable slot or an
// earlier instruction of the same template.
struct RhsRef {
    enum class Kind { Var, Node };
    Kind kind;
    std::uint32_t index;

    auto operator<=>(const RhsRef&) const = default;
};

struct RhsInstr {
    SymbolId symbol = 0;
    std::vector<RhsRef> children;
    // references to this instruction from within the template (other
    // instructions plus the root); the initial refcount of the built slot
    std::uint32_t indegree = 0;
};

// Build plan for a rule's right-hand side. Instructions are in topological
// order (children before parents); structurally identical subterms of the RHS
// are emitted once and referenced multiply, so a variable occurring k times
// yields one shared target. When root_ref is a Node it is the last
// instruction and the engines write it into the rewritten position itself;
// when root_ref is a Var the rule collapses to the bound subterm.
struct RhsTemplate {
    std::vector<RhsInstr> instructions;
    RhsRef root_ref{RhsRef::Kind::Var, 0};

    bool collapses() const { return root_ref.kind == RhsRef::Kind::Var; }
    // fresh slots needed per application (root writes in place)
    std::uint32_t new_slots() const {
        return collapses() ? 0 : static_cast<std::uint32_t>(instructions.size()) - 1;
    }
};

struct CompiledRule {
    std::uint32_t rule_index = 0;  // source order within the system
    MatchProgram program;
    RhsTemplate rhs;
};

// Per-head-symbol rule programs in source order; first match wins. Symbols
// that never head a rule map to an empty list, so engines immediately treat
// such terms as normal-form candidates.
struct DispatchTable {
    std::vector<std::vector<CompiledRule>> by_symbol;
    std::uint32_t max_new_slots = 0;  // over all rules; sizes store headroom

    const std::vector<CompiledRule>& rules_for(SymbolId f) const { return by_symbol[f]; }
};

DispatchTable compile(const RewriteSystem& system);

// Stable textual form of the compiled programs, for golden tests and the
// dump-dispatch command.
std::string dump_dispatch(const RewriteSystem& system, const DispatchTable& table);

// Subject accessors expose head symbols and argument references of a
// candidate redex; tree-backed for the recursive engine and oracle tests,
// array-backed for the sweep engine.
struct TermAccessor {
    using Ref = const TermNode*;
    SymbolId head(Ref r) const { return r->symbol(); }
    Ref child(Ref r, std::uint32_t j) const { return r->children()[j].get(); }
};

template <class Acc>
bool run_match_program(const MatchProgram& program, const Acc& acc, typename Acc::Ref subject,
                       std::vector<typename Acc::Ref>& bindings) {
    bindings.resize(program.slot_vars.size());
    for (const MatchStep& step : program.steps) {
        typename Acc::Ref at = subject;
        for (std::uint8_t ix : step.path) at = acc.child(at, ix);
        if (step.kind == MatchStep::Kind::CheckHead) {
            if (acc.head(at) != step.symbol) return false;
        } else {
            bindings[step.var_slot] = at;
        }
    }
    return true;
}

template <class Acc>
struct RuleMatch {
    const CompiledRule* rule = nullptr;
    std::vector<typename Acc::Ref> bindings;  // var_slot -> subject reference
};

// First rule of the subject's head whose match program succeeds, in source
// order; nullopt tells the caller to mark the term normal form.
template <class Acc>
std::optional<RuleMatch<Acc>> try_rules(const DispatchTable& table, SymbolId head, const Acc& acc,
                                        typename Acc::Ref subject) {
    for (const CompiledRule& rule : table.rules_for(head)) {
        RuleMatch<Acc> match;
        if (run_match_program(rule.program, acc, subject, match.bindings)) {
            match.rule = &rule;
            return match;
        }
    }
    return std::nullopt;
}

}  // namespace trs
