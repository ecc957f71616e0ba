#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace trs {

using SymbolId = std::uint32_t;
using VarId = std::uint32_t;
using SortId = std::uint32_t;

struct SymbolInfo {
    std::string name;
    std::uint32_t arity = 0;
    SortId sort = 0;
    std::vector<SortId> argument_sorts;
};

struct VarInfo {
    std::string name;
    SortId sort = 0;
};

// Names are interned to dense ids at resolution time; engines operate on ids
// only, names survive for printing and diagnostics.
struct Signature {
    std::vector<std::string> sorts;
    std::vector<SymbolInfo> symbols;
    std::vector<VarInfo> variables;
    std::uint32_t max_arity = 0;

    std::unordered_map<std::string, SortId> sort_ids;
    std::unordered_map<std::string, SymbolId> symbol_ids;
    std::unordered_map<std::string, VarId> variable_ids;

    // declaration order of symbols under each sort, for printing
    std::vector<std::vector<SymbolId>> sort_symbols;

    SortId add_sort(std::string name);
    SymbolId add_symbol(std::string name, SortId sort, std::vector<SortId> argument_sorts);
    VarId add_variable(std::string name, SortId sort);

    const std::string& sort_name(SortId s) const { return sorts[s]; }
    const SymbolInfo& symbol(SymbolId f) const { return symbols[f]; }
    const VarInfo& variable(VarId v) const { return variables[v]; }
};

class TermNode;

// Terms are immutable and freely shareable; physically shared subterms form a
// DAG, which equality and printing treat as its tree unfolding.
using Term = std::shared_ptr<const TermNode>;

class TermNode {
public:
    static Term variable(VarId v);
    static Term apply(SymbolId f, std::vector<Term> children);

    bool is_variable() const { return is_var_; }
    VarId var() const { return id_; }
    SymbolId symbol() const { return id_; }
    const std::vector<Term>& children() const { return children_; }

private:
    TermNode(bool is_var, std::uint32_t id, std::vector<Term> children)
        : is_var_(is_var), id_(id), children_(std::move(children)) {}

    bool is_var_;
    std::uint32_t id_;
    std::vector<Term> children_;
};

struct Substitution {
    std::map<VarId, Term> bindings;

    const Term* find(VarId v) const {
        auto it = bindings.find(v);
        return it == bindings.end() ? nullptr : &it->second;
    }
};

// Root symbol of an application; throws std::invalid_argument for variables,
// where the head symbol is undefined.
SymbolId head_symbol(const Term& t);

std::set<VarId> variables_of(const Term& t);

// One-sided matching of a left-linear pattern against a ground subject.
// Returns the witnessing substitution, or nullopt when no match exists.
std::optional<Substitution> match_pattern(const Term& pattern, const Term& subject);

// Applies s to t. Throws std::invalid_argument when t contains a variable
// that s does not bind.
Term apply_substitution(const Term& t, const Substitution& s);

// Structural (tree) equality; insensitive to physical sharing.
bool term_equal(const Term& a, const Term& b);
bool term_equal(const TermNode* a, const TermNode* b);

bool is_ground(const Term& t);

struct Rule {
    Term lhs;
    Term rhs;
    std::uint32_t source_order = 0;
};

enum class RuleViolationKind {
    LhsIsVariable,
    FreeRhsVariable,  // variable of rhs does not occur in lhs
    NonLeftLinear,    // variable occurs more than once in lhs
};

struct RuleViolation {
    RuleViolationKind kind;
    VarId var = 0;                    // offending variable, when applicable
    std::vector<std::uint32_t> path;  // occurrence path within lhs/rhs
};

// Checks the three rule conditions (lhs not a variable, every rhs variable
// bound in lhs, left-linear lhs). Empty result means the pair is a valid rule.
std::vector<RuleViolation> validate_rule(const Term& lhs, const Term& rhs);

struct RewriteSystem {
    Signature signature;
    std::vector<Rule> rules;
    // symbol id -> indices into rules, in source order; empty for constructors
    std::vector<std::vector<std::uint32_t>> rules_by_head;
    Term input_term;
};

// Result sort of a term under the signature. Variables report their declared
// sort. Does not deep-check well-sortedness.
SortId sort_of(const Signature& sig, const Term& t);

// Deep well-formedness check: arities and argument sorts everywhere.
bool well_formed(const Signature& sig, const Term& t);

std::string print_term(const Signature& sig, const Term& t);

// Canonical concrete syntax for a resolved system; re-parses to an equal
// system (modulo whitespace).
std::string print_system(const RewriteSystem& system);

}  // namespace trs
