#pragma once

#include <algorithm>
#include <cctype>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "trs/dispatch.hpp"
#include "trs/generators.hpp"
#include "trs/parser.hpp"

namespace trs::test {

// Resolves text or fails the calling test loudly.
inline RewriteSystem system_of(const std::string& text) {
    ResolveResult result = load_system(text);
    if (!result.system) {
        std::string message = "system failed to resolve:";
        for (const ParseError& e : result.errors) message += "\n  " + format_error("<test>", e);
        throw std::runtime_error(message);
    }
    return std::move(*result.system);
}

// Minimal term-from-text builder over a resolved signature: Name(args) is a
// symbol application, a bare name is a variable.
class TermReader {
public:
    explicit TermReader(const Signature& sig) : sig_(sig) {}

    Term operator()(const std::string& text) const {
        std::size_t pos = 0;
        Term t = parse(text, pos);
        skip_ws(text, pos);
        if (pos != text.size()) throw std::runtime_error("trailing text in term: " + text);
        return t;
    }

private:
    static void skip_ws(const std::string& text, std::size_t& pos) {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\n')) ++pos;
    }

    Term parse(const std::string& text, std::size_t& pos) const {
        skip_ws(text, pos);
        std::size_t start = pos;
        while (pos < text.size() && (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            ++pos;
        std::string name = text.substr(start, pos - start);
        if (name.empty()) throw std::runtime_error("expected a name in term text");
        skip_ws(text, pos);
        if (pos >= text.size() || text[pos] != '(') {
            auto it = sig_.variable_ids.find(name);
            if (it == sig_.variable_ids.end()) throw std::runtime_error("unknown variable " + name);
            return TermNode::variable(it->second);
        }
        ++pos;  // '('
        auto sym = sig_.symbol_ids.find(name);
        if (sym == sig_.symbol_ids.end()) throw std::runtime_error("unknown symbol " + name);
        std::vector<Term> children;
        skip_ws(text, pos);
        if (pos < text.size() && text[pos] == ')') {
            ++pos;
        } else {
            for (;;) {
                children.push_back(parse(text, pos));
                skip_ws(text, pos);
                if (pos < text.size() && text[pos] == ',') {
                    ++pos;
                    continue;
                }
                if (pos < text.size() && text[pos] == ')') {
                    ++pos;
                    break;
                }
                throw std::runtime_error("expected ',' or ')' in term text");
            }
        }
        if (children.size() != sig_.symbol(sym->second).arity)
            throw std::runtime_error("arity mismatch in term text for " + name);
        return TermNode::apply(sym->second, std::move(children));
    }

    const Signature& sig_;
};

// Listing-1 shaped subset of the merge sort system: only the Merge/Merge2/
// Sort/Sort2 rules are present, every other symbol is a pure constructor.
inline std::string listing1_text() {
    return "sort  List = Nil() | Cons(Nat, List) | Sort(List) | Sort2(Bool, List) |\n"
           "             Merge(List, List) | Merge2(Bool, Nat, List, Nat, List) |\n"
           "             Even(List) | Odd(List);\n"
           "      Tree = Leaf(List) | Node(Tree, Tree);\n"
           "      Nat = Zero() | S(Nat) | Len(List);\n"
           "      Bool = True() | False() | Lt(Nat, Nat) | Gt(Nat, Nat);\n"
           "\n"
           "var X : Nat; Y : Nat; L : List; M : List;\n"
           "\n"
           "eqn   Merge(Nil(), M) = M;\n"
           "      Merge(L, Nil()) = L;\n"
           "      Merge(Cons(X, L), Cons(Y, M)) = Merge2(Lt(X, Y), X, L, Y, M);\n"
           "      Merge2(True(), X, L, Y, M) = Cons(X, Merge(L, Cons(Y, M)));\n"
           "      Merge2(False(), X, L, Y, M) = Cons(Y, Merge(Cons(X, L), M));\n"
           "      Sort(L) = Sort2(Gt(Len(L), S(Zero())), L);\n"
           "      Sort2(False(), L) = L;\n"
           "      Sort2(True(), L) = Merge(Sort(Even(L)), Sort(Odd(L)));\n"
           "\n"
           "input Node(Leaf(Nil()), Leaf(Nil()));\n";
}

inline std::string mergesort_text(std::uint32_t n, std::uint64_t seed = 1) {
    return generate(GenSpec::mergesort(n, seed));
}

inline std::string transform_text(std::uint32_t depth) {
    return generate(GenSpec::transform(depth));
}

inline Term peano_term(const Signature& sig, std::uint32_t value) {
    Term t = TermNode::apply(sig.symbol_ids.at("Zero"), {});
    SymbolId s = sig.symbol_ids.at("S");
    for (std::uint32_t i = 0; i < value; ++i) t = TermNode::apply(s, {t});
    return t;
}

inline Term cons_list(const Signature& sig, const std::vector<std::uint32_t>& values) {
    Term t = TermNode::apply(sig.symbol_ids.at("Nil"), {});
    SymbolId cons = sig.symbol_ids.at("Cons");
    for (auto it = values.rbegin(); it != values.rend(); ++it)
        t = TermNode::apply(cons, {peano_term(sig, *it), t});
    return t;
}

// independent sorting oracle: sort the numerals as integers, render as a list
inline Term sorted_list_oracle(const Signature& sig, std::vector<std::uint32_t> values) {
    std::sort(values.begin(), values.end());
    return cons_list(sig, values);
}

// Structural equality of resolved systems (names, not ids, are the identity).
inline bool systems_equal(const RewriteSystem& a, const RewriteSystem& b) {
    const Signature& sa = a.signature;
    const Signature& sb = b.signature;
    if (sa.sorts != sb.sorts) return false;
    if (sa.symbols.size() != sb.symbols.size() || sa.variables.size() != sb.variables.size())
        return false;
    for (std::size_t f = 0; f < sa.symbols.size(); ++f) {
        const SymbolInfo& x = sa.symbols[f];
        const SymbolInfo& y = sb.symbols[f];
        if (x.name != y.name || x.arity != y.arity || sa.sort_name(x.sort) != sb.sort_name(y.sort))
            return false;
        for (std::size_t i = 0; i < x.arity; ++i)
            if (sa.sort_name(x.argument_sorts[i]) != sb.sort_name(y.argument_sorts[i])) return false;
    }
    for (std::size_t v = 0; v < sa.variables.size(); ++v)
        if (sa.variables[v].name != sb.variables[v].name ||
            sa.sort_name(sa.variables[v].sort) != sb.sort_name(sb.variables[v].sort))
            return false;
    if (a.rules.size() != b.rules.size()) return false;
    for (std::size_t r = 0; r < a.rules.size(); ++r) {
        // ids align because declaration order aligns
        if (!term_equal(a.rules[r].lhs, b.rules[r].lhs) ||
            !term_equal(a.rules[r].rhs, b.rules[r].rhs))
            return false;
    }
    return term_equal(a.input_term, b.input_term);
}

// Random sort-respecting ground terms over a signature. size_budget bounds
// the node count; when it runs out the generator picks a minimal-depth
// completion for the required sort.
class RandomTerms {
public:
    RandomTerms(const Signature& sig, std::uint64_t seed) : sig_(sig), rng_(seed) {
        min_depth_.assign(sig.sorts.size(), UINT32_MAX);
        bool changed = true;
        while (changed) {
            changed = false;
            for (SymbolId f = 0; f < sig.symbols.size(); ++f) {
                const SymbolInfo& info = sig.symbol(f);
                std::uint32_t depth = 1;
                for (SortId a : info.argument_sorts) {
                    if (min_depth_[a] == UINT32_MAX) {
                        depth = UINT32_MAX;
                        break;
                    }
                    depth = std::max(depth, min_depth_[a] + 1);
                }
                if (depth < min_depth_[info.sort]) {
                    min_depth_[info.sort] = depth;
                    changed = true;
                }
            }
        }
    }

    Term ground(SortId sort, std::uint32_t depth_budget) {
        std::vector<SymbolId> fits;
        for (SymbolId f = 0; f < sig_.symbols.size(); ++f) {
            const SymbolInfo& info = sig_.symbol(f);
            if (info.sort != sort) continue;
            bool ok = true;
            for (SortId a : info.argument_sorts)
                if (min_depth_[a] == UINT32_MAX || min_depth_[a] + 1 > depth_budget) ok = false;
            if (ok) fits.push_back(f);
        }
        if (fits.empty()) throw std::runtime_error("sort has no ground completion");
        SymbolId f = fits[rng_() % fits.size()];
        const SymbolInfo& info = sig_.symbol(f);
        std::vector<Term> children;
        for (SortId a : info.argument_sorts) children.push_back(ground(a, depth_budget - 1));
        return TermNode::apply(f, std::move(children));
    }

    // left-linear pattern: like ground, but declared variables of the right
    // sort may appear, each at most once
    Term pattern(SortId sort, std::uint32_t depth_budget, std::vector<bool>& used) {
        if (rng_() % 3 == 0) {
            std::vector<VarId> candidates;
            for (VarId v = 0; v < sig_.variables.size(); ++v)
                if (!used[v] && sig_.variable(v).sort == sort) candidates.push_back(v);
            if (!candidates.empty()) {
                VarId v = candidates[rng_() % candidates.size()];
                used[v] = true;
                return TermNode::variable(v);
            }
        }
        std::vector<SymbolId> fits;
        for (SymbolId f = 0; f < sig_.symbols.size(); ++f) {
            const SymbolInfo& info = sig_.symbol(f);
            if (info.sort != sort) continue;
            bool ok = true;
            for (SortId a : info.argument_sorts)
                if (min_depth_[a] == UINT32_MAX || min_depth_[a] + 1 > depth_budget) ok = false;
            if (ok) fits.push_back(f);
        }
        if (fits.empty()) throw std::runtime_error("sort has no completion");
        SymbolId f = fits[rng_() % fits.size()];
        const SymbolInfo& info = sig_.symbol(f);
        std::vector<Term> children;
        for (SortId a : info.argument_sorts) children.push_back(pattern(a, depth_budget - 1, used));
        return TermNode::apply(f, std::move(children));
    }

    std::mt19937_64& rng() { return rng_; }

private:
    const Signature& sig_;
    std::mt19937_64 rng_;
    std::vector<std::uint32_t> min_depth_;
};

// Differential check of the compiled matcher against term-core matching:
// success/failure, chosen rule index and bindings must agree on random ground
// subjects. Returns the number of disagreements.
inline std::uint64_t matcher_differential(const RewriteSystem& sys, const DispatchTable& table,
                                          std::uint64_t trials, std::uint64_t seed) {
    RandomTerms gen(sys.signature, seed);
    TermAccessor acc;
    std::uint64_t disagreements = 0;
    std::vector<SortId> rule_sorts;  // bias subjects toward rewritable sorts
    for (const Rule& r : sys.rules)
        rule_sorts.push_back(sys.signature.symbol(r.lhs->symbol()).sort);
    for (std::uint64_t i = 0; i < trials; ++i) {
        SortId sort = (!rule_sorts.empty() && gen.rng()() % 2)
                          ? rule_sorts[gen.rng()() % rule_sorts.size()]
                          : static_cast<SortId>(gen.rng()() % sys.signature.sorts.size());
        Term subject = gen.ground(sort, 2 + gen.rng()() % 5);
        SymbolId head = subject->symbol();

        std::optional<std::uint32_t> expected;
        Substitution sigma;
        for (std::uint32_t ri : sys.rules_by_head[head]) {
            auto m = match_pattern(sys.rules[ri].lhs, subject);
            if (m) {
                expected = ri;
                sigma = std::move(*m);
                break;
            }
        }
        auto actual = try_rules(table, head, acc, subject.get());
        if (expected.has_value() != actual.has_value()) {
            ++disagreements;
            continue;
        }
        if (!expected) continue;
        if (actual->rule->rule_index != *expected) {
            ++disagreements;
            continue;
        }
        const MatchProgram& program = actual->rule->program;
        for (std::size_t slot = 0; slot < program.slot_vars.size(); ++slot) {
            const Term* bound = sigma.find(program.slot_vars[slot]);
            if (!bound || !term_equal(bound->get(), actual->bindings[slot])) {
                ++disagreements;
                break;
            }
        }
    }
    return disagreements;
}

}  // namespace trs::test
