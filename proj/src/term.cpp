#include "trs/term.hpp"

#include <algorithm>
#include <stdexcept>

namespace trs {

SortId Signature::add_sort(std::string name) {
    SortId id = static_cast<SortId>(sorts.size());
    sort_ids.emplace(name, id);
    sorts.push_back(std::move(name));
    sort_symbols.emplace_back();
    return id;
}

SymbolId Signature::add_symbol(std::string name, SortId sort, std::vector<SortId> argument_sorts) {
    SymbolId id = static_cast<SymbolId>(symbols.size());
    SymbolInfo info;
    info.name = name;
    info.arity = static_cast<std::uint32_t>(argument_sorts.size());
    info.sort = sort;
    info.argument_sorts = std::move(argument_sorts);
    max_arity = std::max(max_arity, info.arity);
    symbol_ids.emplace(std::move(name), id);
    symbols.push_back(std::move(info));
    sort_symbols[sort].push_back(id);
    return id;
}

VarId Signature::add_variable(std::string name, SortId sort) {
    VarId id = static_cast<VarId>(variables.size());
    variable_ids.emplace(name, id);
    variables.push_back(VarInfo{std::move(name), sort});
    return id;
}

Term TermNode::variable(VarId v) {
    return Term(new TermNode(true, v, {}));
}

Term TermNode::apply(SymbolId f, std::vector<Term> children) {
    return Term(new TermNode(false, f, std::move(children)));
}

SymbolId head_symbol(const Term& t) {
    if (t->is_variable())
        throw std::invalid_argument("head symbol is undefined for a variable");
    return t->symbol();
}

std::set<VarId> variables_of(const Term& t) {
    std::set<VarId> out;
    std::vector<const TermNode*> stack{t.get()};
    while (!stack.empty()) {
        const TermNode* node = stack.back();
        stack.pop_back();
        if (node->is_variable()) {
            out.insert(node->var());
        } else {
            for (const Term& c : node->children()) stack.push_back(c.get());
        }
    }
    return out;
}

std::optional<Substitution> match_pattern(const Term& pattern, const Term& subject) {
    Substitution sigma;
    std::vector<std::pair<const TermNode*, Term>> work{{pattern.get(), subject}};
    while (!work.empty()) {
        auto [p, s] = std::move(work.back());
        work.pop_back();
        if (p->is_variable()) {
            // left-linear pattern: each variable is bound exactly once
            sigma.bindings.emplace(p->var(), std::move(s));
            continue;
        }
        if (s->is_variable() || s->symbol() != p->symbol()) return std::nullopt;
        for (std::size_t i = 0; i < p->children().size(); ++i)
            work.emplace_back(p->children()[i].get(), s->children()[i]);
    }
    return sigma;
}

Term apply_substitution(const Term& t, const Substitution& s) {
    if (t->is_variable()) {
        const Term* bound = s.find(t->var());
        if (!bound) throw std::invalid_argument("substitution does not bind a variable of the term");
        return *bound;
    }
    bool changed = false;
    std::vector<Term> children;
    children.reserve(t->children().size());
    for (const Term& c : t->children()) {
        Term mapped = apply_substitution(c, s);
        changed = changed || mapped.get() != c.get();
        children.push_back(std::move(mapped));
    }
    if (!changed) return t;
    return TermNode::apply(t->symbol(), std::move(children));
}

bool term_equal(const Term& a, const Term& b) { return term_equal(a.get(), b.get()); }

bool term_equal(const TermNode* a, const TermNode* b) {
    std::vector<std::pair<const TermNode*, const TermNode*>> work{{a, b}};
    while (!work.empty()) {
        auto [x, y] = work.back();
        work.pop_back();
        if (x == y) continue;  // physically shared subterms unfold identically
        if (x->is_variable() != y->is_variable()) return false;
        if (x->is_variable()) {
            if (x->var() != y->var()) return false;
            continue;
        }
        if (x->symbol() != y->symbol()) return false;
        for (std::size_t i = 0; i < x->children().size(); ++i)
            work.emplace_back(x->children()[i].get(), y->children()[i].get());
    }
    return true;
}

bool is_ground(const Term& t) {
    std::vector<const TermNode*> stack{t.get()};
    while (!stack.empty()) {
        const TermNode* node = stack.back();
        stack.pop_back();
        if (node->is_variable()) return false;
        for (const Term& c : node->children()) stack.push_back(c.get());
    }
    return true;
}

namespace {

void collect_linearity(const TermNode* node, std::vector<std::uint32_t>& path,
                       std::map<VarId, std::vector<std::uint32_t>>& first_seen,
                       std::vector<RuleViolation>& out) {
    if (node->is_variable()) {
        auto [it, inserted] = first_seen.emplace(node->var(), path);
        if (!inserted)
            out.push_back({RuleViolationKind::NonLeftLinear, node->var(), path});
        return;
    }
    for (std::uint32_t i = 0; i < node->children().size(); ++i) {
        path.push_back(i);
        collect_linearity(node->children()[i].get(), path, first_seen, out);
        path.pop_back();
    }
}

void collect_free_rhs(const TermNode* node, std::vector<std::uint32_t>& path,
                      const std::set<VarId>& lhs_vars, std::vector<RuleViolation>& out) {
    if (node->is_variable()) {
        if (!lhs_vars.count(node->var()))
            out.push_back({RuleViolationKind::FreeRhsVariable, node->var(), path});
        return;
    }
    for (std::uint32_t i = 0; i < node->children().size(); ++i) {
        path.push_back(i);
        collect_free_rhs(node->children()[i].get(), path, lhs_vars, out);
        path.pop_back();
    }
}

}  // namespace

std::vector<RuleViolation> validate_rule(const Term& lhs, const Term& rhs) {
    std::vector<RuleViolation> out;
    if (lhs->is_variable()) {
        out.push_back({RuleViolationKind::LhsIsVariable, lhs->var(), {}});
        return out;
    }
    std::vector<std::uint32_t> path;
    std::map<VarId, std::vector<std::uint32_t>> seen;
    collect_linearity(lhs.get(), path, seen, out);
    std::set<VarId> lhs_vars = variables_of(lhs);
    collect_free_rhs(rhs.get(), path, lhs_vars, out);
    return out;
}

SortId sort_of(const Signature& sig, const Term& t) {
    return t->is_variable() ? sig.variable(t->var()).sort : sig.symbol(t->symbol()).sort;
}

bool well_formed(const Signature& sig, const Term& t) {
    std::vector<const TermNode*> stack{t.get()};
    while (!stack.empty()) {
        const TermNode* node = stack.back();
        stack.pop_back();
        if (node->is_variable()) {
            if (node->var() >= sig.variables.size()) return false;
            continue;
        }
        if (node->symbol() >= sig.symbols.size()) return false;
        const SymbolInfo& info = sig.symbol(node->symbol());
        if (node->children().size() != info.arity) return false;
        for (std::uint32_t i = 0; i < info.arity; ++i) {
            const Term& c = node->children()[i];
            if (sort_of(sig, c) != info.argument_sorts[i]) return false;
            stack.push_back(c.get());
        }
    }
    return true;
}

std::string print_term(const Signature& sig, const Term& t) {
    std::string out;
    // explicit stack; corpus terms nest deeply (long Cons chains)
    struct Frame {
        const TermNode* node;
        std::size_t next = 0;
    };
    std::vector<Frame> stack{{t.get()}};
    while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.next == 0) {
            if (f.node->is_variable()) {
                out += sig.variable(f.node->var()).name;
                stack.pop_back();
                continue;
            }
            out += sig.symbol(f.node->symbol()).name;
            out += '(';
        }
        if (f.next < f.node->children().size()) {
            if (f.next > 0) out += ", ";
            const TermNode* child = f.node->children()[f.next].get();
            ++f.next;
            stack.push_back({child});
        } else {
            out += ')';
            stack.pop_back();
        }
    }
    return out;
}

std::string print_system(const RewriteSystem& system) {
    const Signature& sig = system.signature;
    std::string out;
    const char* kw = "sort";
    for (SortId s = 0; s < sig.sorts.size(); ++s) {
        out += kw;
        kw = "    ";
        out += "  " + sig.sort_name(s) + " =";
        bool first = true;
        for (SymbolId f : sig.sort_symbols[s]) {
            out += first ? " " : " | ";
            first = false;
            const SymbolInfo& info = sig.symbol(f);
            out += info.name + "(";
            for (std::uint32_t i = 0; i < info.arity; ++i) {
                if (i > 0) out += ", ";
                out += sig.sort_name(info.argument_sorts[i]);
            }
            out += ")";
        }
        out += ";\n";
    }
    out += "\nvar ";
    for (VarId v = 0; v < sig.variables.size(); ++v) {
        if (v > 0) out += " ";
        out += sig.variable(v).name + " : " + sig.sort_name(sig.variable(v).sort) + ";";
    }
    out += "\n\neqn ";
    for (std::size_t i = 0; i < system.rules.size(); ++i) {
        if (i > 0) out += "    ";
        out += print_term(sig, system.rules[i].lhs) + " = " + print_term(sig, system.rules[i].rhs) + ";\n";
    }
    out += "\ninput " + print_term(sig, system.input_term) + ";\n";
    return out;
}

}  // namespace trs
