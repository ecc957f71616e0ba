#include "trs/dispatch.hpp"

#include <map>
#include <unordered_map>

namespace trs {

namespace {

void compile_pattern(const TermNode* node, std::vector<std::uint8_t>& path, MatchProgram& program,
                     std::unordered_map<VarId, std::uint32_t>& var_slots) {
    for (std::uint8_t i = 0; i < node->children().size(); ++i) {
        const TermNode* child = node->children()[i].get();
        path.push_back(i);
        if (child->is_variable()) {
            std::uint32_t slot = static_cast<std::uint32_t>(program.slot_vars.size());
            var_slots.emplace(child->var(), slot);
            program.slot_vars.push_back(child->var());
            program.steps.push_back({MatchStep::Kind::BindVar, path, 0, slot});
        } else {
            program.steps.push_back({MatchStep::Kind::CheckHead, path, child->symbol(), 0});
            compile_pattern(child, path, program, var_slots);
        }
        path.pop_back();
    }
}

struct TemplateBuilder {
    const std::unordered_map<VarId, std::uint32_t>& var_slots;
    RhsTemplate out;
    // structural key of an emitted subterm -> its reference; identical RHS
    // subterms share one instruction (the paper's subterm sharing rule)
    std::map<std::pair<SymbolId, std::vector<RhsRef>>, RhsRef> memo;

    RhsRef build(const TermNode* node) {
        if (node->is_variable())
            return {RhsRef::Kind::Var, var_slots.at(node->var())};
        std::vector<RhsRef> children;
        children.reserve(node->children().size());
        for (const Term& c : node->children()) children.push_back(build(c.get()));
        auto key = std::make_pair(node->symbol(), children);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        RhsRef ref{RhsRef::Kind::Node, static_cast<std::uint32_t>(out.instructions.size())};
        out.instructions.push_back({node->symbol(), std::move(children), 0});
        memo.emplace(std::move(key), ref);
        return ref;
    }
};

RhsTemplate compile_rhs(const Term& rhs, const std::unordered_map<VarId, std::uint32_t>& var_slots) {
    TemplateBuilder builder{var_slots, {}, {}};
    builder.out.root_ref = builder.build(rhs.get());
    RhsTemplate tmpl = std::move(builder.out);
    for (const RhsInstr& instr : tmpl.instructions)
        for (const RhsRef& ref : instr.children)
            if (ref.kind == RhsRef::Kind::Node) ++tmpl.instructions[ref.index].indegree;
    return tmpl;
}

}  // namespace

DispatchTable compile(const RewriteSystem& system) {
    DispatchTable table;
    table.by_symbol.resize(system.signature.symbols.size());
    for (const Rule& rule : system.rules) {
        CompiledRule compiled;
        compiled.rule_index = rule.source_order;
        compiled.program.head = rule.lhs->symbol();
        std::vector<std::uint8_t> path;
        std::unordered_map<VarId, std::uint32_t> var_slots;
        compile_pattern(rule.lhs.get(), path, compiled.program, var_slots);
        compiled.rhs = compile_rhs(rule.rhs, var_slots);
        table.max_new_slots = std::max(table.max_new_slots, compiled.rhs.new_slots());
        table.by_symbol[rule.lhs->symbol()].push_back(std::move(compiled));
    }
    return table;
}

namespace {

std::string path_text(const std::vector<std::uint8_t>& path) {
    std::string out = "[";
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i > 0) out += ".";
        out += std::to_string(path[i]);
    }
    return out + "]";
}

std::string ref_text(const RhsRef& ref, const MatchProgram& program, const Signature& sig) {
    if (ref.kind == RhsRef::Kind::Var) return sig.variable(program.slot_vars[ref.index]).name;
    return "n" + std::to_string(ref.index);
}

}  // namespace

std::string dump_dispatch(const RewriteSystem& system, const DispatchTable& table) {
    const Signature& sig = system.signature;
    std::string out;
    for (SymbolId f = 0; f < table.by_symbol.size(); ++f) {
        const auto& rules = table.by_symbol[f];
        if (rules.empty()) continue;
        out += "symbol " + sig.symbol(f).name + "/" + std::to_string(sig.symbol(f).arity) + ": " +
               std::to_string(rules.size()) + " rule(s)\n";
        for (const CompiledRule& rule : rules) {
            const Rule& src = system.rules[rule.rule_index];
            out += "  rule #" + std::to_string(rule.rule_index) + ": " +
                   print_term(sig, src.lhs) + " = " + print_term(sig, src.rhs) + "\n";
            for (const MatchStep& step : rule.program.steps) {
                if (step.kind == MatchStep::Kind::CheckHead)
                    out += "    check " + path_text(step.path) + " = " + sig.symbol(step.symbol).name + "\n";
                else
                    out += "    bind  " + path_text(step.path) + " -> " +
                           sig.variable(rule.program.slot_vars[step.var_slot]).name + "\n";
            }
            const RhsTemplate& tmpl = rule.rhs;
            for (std::uint32_t k = 0; k < tmpl.instructions.size(); ++k) {
                const RhsInstr& instr = tmpl.instructions[k];
                bool is_root = !tmpl.collapses() && k + 1 == tmpl.instructions.size();
                out += is_root ? "    root  " : "    new   ";
                out += "n" + std::to_string(k) + " = " + sig.symbol(instr.symbol).name + "(";
                for (std::size_t i = 0; i < instr.children.size(); ++i) {
                    if (i > 0) out += ", ";
                    out += ref_text(instr.children[i], rule.program, sig);
                }
                out += ")\n";
            }
            if (tmpl.collapses())
                out += "    root  reuse " + ref_text(tmpl.root_ref, rule.program, sig) + "\n";
        }
    }
    return out;
}

}  // namespace trs
