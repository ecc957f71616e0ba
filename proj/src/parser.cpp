#include "trs/parser.hpp"

#include <cassert>
#include <cctype>

namespace trs {

const char* error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Lex: return "lex";
        case ErrorKind::Syntax: return "syntax";
        case ErrorKind::UnknownName: return "unknown-name";
        case ErrorKind::ArityMismatch: return "arity-mismatch";
        case ErrorKind::SortMismatch: return "sort-mismatch";
        case ErrorKind::RuleViolation: return "rule-violation";
        case ErrorKind::DuplicateName: return "duplicate-name";
    }
    return "error";
}

std::string format_error(std::string_view file, const ParseError& error) {
    std::string out(file);
    out += ':' + std::to_string(error.span.line) + ':' + std::to_string(error.span.column);
    out += ": ";
    out += error_kind_name(error.kind);
    out += ": " + error.message;
    return out;
}

namespace {

enum class Tok { Ident, LParen, RParen, Comma, Semi, Equals, Pipe, Colon, End };

struct Token {
    Tok kind = Tok::End;
    std::string_view text;
    SourceSpan span;
};

bool is_reserved(std::string_view word) {
    return word == "sort" || word == "var" || word == "eqn" || word == "input" ||
           word == "Input" || word == "struct";
}

class Lexer {
public:
    Lexer(std::string_view text, std::vector<ParseError>& errors) : text_(text), errors_(errors) {
        advance();
    }

    const Token& peek() const { return current_; }

    Token take() {
        Token t = current_;
        advance();
        return t;
    }

private:
    void advance() {
        for (;;) {
            while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' ||
                                           text_[pos_] == '\r' || text_[pos_] == '\n'))
                step();
            if (pos_ < text_.size() && text_[pos_] == '%') {
                while (pos_ < text_.size() && text_[pos_] != '\n') step();
                continue;
            }
            break;
        }
        current_.span = {line_, col_, 1};
        if (pos_ >= text_.size()) {
            current_.kind = Tok::End;
            current_.text = {};
            return;
        }
        char c = text_[pos_];
        switch (c) {
            case '(': current_.kind = Tok::LParen; break;
            case ')': current_.kind = Tok::RParen; break;
            case ',': current_.kind = Tok::Comma; break;
            case ';': current_.kind = Tok::Semi; break;
            case '=': current_.kind = Tok::Equals; break;
            case '|': current_.kind = Tok::Pipe; break;
            case ':': current_.kind = Tok::Colon; break;
            default:
                if (std::isalpha(static_cast<unsigned char>(c))) {
                    std::size_t start = pos_;
                    while (pos_ < text_.size() &&
                           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                        step();
                    current_.kind = Tok::Ident;
                    current_.text = text_.substr(start, pos_ - start);
                    current_.span.length = static_cast<std::uint32_t>(pos_ - start);
                    return;
                }
                errors_.push_back({current_.span, ErrorKind::Lex,
                                   std::string("unexpected character '") + c + "'"});
                step();
                advance();  // resync on the next token
                return;
        }
        current_.text = text_.substr(pos_, 1);
        step();
    }

    void step() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    std::string_view text_;
    std::vector<ParseError>& errors_;
    std::size_t pos_ = 0;
    std::uint32_t line_ = 1, col_ = 1;
    Token current_;
};

class Parser {
public:
    Parser(std::string_view text, std::vector<ParseError>& errors)
        : errors_(errors), lex_(text, errors) {}

    std::optional<RawSpec> run() {
        RawSpec spec;
        if (!expect_section("sort")) return recover_nothing();
        parse_sort_section(spec);
        if (!expect_section("var")) return recover_nothing();
        parse_var_section(spec);
        if (!expect_section("eqn")) return recover_nothing();
        parse_eqn_section(spec);
        if (!at_ident("input") && !at_ident("Input")) {
            error(lex_.peek().span, ErrorKind::Syntax, "missing required sections: expected 'input'");
            return std::nullopt;
        }
        lex_.take();
        if (auto t = parse_term()) spec.input_decl = std::move(*t);
        expect(Tok::Semi, "';'");
        if (lex_.peek().kind != Tok::End)
            error(lex_.peek().span, ErrorKind::Syntax, "trailing input after 'input' section");
        if (!errors_.empty()) return std::nullopt;
        return spec;
    }

private:
    std::optional<RawSpec> recover_nothing() { return std::nullopt; }

    bool at_ident(std::string_view word) const {
        return lex_.peek().kind == Tok::Ident && lex_.peek().text == word;
    }

    bool expect_section(std::string_view keyword) {
        if (at_ident(keyword)) {
            lex_.take();
            return true;
        }
        error(lex_.peek().span, ErrorKind::Syntax,
              "missing required sections: expected '" + std::string(keyword) + "'");
        return false;
    }

    bool expect(Tok kind, const char* what) {
        if (lex_.peek().kind == kind) {
            lex_.take();
            return true;
        }
        error(lex_.peek().span, ErrorKind::Syntax,
              std::string("expected ") + what + token_context());
        return false;
    }

    std::string token_context() {
        const Token& t = lex_.peek();
        if (t.kind == Tok::End) return " before end of input";
        return " before '" + std::string(t.text) + "'";
    }

    void error(SourceSpan span, ErrorKind kind, std::string message) {
        errors_.push_back({span, kind, std::move(message)});
    }

    // skip to just past the next ';' (or stop at a section keyword / EOF)
    void synchronize() {
        for (;;) {
            const Token& t = lex_.peek();
            if (t.kind == Tok::End) return;
            if (t.kind == Tok::Semi) {
                lex_.take();
                return;
            }
            if (t.kind == Tok::Ident && is_reserved(t.text)) return;
            lex_.take();
        }
    }

    void parse_sort_section(RawSpec& spec) {
        while (lex_.peek().kind == Tok::Ident && !is_reserved(lex_.peek().text)) {
            RawSortDecl decl;
            Token name = lex_.take();
            decl.name = std::string(name.text);
            decl.span = name.span;
            if (!expect(Tok::Equals, "'='")) {
                synchronize();
                continue;
            }
            if (at_ident("struct")) lex_.take();  // Listing 7 style; Listing 1 omits it
            bool ok = true;
            for (;;) {
                auto ctor = parse_ctor();
                if (!ctor) {
                    ok = false;
                    break;
                }
                decl.ctors.push_back(std::move(*ctor));
                if (lex_.peek().kind == Tok::Pipe) {
                    lex_.take();
                    continue;
                }
                break;
            }
            if (!ok || !expect(Tok::Semi, "';'")) {
                synchronize();
                continue;
            }
            spec.sort_decls.push_back(std::move(decl));
        }
    }

    std::optional<RawCtor> parse_ctor() {
        if (lex_.peek().kind != Tok::Ident || is_reserved(lex_.peek().text)) {
            error(lex_.peek().span, ErrorKind::Syntax,
                  "expected constructor name" + token_context());
            return std::nullopt;
        }
        RawCtor ctor;
        Token name = lex_.take();
        ctor.name = std::string(name.text);
        ctor.span = name.span;
        if (!expect(Tok::LParen, "'(' (constants are written with explicit '()')"))
            return std::nullopt;
        if (lex_.peek().kind != Tok::RParen) {
            for (;;) {
                if (lex_.peek().kind != Tok::Ident) {
                    error(lex_.peek().span, ErrorKind::Syntax, "expected sort name" + token_context());
                    return std::nullopt;
                }
                Token s = lex_.take();
                ctor.arg_sorts.emplace_back(std::string(s.text), s.span);
                if (lex_.peek().kind == Tok::Comma) {
                    lex_.take();
                    continue;
                }
                break;
            }
        }
        if (!expect(Tok::RParen, "')'")) return std::nullopt;
        return ctor;
    }

    void parse_var_section(RawSpec& spec) {
        while (lex_.peek().kind == Tok::Ident && !is_reserved(lex_.peek().text)) {
            RawVarDecl decl;
            Token name = lex_.take();
            decl.name = std::string(name.text);
            decl.span = name.span;
            if (!expect(Tok::Colon, "':'")) {
                synchronize();
                continue;
            }
            if (lex_.peek().kind != Tok::Ident) {
                error(lex_.peek().span, ErrorKind::Syntax, "expected sort name" + token_context());
                synchronize();
                continue;
            }
            Token s = lex_.take();
            decl.sort = std::string(s.text);
            decl.sort_span = s.span;
            if (!expect(Tok::Semi, "';'")) {
                synchronize();
                continue;
            }
            spec.var_decls.push_back(std::move(decl));
        }
    }

    void parse_eqn_section(RawSpec& spec) {
        while (lex_.peek().kind == Tok::Ident && !is_reserved(lex_.peek().text)) {
            RawEqn eqn;
            auto lhs = parse_term();
            if (!lhs) {
                synchronize();
                continue;
            }
            eqn.lhs = std::move(*lhs);
            eqn.span = eqn.lhs.span;
            if (!expect(Tok::Equals, "'='")) {
                synchronize();
                continue;
            }
            auto rhs = parse_term();
            if (!rhs) {
                synchronize();
                continue;
            }
            eqn.rhs = std::move(*rhs);
            if (!expect(Tok::Semi, "';'")) {
                synchronize();
                continue;
            }
            spec.eqn_decls.push_back(std::move(eqn));
        }
    }

    // IDENT [ '(' term (',' term)* ')' ], parsed with an explicit stack since
    // generated inputs nest Cons chains hundreds of levels deep.
    std::optional<RawTree> parse_term() {
        std::vector<RawTree> open;  // frames awaiting ')'
        for (;;) {
            if (lex_.peek().kind != Tok::Ident || is_reserved(lex_.peek().text)) {
                error(lex_.peek().span, ErrorKind::Syntax, "expected a term" + token_context());
                return std::nullopt;
            }
            Token name = lex_.take();
            RawTree node;
            node.name = std::string(name.text);
            node.span = name.span;
            if (lex_.peek().kind == Tok::LParen) {
                lex_.take();
                node.has_args = true;
                if (lex_.peek().kind != Tok::RParen) {
                    open.push_back(std::move(node));
                    continue;  // parse first argument
                }
                lex_.take();  // empty argument list: a constant
            }
            // node is complete; attach to parent frames
            for (;;) {
                if (open.empty()) return node;
                open.back().args.push_back(std::move(node));
                if (lex_.peek().kind == Tok::Comma) {
                    lex_.take();
                    break;  // next argument of the innermost open frame
                }
                if (lex_.peek().kind == Tok::RParen) {
                    lex_.take();
                    node = std::move(open.back());
                    open.pop_back();
                    continue;
                }
                error(lex_.peek().span, ErrorKind::Syntax,
                      "expected ',' or ')' in argument list" + token_context());
                return std::nullopt;
            }
        }
    }

    std::vector<ParseError>& errors_;
    Lexer lex_;
};

class Resolver {
public:
    explicit Resolver(const RawSpec& spec) : spec_(spec) {}

    ResolveResult run() {
        declare_sorts();
        declare_symbols();
        declare_variables();
        resolve_rules();
        resolve_input();
        ResolveResult result;
        result.errors = std::move(errors_);
        if (result.errors.empty()) result.system = std::move(system_);
        return result;
    }

private:
    void error(SourceSpan span, ErrorKind kind, std::string message) {
        errors_.push_back({span, kind, std::move(message)});
    }

    void declare_sorts() {
        for (const RawSortDecl& decl : spec_.sort_decls) {
            if (sig().sort_ids.count(decl.name)) {
                error(decl.span, ErrorKind::DuplicateName, "duplicate sort '" + decl.name + "'");
                continue;
            }
            sig().add_sort(decl.name);
        }
    }

    void declare_symbols() {
        for (const RawSortDecl& decl : spec_.sort_decls) {
            auto sort_it = sig().sort_ids.find(decl.name);
            if (sort_it == sig().sort_ids.end()) continue;  // duplicate decl skipped above
            for (const RawCtor& ctor : decl.ctors) {
                if (sig().symbol_ids.count(ctor.name)) {
                    error(ctor.span, ErrorKind::DuplicateName,
                          "duplicate function symbol '" + ctor.name + "'");
                    continue;
                }
                std::vector<SortId> arg_sorts;
                bool ok = true;
                for (const auto& [sort_name, span] : ctor.arg_sorts) {
                    auto it = sig().sort_ids.find(sort_name);
                    if (it == sig().sort_ids.end()) {
                        error(span, ErrorKind::UnknownName, "unknown sort '" + sort_name + "'");
                        ok = false;
                        continue;
                    }
                    arg_sorts.push_back(it->second);
                }
                if (ok) sig().add_symbol(ctor.name, sort_it->second, std::move(arg_sorts));
            }
        }
    }

    void declare_variables() {
        for (const RawVarDecl& decl : spec_.var_decls) {
            if (sig().symbol_ids.count(decl.name)) {
                error(decl.span, ErrorKind::DuplicateName,
                      "variable '" + decl.name + "' collides with a function symbol");
                continue;
            }
            if (sig().variable_ids.count(decl.name)) {
                error(decl.span, ErrorKind::DuplicateName, "duplicate variable '" + decl.name + "'");
                continue;
            }
            auto it = sig().sort_ids.find(decl.sort);
            if (it == sig().sort_ids.end()) {
                error(decl.sort_span, ErrorKind::UnknownName, "unknown sort '" + decl.sort + "'");
                continue;
            }
            sig().add_variable(decl.name, it->second);
        }
    }

    Term resolve_tree(const RawTree& raw, std::optional<SortId> expected) {
        if (!raw.has_args) {
            auto it = sig().variable_ids.find(raw.name);
            if (it == sig().variable_ids.end()) {
                if (sig().symbol_ids.count(raw.name))
                    error(raw.span, ErrorKind::UnknownName,
                          "unknown variable '" + raw.name +
                              "' (a constant must be written with parentheses: '" + raw.name + "()')");
                else
                    error(raw.span, ErrorKind::UnknownName, "unknown variable '" + raw.name + "'");
                return nullptr;
            }
            SortId sort = sig().variable(it->second).sort;
            if (expected && *expected != sort) {
                error(raw.span, ErrorKind::SortMismatch,
                      "variable '" + raw.name + "' has sort " + sig().sort_name(sort) +
                          ", expected " + sig().sort_name(*expected));
                return nullptr;
            }
            return TermNode::variable(it->second);
        }
        auto it = sig().symbol_ids.find(raw.name);
        if (it == sig().symbol_ids.end()) {
            error(raw.span, ErrorKind::UnknownName, "unknown function symbol '" + raw.name + "'");
            return nullptr;
        }
        const SymbolInfo& info = sig().symbol(it->second);
        if (raw.args.size() != info.arity) {
            error(raw.span, ErrorKind::ArityMismatch,
                  "'" + raw.name + "' takes " + std::to_string(info.arity) + " argument(s), got " +
                      std::to_string(raw.args.size()));
            return nullptr;
        }
        if (expected && *expected != info.sort) {
            error(raw.span, ErrorKind::SortMismatch,
                  "'" + raw.name + "' has sort " + sig().sort_name(info.sort) + ", expected " +
                      sig().sort_name(*expected));
            return nullptr;
        }
        std::vector<Term> children;
        bool ok = true;
        for (std::size_t i = 0; i < raw.args.size(); ++i) {
            Term child = resolve_tree(raw.args[i], info.argument_sorts[i]);
            if (!child) ok = false;
            children.push_back(std::move(child));
        }
        if (!ok) return nullptr;
        return TermNode::apply(it->second, std::move(children));
    }

    const RawTree* tree_at(const RawTree& root, const std::vector<std::uint32_t>& path) {
        const RawTree* at = &root;
        for (std::uint32_t i : path) {
            if (i >= at->args.size()) return at;
            at = &at->args[i];
        }
        return at;
    }

    void resolve_rules() {
        system_.rules_by_head.assign(sig().symbols.size(), {});
        for (const RawEqn& eqn : spec_.eqn_decls) {
            Term lhs = resolve_tree(eqn.lhs, std::nullopt);
            if (!lhs) continue;
            Term rhs = resolve_tree(eqn.rhs, sort_of(sig(), lhs));
            if (!rhs) continue;
            auto violations = validate_rule(lhs, rhs);
            if (!violations.empty()) {
                for (const RuleViolation& v : violations) {
                    switch (v.kind) {
                        case RuleViolationKind::LhsIsVariable:
                            error(eqn.lhs.span, ErrorKind::RuleViolation,
                                  "left-hand side of a rule must not be a variable");
                            break;
                        case RuleViolationKind::FreeRhsVariable:
                            error(tree_at(eqn.rhs, v.path)->span, ErrorKind::RuleViolation,
                                  "variable '" + sig().variable(v.var).name +
                                      "' of the right-hand side does not occur in the left-hand side");
                            break;
                        case RuleViolationKind::NonLeftLinear:
                            error(tree_at(eqn.lhs, v.path)->span, ErrorKind::RuleViolation,
                                  "variable '" + sig().variable(v.var).name +
                                      "' occurs more than once in the left-hand side");
                            break;
                    }
                }
                continue;
            }
            std::uint32_t index = static_cast<std::uint32_t>(system_.rules.size());
            system_.rules.push_back({lhs, rhs, index});
            system_.rules_by_head[lhs->symbol()].push_back(index);
        }
    }

    void resolve_input() {
        Term input = resolve_tree(spec_.input_decl, std::nullopt);
        if (!input) return;
        if (!is_ground(input)) {
            error(spec_.input_decl.span, ErrorKind::RuleViolation,
                  "input term must be ground (derivations need closed terms)");
            return;
        }
        system_.input_term = std::move(input);
    }

    Signature& sig() { return system_.signature; }

    const RawSpec& spec_;
    RewriteSystem system_;
    std::vector<ParseError> errors_;
};

}  // namespace

ParseResult parse(std::string_view text) {
    ParseResult result;
    Parser parser(text, result.errors);
    result.spec = parser.run();
    if (!result.errors.empty()) result.spec.reset();
    return result;
}

ResolveResult resolve(const RawSpec& spec) {
    return Resolver(spec).run();
}

ResolveResult load_system(std::string_view text) {
    ParseResult parsed = parse(text);
    if (!parsed.spec) {
        ResolveResult result;
        result.errors = std::move(parsed.errors);
        return result;
    }
    return resolve(*parsed.spec);
}

}  // namespace trs
