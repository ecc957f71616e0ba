#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trs/term.hpp"

namespace trs {

struct SourceSpan {
    std::uint32_t line = 1;    // 1-based
    std::uint32_t column = 1;  // 1-based
    std::uint32_t length = 1;
};

enum class ErrorKind {
    Lex,
    Syntax,
    UnknownName,
    ArityMismatch,
    SortMismatch,
    RuleViolation,
    DuplicateName,
};

const char* error_kind_name(ErrorKind kind);

struct ParseError {
    SourceSpan span;
    ErrorKind kind = ErrorKind::Syntax;
    std::string message;
};

// "file:line:col: kind: message"
std::string format_error(std::string_view file, const ParseError& error);

// Unresolved term tree as written: a name plus an optional argument list.
// has_args distinguishes `Nil()` (constant application) from `Nil` (variable
// reference).
struct RawTree {
    std::string name;
    bool has_args = false;
    std::vector<RawTree> args;
    SourceSpan span;
};

struct RawCtor {
    std::string name;
    std::vector<std::pair<std::string, SourceSpan>> arg_sorts;
    SourceSpan span;
};

struct RawSortDecl {
    std::string name;
    SourceSpan span;
    std::vector<RawCtor> ctors;
};

struct RawVarDecl {
    std::string name;
    std::string sort;
    SourceSpan span;
    SourceSpan sort_span;
};

struct RawEqn {
    RawTree lhs;
    RawTree rhs;
    SourceSpan span;
};

// Source-order faithful capture of the four sections; no name resolution.
struct RawSpec {
    std::vector<RawSortDecl> sort_decls;
    std::vector<RawVarDecl> var_decls;
    std::vector<RawEqn> eqn_decls;
    RawTree input_decl;
};

struct ParseResult {
    std::optional<RawSpec> spec;  // absent whenever errors is non-empty
    std::vector<ParseError> errors;
};

ParseResult parse(std::string_view text);

struct ResolveResult {
    std::optional<RewriteSystem> system;  // absent whenever errors is non-empty
    std::vector<ParseError> errors;
};

// Interns names, checks arities and sorts everywhere, validates every
// equation, checks the input term ground and well-sorted, and groups rules by
// head symbol preserving source order.
ResolveResult resolve(const RawSpec& spec);

// parse followed by resolve; errors from whichever stage failed first.
ResolveResult load_system(std::string_view text);

}  // namespace trs
