#pragma once

#include "trs/dispatch.hpp"
#include "trs/error.hpp"

namespace trs {

struct SeqStats {
    std::uint64_t rewritten_terms = 0;  // successful rule applications
    std::size_t peak_depth = 0;         // deepest derivation stack
    std::uint64_t micros = 0;
};

struct SeqOptions {
    std::uint64_t step_budget = 1'000'000'000;
    bool check_inner_most = false;  // assert subterms normal at every application
};

struct SeqResult {
    Term normal_form;
    SeqStats stats;
};

// Left-most inner-most normalization: subterms are fully normalized left to
// right before the parent is reduced, first matching rule wins, and a term
// with no matching rule is marked normal form. Runs on an explicit stack; the
// corpus inputs are too deep for recursion. Throws EngineError(StepBudget)
// when the rewrite cap is exceeded.
SeqResult normalize(const RewriteSystem& system, const DispatchTable& table, const Term& input,
                    const SeqOptions& options = {});

// Reference rewrite count the sweep engine must reproduce.
std::uint64_t count_oracle(const RewriteSystem& system, const DispatchTable& table,
                           const Term& input, const SeqOptions& options = {});

}  // namespace trs
