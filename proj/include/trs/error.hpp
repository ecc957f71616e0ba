#pragma once

#include <stdexcept>
#include <string>

namespace trs {

enum class EngineFault {
    StepBudget,         // rewrite cap hit; the derivation may not terminate
    Capacity,           // term store full and growth disabled
    DanglingReference,  // store corruption detected; engine bug, never repaired
};

class EngineError : public std::runtime_error {
public:
    EngineError(EngineFault fault, const std::string& message)
        : std::runtime_error(message), fault(fault) {}

    EngineFault fault;
};

}  // namespace trs
