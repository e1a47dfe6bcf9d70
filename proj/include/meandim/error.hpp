#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

namespace meandim {

/// Process exit codes shared by the library's error types and the CLI.
enum class ExitCode : int {
    ok = 0,
    precondition = 2,
    obligation_failed = 3,
    budget_exceeded = 4,
};

class Error : public std::runtime_error {
public:
    Error(ExitCode code, const std::string& what, nlohmann::json witness = {})
        : std::runtime_error(what), code_(code), witness_(std::move(witness)) {}

    ExitCode code() const noexcept { return code_; }
    const nlohmann::json& witness() const noexcept { return witness_; }

private:
    ExitCode code_;
    nlohmann::json witness_;
};

class PreconditionError : public Error {
public:
    explicit PreconditionError(const std::string& what, nlohmann::json witness = {})
        : Error(ExitCode::precondition, what, std::move(witness)) {}
};

class ObligationError : public Error {
public:
    explicit ObligationError(const std::string& what, nlohmann::json witness = {})
        : Error(ExitCode::obligation_failed, what, std::move(witness)) {}
};

class BudgetError : public Error {
public:
    explicit BudgetError(const std::string& what, nlohmann::json witness = {})
        : Error(ExitCode::budget_exceeded, what, std::move(witness)) {}
};

}  // namespace meandim
