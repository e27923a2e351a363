#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace chronoweave {

// Failure categories. The numeric values double as process exit codes of the
// CLI and as status codes of the C API (0 is reserved for success).
enum class ErrorCategory : int {
    Other = 1,    // internal faults, unwritable outputs, pipeline bugs
    Input = 2,    // unreadable/malformed input files, bad configuration
    Backend = 3,  // network failures, exhausted retries, protocol violations
    Eval = 4,     // evaluation consistency problems (gold/judgment mismatch)
};

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, std::string message)
        : std::runtime_error(std::move(message)), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

class InputError : public Error {
public:
    explicit InputError(std::string message) : Error(ErrorCategory::Input, std::move(message)) {}
};

// Malformed structured input; carries the 1-based line number when known.
class ParseError : public InputError {
public:
    ParseError(std::string message, long line = -1) : InputError(std::move(message)), line_(line) {}
    long line() const noexcept { return line_; }

private:
    long line_;
};

class DateError : public InputError {
public:
    explicit DateError(std::string message) : InputError(std::move(message)) {}
};

class ValidationError : public InputError {
public:
    explicit ValidationError(std::string message) : InputError(std::move(message)) {}
};

class TemplateError : public InputError {
public:
    TemplateError(std::string message, std::string placeholder)
        : InputError(std::move(message)), placeholder_(std::move(placeholder)) {}
    const std::string& placeholder() const noexcept { return placeholder_; }

private:
    std::string placeholder_;
};

// A single snippet that cannot fit any batch under the token budget.
class BudgetError : public InputError {
public:
    BudgetError(std::string message, std::string article_id)
        : InputError(std::move(message)), article_id_(std::move(article_id)) {}
    const std::string& article_id() const noexcept { return article_id_; }

private:
    std::string article_id_;
};

class LookupError : public InputError {
public:
    explicit LookupError(std::string message) : InputError(std::move(message)) {}
};

class ExtractionError : public InputError {
public:
    explicit ExtractionError(std::string message) : InputError(std::move(message)) {}
};

class BackendError : public Error {
public:
    BackendError(std::string message, bool transient, int status = 0)
        : Error(ErrorCategory::Backend, std::move(message)), transient_(transient), status_(status) {}
    bool transient() const noexcept { return transient_; }
    int status() const noexcept { return status_; }

private:
    bool transient_;
    int status_;
};

class FetchError : public BackendError {
public:
    FetchError(std::string message, int status = 0) : BackendError(std::move(message), false, status) {}
};

class RedirectError : public BackendError {
public:
    explicit RedirectError(std::string message) : BackendError(std::move(message), false) {}
};

// Backend answered but the payload does not match the documented mapping.
class ProtocolError : public BackendError {
public:
    explicit ProtocolError(std::string message) : BackendError(std::move(message), false) {}
};

class EvalConsistencyError : public Error {
public:
    explicit EvalConsistencyError(std::string message) : Error(ErrorCategory::Eval, std::move(message)) {}
};

// Mismatched artifacts handed to one operation (e.g. a story validated
// against another bundle's judgments); indicates a pipeline bug.
class ConsistencyError : public Error {
public:
    explicit ConsistencyError(std::string message) : Error(ErrorCategory::Other, std::move(message)) {}
};

class OrderingError : public Error {
public:
    explicit OrderingError(std::string message) : Error(ErrorCategory::Other, std::move(message)) {}
};

// Conflicting relevance labels for one context article across bundles.
class ConflictError : public Error {
public:
    explicit ConflictError(std::string message) : Error(ErrorCategory::Other, std::move(message)) {}
};

class StoryError : public Error {
public:
    explicit StoryError(std::string message) : Error(ErrorCategory::Other, std::move(message)) {}
};

class MockError : public Error {
public:
    explicit MockError(std::string message) : Error(ErrorCategory::Other, std::move(message)) {}
};

class IoError : public Error {
public:
    explicit IoError(std::string message, ErrorCategory category = ErrorCategory::Other)
        : Error(category, std::move(message)) {}
};

}  // namespace chronoweave
