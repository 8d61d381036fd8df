#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace mk2 {

/// Half-open position range inside a source document (1-based line/column).
struct SourceSpan {
    std::size_t line = 0;
    std::size_t column = 0;
    std::size_t end_line = 0;
    std::size_t end_column = 0;

    bool valid() const { return line > 0; }
    std::string to_string() const;
};

/// Base class for all diagnostics raised by the toolkit.
class ModelError : public std::runtime_error {
  public:
    explicit ModelError(std::string message, std::optional<SourceSpan> span = std::nullopt)
        : std::runtime_error(span && span->valid() ? span->to_string() + ": " + message : message),
          span_(span) {}

    const std::optional<SourceSpan>& span() const { return span_; }

  private:
    std::optional<SourceSpan> span_;
};

/// Lexical or grammatical failure while reading a .cmodel/.topo document.
class ParseError : public ModelError {
  public:
    using ModelError::ModelError;
};

/// Structurally valid input that violates a model invariant
/// (unknown names, arity mismatch, non-finite domain, ...).
class ValidationError : public ModelError {
  public:
    using ModelError::ModelError;
};

/// Raised by the operational semantics: name-set violations, domain
/// violations, unbounded input binders, unfold budget exhaustion.
class SemanticsError : public ModelError {
  public:
    using ModelError::ModelError;
};

/// Invalid scheduling system or stimulus in the simulator.
class SchedError : public ModelError {
  public:
    using ModelError::ModelError;
};

} // namespace mk2
