#pragma once

#include <stdexcept>
#include <string>

namespace quizgen {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ingest
class EmptyDocument : public Error {
public:
    using Error::Error;
};
class InvalidChunkConfig : public Error {
public:
    using Error::Error;
};
class ServiceUnreachable : public Error {
public:
    using Error::Error;
};
class UnparseableDocument : public Error {
public:
    using Error::Error;
};

// llm
class LlmError : public Error {
public:
    using Error::Error;
};
class AuthError : public LlmError {
public:
    using LlmError::LlmError;
};
class RateLimited : public LlmError {
public:
    using LlmError::LlmError;
};
class MalformedResponse : public LlmError {
public:
    using LlmError::LlmError;
};
/// Retryable failure (5xx, dropped connection). Surfaces only once retries are exhausted.
class TransientError : public LlmError {
public:
    using LlmError::LlmError;
};
class UnknownTemplate : public Error {
public:
    using Error::Error;
};
class MissingVariable : public Error {
public:
    explicit MissingVariable(std::string name)
        : Error("missing template variable: " + name), name_(std::move(name)) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

// concepts / generation
class ParseFailure : public Error {
public:
    using Error::Error;
};
class InsufficientQuestions : public Error {
public:
    using Error::Error;
};

// retrieval
class DimensionMismatch : public Error {
public:
    using Error::Error;
};
class ZeroVector : public Error {
public:
    using Error::Error;
};
class EmbedderFailure : public Error {
public:
    using Error::Error;
};

// cost
class NoCrossover : public Error {
public:
    using Error::Error;
};
class MissingPreset : public Error {
public:
    using Error::Error;
};

// judge
class ScoreParseFailure : public Error {
public:
    using Error::Error;
};
class OutOfRange : public Error {
public:
    using Error::Error;
};

class SchemaError : public Error {
public:
    using Error::Error;
};

/// Wraps a fatal error with the pipeline stage it came from.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& what)
        : Error("[" + stage + "] " + what), stage_(std::move(stage)) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace quizgen
