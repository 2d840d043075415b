#pragma once

#include <stdexcept>
#include <string>

namespace crevtax {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class TaxonomyError : public Error {
public:
    enum class Kind { MissingCategory, DuplicateCategory, BadGroup, BadRating, FrequencyMismatch, Malformed };

    TaxonomyError(Kind kind, const std::string& message) : Error(message), kind_(kind) {}
    [[nodiscard]] Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

class CorpusError : public Error {
public:
    enum class Kind { UnknownLabel, DuplicateId, MalformedRecord, EmptyCorpus, BadFoldCount, Io };

    CorpusError(Kind kind, const std::string& message, std::size_t line = 0)
        : Error(message), kind_(kind), line_(line) {}
    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    /// 1-based line number for record-level errors, 0 otherwise.
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    Kind kind_;
    std::size_t line_;
};

class GatewayError : public Error {
public:
    enum class Kind { ExhaustedRetries, AuthMissing, MalformedEndpointReply, CacheMiss, MockScriptMiss, Transport };

    GatewayError(Kind kind, const std::string& message) : Error(message), kind_(kind) {}
    [[nodiscard]] Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

/// Gateway failure annotated with the comment it was raised for.
class ClassificationError : public Error {
public:
    ClassificationError(std::string comment_id, const std::string& message)
        : Error("comment " + comment_id + ": " + message), comment_id_(std::move(comment_id)) {}
    [[nodiscard]] const std::string& comment_id() const noexcept { return comment_id_; }

private:
    std::string comment_id_;
};

class EvaluationError : public Error {
public:
    using Error::Error;
};

}  // namespace crevtax
