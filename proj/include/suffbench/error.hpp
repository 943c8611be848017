#pragma once

#include <stdexcept>
#include <string>

namespace suffbench {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CorpusError : public Error {
 public:
  using Error::Error;
};

class TemplateError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class StoreError : public Error {
 public:
  using Error::Error;
};

class ManifestMismatch : public StoreError {
 public:
  using StoreError::StoreError;
};

class StageOrderError : public Error {
 public:
  using Error::Error;
};

/// Some work items of a stage failed; completed items stay persisted.
class StageFailure : public Error {
 public:
  using Error::Error;
};

/// Raised by the masking gate when an unmasked explanation would reach the scorer.
class LeakHazard : public Error {
 public:
  using Error::Error;
};

class UnparseableOutput : public Error {
 public:
  using Error::Error;
};

// Gateway errors.

class TransportError : public Error {
 public:
  using Error::Error;
};

class HttpError : public Error {
 public:
  HttpError(int status, std::string body)
      : Error("HTTP " + std::to_string(status) + ": " + body),
        status_(status),
        body_(std::move(body)) {}

  int status() const { return status_; }
  const std::string& body() const { return body_; }
  bool retryable() const { return status_ == 429 || status_ >= 500; }

 private:
  int status_;
  std::string body_;
};

class EmptyCompletion : public Error {
 public:
  using Error::Error;
};

class LogprobUnsupported : public Error {
 public:
  using Error::Error;
};

class TokenAlignmentError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class ProtocolError : public Error {
 public:
  using Error::Error;
};

}  // namespace suffbench
