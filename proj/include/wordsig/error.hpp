#pragma once

#include <stdexcept>
#include <string>

namespace wordsig {

enum class ErrorCode {
  MalformedInput,
  MalformedName,
  MalformedCaption,
  MalformedCertificate,
  MalformedPayload,
  UnsupportedVersion,
  PayloadTooLarge,
  DecodeFailure,
  InvalidCertificate,
  KeyMismatch,
  Io,
  SessionMisuse,
};

const char* to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so that
// the CLI and the service can map it to an exit status or HTTP status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace wordsig
