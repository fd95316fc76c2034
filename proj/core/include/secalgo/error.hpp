#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace secalgo {

/// Misuse categories from the mobile-app misuse literature. Each one is either
/// rejected by a whitelist or ruled out structurally.
enum class MisuseClass {
  M1K,  // insufficient key size
  M2K,  // constant or hardcoded keys
  M1S,  // encryption in ECB mode
  M2S,  // encryption with predictable IV
  M3S,  // encryption with obsolete algorithm
  M1A,  // RSA encryption without OAEP
  M1H,  // hashing with obsolete algorithm
};

std::string_view code(MisuseClass c);
std::string_view description(MisuseClass c);

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// codec

class MalformedEncoding : public Error {
 public:
  using Error::Error;
};

class UnsupportedType : public Error {
 public:
  using Error::Error;
};

class DepthExceeded : public Error {
 public:
  using Error::Error;
};

// config

class ConfigError : public Error {
 public:
  using Error::Error;
};

class UnknownItem : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// A configuration value outside the item's allowed set. Values rejected by a
/// misuse whitelist (modes, algorithms, hashes, sizes) carry the misuse class.
class DisallowedValue : public ConfigError {
 public:
  DisallowedValue(const std::string& what, std::optional<MisuseClass> misuse)
      : ConfigError(what), misuse_(misuse) {}

  std::optional<MisuseClass> misuse() const noexcept { return misuse_; }

 private:
  std::optional<MisuseClass> misuse_;
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what, std::size_t line = 0)
      : Error(what), line_(line) {}

  /// 1-based line of the offending input, 0 when not line-oriented.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// guard

class MisuseError : public Error {
 public:
  MisuseError(MisuseClass cls, const std::string& detail);

  MisuseClass misuse() const noexcept { return class_; }

 private:
  MisuseClass class_;
};

// keys

class UnknownAlgorithm : public Error {
 public:
  using Error::Error;
};

class UnknownGroup : public Error {
 public:
  using Error::Error;
};

class GroupMismatch : public Error {
 public:
  using Error::Error;
};

class DegenerateValue : public Error {
 public:
  using Error::Error;
};

class WrongKeyPart : public Error {
 public:
  using Error::Error;
};

// primitives

/// The only error decrypt reports. It never says why: bad tag, wrong key and
/// bad padding all produce the same value.
class DecryptionFailure : public Error {
 public:
  DecryptionFailure() : Error("decryption failed") {}
};

// harness

class TimeoutError : public Error {
 public:
  using Error::Error;
};

class UnknownRole : public Error {
 public:
  using Error::Error;
};

class VerificationFailed : public Error {
 public:
  using Error::Error;
};

class StaleCertificate : public VerificationFailed {
 public:
  using VerificationFailed::VerificationFailed;
};

}  // namespace secalgo
