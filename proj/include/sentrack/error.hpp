#pragma once

#include <stdexcept>
#include <string>

namespace sentrack {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (clip files, lexicon DSL, regexes, sentences).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Well-formed input that breaks a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Sentence has no consistent role assignment.
class RoleError : public Error {
 public:
  using Error::Error;
};

/// A frame left with no detections; the tracker cannot form a track.
class NoTrackError : public Error {
 public:
  using Error::Error;
};

/// Brute-force enumeration refused because the instance exceeds the cap.
class OracleCapError : public Error {
 public:
  using Error::Error;
};

}  // namespace sentrack
