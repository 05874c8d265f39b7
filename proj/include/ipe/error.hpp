#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ipe {

/// Failure categories raised by the library. Each maps onto one distinct
/// precondition or resource limit of an operation.
enum class ErrorKind {
  NotSquareFree,
  Overflow,
  NotPrime,
  NotAFactor,
  BadPermutation,
  NotTriangular,
  DomainMismatch,
  TooLarge,
  BadParams,
  ModulusMismatch,
  QTooSmall,
  KExceedsN,
  BadK,
  PatternMismatch,
  NotTriangularPattern,
  NotDiagonalPattern,
  UnverifiedReduction,
  CapExceeded,
  Unsupported,
  BadEps,
  QTooSmallForError,
  ExactUnavailable,
  Parse,
};

inline constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotSquareFree: return "NotSquareFree";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::NotPrime: return "NotPrime";
    case ErrorKind::NotAFactor: return "NotAFactor";
    case ErrorKind::BadPermutation: return "BadPermutation";
    case ErrorKind::NotTriangular: return "NotTriangular";
    case ErrorKind::DomainMismatch: return "DomainMismatch";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::BadParams: return "BadParams";
    case ErrorKind::ModulusMismatch: return "ModulusMismatch";
    case ErrorKind::QTooSmall: return "QTooSmall";
    case ErrorKind::KExceedsN: return "KExceedsN";
    case ErrorKind::BadK: return "BadK";
    case ErrorKind::PatternMismatch: return "PatternMismatch";
    case ErrorKind::NotTriangularPattern: return "NotTriangularPattern";
    case ErrorKind::NotDiagonalPattern: return "NotDiagonalPattern";
    case ErrorKind::UnverifiedReduction: return "UnverifiedReduction";
    case ErrorKind::CapExceeded: return "CapExceeded";
    case ErrorKind::Unsupported: return "Unsupported";
    case ErrorKind::BadEps: return "BadEps";
    case ErrorKind::QTooSmallForError: return "QTooSmallForError";
    case ErrorKind::ExactUnavailable: return "ExactUnavailable";
    case ErrorKind::Parse: return "Parse";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace ipe
