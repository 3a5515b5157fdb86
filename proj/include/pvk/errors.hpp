#pragma once

#include <stdexcept>
#include <string>

namespace pvk {

// Exit-code classes used by the CLI: validation failures of input data,
// genuine mathematical obstructions, and internal invariant breaches.
enum class ErrorClass { Validation = 1, Obstruction = 2, Internal = 3 };

class Error : public std::runtime_error {
public:
  Error(ErrorClass cls, const std::string& what) : std::runtime_error(what), cls_(cls) {}
  ErrorClass error_class() const { return cls_; }

private:
  ErrorClass cls_;
};

struct ParseError : Error {
  explicit ParseError(const std::string& what) : Error(ErrorClass::Validation, what) {}
};

struct SchemaError : Error {
  SchemaError(const std::string& where, const std::string& what)
      : Error(ErrorClass::Validation, what + " (at " + where + ")"), location(where) {}
  std::string location;
};

struct CrossRefError : Error {
  CrossRefError(const std::string& where, const std::string& what)
      : Error(ErrorClass::Validation, what + " (at " + where + ")"), location(where) {}
  std::string location;
};

struct JacobiViolation : Error {
  JacobiViolation(int i_, int j_, int k_, const std::string& what)
      : Error(ErrorClass::Validation, what), i(i_), j(j_), k(k_) {}
  int i, j, k;
};

struct ModuleValidationError : Error {
  explicit ModuleValidationError(const std::string& what) : Error(ErrorClass::Validation, what) {}
};

struct AlgebraMismatch : Error {
  explicit AlgebraMismatch(const std::string& what) : Error(ErrorClass::Validation, what) {}
};

struct NotFlat : Error {
  explicit NotFlat(const std::string& what) : Error(ErrorClass::Validation, what) {}
};

struct NonLinearStructure : Error {
  explicit NonLinearStructure(const std::string& what) : Error(ErrorClass::Validation, what) {}
};

struct NotSemisimple : Error {
  explicit NotSemisimple(const std::string& what) : Error(ErrorClass::Validation, what) {}
};

struct NotPoissonField : Error {
  explicit NotPoissonField(const std::string& what) : Error(ErrorClass::Validation, what) {}
};

struct NonInvertibleConstantTerm : Error {
  explicit NonInvertibleConstantTerm(const std::string& what) : Error(ErrorClass::Validation, what) {}
};

struct InternalError : Error {
  explicit InternalError(const std::string& what) : Error(ErrorClass::Internal, what) {}
};

}  // namespace pvk
