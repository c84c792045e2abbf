// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace entropik {

// Base class for every failure raised by the engine.  The code is a stable
// identifier that the CLI prints next to the message and writes into JSON
// reports, so scripts can match on it without parsing prose.
class EngineError : public std::runtime_error {
 public:
  EngineError(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

#define ENTROPIK_DEFINE_ERROR(Name)                                        \
  class Name : public EngineError {                                        \
   public:                                                                 \
    explicit Name(const std::string& message) : EngineError(#Name, message) {} \
  }

ENTROPIK_DEFINE_ERROR(DivisionByZeroExpr);
ENTROPIK_DEFINE_ERROR(DenominatorVanishes);
ENTROPIK_DEFINE_ERROR(NotPolynomialInVars);
ENTROPIK_DEFINE_ERROR(UnknownConstitSym);
ENTROPIK_DEFINE_ERROR(InvalidModel);
ENTROPIK_DEFINE_ERROR(NonlinearInLeading);
ENTROPIK_DEFINE_ERROR(SingularSystem);
ENTROPIK_DEFINE_ERROR(OrderCapExceeded);
ENTROPIK_DEFINE_ERROR(SingularConsequence);
ENTROPIK_DEFINE_ERROR(NotPolynomialInFreeElements);
ENTROPIK_DEFINE_ERROR(NonlinearExtendedInequality);
ENTROPIK_DEFINE_ERROR(UnboundSymbol);
ENTROPIK_DEFINE_ERROR(NonRationalBinding);
ENTROPIK_DEFINE_ERROR(MultiplierEliminationIncomplete);
ENTROPIK_DEFINE_ERROR(DepthCapExceeded);

#undef ENTROPIK_DEFINE_ERROR

}  // namespace entropik
