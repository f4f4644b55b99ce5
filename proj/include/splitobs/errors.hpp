#ifndef SPLITOBS_ERRORS_HPP_
#define SPLITOBS_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace splitobs {

// Base class for all library errors; every throw site attaches a message
// naming the offending quantity.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define SPLITOBS_DEFINE_ERROR(Name)                           \
  class Name : public Error {                                 \
  public:                                                     \
    explicit Name(const std::string& msg) : Error(msg) {}     \
  }

SPLITOBS_DEFINE_ERROR(NotObservable);
SPLITOBS_DEFINE_ERROR(SolverDiverged);
SPLITOBS_DEFINE_ERROR(MissingSelfLoop);
SPLITOBS_DEFINE_ERROR(NotIrreducible);
SPLITOBS_DEFINE_ERROR(NotSymmetricGraph);
SPLITOBS_DEFINE_ERROR(NotDoublyStochastic);
SPLITOBS_DEFINE_ERROR(IntertwiningViolated);
SPLITOBS_DEFINE_ERROR(CouplingDegenerate);
SPLITOBS_DEFINE_ERROR(EmptyFamily);
SPLITOBS_DEFINE_ERROR(DimensionMismatch);
SPLITOBS_DEFINE_ERROR(FaultBreaksAssumptions);
SPLITOBS_DEFINE_ERROR(OutOfHorizon);
SPLITOBS_DEFINE_ERROR(ToleranceNotMet);
SPLITOBS_DEFINE_ERROR(InsufficientData);
SPLITOBS_DEFINE_ERROR(SchemaError);
SPLITOBS_DEFINE_ERROR(FileNotFound);

#undef SPLITOBS_DEFINE_ERROR

}  // namespace splitobs

#endif  // SPLITOBS_ERRORS_HPP_
