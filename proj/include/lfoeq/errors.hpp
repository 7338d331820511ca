#ifndef LFOEQ_ERRORS_HPP_
#define LFOEQ_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace lfoeq {

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ShapeMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Cholesky factorization of the mass matrix failed; signals a model
// invariant violation, not a user error.
struct SingularMass : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class InfeasibleTransition : public std::runtime_error {
 public:
  enum class Kind { kPosition, kActuation };

  InfeasibleTransition(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct SingularSystem : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SupportViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InfeasibleShape : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct CorruptFile : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BadSubsample : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DatasetModeMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct IoFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonpositiveStd : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace lfoeq

#endif  // LFOEQ_ERRORS_HPP_
