#pragma once

#include <stdexcept>
#include <string>

namespace qfield {

/// Base of every typed computation error raised by the library.
/// `kind()` is the stable name serialized by the command-line front end.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define QFIELD_DEFINE_ERROR(Name)                                    \
  class Name : public Error {                                        \
   public:                                                           \
    explicit Name(const std::string& what) : Error(#Name, what) {}   \
  }

QFIELD_DEFINE_ERROR(DomainError);
QFIELD_DEFINE_ERROR(PoleError);
QFIELD_DEFINE_ERROR(NegativeNormError);
QFIELD_DEFINE_ERROR(LengthBoundError);
QFIELD_DEFINE_ERROR(EqualTimeError);
QFIELD_DEFINE_ERROR(OffShellError);
QFIELD_DEFINE_ERROR(ZeroMassError);
QFIELD_DEFINE_ERROR(ZeroVectorError);
QFIELD_DEFINE_ERROR(ConvergenceError);
QFIELD_DEFINE_ERROR(SuperluminalError);
QFIELD_DEFINE_ERROR(DegenerateTransferError);
QFIELD_DEFINE_ERROR(KinematicsError);

#undef QFIELD_DEFINE_ERROR

}  // namespace qfield
