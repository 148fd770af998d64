#ifndef HEXATAG_ERROR_H_
#define HEXATAG_ERROR_H_

#include <stdexcept>
#include <string>

namespace hexatag {

// Error categories. The numeric values are mirrored by hexa_status in the
// public C header, so they must not be reordered.
enum class ErrorCode {
  kInvalidArgument = 1,
  kParse = 2,
  kStructure = 3,
  kNonProjective = 4,
  kTransition = 5,
  kDecode = 6,
  kIo = 7,
  kModelFormat = 8,
  kAlignment = 9,
  kInternal = 10,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string &message) {
  throw Error(code, message);
}

}  // namespace hexatag

#endif  // HEXATAG_ERROR_H_
