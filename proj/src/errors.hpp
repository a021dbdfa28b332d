#ifndef RLU_ERRORS_HPP
#define RLU_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rlu {

/// Error taxonomy shared by the library, the C API and the CLI exit codes:
/// config = 2, solver = 3, verification = 4.
enum class ErrorCode { config = 2, solver = 3, verification = 4, invalid = 5 };

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

inline Error config_error(const std::string& what) { return Error(ErrorCode::config, what); }
inline Error solver_error(const std::string& what) { return Error(ErrorCode::solver, what); }
inline Error verification_error(const std::string& what) { return Error(ErrorCode::verification, what); }
inline Error invalid_error(const std::string& what) { return Error(ErrorCode::invalid, what); }

} // namespace rlu

#endif
