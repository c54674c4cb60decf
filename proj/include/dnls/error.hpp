#pragma once

#include <stdexcept>
#include <string>

namespace dnls {

// Input errors map to exit code 2, numerical ones to 3.
enum class ErrorKind { input, numerical };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

inline Error input_error(const std::string& what) { return Error(ErrorKind::input, what); }
inline Error numerical_error(const std::string& what) { return Error(ErrorKind::numerical, what); }

}  // namespace dnls
