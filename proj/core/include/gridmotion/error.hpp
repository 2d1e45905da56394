#pragma once

#include <stdexcept>
#include <string>

namespace gmc {

/// Base error for precondition violations and runtime failures.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Line-precise file parse failure.
class ParseError : public Error {
public:
    ParseError(const std::string& file, int line, const std::string& reason)
        : Error(file + ":" + std::to_string(line) + ": " + reason),
          file_(file), line_(line), reason_(reason) {}

    const std::string& file() const { return file_; }
    int line() const { return line_; }
    const std::string& reason() const { return reason_; }

private:
    std::string file_;
    int line_;
    std::string reason_;
};

} // namespace gmc
