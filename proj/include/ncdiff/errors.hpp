#pragma once

#include <stdexcept>
#include <string>

namespace ncdiff {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DivisionByZero : public Error {
public:
  using Error::Error;
};

// Raised when a rational function is evaluated at one of its poles.
class PoleError : public Error {
public:
  using Error::Error;
};

class UnsupportedRelation : public Error {
public:
  using Error::Error;
};

class MissingThetaRule : public Error {
public:
  using Error::Error;
};

class InexpressibleRelation : public Error {
public:
  using Error::Error;
};

class MissingInverse : public Error {
public:
  using Error::Error;
};

// Parse and semantic errors from the model language. Line and column are
// 1-based; zero means "no location".
class ModelError : public Error {
public:
  ModelError(const std::string& message, int line, int column, std::string token = {})
      : Error(format(message, line, column, token)),
        line_(line),
        column_(column),
        token_(std::move(token)),
        bare_(message) {}

  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& token() const { return token_; }
  const std::string& bare_message() const { return bare_; }

private:
  static std::string format(const std::string& message, int line, int column,
                            const std::string& token) {
    std::string out;
    if (line > 0) {
      out += std::to_string(line) + ":" + std::to_string(column) + ": ";
    }
    out += message;
    if (!token.empty()) out += " near '" + token + "'";
    return out;
  }

  int line_;
  int column_;
  std::string token_;
  std::string bare_;
};

}  // namespace ncdiff
