#pragma once

#include <stdexcept>
#include <string>

namespace relic
{

// Every failure raised by the library derives from Error so front ends can
// map the whole family to a single exit status.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class SortError : public Error
{
public:
    using Error::Error;
};

/// Substitution target is bound somewhere inside the formula.
class CaptureError : public Error
{
public:
    using Error::Error;
};

/// Time shift or order requested on a formula with absolute step indices.
class ShiftDomainError : public Error
{
public:
    using Error::Error;
};

class UnboundVariable : public Error
{
public:
    using Error::Error;
};

/// Input falls outside linear arithmetic (products of variables, mixed int/real QE, ...).
class UnsupportedTheory : public Error
{
public:
    using Error::Error;
};

/// A configured size cap was exceeded (Cooper candidates, refinement rounds).
class ResourceLimit : public Error
{
public:
    using Error::Error;
};

class ParseError : public Error
{
public:
    ParseError(const std::string& message, int line, int column)
        : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message), line_(line),
          column_(column)
    {
    }

    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

} // namespace relic
