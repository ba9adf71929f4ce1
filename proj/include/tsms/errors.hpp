#pragma once

#include <stdexcept>
#include <string>

namespace tsms {

// Base for malformed input data (files, CSV/XML, calendars). CLI exit code 2.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Base for engine-level failures (mismatched operands, bad plans). CLI exit code 3.
class EngineError : public std::runtime_error {
public:
    explicit EngineError(const std::string& msg) : std::runtime_error(msg) {}
};

class CalendarMismatch : public EngineError {
public:
    explicit CalendarMismatch(const std::string& msg) : EngineError(msg) {}
};

class ArityMismatch : public EngineError {
public:
    explicit ArityMismatch(const std::string& msg) : EngineError(msg) {}
};

class EmptySeries : public EngineError {
public:
    explicit EmptySeries(const std::string& msg) : EngineError(msg) {}
};

class TooShort : public EngineError {
public:
    explicit TooShort(const std::string& msg) : EngineError(msg) {}
};

class NoData : public EngineError {
public:
    explicit NoData(const std::string& msg) : EngineError(msg) {}
};

class UnknownBaseSeries : public EngineError {
public:
    explicit UnknownBaseSeries(const std::string& name)
        : EngineError("unknown base series: " + name) {}
};

class CoverageGap : public EngineError {
public:
    explicit CoverageGap(const std::string& msg) : EngineError(msg) {}
};

class InfeasibleWindow : public EngineError {
public:
    explicit InfeasibleWindow(const std::string& msg) : EngineError(msg) {}
};

class Underdetermined : public EngineError {
public:
    explicit Underdetermined(const std::string& msg) : EngineError(msg) {}
};

// Expression text errors carry the offset of the offending character.
class SyntaxError : public DataError {
public:
    SyntaxError(const std::string& msg, std::size_t pos)
        : DataError(msg + " (at offset " + std::to_string(pos) + ")"), pos_(pos) {}
    std::size_t position() const { return pos_; }

private:
    std::size_t pos_;
};

class UnknownOperator : public DataError {
public:
    explicit UnknownOperator(const std::string& name)
        : DataError("unknown operator: " + name) {}
};

class ArityError : public DataError {
public:
    explicit ArityError(const std::string& msg) : DataError(msg) {}
};

class ParseError : public DataError {
public:
    explicit ParseError(const std::string& msg) : DataError(msg) {}
};

class CalendarOrderError : public DataError {
public:
    explicit CalendarOrderError(const std::string& msg) : DataError(msg) {}
};

} // namespace tsms
