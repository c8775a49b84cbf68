#pragma once

#include <stdexcept>
#include <string>

namespace sdc {

class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Bad labels, empty or zero states, mismatched subsystem structure.
class StateError : public Error
{
public:
    using Error::Error;
};

class DimensionError : public Error
{
public:
    using Error::Error;
};

class NonUnitaryError : public Error
{
public:
    using Error::Error;
};

class NonHermitianError : public Error
{
public:
    using Error::Error;
};

class ZeroProbabilityError : public Error
{
public:
    using Error::Error;
};

class NonPhysicalError : public Error
{
public:
    using Error::Error;
};

// Physical parameters outside the regime an operation is defined for.
class ParameterError : public Error
{
public:
    using Error::Error;
};

class DecodeError : public Error
{
public:
    using Error::Error;
};

class ConfigError : public Error
{
public:
    using Error::Error;
};

// Failure inside a named pipeline stage; carries the stage name for reports.
class StageError : public Error
{
public:
    StageError(std::string stage, const std::string &what)
        : Error(stage + ": " + what), m_stage(std::move(stage))
    {}
    const std::string &stage() const { return m_stage; }

private:
    std::string m_stage;
};

} // namespace sdc
