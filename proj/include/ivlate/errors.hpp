#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace ivlate {

// Base class for all library errors. name() is the stable machine-readable
// identifier; the CLI prints it on stderr and maps it to an exit code.
class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& what)
        : std::runtime_error(what), name_(std::move(name)) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

#define IVLATE_ERROR_TYPE(NAME)                                            \
    class NAME : public Error {                                            \
    public:                                                                \
        explicit NAME(const std::string& what) : Error(#NAME, what) {}     \
    }

IVLATE_ERROR_TYPE(InvalidConfig);
IVLATE_ERROR_TYPE(MissingNonidentifiedMean);
IVLATE_ERROR_TYPE(RankDeficient);
IVLATE_ERROR_TYPE(WeakInstrument);
IVLATE_ERROR_TYPE(EmptyArm);
IVLATE_ERROR_TYPE(EmptyCell);
IVLATE_ERROR_TYPE(MonotonicityViolation);
IVLATE_ERROR_TYPE(NonBinaryOutcome);
IVLATE_ERROR_TYPE(TooLarge);
IVLATE_ERROR_TYPE(OutOfRange);
IVLATE_ERROR_TYPE(ConfigError);
IVLATE_ERROR_TYPE(IoError);

#undef IVLATE_ERROR_TYPE

}  // namespace ivlate
