#pragma once

#include <stdexcept>
#include <string>

namespace vball {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define VBALL_ERROR_TYPE(Name)                                        \
    struct Name : Error {                                             \
        explicit Name(const std::string& msg) : Error(#Name ": " + msg) {} \
    }

VBALL_ERROR_TYPE(DegenerateConfiguration);
VBALL_ERROR_TYPE(PointAtHorizon);
VBALL_ERROR_TYPE(BinExtentOutOfRange);
VBALL_ERROR_TYPE(DimensionMismatch);
VBALL_ERROR_TYPE(InsufficientSamples);
VBALL_ERROR_TYPE(DegenerateComponent);
VBALL_ERROR_TYPE(EmptyPatch);
VBALL_ERROR_TYPE(UnknownBlock);
VBALL_ERROR_TYPE(EmptyMask);
VBALL_ERROR_TYPE(InsufficientData);
VBALL_ERROR_TYPE(ZeroArea);
VBALL_ERROR_TYPE(EmptyGrid);
VBALL_ERROR_TYPE(SingleClassData);
VBALL_ERROR_TYPE(MissingClass);
VBALL_ERROR_TYPE(EmptyTestSet);
VBALL_ERROR_TYPE(ParseError);
VBALL_ERROR_TYPE(UnknownClass);
VBALL_ERROR_TYPE(ClassChangeWithinTracklet);
VBALL_ERROR_TYPE(ConfigInvalid);
VBALL_ERROR_TYPE(IoError);

#undef VBALL_ERROR_TYPE

}  // namespace vball
