#pragma once

#include <stdexcept>
#include <string>

namespace cnchtv {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid argument / configuration / dimension mismatch.
class ArgumentError : public Error {
public:
    using Error::Error;
};

// Malformed file content (PNM, PSF text, manifest).
class FormatError : public Error {
public:
    using Error::Error;
};

// Filesystem failure, carries the offending path in the message.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace cnchtv
