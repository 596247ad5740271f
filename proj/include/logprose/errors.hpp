#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace logprose {

// Base class for every error raised by the library. Each subclass names one
// failure category so callers (and the CLI exit-code mapping) can dispatch
// on type instead of parsing messages.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnbalancedCall : public Error { public: using Error::Error; };
class UnknownLevel : public Error { public: using Error::Error; };
class LexiconMissing : public Error { public: using Error::Error; };
class EmptyCorpus : public Error { public: using Error::Error; };
class EmptyDataset : public Error { public: using Error::Error; };
class DegenerateClass : public Error { public: using Error::Error; };
class DimensionMismatch : public Error { public: using Error::Error; };
class BadK : public Error { public: using Error::Error; };
class UndefinedMetric : public Error { public: using Error::Error; };
class LengthMismatch : public Error { public: using Error::Error; };
class BadInput : public Error { public: using Error::Error; };
class ConfigError : public Error { public: using Error::Error; };
class ModelFormatError : public Error { public: using Error::Error; };

class MalformedCsv : public Error {
public:
    MalformedCsv(std::size_t row, const std::string& what)
        : Error("malformed CSV at row " + std::to_string(row) + ": " + what), row_(row) {}

    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

} // namespace logprose
