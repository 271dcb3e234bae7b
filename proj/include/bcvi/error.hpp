#pragma once

#include <stdexcept>
#include <string>

namespace bcvi {

/// Broad class of a failure. The CLI maps each class to its own exit code.
enum class ErrorClass { config, data, clustering, index, bayes, io };

inline const char* to_string(ErrorClass c)
{
    switch (c) {
    case ErrorClass::config: return "config";
    case ErrorClass::data: return "data";
    case ErrorClass::clustering: return "clustering";
    case ErrorClass::index: return "index";
    case ErrorClass::bayes: return "bayes";
    case ErrorClass::io: return "io";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorClass cls, const std::string& what)
        : std::runtime_error(what), class_(cls) {}

    ErrorClass error_class() const noexcept { return class_; }

private:
    ErrorClass class_;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& w) : Error(ErrorClass::config, w) {}
};
struct DataError : Error {
    explicit DataError(const std::string& w) : Error(ErrorClass::data, w) {}
};
struct ClusteringError : Error {
    explicit ClusteringError(const std::string& w) : Error(ErrorClass::clustering, w) {}
};
struct IndexError : Error {
    explicit IndexError(const std::string& w) : Error(ErrorClass::index, w) {}
};
struct BayesError : Error {
    explicit BayesError(const std::string& w) : Error(ErrorClass::bayes, w) {}
};
struct IoError : Error {
    explicit IoError(const std::string& w) : Error(ErrorClass::io, w) {}
};

} // namespace bcvi
