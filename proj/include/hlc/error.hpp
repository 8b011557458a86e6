#ifndef HLC_ERROR_HPP
#define HLC_ERROR_HPP

#include <stdexcept>
#include <string>

namespace hlc {

/// Base of every error the library throws. The category drives CLI exit codes.
class Error : public std::runtime_error {
public:
    enum class Category { config, data, numerical };

    Error(Category category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    Category category() const noexcept { return category_; }

private:
    Category category_;
};

/// Malformed text: quarter labels, CSV cells, lag ranges.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error(Category::data, what) {}
};

/// Missing columns, misaligned series, too few observations.
class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(Category::data, what) {}
};

/// Out-of-domain arguments to a numerical routine (negative rates, window < 1, ...).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(Category::numerical, what) {}
};

/// Rank-deficient design matrix.
class SingularDesignError : public Error {
public:
    explicit SingularDesignError(const std::string& what) : Error(Category::numerical, what) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(Category::config, what) {}
};

}  // namespace hlc

#endif  // HLC_ERROR_HPP
