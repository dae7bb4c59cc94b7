#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace revpanel {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Design matrix lost rank; `columns` names the linearly dependent columns.
class RankDeficientError : public Error {
public:
    RankDeficientError(const std::string& what, std::vector<std::string> columns)
        : Error(what), columns_(std::move(columns)) {}
    const std::vector<std::string>& columns() const noexcept { return columns_; }

private:
    std::vector<std::string> columns_;
};

class InsufficientDataError : public Error {
public:
    using Error::Error;
};

}  // namespace revpanel
