#pragma once

#include <stdexcept>
#include <string>

namespace th {

enum class ErrorKind {
    NonSquare,
    Singular,
    OutsideAnnulus,
    PhaseUnresolved,
    ZeroOnCircle,
    NonzeroWinding,
    InvalidParams,
    NodeCountTooSmall,
    TruncationExceeded,
    SingularDn,
    OnCircle,
    ModelNotFactorizable,
    DegeneratePredictor,
    GenericityFailed,
    GenericConditionFailed,
    MissingData,
    Config,
    Parse,
    Inconsistent,
};

const char* kind_name(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind k, const std::string& what)
        : std::runtime_error(std::string(kind_name(k)) + ": " + what), kind_(k) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace th
