#pragma once

#include <stdexcept>
#include <string>

namespace qgp {

enum class ErrorKind {
    Structural,   // shapes, parents, morphism identities
    Domain,       // value-level preconditions
    Unsupported,  // variant combination without an implemented path
    Resource,     // enumeration limits
    Solver,       // numeric breakdown or non-convergence
    NoPath,       // registry has no connecting trek
    Input,        // instance file or CLI usage
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline const char* error_kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::Structural: return "structural";
        case ErrorKind::Domain: return "domain";
        case ErrorKind::Unsupported: return "unsupported-variant";
        case ErrorKind::Resource: return "resource-limit";
        case ErrorKind::Solver: return "solver";
        case ErrorKind::NoPath: return "no-path";
        case ErrorKind::Input: return "input";
    }
    return "unknown";
}

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
    if (!cond) throw Error(kind, what);
}

}  // namespace qgp
