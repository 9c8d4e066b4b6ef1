#pragma once

#include <algorithm>
#include <string>

namespace qgp {

enum class Method { ExactLp, VertexEnum, Iterative };

inline const char* method_name(Method m) {
    switch (m) {
        case Method::ExactLp: return "exact-lp";
        case Method::VertexEnum: return "vertex-enum";
        case Method::Iterative: return "iterative";
    }
    return "?";
}

/** A number with the bracket that was actually established for it. */
struct CertifiedValue {
    double value = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    Method method = Method::ExactLp;
    int iterations = 0;
    std::string note;  // caveats such as "lower-bound-only"

    static CertifiedValue exact(double v, Method m = Method::ExactLp, int iters = 0) {
        return CertifiedValue{v, v, v, m, iters, {}};
    }
    double gap() const { return upper - lower; }
    // restore lower <= value <= upper after independent rounding
    void normalize() {
        lower = std::min(lower, value);
        upper = std::max(upper, value);
    }
};

// component-wise max, used for reach/height/length combinations
inline CertifiedValue cv_max(const CertifiedValue& a, const CertifiedValue& b) {
    CertifiedValue r;
    r.value = std::max(a.value, b.value);
    r.lower = std::max(a.lower, b.lower);
    r.upper = std::max(a.upper, b.upper);
    r.method = (a.method == Method::Iterative || b.method == Method::Iterative) ? Method::Iterative
               : (a.method == Method::VertexEnum || b.method == Method::VertexEnum) ? Method::VertexEnum
                                                                                    : Method::ExactLp;
    r.iterations = a.iterations + b.iterations;
    r.note = a.note.empty() ? b.note : (b.note.empty() || b.note == a.note ? a.note : a.note + "; " + b.note);
    return r;
}

inline CertifiedValue cv_sum(const CertifiedValue& a, const CertifiedValue& b) {
    CertifiedValue r = cv_max(a, b);
    r.value = a.value + b.value;
    r.lower = a.lower + b.lower;
    r.upper = a.upper + b.upper;
    return r;
}

}  // namespace qgp
