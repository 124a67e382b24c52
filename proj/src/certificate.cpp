#include "qflow/certificate.hpp"

namespace qflow {

const char* weight_name(MajorantWeight w) {
    switch (w) {
        case MajorantWeight::QFactorialRoot: return "qfactorial-root";
        case MajorantWeight::QGaussian: return "q-gaussian";
        case MajorantWeight::One: return "one";
        case MajorantWeight::QGaussianShift: return "q-gaussian-shift";
        default: return "auto";
    }
}

MajorantWeight parse_weight(const std::string& s) {
    if (s == "auto") return MajorantWeight::Auto;
    if (s == "qfactorial-root") return MajorantWeight::QFactorialRoot;
    if (s == "q-gaussian") return MajorantWeight::QGaussian;
    if (s == "one") return MajorantWeight::One;
    if (s == "q-gaussian-shift") return MajorantWeight::QGaussianShift;
    throw DomainError("unknown majorant weight: " + s);
}

}  // namespace qflow
