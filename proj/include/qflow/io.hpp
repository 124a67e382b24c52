#pragma once

// Spec documents (JSON), coefficient tables (CSV) and report documents.

#include <json.hpp>

#include <string>
#include <vector>

#include "qflow/certificate.hpp"
#include "qflow/growth.hpp"
#include "qflow/nagumo.hpp"
#include "qflow/qvalue.hpp"
#include "qflow/solver.hpp"

namespace qflow {

using Json = nlohmann::ordered_json;

/// Malformed document; the message starts with the field path.
class SchemaError : public Error {
public:
    SchemaError(const std::string& path, const std::string& msg) : Error(path + ": " + msg), path_(path) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

/// A coefficient as written in a document: exact Gaussian rational or float.
struct DocScalar {
    bool is_float = false;
    Gaussian exact;
    Complex approx;
};

struct DocEntry {
    int n = 0;
    int m = 0;
    std::vector<DocScalar> values;  ///< row-major, N or N*N entries
};

struct DocNonlinear {
    MultiIndex I;
    std::vector<DocEntry> terms;
};

/// Schema:
///   {"operator": "dq"|"sigmaq", "p": int, "alpha": int, "N": int,
///    "q": {"mode": "symbolic"} | {"mode": "exact", "value": [num,den] | [[rn,rd],[in,id]]}
///         | {"mode": "float", "value": x | [re, im]},
///    "truncation": {"nx": int, "ne": int},
///    "F": {"b": [[n, m, vector]...], "A": [[n, m, matrix]...],
///          "nonlinear": [{"I": [...], "terms": [[n, m, vector]...]}...]}}
/// Scalars are integers, "a/b" strings, [num, den] pairs, Gaussian pairs of
/// pairs, or floats (float mode only).
struct SpecDocument {
    Operator op = Operator::DQ;
    int p = 1;
    int alpha = 1;
    int N = 1;
    QValue q = QValue::symbolic();
    int nx = 0;
    int ne = 0;
    std::vector<DocEntry> b;
    std::vector<DocEntry> A;
    std::vector<DocNonlinear> nonlinear;
    bool has_float = false;  ///< some coefficient was given as a float
};

SpecDocument parse_spec_document(const Json& j);
SpecDocument parse_spec_document(const std::string& text);
SpecDocument load_spec_document(const std::string& path);

/// Converts a document coefficient to R; throws SchemaError when it does not fit.
template <class R>
R doc_scalar_to(const DocScalar& s, const std::string& path);

/// The equation with coefficients in R and parameter q.
template <class R>
EquationSpec<R> build_spec(const SpecDocument& doc, const R& q);

/// Inverse of parse_spec_document for exact rational data.
Json spec_to_json(const EquationSpec<Rational>& spec, const QValue& q, int nx, int ne);

// -------------------------------------------------------------------- CSV

/// Exact rationals and polynomials in q: n,m,component,value. Gaussian and
/// float: n,m,component,re,im. Floats always carry a '.' or an exponent so
/// that a reader can tell them from exact integers.
template <class R>
std::string table_to_csv(const Series2<R>& t);

std::string float_text(double v);

enum class TableRing { Rational, Gaussian, Float, Symbolic };

struct CsvTable {
    TableRing ring = TableRing::Rational;
    int nx = 0;
    int ne = 0;
    int N = 1;
    Series2<Rational> rational;
    Series2<Gaussian> gaussian;
    Series2<Complex> floating;
    Series2<QPoly> symbolic;
};

CsvTable parse_csv_table(const std::string& text);
CsvTable load_csv_table(const std::string& path);

// ------------------------------------------------------------------ files

/// Writes through a temporary file in the same directory and renames it.
void write_text_atomic(const std::string& path, const std::string& text);
void write_json_atomic(const std::string& path, const Json& j);
std::string read_text(const std::string& path);

// ---------------------------------------------------------------- reports

Json to_json(const SolveDiagnostics& d, bool with_timing);
Json to_json(const CrossCheck& c);
Json to_json(const GevreyFit& f);
Json to_json(const MinimalConstants& c);
Json to_json(const Stabilization& s);
Json to_json(const DisciplineReport& d);
Json to_json(const MembershipVerdict& v);
Json to_json(const GrowthReport& g);
Json to_json(const NormReport& r);
Json to_json(const ConfluenceReport& c);
Json to_json(const MajorantCertificate& c);

// ========================================================== implementation

template <class R>
R doc_scalar_to(const DocScalar& s, const std::string& path) {
    if constexpr (std::is_same_v<R, Complex>) {
        if (s.is_float) return s.approx;
        return Complex(s.exact.re.get_d(), s.exact.im.get_d());
    } else {
        if (s.is_float) throw SchemaError(path, "float coefficient needs the float ring");
        if constexpr (std::is_same_v<R, Gaussian>) {
            return s.exact;
        } else {
            if (sgn(s.exact.im) != 0) throw SchemaError(path, "complex coefficient needs a Gaussian or float q");
            if constexpr (std::is_same_v<R, Rational>)
                return s.exact.re;
            else
                return R(s.exact.re);
        }
    }
}

template <class R>
EquationSpec<R> build_spec(const SpecDocument& doc, const R& q) {
    EquationSpec<R> s;
    s.op = doc.op;
    s.p = doc.p;
    s.alpha = doc.alpha;
    s.N = doc.N;
    s.q = q;
    const int N = doc.N;
    auto top = [](const std::vector<DocEntry>& es, bool x) {
        int t = 0;
        for (const auto& e : es) t = std::max(t, x ? e.n : e.m);
        return t;
    };
    auto fill = [&](Series2<R>& dst, const std::vector<DocEntry>& es, int cols, const std::string& where) {
        dst = Series2<R>(top(es, true), top(es, false), N, cols);
        for (size_t k = 0; k < es.size(); ++k) {
            const auto& e = es[k];
            for (size_t i = 0; i < e.values.size(); ++i) {
                const std::string path = where + "[" + std::to_string(k) + "][2][" + std::to_string(i) + "]";
                dst.block(e.n, e.m)[i] = R(dst.block(e.n, e.m)[i] + doc_scalar_to<R>(e.values[i], path));
            }
        }
    };
    fill(s.F.b, doc.b, 1, "F.b");
    fill(s.F.A, doc.A, N, "F.A");
    for (size_t k = 0; k < doc.nonlinear.size(); ++k) {
        NonlinearTerm<R> t;
        t.I = doc.nonlinear[k].I;
        fill(t.coeff, doc.nonlinear[k].terms, 1, "F.nonlinear[" + std::to_string(k) + "].terms");
        s.F.nonlinear.push_back(std::move(t));
    }
    return s;
}

template <class R>
std::string table_to_csv(const Series2<R>& t) {
    std::string out;
    constexpr bool two_cols = std::is_same_v<R, Gaussian> || std::is_same_v<R, Complex>;
    out += two_cols ? "n,m,component,re,im\n" : "n,m,component,value\n";
    for (int n = 0; n <= t.nx(); ++n)
        for (int m = 0; m <= t.ne(); ++m)
            for (int c = 0; c < t.rows(); ++c) {
                const R& v = t.at(n, m, c);
                out += std::to_string(n) + "," + std::to_string(m) + "," + std::to_string(c) + ",";
                if constexpr (std::is_same_v<R, Complex>)
                    out += float_text(v.real()) + "," + float_text(v.imag());
                else if constexpr (std::is_same_v<R, Gaussian>)
                    out += v.re.get_str() + "," + v.im.get_str();
                else if constexpr (std::is_same_v<R, QPoly>)
                    out += "\"" + v.to_string() + "\"";
                else
                    out += v.get_str();
                out += "\n";
            }
    return out;
}

}  // namespace qflow
