#include "qflow/io.hpp"

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace qflow {

namespace {

std::string idx(const std::string& base, size_t i) { return base + "[" + std::to_string(i) + "]"; }

const Json& field(const Json& j, const std::string& key, const std::string& path) {
    if (!j.is_object()) throw SchemaError(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw SchemaError(path.empty() ? key : path + "." + key, "missing field");
    return *it;
}

int get_int(const Json& j, const std::string& path) {
    if (!j.is_number_integer()) throw SchemaError(path, "expected an integer");
    const auto v = j.get<long long>();
    if (v < -1000000 || v > 1000000) throw SchemaError(path, "integer out of range");
    return static_cast<int>(v);
}

mpz_class get_mpz(const Json& j, const std::string& path) {
    if (j.is_number_integer()) return mpz_class(std::to_string(j.get<long long>()));
    if (j.is_string()) {
        mpz_class z;
        std::string t = j.get<std::string>();
        if (!t.empty() && t[0] == '+') t.erase(0, 1);
        if (t.empty() || z.set_str(t, 10) != 0) throw SchemaError(path, "not an integer: '" + j.get<std::string>() + "'");
        return z;
    }
    throw SchemaError(path, "expected an integer");
}

Rational get_fraction(const Json& j, const std::string& path) {
    if (j.is_number_integer()) return Rational(get_mpz(j, path));
    if (j.is_string()) {
        try {
            return parse_rational(j.get<std::string>());
        } catch (const DomainError& e) {
            throw SchemaError(path, e.what());
        }
    }
    if (j.is_array() && j.size() == 2) {
        const mpz_class num = get_mpz(j[0], idx(path, 0));
        const mpz_class den = get_mpz(j[1], idx(path, 1));
        if (sgn(den) == 0) throw SchemaError(idx(path, 1), "zero denominator");
        Rational r(num, den);
        r.canonicalize();
        return r;
    }
    throw SchemaError(path, "expected an integer, \"a/b\" or [num, den]");
}

bool is_pair_of_pairs(const Json& j) {
    return j.is_array() && j.size() == 2 && j[0].is_array() && j[1].is_array();
}

DocScalar get_scalar(const Json& j, const std::string& path) {
    DocScalar s;
    if (j.is_number_float()) {
        s.is_float = true;
        s.approx = Complex(j.get<double>(), 0.0);
        return s;
    }
    if (j.is_array() && j.size() == 2 && (j[0].is_number_float() || j[1].is_number_float())) {
        if (!j[0].is_number() || !j[1].is_number()) throw SchemaError(path, "expected [re, im] numbers");
        s.is_float = true;
        s.approx = Complex(j[0].get<double>(), j[1].get<double>());
        return s;
    }
    if (is_pair_of_pairs(j)) {
        s.exact = Gaussian(get_fraction(j[0], idx(path, 0)), get_fraction(j[1], idx(path, 1)));
        return s;
    }
    s.exact = Gaussian(get_fraction(j, path));
    return s;
}

std::vector<DocScalar> get_vector(const Json& j, int N, const std::string& path) {
    if (!j.is_array() || static_cast<int>(j.size()) != N)
        throw SchemaError(path, "expected a vector of length N = " + std::to_string(N));
    std::vector<DocScalar> out;
    for (size_t i = 0; i < j.size(); ++i) out.push_back(get_scalar(j[i], idx(path, i)));
    return out;
}

std::vector<DocScalar> get_matrix(const Json& j, int N, const std::string& path) {
    if (!j.is_array() || static_cast<int>(j.size()) != N)
        throw SchemaError(path, "expected an N x N matrix with N = " + std::to_string(N));
    std::vector<DocScalar> out;
    for (size_t i = 0; i < j.size(); ++i) {
        auto row = get_vector(j[i], N, idx(path, i));
        out.insert(out.end(), row.begin(), row.end());
    }
    return out;
}

struct Bounds {
    int n_max;
    int m_max;
};

std::vector<DocEntry> get_entries(const Json& j, int N, bool matrix, const Bounds& b, const std::string& path) {
    if (!j.is_array()) throw SchemaError(path, "expected a list of [n, m, value]");
    std::vector<DocEntry> out;
    for (size_t k = 0; k < j.size(); ++k) {
        const std::string p = idx(path, k);
        const Json& e = j[k];
        if (!e.is_array() || e.size() != 3) throw SchemaError(p, "expected [n, m, value]");
        DocEntry d;
        d.n = get_int(e[0], idx(p, 0));
        d.m = get_int(e[1], idx(p, 1));
        if (d.n < 0 || d.n > b.n_max)
            throw SchemaError(idx(p, 0), "x-index outside 0.." + std::to_string(b.n_max));
        if (d.m < 0 || d.m > b.m_max)
            throw SchemaError(idx(p, 1), "eps-index outside 0.." + std::to_string(b.m_max));
        d.values = matrix ? get_matrix(e[2], N, idx(p, 2)) : get_vector(e[2], N, idx(p, 2));
        out.push_back(std::move(d));
    }
    return out;
}

QValue get_q(const Json& j) {
    const std::string mode_path = "q.mode";
    const Json& mode = field(j, "mode", "q");
    if (!mode.is_string()) throw SchemaError(mode_path, "expected a string");
    const std::string m = mode.get<std::string>();
    try {
        if (m == "symbolic") return QValue::symbolic();
        const Json& v = field(j, "value", "q");
        if (m == "exact") {
            if (is_pair_of_pairs(v))
                return QValue::exact(Gaussian(get_fraction(v[0], "q.value[0]"), get_fraction(v[1], "q.value[1]")));
            return QValue::exact(get_fraction(v, "q.value"));
        }
        if (m == "float") {
            if (v.is_number()) return QValue::approximate(Complex(v.get<double>(), 0.0));
            if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
                return QValue::approximate(Complex(v[0].get<double>(), v[1].get<double>()));
            throw SchemaError("q.value", "expected a number or [re, im]");
        }
    } catch (const DomainError& e) {
        throw SchemaError("q.value", e.what());
    }
    throw SchemaError(mode_path, "expected \"symbolic\", \"exact\" or \"float\"");
}

}  // namespace

SpecDocument parse_spec_document(const Json& j) {
    if (!j.is_object()) throw SchemaError("$", "expected an object");
    SpecDocument d;
    const Json& op = field(j, "operator", "");
    if (!op.is_string()) throw SchemaError("operator", "expected a string");
    if (op == "dq")
        d.op = Operator::DQ;
    else if (op == "sigmaq")
        d.op = Operator::SIGMAQ;
    else
        throw SchemaError("operator", "expected \"dq\" or \"sigmaq\"");
    d.p = get_int(field(j, "p", ""), "p");
    d.alpha = get_int(field(j, "alpha", ""), "alpha");
    d.N = get_int(field(j, "N", ""), "N");
    if (d.N < 1 || d.N > 64) throw SchemaError("N", "expected 1 <= N <= 64");
    d.q = get_q(field(j, "q", ""));
    const Json& tr = field(j, "truncation", "");
    d.nx = get_int(field(tr, "nx", "truncation"), "truncation.nx");
    d.ne = get_int(field(tr, "ne", "truncation"), "truncation.ne");
    if (d.nx < 0) throw SchemaError("truncation.nx", "expected nx >= 0");
    if (d.ne < 0) throw SchemaError("truncation.ne", "expected ne >= 0");

    // With p = -1 the solver reads the forcing up to x-order nx + ne/alpha.
    Bounds b{d.nx, d.ne};
    if (d.p == -1 && d.alpha >= 1) b.n_max = d.nx + d.ne / d.alpha;

    const Json& F = field(j, "F", "");
    if (!F.is_object()) throw SchemaError("F", "expected an object");
    if (F.contains("b")) d.b = get_entries(F["b"], d.N, false, b, "F.b");
    if (F.contains("A")) d.A = get_entries(F["A"], d.N, true, b, "F.A");
    if (F.contains("nonlinear")) {
        const Json& nl = F["nonlinear"];
        if (!nl.is_array()) throw SchemaError("F.nonlinear", "expected a list");
        for (size_t k = 0; k < nl.size(); ++k) {
            const std::string p = idx("F.nonlinear", k);
            DocNonlinear t;
            const Json& I = field(nl[k], "I", p);
            if (!I.is_array() || static_cast<int>(I.size()) != d.N)
                throw SchemaError(p + ".I", "expected a multi-index of length N = " + std::to_string(d.N));
            for (size_t i = 0; i < I.size(); ++i) {
                const int v = get_int(I[i], idx(p + ".I", i));
                if (v < 0) throw SchemaError(idx(p + ".I", i), "expected a nonnegative exponent");
                t.I.push_back(v);
            }
            t.terms = get_entries(field(nl[k], "terms", p), d.N, false, b, p + ".terms");
            d.nonlinear.push_back(std::move(t));
        }
    }
    auto scan = [&](const std::vector<DocEntry>& es) {
        for (const auto& e : es)
            for (const auto& v : e.values) d.has_float = d.has_float || v.is_float;
    };
    scan(d.b);
    scan(d.A);
    for (const auto& t : d.nonlinear) scan(t.terms);
    return d;
}

SpecDocument parse_spec_document(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError("$", std::string("invalid JSON: ") + e.what());
    }
    return parse_spec_document(j);
}

SpecDocument load_spec_document(const std::string& path) { return parse_spec_document(read_text(path)); }

Json spec_to_json(const EquationSpec<Rational>& spec, const QValue& q, int nx, int ne) {
    Json j;
    j["operator"] = operator_name(spec.op);
    j["p"] = spec.p;
    j["alpha"] = spec.alpha;
    j["N"] = spec.N;
    Json jq;
    if (q.is_symbolic()) {
        jq["mode"] = "symbolic";
    } else if (q.mode() == QMode::Exact && !q.is_gaussian()) {
        jq["mode"] = "exact";
        jq["value"] = q.rational().get_str();
    } else if (q.mode() == QMode::Exact) {
        jq["mode"] = "exact";
        jq["value"] = Json::array({q.gaussian().re.get_str(), q.gaussian().im.get_str()});
    } else {
        jq["mode"] = "float";
        jq["value"] = Json::array({q.complex().real(), q.complex().imag()});
    }
    j["q"] = jq;
    j["truncation"] = {{"nx", nx}, {"ne", ne}};
    auto entries = [&](const Series2<Rational>& s, bool matrix) {
        Json out = Json::array();
        for (int n = 0; n <= s.nx(); ++n)
            for (int m = 0; m <= s.ne(); ++m) {
                if (s.block_zero(n, m)) continue;
                Json v = Json::array();
                for (int i = 0; i < s.rows(); ++i) {
                    if (!matrix) {
                        v.push_back(s.at(n, m, i).get_str());
                    } else {
                        Json row = Json::array();
                        for (int c = 0; c < s.cols(); ++c) row.push_back(s.at(n, m, i, c).get_str());
                        v.push_back(row);
                    }
                }
                out.push_back(Json::array({n, m, v}));
            }
        return out;
    };
    Json F;
    F["b"] = entries(spec.F.b, false);
    F["A"] = entries(spec.F.A, true);
    F["nonlinear"] = Json::array();
    for (const auto& t : spec.F.nonlinear) F["nonlinear"].push_back({{"I", t.I}, {"terms", entries(t.coeff, false)}});
    j["F"] = F;
    return j;
}

// -------------------------------------------------------------------- CSV

std::string float_text(double v) {
    std::string s = to_shortest(v);
    if (s.find_first_of(".eni") == std::string::npos) s += ".0";
    return s;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') {
            quoted = !quoted;
            cur += c;
        } else if (c == ',' && !quoted) {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

bool looks_float(const std::string& s) { return s.find_first_of(".eEni") != std::string::npos; }

double parse_double(const std::string& s, const std::string& where) {
    try {
        size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw SchemaError(where, "not a number: '" + s + "'");
    }
}

}  // namespace

CsvTable parse_csv_table(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("csv", "empty table");
    const auto header = split_csv_line(line);
    const bool two = header == std::vector<std::string>{"n", "m", "component", "re", "im"};
    const bool one = header == std::vector<std::string>{"n", "m", "component", "value"};
    if (!one && !two) throw SchemaError("csv:1", "expected header n,m,component,value or n,m,component,re,im");

    struct Row {
        int n, m, c;
        std::vector<std::string> v;
    };
    std::vector<Row> rows;
    int lineno = 1;
    bool any_float = false;
    bool any_symbolic = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const std::string where = "csv:" + std::to_string(lineno);
        auto cols = split_csv_line(line);
        if (cols.size() != header.size()) throw SchemaError(where, "wrong number of columns");
        Row r;
        try {
            r.n = std::stoi(cols[0]);
            r.m = std::stoi(cols[1]);
            r.c = std::stoi(cols[2]);
        } catch (const std::exception&) {
            throw SchemaError(where, "bad index");
        }
        if (r.n < 0 || r.m < 0 || r.c < 0) throw SchemaError(where, "negative index");
        r.v.assign(cols.begin() + 3, cols.end());
        for (const auto& v : r.v) {
            if (!v.empty() && v.front() == '"') any_symbolic = true;
            if (looks_float(v) && (v.empty() || v.front() != '"')) any_float = true;
        }
        rows.push_back(std::move(r));
    }
    CsvTable t;
    for (const auto& r : rows) {
        t.nx = std::max(t.nx, r.n);
        t.ne = std::max(t.ne, r.m);
        t.N = std::max(t.N, r.c + 1);
    }
    if (two)
        t.ring = any_float ? TableRing::Float : TableRing::Gaussian;
    else if (any_symbolic)
        t.ring = TableRing::Symbolic;
    else if (any_float)
        t.ring = TableRing::Float;
    else
        t.ring = TableRing::Rational;

    switch (t.ring) {
        case TableRing::Rational: t.rational = Series2<Rational>(t.nx, t.ne, t.N); break;
        case TableRing::Gaussian: t.gaussian = Series2<Gaussian>(t.nx, t.ne, t.N); break;
        case TableRing::Float: t.floating = Series2<Complex>(t.nx, t.ne, t.N); break;
        case TableRing::Symbolic: t.symbolic = Series2<QPoly>(t.nx, t.ne, t.N); break;
    }
    for (const auto& r : rows) {
        const std::string where = "csv[" + std::to_string(r.n) + "," + std::to_string(r.m) + "," + std::to_string(r.c) + "]";
        try {
            switch (t.ring) {
                case TableRing::Rational: t.rational.at(r.n, r.m, r.c) = parse_rational(r.v[0]); break;
                case TableRing::Gaussian:
                    t.gaussian.at(r.n, r.m, r.c) = Gaussian(parse_rational(r.v[0]), parse_rational(r.v[1]));
                    break;
                case TableRing::Float:
                    t.floating.at(r.n, r.m, r.c) =
                        Complex(parse_double(r.v[0], where), r.v.size() > 1 ? parse_double(r.v[1], where) : 0.0);
                    break;
                case TableRing::Symbolic: {
                    std::string s = r.v[0];
                    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
                    t.symbolic.at(r.n, r.m, r.c) = QPoly::parse(s);
                    break;
                }
            }
        } catch (const DomainError& e) {
            throw SchemaError(where, e.what());
        }
    }
    return t;
}

CsvTable load_csv_table(const std::string& path) { return parse_csv_table(read_text(path)); }

// ------------------------------------------------------------------ files

void write_text_atomic(const std::string& path, const std::string& text) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << text;
        out.flush();
        if (!out) throw Error("write failed: " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw Error("cannot rename onto " + path + ": " + ec.message());
    }
}

void write_json_atomic(const std::string& path, const Json& j) { write_text_atomic(path, j.dump(2) + "\n"); }

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------- reports

Json to_json(const SolveDiagnostics& d, bool with_timing) {
    Json j{{"path", d.path},
           {"nx", d.nx},
           {"ne", d.ne},
           {"reduced_dim", d.reduced_dim},
           {"working_x_order", d.working_x_order},
           {"working_e_order", d.working_e_order},
           {"newton_iterations", d.newton_iterations}};
    if (with_timing) j["seconds"] = d.seconds;
    return j;
}

Json to_json(const CrossCheck& c) {
    return {{"agree", c.agree},
            {"max_discrepancy", c.max_discrepancy},
            {"first_n", c.first_n},
            {"first_m", c.first_m},
            {"first_component", c.first_component}};
}

Json to_json(const GevreyFit& f) {
    return {{"s", f.s}, {"log_A", f.log_A}, {"log_C", f.log_C}, {"residual", f.residual}, {"used", f.used},
            {"masked", f.masked}};
}

Json to_json(const MinimalConstants& c) {
    return {{"C", c.C}, {"A", c.A}, {"C_anchor", c.C_anchor}, {"anchor", c.anchor}, {"degenerate", c.degenerate},
            {"log_C", c.log_C}, {"log_A", c.log_A}};
}

Json to_json(const Stabilization& s) {
    Json curve = Json::array();
    for (const auto& w : s.curve) curve.push_back({{"end", w.end}, {"A", w.constants.A}, {"C", w.constants.C}, {"drift", w.drift}});
    return {{"stable", s.stable}, {"max_drift", s.max_drift}, {"threshold", s.threshold}, {"curve", curve}};
}

Json to_json(const DisciplineReport& d) {
    Json table = Json::array();
    for (const auto& s : d.table)
        table.push_back({{"n", s.n}, {"radius", s.radius}, {"sup", s.sup}, {"log_sup", s.log_sup},
                         {"log_template", s.log_template}});
    return {{"name", d.name}, {"bound", d.bound}, {"constants", to_json(d.constants)},
            {"stabilization", to_json(d.stabilization)}, {"table", table}};
}

Json to_json(const MembershipVerdict& v) {
    return {{"space", v.space},
            {"consistent", v.consistent},
            {"margin", v.margin},
            {"constants", to_json(v.constants)},
            {"stabilization", to_json(v.stabilization)},
            {"first_branch", v.first_branch},
            {"second_branch", v.second_branch}};
}

Json to_json(const GrowthReport& g) {
    Json j;
    j["degenerate"] = g.degenerate;
    j["fit"] = g.fit_available ? to_json(g.fit) : Json(nullptr);
    j["disciplines"] = Json::array();
    for (const auto& d : g.disciplines) j["disciplines"].push_back(to_json(d));
    j["membership"] = Json::array();
    for (const auto& v : g.membership) j["membership"].push_back(to_json(v));
    return j;
}

Json to_json(const NormReport& r) {
    Json v = Json::array();
    for (const auto& x : r.violations)
        v.push_back({{"inequality", x.inequality}, {"sample", x.sample}, {"n", x.n}, {"m", x.m}, {"lhs", x.lhs},
                     {"rhs", x.rhs}});
    return {{"inequalities", r.inequalities},
            {"checks", r.checks},
            {"violation_count", r.violations.size()},
            {"violations", v},
            {"worst_ratio", r.worst_ratio},
            {"tightness_ratio", r.tightness_ratio},
            {"tightness_expected", r.tightness_expected}};
}

Json to_json(const ConfluenceReport& c) {
    Json rows = Json::array();
    for (const auto& r : c.rows)
        rows.push_back({{"q", r.q.get_str()}, {"q_value", r.q_value}, {"max_rel_error", r.max_rel_error},
                        {"bracket_max_rel", r.bracket_max_rel}});
    return {{"rows", rows}, {"monotone", c.monotone}, {"limit_discipline", to_json(c.limit_discipline)}};
}

Json to_json(const MajorantCertificate& c) {
    Json okj = Json::array();
    for (bool b : c.ok) okj.push_back(b);
    return {{"weight", c.weight}, {"path", c.path},   {"r", c.r},        {"samples", c.samples},
            {"tol", c.tol},       {"c", c.c},         {"valid", c.valid}, {"w", c.w},
            {"z", c.z},           {"log_M", c.log_M}, {"z_over_M", c.z_over_M}, {"ok", okj}};
}

}  // namespace qflow
