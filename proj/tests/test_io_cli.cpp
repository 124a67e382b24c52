#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <filesystem>
#include <random>

#include "qflow/examples.hpp"
#include "qflow/io.hpp"

using namespace qflow;
namespace fs = std::filesystem;

namespace {

const std::string kCli = QFLOW_CLI_PATH;
const std::string kData = QFLOW_TEST_DATA;

int run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " " + kCli + " " + args + " >/dev/null 2>&1";
    const int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("qflow_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    return p;
}

std::string schema_path_of(const std::string& text) {
    try {
        parse_spec_document(text);
    } catch (const SchemaError& e) {
        return e.path();
    }
    return "<accepted>";
}

const char* kHeineDoc = R"({"operator": "sigmaq", "p": 0, "alpha": 1, "N": 1,
  "q": {"mode": "exact", "value": [3, 2]}, "truncation": {"nx": 6, "ne": 6},
  "F": {"b": [[0, 0, [-1]]], "A": [[0, 0, [[1]]], [1, 0, [[-1]]]]}})";

}  // namespace

TEST_CASE("schema errors carry field paths") {
    CHECK(schema_path_of("{") == "$");
    CHECK(schema_path_of(R"({"p": 1})") == "operator");
    std::string doc = kHeineDoc;
    auto with = [&](const std::string& from, const std::string& to) {
        std::string d = doc;
        d.replace(d.find(from), from.size(), to);
        return schema_path_of(d);
    };
    CHECK(with(R"("sigmaq")", R"("shift")") == "operator");
    CHECK(with(R"("exact")", R"("fuzzy")") == "q.mode");
    CHECK(with("[3, 2]", "[3, 0]") == "q.value[1]");
    CHECK(with("[0, 0, [-1]]", "[7, 0, [-1]]") == "F.b[0][0]");
    CHECK(with("[0, 0, [-1]]", "[0, 0, [-1, 2]]") == "F.b[0][2]");
    CHECK(with("[[1]]], [1", "[1]], [1") == "F.A[0][2][0]");
    CHECK(with(R"("nx": 6)", R"("nx": -1)") == "truncation.nx");
    CHECK(with(R"("alpha": 1, )", "") == "alpha");
    CHECK(with("[0, 0, [-1]]", R"([0, 0, ["1/0"]])") == "F.b[0][2][0]");
    CHECK(schema_path_of(kHeineDoc) == "<accepted>");
}

TEST_CASE("p = -1 accepts forcing up to the working x-order") {
    const std::string doc = R"({"operator": "dq", "p": -1, "alpha": 2, "N": 1,
      "q": {"mode": "exact", "value": 2}, "truncation": {"nx": 4, "ne": 4},
      "F": {"b": [[6, 0, [-1]]], "A": [[0, 0, [[1]]]]}})";
    CHECK(schema_path_of(doc) == "<accepted>");
    std::string bad = doc;
    bad.replace(bad.find("[6, 0"), 5, "[7, 0");
    CHECK(schema_path_of(bad) == "F.b[0][0]");
}

TEST_CASE("document solve reproduces the Heine table") {
    const SpecDocument d = parse_spec_document(std::string(kHeineDoc));
    const auto spec = build_spec<Rational>(d, d.q.rational());
    ExampleParams prm;
    prm.nx = prm.ne = 6;
    CHECK(solve_x_major(spec, 6, 6).table == example_oracle("heine", Rational(3, 2), prm));
}

TEST_CASE("scalar forms") {
    const std::string doc = R"({"operator": "dq", "p": 1, "alpha": 1, "N": 1,
      "q": {"mode": "exact", "value": [[1, 1], [1, 1]]}, "truncation": {"nx": 2, "ne": 2},
      "F": {"b": [[1, 0, [[[1, 2], ["-3", 4]]]], [2, 0, ["-6/4"]], [1, 1, [5]]], "A": [[0, 0, [[1]]]]}})";
    const SpecDocument d = parse_spec_document(doc);
    const auto s = build_spec<Gaussian>(d, d.q.gaussian());
    CHECK(s.F.b.at(1, 0) == Gaussian(Rational(1, 2), Rational(-3, 4)));
    CHECK(s.F.b.at(2, 0) == Gaussian(Rational(-3, 2)));
    CHECK(s.F.b.at(1, 1) == Gaussian(5L));
    CHECK_THROWS_AS(build_spec<Rational>(d, Rational(2)), SchemaError);

    const std::string fl = R"({"operator": "dq", "p": 1, "alpha": 1, "N": 1,
      "q": {"mode": "float", "value": [1.5, 0.25]}, "truncation": {"nx": 2, "ne": 2},
      "F": {"b": [[1, 0, [[-1.0, 0.5]]]], "A": [[0, 0, [[1]]]]}})";
    const SpecDocument f = parse_spec_document(fl);
    CHECK(f.has_float);
    CHECK_THROWS_AS(build_spec<Rational>(f, Rational(2)), SchemaError);
    CHECK(build_spec<Complex>(f, f.q.complex()).F.b.at(1, 0) == Complex(-1.0, 0.5));
}

TEST_CASE("spec documents round-trip") {
    std::mt19937_64 rng(7);
    RandomSpecPlan plan;
    plan.p_values = {-1, 0, 1, 2};
    plan.alpha_values = {1, 2};
    for (int k = 0; k < 8; ++k) {
        const auto s = random_spec(rng, plan);
        const Json j = spec_to_json(s, QValue::exact(s.q), 5, 5);
        const SpecDocument d = parse_spec_document(j.dump());
        const auto t = build_spec<Rational>(d, d.q.rational());
        CHECK(t.op == s.op);
        CHECK(t.p == s.p);
        CHECK(t.alpha == s.alpha);
        CHECK(t.N == s.N);
        CHECK(spec_to_json(t, d.q, 5, 5) == j);
    }
}

TEST_CASE("CSV tables round-trip in every ring") {
    Series2<Rational> r(2, 1, 2);
    r.at(1, 1, 1) = Rational(-7, 3);
    r.at(2, 0, 0) = Rational(12);
    const CsvTable tr = parse_csv_table(table_to_csv(r));
    CHECK(tr.ring == TableRing::Rational);
    CHECK(tr.rational == r);

    Series2<Gaussian> g(1, 1);
    g.at(1, 0) = Gaussian(Rational(1, 2), Rational(-3));
    const CsvTable tg = parse_csv_table(table_to_csv(g));
    CHECK(tg.ring == TableRing::Gaussian);
    CHECK(tg.gaussian == g);

    Series2<Complex> c(1, 1);
    c.at(0, 1) = Complex(0.1, -2.0);
    c.at(1, 1) = Complex(1e300, 3.0);
    const CsvTable tc = parse_csv_table(table_to_csv(c));
    CHECK(tc.ring == TableRing::Float);
    CHECK(tc.floating == c);

    Series2<QPoly> s(1, 1);
    s.at(1, 1) = QPoly::parse("-q^2 + q + 1");
    const CsvTable ts = parse_csv_table(table_to_csv(s));
    CHECK(ts.ring == TableRing::Symbolic);
    CHECK(ts.symbolic == s);

    CHECK(float_text(3.0) == "3.0");
    CHECK(float_text(-0.5) == "-0.5");
    CHECK(float_text(1e22).find('e') != std::string::npos);
    CHECK_THROWS_AS(parse_csv_table("a,b\n"), SchemaError);
    CHECK_THROWS_AS(parse_csv_table("n,m,component,value\n0,0,0,x/y\n"), SchemaError);
}

TEST_CASE("atomic writes leave only the target") {
    const fs::path dir = scratch("atomic");
    write_text_atomic((dir / "a.txt").string(), "one");
    write_text_atomic((dir / "a.txt").string(), "two");
    CHECK(read_text((dir / "a.txt").string()) == "two");
    CHECK(std::distance(fs::directory_iterator(dir), fs::directory_iterator{}) == 1);
}

TEST_CASE("solve subcommand outputs and exit codes") {
    const fs::path out = scratch("heine");
    REQUIRE(run("solve " + kData + "/heine.json -o " + out.string() + " --both-paths") == 0);
    const CsvTable t = load_csv_table((out / "table.csv").string());
    ExampleParams prm;
    prm.nx = prm.ne = 12;
    CHECK(t.rational == example_oracle("heine", Rational(3, 2), prm));
    const Json cc = Json::parse(read_text((out / "cross_check.json").string()));
    CHECK(cc["agree"] == true);
    const Json diag = Json::parse(read_text((out / "diagnostics.json").string()));
    CHECK(diag["residual_zero"] == true);
    CHECK_FALSE(diag["solve"].contains("seconds"));

    const fs::path zero = scratch("zero");
    REQUIRE(run("solve " + kData + "/zero_forcing.json -o " + zero.string()) == 0);
    const CsvTable z = load_csv_table((zero / "table.csv").string());
    CHECK(z.N == 2);
    CHECK(z.rational.is_zero());

    CHECK(run("solve " + kData + "/pminus1_sigma.json -o " + scratch("bad1").string()) == 2);
    CHECK(run("solve " + kData + "/bad_vector.json -o " + scratch("bad2").string()) == 2);
    CHECK(run("solve " + kData + "/heine.json -o " + scratch("bad3").string() + " --window 3") == 2);
    CHECK(run("solve " + kData + "/heine.json -o " + scratch("fl").string() + " --ring float") == 0);
    CHECK(run("solve " + kData + "/gaussian_float.json -o " + scratch("gf").string() + " --both-paths") == 0);
    CHECK(run("frobnicate") == 2);
}

TEST_CASE("exact solves are byte-identical across runs and thread counts") {
    std::vector<std::string> tables;
    std::vector<std::string> diags;
    int k = 0;
    for (const char* env : {"QFLOW_THREADS=1", "QFLOW_THREADS=4", "QFLOW_THREADS=4"}) {
        const fs::path out = scratch("det" + std::to_string(k++));
        REQUIRE(run("solve " + kData + "/zero_forcing.json -o " + out.string() + " --window 10,10 --both-paths", env) == 0);
        tables.push_back(read_text((out / "table.csv").string()));
        diags.push_back(read_text((out / "diagnostics.json").string()));
    }
    CHECK(tables[0] == tables[1]);
    CHECK(tables[1] == tables[2]);
    CHECK(diags[0] == diags[1]);
    CHECK(diags[1] == diags[2]);
}

TEST_CASE("reproduce and pm-ladder") {
    CHECK(run("reproduce heine --alpha 2") == 0);
    CHECK(run("reproduce dq-pminus1 --alpha 2") == 0);
    CHECK(run("reproduce sigma-x2 --q float:2.0") == 0);
    CHECK(run("reproduce no-such-example") == 2);
    const fs::path rep = scratch("pm") / "rep.json";
    CHECK(run("reproduce dq-p1-pm --q symbolic -M 5 -o " + rep.string()) == 0);
    const Json j = Json::parse(read_text(rep.string()));
    CHECK(j["pm_ladder"]["ok"] == true);
    CHECK(j["pm_ladder"]["p6_terms_and_leading_ok"] == true);
    CHECK(run("pm-ladder --m-max 6") == 0);
    CHECK(run("pm-ladder --m-max 1") == 2);
}

TEST_CASE("norms with no samples is an empty success") {
    const fs::path rep = scratch("norms") / "n.json";
    REQUIRE(run("norms --samples 0 -o " + rep.string()) == 0);
    CHECK(Json::parse(read_text(rep.string()))["report"].is_null());
    CHECK(run("norms --q symbolic") == 2);
}

TEST_CASE("growth verdicts survive a CSV round trip") {
    const fs::path out = scratch("rt");
    REQUIRE(run("solve " + kData + "/heine.json -o " + out.string()) == 0);
    const fs::path a = out / "from_table.json";
    const fs::path b = out / "from_example.json";
    REQUIRE(run("growth --table " + (out / "table.csv").string() + " --p 0 --alpha 1 --q-modulus 1.5 -o " + a.string()) == 0);
    REQUIRE(run("growth --example heine --q 3/2 --window 12,12 -o " + b.string()) == 0);
    Json ja = Json::parse(read_text(a.string()));
    Json jb = Json::parse(read_text(b.string()));
    for (const char* k : {"table", "example", "q"}) {
        ja.erase(k);
        jb.erase(k);
    }
    CHECK(ja == jb);
    CHECK(run("growth --table " + (out / "table.csv").string()) == 2);
}

TEST_CASE("confluence with a single q has one row and no rate fit") {
    const fs::path rep = scratch("conf") / "c.json";
    REQUIRE(run("confluence --example dq-pminus1 --k-lo 5 --k-hi 5 --limit-window 20 --lo 5 -o " + rep.string()) == 0);
    const Json j = Json::parse(read_text(rep.string()));
    CHECK(j["rows"].size() == 1);
    CHECK(j["error_rate"].is_null());
    CHECK(run("confluence --example heine") == 2);
}
