#include "common.hpp"

#include "spec_io.hpp"
#include "suites.hpp"

#include <cstdio>
#include <filesystem>
#include <sys/wait.h>

using namespace sob;
using testing_support::Near;
using testing_support::q;

namespace {

struct CliRun {
    int status = -1;
    std::string out;
};

// stdout (and stderr when merged) of the CLI with the given arguments
CliRun cli(const std::string& args, bool merge_stderr = false) {
    std::string cmd = std::string(SOBOLEV_CLI) + " " + args + (merge_stderr ? " 2>&1" : " 2>/dev/null");
    CliRun r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    int st = pclose(p);
    r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::string fixture(const std::string& name) { return std::string(SOBOLEV_FIXTURES) + "/" + name; }

std::vector<std::string> fields(const std::string& line) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string s;
    while (std::getline(ss, s, ',')) f.push_back(s);
    return f;
}

std::string line_starting(const std::string& text, const std::string& prefix) {
    std::stringstream ss(text);
    std::string l;
    while (std::getline(ss, l))
        if (l.rfind(prefix, 0) == 0) return l;
    return {};
}

}  // namespace

TEST(SpecFile, RoundTripIsExact) {
    for (auto& entry : std::filesystem::directory_iterator(SOBOLEV_FIXTURES)) {
        io::SpecFile s = io::load(entry.path().string());
        EXPECT_EQ(io::parse(io::serialize(s)), s) << entry.path();
        EXPECT_EQ(io::serialize(io::parse(io::serialize(s))), io::serialize(s)) << entry.path();
    }
}

TEST(SpecFile, MeasureMatrixMatchesFixture) {
    MeasureMatrix w = io::measure_matrix(io::load(fixture("sobolev_unit.json")));
    MeasureMatrix want = suites::fx::sobolev_unit();
    EXPECT_LE(rel_diff(assemble_moment_matrix(w, 6), assemble_moment_matrix(want, 6)), pow2(-200));
    // spec_of is a right inverse up to moments
    MeasureMatrix back = io::measure_matrix(io::spec_of(w));
    EXPECT_LE(rel_diff(assemble_moment_matrix(back, 6), assemble_moment_matrix(w, 6)), pow2(-200));
}

TEST(SpecFile, RejectsMalformedInput) {
    EXPECT_THROW(io::parse("{"), ParseError);
    EXPECT_THROW(io::parse(R"({"order":0,"entries":[],"extra":1})"), ParseError);
    EXPECT_THROW(io::parse(R"({"order":0,"entries":[{"row":0,"col":0,"weight":"1"}]})"), ParseError);
    EXPECT_THROW(io::parse(R"({"order":0,"entries":[{"row":0,"col":0,"atoms":[{"point":0.5,"mass":"1"}]}]})"),
                 ParseError);
    EXPECT_THROW(io::parse(R"({"order":0,"entries":[{"row":1,"col":0}]})"), ParseError);
    EXPECT_THROW(io::parse(R"({"order":0,"entries":[{"row":0,"col":0,"continuous":{"family":"jacobi","params":["0"]}}]})"),
                 ParseError);
    EXPECT_THROW(io::parse(R"({"order":0,"precisionBits":32,"entries":[]})"), ParseError);
    EXPECT_THROW(io::parse(R"({"order":0,"entries":[{"row":0,"col":0,"atoms":[{"point":"1/2","mass":"1"}]}]})"),
                 ParseError);
}

TEST(Cli, LegendreSecondPolynomial) {
    CliRun r = cli("--spec " + fixture("legendre.json") + " --order 4 sbps");
    ASSERT_EQ(r.status, 0);
    auto f = fields(line_starting(r.out, "p2,2,"));
    ASSERT_EQ(f.size(), 5u);
    EXPECT_TRUE(Near(parse_real(f[2]), q(-1, 3), 240));
    EXPECT_TRUE(Near(parse_real(f[3]), 0, 240));
    EXPECT_TRUE(Near(parse_real(f[4]), 1, 240));
    auto h = fields(line_starting(r.out, "h,1,"));
    ASSERT_EQ(h.size(), 3u);
    EXPECT_TRUE(Near(parse_real(h[2]), q(2, 3), 240));
}

TEST(Cli, SingularSpecNamesTheMinor) {
    CliRun r = cli("--spec " + fixture("singular.json") + " --order 3 sbps", true);
    EXPECT_EQ(r.status, 3);
    EXPECT_NE(r.out.find("leading minor 1 vanishes"), std::string::npos) << r.out;
}

TEST(Cli, ArgumentErrors) {
    EXPECT_EQ(cli("--spec " + fixture("legendre.json") + " sbps --no-such-flag").status, 2);
    EXPECT_EQ(cli("--spec /nonexistent.json sbps").status, 2);
    EXPECT_EQ(cli("--spec " + fixture("legendre.json")).status, 2);
}

TEST(Cli, KernelValue) {
    // Legendre, k = 3: Σ P_k(1/2) P_k(1/4) / h_k = 1/2 + 3/16 + 65/512
    CliRun r = cli("--spec " + fixture("legendre.json") + " --order 3 kernel --x 0.5 --y 0.25");
    ASSERT_EQ(r.status, 0);
    auto f = fields(line_starting(r.out, "kernel,"));
    ASSERT_EQ(f.size(), 4u);
    EXPECT_TRUE(Near(parse_real(f[3]), q(417, 512), 230));
}

TEST(Cli, JsonAndTimingsOutput) {
    auto dir = std::filesystem::temp_directory_path() / "sobolev_cli_test";
    std::filesystem::create_directories(dir);
    std::string out = (dir / "result.json").string();
    CliRun r = cli("--spec " + fixture("sobolev_unit.json") + " --order 5 --out " + out + " sbps");
    ASSERT_EQ(r.status, 0);
    std::ifstream in(out);
    auto j = nlohmann::json::parse(in);
    EXPECT_TRUE(j.contains("polynomials"));
    EXPECT_TRUE(std::filesystem::exists(out + ".timings.json"));
    CliRun js = cli("--spec " + fixture("sobolev_unit.json") + " --order 5 --json sbps");
    ASSERT_EQ(js.status, 0);
    EXPECT_EQ(nlohmann::json::parse(js.out), j);
    std::filesystem::remove_all(dir);
}

TEST(Cli, PlotData) {
    CliRun r = cli("--spec " + fixture("legendre.json") + " --order 3 --plot-data sbps");
    ASSERT_EQ(r.status, 0);
    EXPECT_EQ(r.out.rfind("x,P0,P1,P2", 0), 0u) << r.out.substr(0, 40);
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 42);
}

TEST(Cli, BitsOverrideChangesPrecision) {
    CliRun lo = cli("--spec " + fixture("legendre.json") + " --order 3 --bits 64 sbps");
    CliRun hi = cli("--spec " + fixture("legendre.json") + " --order 3 sbps");
    ASSERT_EQ(lo.status, 0);
    ASSERT_EQ(hi.status, 0);
    EXPECT_LT(lo.out.size(), hi.out.size());
}

TEST(Cli, SubcommandsRunOnFixtures) {
    std::string sob = " --spec " + fixture("sobolev_unit.json") + " --order 6 ";
    EXPECT_EQ(cli(sob + "moments").status, 0);
    EXPECT_EQ(cli(sob + "secondkind --y 3").status, 0);
    EXPECT_EQ(cli(sob + "christoffel --roots 2:2,-3:1 --side left").status, 0);
    EXPECT_EQ(cli(sob + "geronimus --points -1:1 --side right").status, 0);
    EXPECT_EQ(cli(sob + "spectral --roots 2:1 --points 3:1 --orientation lr").status, 0);
    EXPECT_EQ(cli(sob + "opdeform --l1 '0,1|1' --l2 '1|-1'").status, 0);
    EXPECT_EQ(cli(sob + "perturb --add " + fixture("laguerre_discrete.json")).status, 0);
    EXPECT_EQ(cli(" --spec " + fixture("laguerre_discrete.json") + " --order 6 discrete --nodes 0:1:1 --xi 1").status, 0);
    EXPECT_EQ(cli(" --spec " + fixture("wx_legendre.json") + " reduce").status, 0);
    EXPECT_EQ(cli(" --spec " + fixture("hermite_sobolev.json") + " --order 6 toda --t1 1:0.6 --t2 1:-0.2").status, 0);
    EXPECT_EQ(cli(" --spec " + fixture("coherent_laguerre.json") + " --order 6 coherent --lambda 0.5 --r auto").status, 0);
    EXPECT_EQ(cli(sob + "spectral --roots 2:1 --points 2:1").status, 3);
}

TEST(Cli, ReduceEmitsScalarSpec) {
    CliRun r = cli("--spec " + fixture("wx_legendre.json") + " reduce");
    ASSERT_EQ(r.status, 0);
    io::SpecFile s = io::parse(r.out);
    EXPECT_EQ(io::measure_matrix(s).trimmed().order(), 0);
}

TEST(Cli, VerifyIsDeterministic) {
    CliRun a = cli("verify --suite biorthogonality");
    CliRun b = cli("verify --suite biorthogonality");
    EXPECT_EQ(a.status, 0) << a.out;
    EXPECT_EQ(a.out, b.out);
    EXPECT_NE(a.out.find("suite biorthogonality: PASS"), std::string::npos);
    EXPECT_EQ(cli("verify --suite no_such_suite").status, 2);
}
