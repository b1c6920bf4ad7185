#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "gapforge/cell_io.hpp"

namespace fs = std::filesystem;

namespace {

std::string bin() {
    const char* path = std::getenv("GAPFORGE_BIN");
    REQUIRE_MESSAGE(path != nullptr, "GAPFORGE_BIN must point at the gapforge binary");
    return path;
}

void ensure_scratch();

int run(const std::string& args) {
    ensure_scratch();
    const std::string cmd = bin() + " " + args + " >cli_stdout.txt 2>cli_stderr.txt";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spill(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out.good());
    out << text;
}

// Lazy so the REQUIREs inside spill run within a test context.
void ensure_scratch() {
    static const bool once = [] {
        fs::create_directories("cli_scratch");
        spill("cli_scratch/targets_one.json", R"({"gaps": [[1.0, 1.3333333333333333]]})");
        spill("cli_scratch/targets_bad.json", R"({"gaps": [[1.0, 1.2], [1.1, 1.4]]})");
        spill("cli_scratch/targets_greedy.json", R"({"gaps": [[1.0, 100.0]]})");
        spill("cli_scratch/empty_cell.json", R"({"inclusions": [], "strengths": []})");
        return true;
    }();
    (void)once;
}

} // namespace

TEST_CASE("design produces the reference square cell") {
    const int code = run("design --targets cli_scratch/targets_one.json"
                         " --out-cell cli_scratch/one.json"
                         " --out-summary cli_scratch/one_summary.csv --mesh 16");
    CHECK(code == 0);

    const auto cell = gapforge::io::read_cell_file("cli_scratch/one.json");
    REQUIRE(cell.size() == 1);
    CHECK(cell.inclusions[0].half_extents[0] == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(cell.strengths[0] == doctest::Approx(0.125).epsilon(1e-9));

    const std::string summary = slurp("cli_scratch/one_summary.csv");
    CHECK(summary.rfind("j,A_target,B_target,b_j,q_j,A_realized\n", 0) == 0);
}

TEST_CASE("design rejects overlapping targets with exit 2") {
    CHECK(run("design --targets cli_scratch/targets_bad.json"
              " --out-cell cli_scratch/x.json --out-summary cli_scratch/x.csv") == 2);
}

TEST_CASE("design reports an impossible layout with exit 4") {
    CHECK(run("design --targets cli_scratch/targets_greedy.json"
              " --out-cell cli_scratch/x.json --out-summary cli_scratch/x.csv") == 4);
}

TEST_CASE("design rejects an odd mesh with exit 2") {
    CHECK(run("design --targets cli_scratch/targets_one.json"
              " --out-cell cli_scratch/x.json --out-summary cli_scratch/x.csv --mesh 33") == 2);
}

TEST_CASE("design output verifies at the same mesh for a two-gap cell") {
    spill("cli_scratch/targets_two.json", R"({"gaps": [[1.0, 1.3], [2.0, 2.5]]})");
    REQUIRE(run("design --targets cli_scratch/targets_two.json"
                " --out-cell cli_scratch/two.json"
                " --out-summary cli_scratch/two_summary.csv --mesh 32") == 0);
    CHECK(run("verify --cell cli_scratch/two.json --eps-list 0.5,0.25,0.125"
              " --mesh 32 --out cli_scratch/two_verify.csv") == 0);
    CHECK(slurp("cli_stdout.txt").find("VERDICT PASS") != std::string::npos);
}

TEST_CASE("forward is deterministic and checks its own roots") {
    REQUIRE(run("design --targets cli_scratch/targets_one.json"
                " --out-cell cli_scratch/fwd.json"
                " --out-summary cli_scratch/fwd_summary.csv --mesh 16") == 0);
    CHECK(run("forward --cell cli_scratch/fwd.json --out cli_scratch/fwd_a.csv") == 0);
    CHECK(run("forward --cell cli_scratch/fwd.json --out cli_scratch/fwd_b.csv") == 0);
    const std::string a = slurp("cli_scratch/fwd_a.csv");
    CHECK(a == slurp("cli_scratch/fwd_b.csv"));
    CHECK(a.rfind("j,A_j,B_j_bisection,B_j_matrix,abs_diff\n", 0) == 0);
}

TEST_CASE("forward rejects an empty cell with exit 2") {
    CHECK(run("forward --cell cli_scratch/empty_cell.json --out cli_scratch/x.csv") == 2);
}

TEST_CASE("bands samples the empty cell and renders an SVG") {
    const int code = run("bands --cell cli_scratch/empty_cell.json --eps 1.0 --mesh 8"
                         " --phi-grid 2 --k 3 --out cli_scratch/bands.csv"
                         " --svg cli_scratch/bands.svg");
    CHECK(code == 0);
    const std::string csv = slurp("cli_scratch/bands.csv");
    CHECK(csv.rfind("phi_i,phi_1,phi_2,mode,k,lambda\n", 0) == 0);
    int lines = 0;
    for (char c : csv)
        if (c == '\n') ++lines;
    CHECK(lines == 13); // header + G^2 * k
    const std::string svg = slurp("cli_scratch/bands.svg");
    CHECK(svg.find("<svg") != std::string::npos);
}

TEST_CASE("bands validates eps and mesh ranges with exit 2") {
    CHECK(run("bands --cell cli_scratch/empty_cell.json --eps 0 --mesh 8"
              " --phi-grid 2 --k 2 --out cli_scratch/x.csv") == 2);
    CHECK(run("bands --cell cli_scratch/empty_cell.json --eps 2.0 --mesh 8"
              " --phi-grid 2 --k 2 --out cli_scratch/x.csv") == 2);
    CHECK(run("bands --cell cli_scratch/empty_cell.json --eps 0.5 --mesh 4"
              " --phi-grid 2 --k 2 --out cli_scratch/x.csv") == 2);
}

TEST_CASE("verify passes on the one-gap design and is deterministic") {
    REQUIRE(run("design --targets cli_scratch/targets_one.json"
                " --out-cell cli_scratch/vcell.json"
                " --out-summary cli_scratch/vsummary.csv --mesh 32") == 0);
    const int code = run("verify --cell cli_scratch/vcell.json --eps-list 0.5,0.25,0.125"
                         " --mesh 32 --out cli_scratch/verify_a.csv");
    CHECK(code == 0);
    const std::string out = slurp("cli_stdout.txt");
    CHECK(out.find("VERDICT PASS") != std::string::npos);

    REQUIRE(run("verify --cell cli_scratch/vcell.json --eps-list 0.5,0.25,0.125"
                " --mesh 32 --out cli_scratch/verify_b.csv") == 0);
    CHECK(slurp("cli_scratch/verify_a.csv") == slurp("cli_scratch/verify_b.csv"));
}

TEST_CASE("verify rejects short or malformed eps lists with exit 2") {
    CHECK(run("verify --cell cli_scratch/vcell.json --eps-list 0.5,0.25"
              " --mesh 16 --out cli_scratch/x.csv") == 2);
    CHECK(run("verify --cell cli_scratch/vcell.json --eps-list 0.5,,0.125"
              " --mesh 16 --out cli_scratch/x.csv") == 2);
    CHECK(run("verify --cell cli_scratch/vcell.json --eps-list abc"
              " --mesh 16 --out cli_scratch/x.csv") == 2);
    CHECK(run("verify --cell cli_scratch/empty_cell.json --eps-list 0.5,0.25,0.125"
              " --mesh 16 --out cli_scratch/x.csv") == 2);
}

TEST_CASE("lambda prints the decoupling threshold") {
    CHECK(run("lambda --cell cli_scratch/empty_cell.json --mesh 16") == 0);
    const std::string out = slurp("cli_stdout.txt");
    CHECK(out.find("Lambda_D = ") != std::string::npos);

    CHECK(run("lambda --cell cli_scratch/empty_cell.json --mesh 16 --phi-grid 2") == 0);
    const std::string swept = slurp("cli_stdout.txt");
    CHECK(swept.find("max Lambda_phi = ") != std::string::npos);
}

TEST_CASE("argument errors exit with 2") {
    CHECK(run("") == 2);
    CHECK(run("frobnicate") == 2);
    CHECK(run("forward --cell cli_scratch/missing.json --out cli_scratch/x.csv") == 2);
    CHECK(run("bands --cell cli_scratch/empty_cell.json --out cli_scratch/x.csv") == 2);
}
