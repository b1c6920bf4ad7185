#include <doctest.h>

#include <sstream>
#include <string>
#include <vector>

#include "gapforge/format.hpp"
#include "gapforge/render.hpp"
#include "gapforge/spectra_lab.hpp"

using namespace gapforge;

namespace {

int count_occurrences(const std::string& text, const std::string& needle) {
    int n = 0;
    for (std::size_t pos = text.find(needle); pos != std::string::npos;
         pos = text.find(needle, pos + needle.size()))
        ++n;
    return n;
}

int count_lines(const std::string& text) {
    int n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

} // namespace

TEST_CASE("forward CSV lists one row per gap") {
    const std::string csv = io::render_forward_csv({1.0, 2.0}, {1.21, 2.36}, {1.21, 2.36});
    CHECK(csv.rfind("j,A_j,B_j_bisection,B_j_matrix,abs_diff\n", 0) == 0);
    CHECK(count_lines(csv) == 3);
    CHECK(csv.find("\n1,1,1.21,1.21,0\n") != std::string::npos);
}

TEST_CASE("design summary CSV carries targets and realized rates") {
    alg::TargetGaps targets;
    targets.intervals = {{1.0, 4.0 / 3.0}};
    const auto params = alg::inverse_design(targets);
    const auto cell = geom::realize_design(params);
    const auto diag = geom::validate_cell(cell);
    const std::string csv = io::render_design_summary_csv(targets, params, cell, diag.rates);
    CHECK(csv.rfind("j,A_target,B_target,b_j,q_j,A_realized\n", 0) == 0);
    CHECK(count_lines(csv) == 2);

    std::string row = csv.substr(csv.find('\n') + 1);
    row.erase(row.find_last_not_of('\n') + 1);
    std::istringstream rows(row);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(rows, field, ',')) fields.push_back(field);
    REQUIRE(fields.size() == 6);
    CHECK(fields[0] == "1");
    CHECK(io::parse_double(fields[1]) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(io::parse_double(fields[2]) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    CHECK(io::parse_double(fields[3]) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(io::parse_double(fields[4]) == doctest::Approx(0.125).epsilon(1e-12));
    CHECK(io::parse_double(fields[5]) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("bands CSV is sorted by sample index then band") {
    std::vector<lab::PhiSample> samples(2);
    samples[0] = {0, 0.0, 0.0, {1.0, 2.0}};
    samples[1] = {1, 0.0, 3.14, {1.5, 2.5}};
    const std::string csv = io::render_bands_csv(samples);
    CHECK(csv.rfind("phi_i,phi_1,phi_2,mode,k,lambda\n", 0) == 0);
    CHECK(count_lines(csv) == 5);
    const auto first = csv.find("\n0,0,0,quasi,1,1\n");
    const auto last = csv.find("\n1,0,3.14,quasi,2,2.5\n");
    CHECK(first != std::string::npos);
    CHECK(last != std::string::npos);
    CHECK(first < last);
}

TEST_CASE("verify CSV and verdict text") {
    lab::ConvergenceReport report;
    report.entries.push_back({0.5, 2, "neumann", 1.41, 4.0 / 3.0, 0.08, 0.001});
    report.entries.push_back({0.25, 2, "neumann", 1.37, 4.0 / 3.0, 0.04, 0.001});
    lab::TrackVerdict v;
    v.mode = "neumann";
    v.k = 2;
    v.limit = 4.0 / 3.0;
    v.slope = 1.02;
    v.monotone = true;
    v.slope_ok = true;
    v.pass = true;
    v.paper_side_ok = true;
    v.empirical_c = 0.2;
    report.verdicts.push_back(v);
    report.all_pass = true;

    const std::string csv = io::render_verify_csv(report);
    CHECK(csv.rfind("eps,k,mode,lambda,limit,abs_err,mesh_margin\n", 0) == 0);
    CHECK(count_lines(csv) == 3);
    CHECK(csv.find("\n0.5,2,neumann,1.41,") != std::string::npos);

    const std::string text = io::render_verify_verdicts(report);
    CHECK(text.find("PASS") != std::string::npos);
    CHECK(text.find("VERDICT PASS") != std::string::npos);

    report.verdicts[0].pass = false;
    report.all_pass = false;
    const std::string failed = io::render_verify_verdicts(report);
    CHECK(failed.find("FAIL") != std::string::npos);
    CHECK(failed.find("VERDICT FAIL") != std::string::npos);
}

TEST_CASE("band diagram SVG draws one polyline per band") {
    std::vector<lab::PhiSample> path;
    const int segments = 3, per = 4;
    for (int i = 0; i <= segments * per; ++i) {
        lab::PhiSample s;
        s.index = i;
        s.phi1 = 0.0;
        s.phi2 = 0.0;
        s.values = {1.0 + 0.1 * i, 2.0 + 0.05 * i};
        path.push_back(s);
    }
    const std::string svg = io::render_band_svg(path, 2, {1.0}, {4.0 / 3.0});
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(count_occurrences(svg, "<polyline") == 2);
    CHECK(svg.find("stroke-dasharray") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
}
