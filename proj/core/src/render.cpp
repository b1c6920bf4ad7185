#include "gapforge/render.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gapforge/errors.hpp"
#include "gapforge/format.hpp"

namespace gapforge::io {

namespace {

const char* kPalette[] = {"#1b6ca8", "#c23b22", "#2e8540", "#8a5fbf",
                          "#b8860b", "#147d81", "#a1426e", "#5a5a5a"};

} // namespace

std::string render_forward_csv(const std::vector<double>& poles,
                               const std::vector<double>& roots_bisection,
                               const std::vector<double>& roots_matrix) {
    if (poles.size() != roots_bisection.size() || poles.size() != roots_matrix.size())
        throw ValidationError("forward csv: mismatched column lengths");
    std::ostringstream out;
    out << "j,A_j,B_j_bisection,B_j_matrix,abs_diff\n";
    for (std::size_t j = 0; j < poles.size(); ++j) {
        out << (j + 1) << "," << format_double(poles[j]) << ","
            << format_double(roots_bisection[j]) << "," << format_double(roots_matrix[j]) << ","
            << format_double(std::abs(roots_bisection[j] - roots_matrix[j])) << "\n";
    }
    return out.str();
}

std::string render_design_summary_csv(const alg::TargetGaps& targets,
                                      const alg::DesignParams& params,
                                      const geom::CellSpec& cell,
                                      const std::vector<double>& realized_rates) {
    const std::size_t m = targets.size();
    if (params.size() != m || cell.size() != m || realized_rates.size() != m)
        throw ValidationError("design summary: mismatched lengths");
    std::ostringstream out;
    out << "j,A_target,B_target,b_j,q_j,A_realized\n";
    for (std::size_t j = 0; j < m; ++j) {
        out << (j + 1) << "," << format_double(targets.intervals[j].first) << ","
            << format_double(targets.intervals[j].second) << "," << format_double(params.b[j])
            << "," << format_double(cell.strengths[j]) << ","
            << format_double(realized_rates[j]) << "\n";
    }
    return out.str();
}

std::string render_verify_csv(const lab::ConvergenceReport& report) {
    std::ostringstream out;
    out << "eps,k,mode,lambda,limit,abs_err,mesh_margin\n";
    for (const auto& e : report.entries) {
        out << format_double(e.eps) << "," << e.k << "," << e.mode << ","
            << format_double(e.lambda) << "," << format_double(e.limit) << ","
            << format_double(e.abs_err) << "," << format_double(e.mesh_margin) << "\n";
    }
    return out.str();
}

std::string render_verify_verdicts(const lab::ConvergenceReport& report) {
    std::ostringstream out;
    for (const auto& v : report.verdicts) {
        out << (v.pass ? "PASS" : "FAIL") << " " << v.mode << " k=" << v.k
            << " limit=" << format_double(v.limit) << " slope=" << format_double(v.slope)
            << (v.slope_ok ? " (in [0.5,2.5])" : " (outside [0.5,2.5])")
            << (v.monotone ? " monotone" : " not-monotone")
            << (v.paper_side_ok ? "" : " above-limit-beyond-mesh-margin") << "\n";
    }
    out << (report.all_pass ? "VERDICT PASS" : "VERDICT FAIL") << "\n";
    return out.str();
}

std::string render_bands_csv(const std::vector<lab::PhiSample>& samples) {
    std::vector<const lab::PhiSample*> ordered;
    ordered.reserve(samples.size());
    for (const auto& s : samples) ordered.push_back(&s);
    std::sort(ordered.begin(), ordered.end(),
              [](const lab::PhiSample* a, const lab::PhiSample* b) { return a->index < b->index; });

    std::ostringstream out;
    out << "phi_i,phi_1,phi_2,mode,k,lambda\n";
    for (const auto* s : ordered) {
        for (std::size_t k = 0; k < s->values.size(); ++k) {
            out << s->index << "," << format_double(s->phi1) << "," << format_double(s->phi2)
                << ",quasi," << (k + 1) << "," << format_double(s->values[k]) << "\n";
        }
    }
    return out.str();
}

std::string render_band_svg(const std::vector<lab::PhiSample>& path, int bands,
                            const std::vector<double>& lower_edges,
                            const std::vector<double>& upper_edges) {
    if (path.empty() || bands < 1) throw ValidationError("band svg: nothing to draw");
    for (const auto& p : path) {
        if (static_cast<int>(p.values.size()) < bands)
            throw ValidationError("band svg: path sample missing bands");
    }

    const double width = 820.0, height = 560.0, pad = 56.0;
    double y_max = 0.0;
    for (const auto& p : path) y_max = std::max(y_max, p.values[static_cast<std::size_t>(bands - 1)]);
    for (double edge : upper_edges) y_max = std::max(y_max, edge);
    y_max *= 1.06;
    if (y_max <= 0.0) y_max = 1.0;

    const double x_last = static_cast<double>(path.size() - 1);
    const auto sx = [&](double i) { return pad + (width - 2 * pad) * (i / std::max(1.0, x_last)); };
    const auto sy = [&](double lam) { return height - pad - (height - 2 * pad) * (lam / y_max); };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << width << " " << height
        << "\">\n";
    out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    out << "<line x1=\"" << pad << "\" y1=\"" << height - pad << "\" x2=\"" << width - pad
        << "\" y2=\"" << height - pad << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << pad << "\" y1=\"" << pad << "\" x2=\"" << pad << "\" y2=\""
        << height - pad << "\" stroke=\"black\"/>\n";

    // Corner ticks of the phase path.
    const double third = x_last / 3.0;
    const char* corner_names[4] = {"(0,0)", "(pi,0)", "(pi,pi)", "(0,0)"};
    for (int c = 0; c <= 3; ++c) {
        const double x = sx(third * c);
        out << "<line x1=\"" << x << "\" y1=\"" << height - pad << "\" x2=\"" << x << "\" y2=\""
            << height - pad + 6 << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << x << "\" y=\"" << height - pad + 22
            << "\" font-size=\"13\" text-anchor=\"middle\">" << corner_names[c] << "</text>\n";
    }

    const auto dashed = [&](double lam, const char* tag, std::size_t j) {
        out << "<line x1=\"" << pad << "\" y1=\"" << sy(lam) << "\" x2=\"" << width - pad
            << "\" y2=\"" << sy(lam)
            << "\" stroke=\"#777777\" stroke-dasharray=\"7,5\" stroke-width=\"1\"/>\n";
        out << "<text x=\"" << width - pad + 4 << "\" y=\"" << sy(lam) + 4
            << "\" font-size=\"12\" fill=\"#555555\">" << tag << j << "</text>\n";
    };
    for (std::size_t j = 0; j < lower_edges.size(); ++j) dashed(lower_edges[j], "A", j + 1);
    for (std::size_t j = 0; j < upper_edges.size(); ++j) dashed(upper_edges[j], "B", j + 1);

    for (int b = 0; b < bands; ++b) {
        out << "<polyline fill=\"none\" stroke=\"" << kPalette[b % 8]
            << "\" stroke-width=\"1.6\" points=\"";
        for (std::size_t i = 0; i < path.size(); ++i) {
            out << sx(static_cast<double>(i)) << ","
                << sy(path[i].values[static_cast<std::size_t>(b)]);
            if (i + 1 < path.size()) out << " ";
        }
        out << "\"/>\n";
    }

    out << "<text x=\"" << pad << "\" y=\"" << pad - 16
        << "\" font-size=\"13\">fiber eigenvalues along the phase path</text>\n";
    out << "</svg>\n";
    return out.str();
}

} // namespace gapforge::io
