#include "gapforge/cell_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gapforge/errors.hpp"

namespace gapforge::io {

using nlohmann::json;

namespace {

json shape_to_json(const geom::InclusionShape& shape) {
    json j;
    j["kind"] = shape.kind == geom::ShapeKind::Rect ? "rect" : "disk";
    j["center"] = {shape.center[0], shape.center[1]};
    if (shape.kind == geom::ShapeKind::Rect)
        j["half_extents"] = {shape.half_extents[0], shape.half_extents[1]};
    else
        j["radius"] = shape.radius;
    return j;
}

std::array<double, 2> pair_from_json(const json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ValidationError(what + " must be an array of two numbers");
    return {j[0].get<double>(), j[1].get<double>()};
}

geom::InclusionShape shape_from_json(const json& j) {
    if (!j.is_object()) throw ValidationError("inclusion must be an object");
    if (!j.contains("kind") || !j["kind"].is_string())
        throw ValidationError("inclusion needs a string 'kind'");
    const std::string kind = j["kind"].get<std::string>();
    if (!j.contains("center")) throw ValidationError("inclusion needs a 'center'");

    geom::InclusionShape shape;
    shape.center = pair_from_json(j["center"], "inclusion center");
    if (kind == "rect") {
        shape.kind = geom::ShapeKind::Rect;
        if (!j.contains("half_extents"))
            throw ValidationError("rect inclusion needs 'half_extents'");
        shape.half_extents = pair_from_json(j["half_extents"], "inclusion half_extents");
    } else if (kind == "disk") {
        shape.kind = geom::ShapeKind::Disk;
        if (!j.contains("radius") || !j["radius"].is_number())
            throw ValidationError("disk inclusion needs a numeric 'radius'");
        shape.radius = j["radius"].get<double>();
    } else {
        throw ValidationError("unknown inclusion kind '" + kind + "'");
    }
    return shape;
}

json parse_or_throw(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ValidationError("malformed JSON");
    return j;
}

} // namespace

std::string write_cell(const geom::CellSpec& cell) {
    json j;
    j["inclusions"] = json::array();
    for (const auto& shape : cell.inclusions) j["inclusions"].push_back(shape_to_json(shape));
    j["strengths"] = cell.strengths;
    return j.dump(2) + "\n";
}

geom::CellSpec parse_cell(const std::string& text) {
    const json j = parse_or_throw(text);
    if (!j.is_object() || !j.contains("inclusions") || !j.contains("strengths"))
        throw ValidationError("cell JSON needs 'inclusions' and 'strengths'");
    if (!j["inclusions"].is_array() || !j["strengths"].is_array())
        throw ValidationError("'inclusions' and 'strengths' must be arrays");

    geom::CellSpec cell;
    for (const auto& js : j["inclusions"]) cell.inclusions.push_back(shape_from_json(js));
    for (const auto& jq : j["strengths"]) {
        if (!jq.is_number()) throw ValidationError("strengths must be numbers");
        cell.strengths.push_back(jq.get<double>());
    }
    if (cell.inclusions.size() != cell.strengths.size())
        throw ValidationError("cell JSON: one strength per inclusion required");
    return cell;
}

void write_cell_file(const std::filesystem::path& path, const geom::CellSpec& cell) {
    spill(path, write_cell(cell));
}

geom::CellSpec read_cell_file(const std::filesystem::path& path) {
    return parse_cell(slurp(path));
}

alg::TargetGaps parse_targets(const std::string& text) {
    const json j = parse_or_throw(text);
    if (!j.is_object() || !j.contains("gaps") || !j["gaps"].is_array())
        throw ValidationError("targets JSON needs a 'gaps' array");
    alg::TargetGaps targets;
    for (const auto& jg : j["gaps"]) {
        const auto edges = pair_from_json(jg, "gap entry");
        targets.intervals.emplace_back(edges[0], edges[1]);
    }
    return targets;
}

alg::TargetGaps read_targets_file(const std::filesystem::path& path) {
    return parse_targets(slurp(path));
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spill(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + path.string() + "'");
    out << text;
    if (!out.good()) throw ValidationError("write failed for '" + path.string() + "'");
}

} // namespace gapforge::io
