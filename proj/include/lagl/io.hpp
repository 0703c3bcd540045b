#pragma once

// Text formats for correspondence sets and pixel curves, GeoJSON line
// features for geographic curves, and the CSV field dump.
//
// Correspondence file:
//     # comment
//     set: Adriatic coast
//     note: optional free text
//     x1, x2, lon, lat, label
//     ...
// Each data row holds four numbers and a label (the label may contain commas).
//
// Pixel curve file:
//     name: Ister
//     x1, x2        (comma or whitespace separated, one point per line)

#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "lagl/affine.hpp"
#include "lagl/curves.hpp"
#include "lagl/error.hpp"
#include "lagl/field.hpp"
#include "lagl/geodesy.hpp"

namespace lagl::io {

using affine::CorrespondenceSet;
using affine::PixelPoint;
using geodesy::GeoPoint;

struct PixelCurve {
    std::string name;
    std::vector<PixelPoint> points;
};

/// A named geographic polyline as stored in a line feature.
struct GeoPolyline {
    std::string name;
    std::vector<GeoPoint> points;
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] inline void fail(const std::string& source, std::size_t line, const std::string& what) {
    throw Error(ErrorCategory::config, source + ":" + std::to_string(line) + ": " + what);
}

inline double parse_number(const std::string& token, const std::string& source, std::size_t line) {
    const std::string t = trim(token);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        fail(source, line, "expected a number, got '" + t + "'");
    }
    if (used != t.size() || !std::isfinite(v)) fail(source, line, "expected a number, got '" + t + "'");
    return v;
}

/// "key: value" header lines; returns false for anything else.
inline bool header(const std::string& line, std::string_view key, std::string& value) {
    if (line.size() <= key.size() || line.compare(0, key.size(), key) != 0 || line[key.size()] != ':') return false;
    value = trim(std::string_view(line).substr(key.size() + 1));
    return true;
}

inline std::ifstream open(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCategory::config, "cannot open '" + path.string() + "'");
    return in;
}

inline std::string full(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Correspondence sets

inline std::vector<CorrespondenceSet> parse_correspondences(std::istream& in, const std::string& source = "<input>") {
    std::vector<CorrespondenceSet> sets;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = detail::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        std::string value;
        if (detail::header(line, "set", value)) {
            if (value.empty()) detail::fail(source, line_no, "set name is empty");
            for (const auto& s : sets) {
                if (s.name == value) detail::fail(source, line_no, "duplicate set '" + value + "'");
            }
            sets.push_back({value, {}, {}});
            continue;
        }
        if (detail::header(line, "note", value)) {
            if (sets.empty()) detail::fail(source, line_no, "note before any set");
            sets.back().note = value;
            continue;
        }
        if (sets.empty()) detail::fail(source, line_no, "data row before any 'set:' line");
        std::vector<std::string> fields;
        std::size_t start = 0;
        for (int k = 0; k < 4; ++k) {
            const auto comma = line.find(',', start);
            if (comma == std::string::npos) detail::fail(source, line_no, "expected 'x1, x2, lon, lat, label'");
            fields.push_back(line.substr(start, comma - start));
            start = comma + 1;
        }
        affine::Correspondence c;
        c.source = {detail::parse_number(fields[0], source, line_no), detail::parse_number(fields[1], source, line_no)};
        try {
            c.target = GeoPoint::from_degrees(detail::parse_number(fields[2], source, line_no),
                                              detail::parse_number(fields[3], source, line_no));
        } catch (const Error& e) {
            detail::fail(source, line_no, e.what());
        }
        c.label = detail::trim(std::string_view(line).substr(start));
        sets.back().pairs.push_back(std::move(c));
    }
    return sets;
}

inline std::vector<CorrespondenceSet> read_correspondences(const std::filesystem::path& path) {
    auto in = detail::open(path);
    return parse_correspondences(in, path.string());
}

inline void write_correspondences(std::ostream& out, const std::vector<CorrespondenceSet>& sets) {
    for (const auto& s : sets) {
        out << "set: " << s.name << '\n';
        if (!s.note.empty()) out << "note: " << s.note << '\n';
        for (const auto& p : s.pairs) {
            out << detail::full(p.source.x1) << ", " << detail::full(p.source.x2) << ", " << detail::full(p.target.lon)
                << ", " << detail::full(p.target.lat) << ", " << p.label << '\n';
        }
    }
}

// ---------------------------------------------------------------------------
// Pixel curves

inline PixelCurve parse_pixel_curve(std::istream& in, const std::string& source = "<input>") {
    PixelCurve curve;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = detail::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        std::string value;
        if (detail::header(line, "name", value)) {
            curve.name = value;
            continue;
        }
        for (auto& ch : line) {
            if (ch == ',' || ch == ';' || ch == '\t') ch = ' ';
        }
        std::istringstream fields(line);
        std::string a, b, extra;
        if (!(fields >> a >> b) || (fields >> extra)) detail::fail(source, line_no, "expected 'x1, x2'");
        curve.points.push_back({detail::parse_number(a, source, line_no), detail::parse_number(b, source, line_no)});
    }
    return curve;
}

inline PixelCurve read_pixel_curve(const std::filesystem::path& path) {
    auto in = detail::open(path);
    auto c = parse_pixel_curve(in, path.string());
    if (c.name.empty()) c.name = path.stem().string();
    return c;
}

inline void write_pixel_curve(std::ostream& out, const PixelCurve& curve) {
    if (!curve.name.empty()) out << "name: " << curve.name << '\n';
    for (const auto& p : curve.points) out << detail::full(p.x1) << ", " << detail::full(p.x2) << '\n';
}

// ---------------------------------------------------------------------------
// GeoJSON line features (lon, lat order, WGS84)

inline nlohmann::json to_feature(const std::string& name, std::span<const GeoPoint> points) {
    nlohmann::json coords = nlohmann::json::array();
    for (const auto& p : points) coords.push_back({p.lon, p.lat});
    return {{"type", "Feature"},
            {"properties", {{"name", name}, {"points", points.size()}}},
            {"geometry", {{"type", "LineString"}, {"coordinates", std::move(coords)}}}};
}

inline nlohmann::json to_feature_collection(std::span<const curves::DiscreteCurve> list) {
    nlohmann::json features = nlohmann::json::array();
    for (const auto& c : list) features.push_back(to_feature(c.name(), c.points()));
    return {{"type", "FeatureCollection"}, {"features", std::move(features)}};
}

inline nlohmann::json to_feature_collection(std::span<const GeoPolyline> list) {
    nlohmann::json features = nlohmann::json::array();
    for (const auto& c : list) features.push_back(to_feature(c.name, c.points));
    return {{"type", "FeatureCollection"}, {"features", std::move(features)}};
}

/// Every LineString in a FeatureCollection, Feature or bare geometry.
inline std::vector<GeoPolyline> parse_geo_lines(const nlohmann::json& doc, const std::string& source = "<input>",
                                                const std::string& fallback_name = {}) {
    auto bad = [&](const std::string& what) -> Error {
        return Error(ErrorCategory::config, source + ": " + what);
    };
    std::vector<GeoPolyline> out;
    auto take_geometry = [&](const nlohmann::json& geom, std::string name) {
        if (!geom.is_object() || geom.value("type", "") != "LineString") {
            throw bad("only LineString geometries are supported");
        }
        GeoPolyline line;
        line.name = std::move(name);
        for (const auto& c : geom.at("coordinates")) {
            if (!c.is_array() || c.size() < 2 || !c[0].is_number() || !c[1].is_number()) {
                throw bad("malformed coordinate in '" + line.name + "'");
            }
            try {
                line.points.push_back(GeoPoint::from_degrees(c[0].get<double>(), c[1].get<double>()));
            } catch (const Error& e) {
                throw bad(e.what());
            }
        }
        out.push_back(std::move(line));
    };
    auto feature_name = [&](const nlohmann::json& f) {
        if (f.contains("properties") && f["properties"].is_object() && f["properties"].contains("name") &&
            f["properties"]["name"].is_string()) {
            return f["properties"]["name"].get<std::string>();
        }
        return fallback_name.empty() ? std::string("curve") + std::to_string(out.size() + 1) : fallback_name;
    };
    try {
        const std::string type = doc.value("type", "");
        if (type == "FeatureCollection") {
            for (const auto& f : doc.at("features")) take_geometry(f.at("geometry"), feature_name(f));
        } else if (type == "Feature") {
            take_geometry(doc.at("geometry"), feature_name(doc));
        } else {
            take_geometry(doc, fallback_name.empty() ? "curve1" : fallback_name);
        }
    } catch (const nlohmann::json::exception& e) {
        throw bad(e.what());
    }
    return out;
}

inline std::vector<GeoPolyline> read_geo_lines(const std::filesystem::path& path) {
    auto in = detail::open(path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCategory::config, path.string() + ": " + e.what());
    }
    return parse_geo_lines(doc, path.string(), path.stem().string());
}

// ---------------------------------------------------------------------------
// Field dump: one CSV per parameter, a header comment then N2 rows of N1 values.

inline void write_field_csv(std::ostream& out, const field::ParameterField& f, std::size_t parameter) {
    const auto& g = f.grid;
    out << "# parameter=" << affine::AffineParams::names[parameter] << " n1=" << g.n1 << " n2=" << g.n2
        << " origin_x1=" << detail::full(g.origin.x1) << " origin_x2=" << detail::full(g.origin.x2) << '\n';
    for (std::size_t j = 0; j < g.n2; ++j) {
        for (std::size_t i = 0; i < g.n1; ++i) {
            if (i) out << ',';
            out << detail::full(f.at(parameter, i, j));
        }
        out << '\n';
    }
}

}  // namespace lagl::io
