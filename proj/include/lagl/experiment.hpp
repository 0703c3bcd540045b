#pragma once

// Experiment runner: fit every correspondence set, build the parameter field
// from the chosen regions, push pixel curves through it, derive split and
// joined river courses, and compare curve pairs.

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lagl/affine.hpp"
#include "lagl/curves.hpp"
#include "lagl/error.hpp"
#include "lagl/field.hpp"
#include "lagl/io.hpp"
#include "lagl/report.hpp"

namespace lagl::pipeline {

namespace fs = std::filesystem;
using curves::DiscreteCurve;

struct KilometerInterval {
    double low = 0.0;
    double high = 0.0;
};

/// One stadium is 177.7 to 197.3 m.
inline KilometerInterval stadia_to_km(double stadia) {
    if (!(stadia >= 0.0) || !std::isfinite(stadia)) {
        throw Error(ErrorCategory::argument, "stadia count must be a non-negative number");
    }
    return {stadia * 177.7 / 1000.0, stadia * 197.3 / 1000.0};
}

/// Sample the field at every point, then apply the sampled affine.
inline DiscreteCurve transform_curve(const field::ParameterField& f, const io::PixelCurve& curve) {
    if (curve.points.empty()) {
        throw Error(ErrorCategory::degenerate, "curve '" + curve.name + "' is empty");
    }
    std::vector<geodesy::GeoPoint> out;
    out.reserve(curve.points.size());
    for (std::size_t k = 0; k < curve.points.size(); ++k) {
        try {
            out.push_back(affine::apply_affine(field::sample_field(f, curve.points[k]), curve.points[k]));
        } catch (const Error& e) {
            throw Error(e.category(), "curve '" + curve.name + "' point " + std::to_string(k) + ": " + e.what());
        }
    }
    return curves::build_segments(std::move(out), curve.name);
}

// ---------------------------------------------------------------------------
// Configuration (JSON). Relative paths resolve against the config file's directory.
//
// {
//   "domain": [x1_min, x2_min, x1_max, x2_max],
//   "correspondences": ["sets.txt"],
//   "regions": ["Adriatic coast", "Black Sea coast"],      // default: every set
//   "polygon_mode": "ordered" | "hull",
//   "source_curves": [{"name": "Ister", "file": "ister_pixels.txt"}],
//   "reference_curves": [{"name": "D", "file": "rivers.geojson", "feature": "Danube"}],
//   "splits": [{"curve": "D", "at": [lon, lat], "into": ["D1", "D2"]}],
//   "joins": [{"name": "DD", "parts": ["Drava", "D2"]}],
//   "comparisons": [["D", "Ister"]],
//   "source_pairs": [["D", "Ister"]],
//   "bands_km": [10, 50, 100],
//   "output_dir": "out",
//   "dump_field": false
// }

struct CurveFile {
    std::string name;
    fs::path file;
    std::string feature;  // reference curves only; empty selects by name or the single feature
};

struct SplitSpec {
    std::string curve;
    geodesy::GeoPoint at;
    std::string upper, lower;
};

struct JoinSpec {
    std::string name;
    std::vector<std::string> parts;
};

struct ProjectConfig {
    field::GridDomain domain;
    std::vector<fs::path> correspondence_files;
    std::vector<std::string> regions;
    field::PolygonMode polygon_mode = field::PolygonMode::ordered;
    std::vector<CurveFile> source_curves;
    std::vector<CurveFile> reference_curves;
    std::vector<SplitSpec> splits;
    std::vector<JoinSpec> joins;
    std::vector<std::pair<std::string, std::string>> comparisons;
    std::vector<std::pair<std::string, std::string>> source_pairs;
    std::vector<double> bands_km{10.0, 50.0, 100.0};
    fs::path output_dir = "out";
    bool dump_field = false;
};

namespace detail {

inline std::vector<std::pair<std::string, std::string>> name_pairs(const nlohmann::json& j, const char* key) {
    std::vector<std::pair<std::string, std::string>> out;
    if (!j.contains(key)) return out;
    for (const auto& p : j.at(key)) {
        if (!p.is_array() || p.size() != 2) throw Error(ErrorCategory::config, std::string(key) + ": expected [A, B] pairs");
        out.emplace_back(p[0].get<std::string>(), p[1].get<std::string>());
    }
    return out;
}

inline std::vector<CurveFile> curve_files(const nlohmann::json& j, const char* key, const fs::path& base) {
    std::vector<CurveFile> out;
    if (!j.contains(key)) return out;
    for (const auto& c : j.at(key)) {
        CurveFile f;
        f.name = c.at("name").get<std::string>();
        f.file = base / c.at("file").get<std::string>();
        f.feature = c.value("feature", "");
        out.push_back(std::move(f));
    }
    return out;
}

}  // namespace detail

inline ProjectConfig parse_config(const nlohmann::json& j, const fs::path& base = {}) {
    ProjectConfig c;
    try {
        const auto& d = j.at("domain");
        if (!d.is_array() || d.size() != 4) throw Error(ErrorCategory::config, "domain: expected [x1_min, x2_min, x1_max, x2_max]");
        c.domain = field::GridDomain::from_rectangle(d[0].get<double>(), d[1].get<double>(), d[2].get<double>(),
                                                     d[3].get<double>());
        const auto& corr = j.at("correspondences");
        if (corr.is_string()) {
            c.correspondence_files.push_back(base / corr.get<std::string>());
        } else {
            for (const auto& f : corr) c.correspondence_files.push_back(base / f.get<std::string>());
        }
        if (j.contains("regions")) c.regions = j.at("regions").get<std::vector<std::string>>();
        const std::string mode = j.value("polygon_mode", "ordered");
        if (mode == "ordered") {
            c.polygon_mode = field::PolygonMode::ordered;
        } else if (mode == "hull") {
            c.polygon_mode = field::PolygonMode::hull;
        } else {
            throw Error(ErrorCategory::config, "polygon_mode must be 'ordered' or 'hull'");
        }
        c.source_curves = detail::curve_files(j, "source_curves", base);
        c.reference_curves = detail::curve_files(j, "reference_curves", base);
        if (j.contains("splits")) {
            for (const auto& s : j.at("splits")) {
                const auto& at = s.at("at");
                const auto& into = s.at("into");
                if (into.size() != 2) throw Error(ErrorCategory::config, "splits: 'into' needs two names");
                c.splits.push_back({s.at("curve").get<std::string>(),
                                    geodesy::GeoPoint::from_degrees(at.at(0).get<double>(), at.at(1).get<double>()),
                                    into[0].get<std::string>(), into[1].get<std::string>()});
            }
        }
        if (j.contains("joins")) {
            for (const auto& s : j.at("joins")) {
                c.joins.push_back({s.at("name").get<std::string>(), s.at("parts").get<std::vector<std::string>>()});
            }
        }
        c.comparisons = detail::name_pairs(j, "comparisons");
        c.source_pairs = detail::name_pairs(j, "source_pairs");
        if (j.contains("bands_km")) c.bands_km = j.at("bands_km").get<std::vector<double>>();
        for (double b : c.bands_km) {
            if (!(b > 0.0)) throw Error(ErrorCategory::config, "bands_km: thresholds must be positive");
        }
        c.output_dir = base / j.value("output_dir", "out");
        c.dump_field = j.value("dump_field", false);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCategory::config, std::string("config: ") + e.what());
    } catch (const Error& e) {
        if (e.category() == ErrorCategory::config) throw;
        throw Error(ErrorCategory::config, std::string("config: ") + e.what());
    }
    return c;
}

inline ProjectConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCategory::config, "cannot open config '" + path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCategory::config, path.string() + ": " + e.what());
    }
    return parse_config(j, path.parent_path());
}

// ---------------------------------------------------------------------------

struct ExperimentResult {
    report::MetricsReport report;
    field::ParameterField field;
    std::vector<DiscreteCurve> transformed;  // source curves mapped to geographic coordinates
    std::vector<DiscreteCurve> derived;      // split and joined courses
};

inline std::vector<affine::CorrespondenceSet> read_all_sets(const std::vector<fs::path>& files) {
    std::vector<affine::CorrespondenceSet> sets;
    for (const auto& f : files) {
        auto more = io::read_correspondences(f);
        for (auto& s : more) {
            for (const auto& existing : sets) {
                if (existing.name == s.name) throw Error(ErrorCategory::config, "duplicate set '" + s.name + "' in " + f.string());
            }
            sets.push_back(std::move(s));
        }
    }
    if (sets.empty()) throw Error(ErrorCategory::config, "no correspondence sets given");
    return sets;
}

/// Regions for the named sets (all sets when `names` is empty).
inline std::vector<field::DirichletRegion> select_regions(const std::vector<affine::CorrespondenceSet>& sets,
                                                          const std::vector<std::string>& names,
                                                          field::PolygonMode mode) {
    std::vector<field::DirichletRegion> regions;
    if (names.empty()) {
        for (const auto& s : sets) regions.push_back(field::make_region(s, mode));
        return regions;
    }
    for (const auto& n : names) {
        const auto it = std::find_if(sets.begin(), sets.end(), [&](const auto& s) { return s.name == n; });
        if (it == sets.end()) throw Error(ErrorCategory::config, "region '" + n + "' is not a correspondence set");
        regions.push_back(field::make_region(*it, mode));
    }
    return regions;
}

inline field::ParameterField build_field(const field::GridDomain& grid, std::span<const field::DirichletRegion> regions) {
    return field::solve_field(field::assemble_system(grid, regions));
}

inline ExperimentResult run_experiment(const ProjectConfig& cfg) {
    ExperimentResult out;
    const auto sets = read_all_sets(cfg.correspondence_files);
    out.report.fit = report::fit_report(sets);

    const auto regions = select_regions(sets, cfg.regions, cfg.polygon_mode);
    for (const auto& r : regions) out.report.regions.push_back(r.name);
    out.field = build_field(cfg.domain, regions);
    out.report.grid_n1 = cfg.domain.n1;
    out.report.grid_n2 = cfg.domain.n2;
    out.report.field_residual = out.field.residual;

    std::map<std::string, DiscreteCurve> named;
    std::vector<std::string> order;
    auto add = [&](DiscreteCurve c) {
        if (named.contains(c.name())) throw Error(ErrorCategory::config, "curve name '" + c.name() + "' used twice");
        order.push_back(c.name());
        named.emplace(c.name(), std::move(c));
    };
    auto get = [&](const std::string& n) -> const DiscreteCurve& {
        const auto it = named.find(n);
        if (it == named.end()) throw Error(ErrorCategory::config, "unknown curve '" + n + "'");
        return it->second;
    };

    for (const auto& s : cfg.source_curves) {
        auto pixels = io::read_pixel_curve(s.file);
        pixels.name = s.name;
        auto c = transform_curve(out.field, pixels);
        out.transformed.push_back(c);
        add(std::move(c));
    }
    for (const auto& r : cfg.reference_curves) {
        const auto lines = io::read_geo_lines(r.file);
        const std::string wanted = r.feature.empty() ? r.name : r.feature;
        const io::GeoPolyline* chosen = nullptr;
        for (const auto& l : lines) {
            if (l.name == wanted) chosen = &l;
        }
        if (chosen == nullptr && r.feature.empty() && lines.size() == 1) chosen = &lines.front();
        if (chosen == nullptr) {
            throw Error(ErrorCategory::config, r.file.string() + ": no line feature named '" + wanted + "'");
        }
        add(curves::build_segments(chosen->points, r.name));
    }
    for (const auto& s : cfg.splits) {
        auto [upper, lower] = curves::split_at(get(s.curve), s.at, s.upper, s.lower);
        out.derived.push_back(upper);
        out.derived.push_back(lower);
        add(std::move(upper));
        add(std::move(lower));
    }
    for (const auto& j : cfg.joins) {
        std::vector<DiscreteCurve> parts;
        for (const auto& p : j.parts) parts.push_back(get(p));
        auto c = curves::concatenate(parts, j.name);
        out.derived.push_back(c);
        add(std::move(c));
    }

    for (const auto& n : order) {
        const auto& c = named.at(n);
        out.report.curves.push_back({n, c.size(), c.length()});
    }
    for (const auto& [a, b] : cfg.source_pairs) {
        out.report.sources.push_back({a, b, curves::source_distance(get(a), get(b))});
    }
    std::vector<curves::BandThreshold> bands;
    for (double b : cfg.bands_km) {
        bands.push_back(curves::BandThreshold::km(b));
        out.report.bands_m.push_back(bands.back().meters);
    }
    for (const auto& [a, b] : cfg.comparisons) {
        out.report.comparisons.push_back(curves::compare(get(a), get(b), bands));
    }
    report::check_consistency(out.report);
    return out;
}

/// Everything is rendered in memory first, so a failure leaves no partial output.
inline std::vector<std::pair<std::string, std::string>> render_outputs(const ExperimentResult& r, bool dump_field) {
    std::vector<std::pair<std::string, std::string>> files;
    report::check_consistency(r.report);
    files.emplace_back("parameters.csv", report::parameters_csv(r.report.fit));
    files.emplace_back("transform_errors.csv", report::transform_errors_csv(r.report.fit));
    files.emplace_back("sources.csv", report::sources_csv(r.report));
    files.emplace_back("hausdorff.csv", report::hausdorff_csv(r.report));
    files.emplace_back("matching.csv", report::matching_csv(r.report));
    files.emplace_back("report.txt", report::text_report(r.report));
    files.emplace_back("metrics.json", report::to_json(r.report).dump(2) + "\n");
    std::vector<DiscreteCurve> all = r.transformed;
    all.insert(all.end(), r.derived.begin(), r.derived.end());
    files.emplace_back("curves.geojson", io::to_feature_collection(std::span<const DiscreteCurve>(all)).dump() + "\n");
    if (dump_field) {
        for (std::size_t p = 0; p < affine::AffineParams::size; ++p) {
            std::ostringstream s;
            io::write_field_csv(s, r.field, p);
            files.emplace_back("field_" + std::string(affine::AffineParams::names[p]) + ".csv", s.str());
        }
    }
    return files;
}

inline void write_files(const fs::path& dir, const std::vector<std::pair<std::string, std::string>>& files) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCategory::config, "cannot create output directory '" + dir.string() + "': " + ec.message());
    for (const auto& [name, content] : files) {
        std::ofstream out(dir / name, std::ios::binary);
        out << content;
        if (!out) throw Error(ErrorCategory::config, "cannot write '" + (dir / name).string() + "'");
    }
}

}  // namespace lagl::pipeline
