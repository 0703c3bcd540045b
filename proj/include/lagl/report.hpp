#pragma once

// Metric tables: transformation errors, source distances, Hausdorff distances
// and matching lengths. Rendered as CSV, as a fixed-width text report and as a
// full-precision JSON sidecar. Kilometres carry 3 decimals, percentages 1.

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lagl/affine.hpp"
#include "lagl/curves.hpp"

namespace lagl::report {

/// Every set's transform evaluated on every set, plus the transform fitted to their union.
struct FitReport {
    std::vector<std::string> set_names;  // last entry is the union ("global")
    std::vector<std::size_t> set_sizes;
    std::vector<affine::AffineParams> transforms;  // transforms[k] fitted on set k
    std::vector<std::vector<double>> mean_km;      // mean_km[k][j]: transform k on set j
    std::vector<std::vector<double>> max_km;
};

inline FitReport fit_report(std::span<const affine::CorrespondenceSet> sets, const std::string& global_name = "global") {
    std::vector<affine::CorrespondenceSet> all(sets.begin(), sets.end());
    all.push_back(affine::merged(sets, global_name));
    FitReport r;
    for (const auto& s : all) {
        r.set_names.push_back(s.name);
        r.set_sizes.push_back(s.pairs.size());
        r.transforms.push_back(affine::fit_affine(s));
    }
    for (const auto& t : r.transforms) {
        auto& means = r.mean_km.emplace_back();
        auto& maxes = r.max_km.emplace_back();
        for (const auto& s : all) {
            const auto res = affine::residuals(t, s);
            means.push_back(affine::rms_km(res));
            maxes.push_back(affine::max_km(res));
        }
    }
    return r;
}

struct CurveSummary {
    std::string name;
    std::size_t points = 0;
    double length_m = 0.0;
};

struct SourceRow {
    std::string a, b;
    double km = 0.0;
};

struct MetricsReport {
    FitReport fit;
    std::vector<std::string> regions;
    std::size_t grid_n1 = 0, grid_n2 = 0;
    double field_residual = 0.0;
    std::vector<CurveSummary> curves;
    std::vector<SourceRow> sources;
    std::vector<double> bands_m;
    std::vector<curves::PairComparison> comparisons;
};

// ---------------------------------------------------------------------------

inline std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    std::string s = buf;
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
}

inline std::string km(double meters) { return fixed(meters / 1000.0, 3); }
inline std::string pct(double percent) { return fixed(percent, 1); }

/// Re-derive every combined value from its directed parts; throws std::logic_error on mismatch.
///
/// Checked both at full precision and on the printed digits, so a reader
/// recomputing an "Average" row from the two rows above it gets the printed value.
inline void check_consistency(const MetricsReport& r) {
    auto close = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)}); };
    auto fail = [](const curves::PairComparison& c, const std::string& what) {
        throw std::logic_error("report self-check failed for " + c.a_name + " / " + c.b_name + ": " + what);
    };
    for (const auto& c : r.comparisons) {
        if (!close(c.max, std::max(c.directed_max_ab, c.directed_max_ba))) fail(c, "maximal Hausdorff");
        if (!close(c.mean, curves::combine_mean(c.a_length, c.directed_mean_ab, c.b_length, c.directed_mean_ba)))
            fail(c, "mean Hausdorff");
        for (const auto& b : c.bands) {
            const auto avg = curves::matching_average(b.ab.meters, c.a_length, b.ba.meters, c.b_length);
            if (!close(avg.meters, b.average.meters) || !close(avg.percent, b.average.percent)) fail(c, "average row");
            const double printed_ab = std::stod(km(b.ab.meters));
            const double printed_ba = std::stod(km(b.ba.meters));
            const double printed_avg = std::stod(km(b.average.meters));
            if (std::abs((printed_ab + printed_ba) / 2.0 - printed_avg) > 0.0015) fail(c, "printed average row");
        }
    }
}

inline std::string transform_errors_csv(const FitReport& f) {
    std::ostringstream out;
    out << "transform,set,n,mean_km,max_km\n";
    for (std::size_t k = 0; k < f.transforms.size(); ++k) {
        for (std::size_t j = 0; j < f.set_names.size(); ++j) {
            out << f.set_names[k] << ',' << f.set_names[j] << ',' << f.set_sizes[j] << ',' << fixed(f.mean_km[k][j], 3)
                << ',' << fixed(f.max_km[k][j], 3) << '\n';
        }
    }
    return out.str();
}

inline std::string parameters_csv(const FitReport& f) {
    std::ostringstream out;
    out << "set,n,a1,a2,a3,a4,b1,b2\n";
    for (std::size_t k = 0; k < f.transforms.size(); ++k) {
        out << f.set_names[k] << ',' << f.set_sizes[k];
        for (std::size_t p = 0; p < affine::AffineParams::size; ++p) {
            char buf[32];
            std::snprintf(buf, sizeof buf, ",%.17g", f.transforms[k][p]);
            out << buf;
        }
        out << '\n';
    }
    return out.str();
}

inline std::string sources_csv(const MetricsReport& r) {
    std::ostringstream out;
    out << "a,b,distance_km\n";
    for (const auto& s : r.sources) out << s.a << ',' << s.b << ',' << fixed(s.km, 3) << '\n';
    return out.str();
}

inline std::string hausdorff_csv(const MetricsReport& r) {
    std::ostringstream out;
    out << "a,b,n_a,n_b,directed_max_km,max_km,directed_mean_km,mean_km\n";
    for (const auto& c : r.comparisons) {
        out << c.a_name << ',' << c.b_name << ',' << c.a_points << ',' << c.b_points << ',' << km(c.directed_max_ab)
            << ',' << km(c.max) << ',' << km(c.directed_mean_ab) << ',' << km(c.mean) << '\n';
        out << c.b_name << ',' << c.a_name << ',' << c.b_points << ',' << c.a_points << ',' << km(c.directed_max_ba)
            << ',' << km(c.max) << ',' << km(c.directed_mean_ba) << ',' << km(c.mean) << '\n';
    }
    return out.str();
}

inline std::string matching_csv(const MetricsReport& r) {
    std::ostringstream out;
    out << "a,length_a_km,b,band_km,matching_km,percent\n";
    for (const auto& c : r.comparisons) {
        for (const auto& b : c.bands) {
            const std::string band = fixed(b.threshold / 1000.0, 3);
            out << c.a_name << ',' << km(c.a_length) << ',' << c.b_name << ',' << band << ',' << km(b.ab.meters) << ','
                << pct(b.ab.percent) << '\n';
            out << c.b_name << ',' << km(c.b_length) << ',' << c.a_name << ',' << band << ',' << km(b.ba.meters) << ','
                << pct(b.ba.percent) << '\n';
            out << "Average," << km(c.a_length + c.b_length) << ",," << band << ',' << km(b.average.meters) << ','
                << pct(b.average.percent) << '\n';
        }
    }
    return out.str();
}

namespace detail {

inline std::string pad(const std::string& s, std::size_t width, bool right = true) {
    if (s.size() >= width) return s;
    return right ? std::string(width - s.size(), ' ') + s : s + std::string(width - s.size(), ' ');
}

}  // namespace detail

inline std::string text_report(const MetricsReport& r) {
    using detail::pad;
    std::ostringstream out;
    const auto& f = r.fit;
    const std::size_t nsets = f.set_names.size();
    std::size_t name_w = 6;
    for (const auto& n : f.set_names) name_w = std::max(name_w, n.size());

    auto error_table = [&](const char* title, const std::vector<std::vector<double>>& m) {
        out << title << "\n";
        out << pad("k", 3) << "  " << pad("transform", name_w, false);
        for (std::size_t j = 0; j < nsets; ++j) out << "  " << pad(f.set_names[j], std::max<std::size_t>(10, f.set_names[j].size()));
        out << '\n';
        for (std::size_t k = 0; k < nsets; ++k) {
            const std::string label = k + 1 == nsets ? "G" : std::to_string(k + 1);
            out << pad(label, 3) << "  " << pad(f.set_names[k], name_w, false);
            for (std::size_t j = 0; j < nsets; ++j)
                out << "  " << pad(fixed(m[k][j], 3), std::max<std::size_t>(10, f.set_names[j].size()));
            out << '\n';
        }
        out << '\n';
    };
    error_table("Mean transformation errors [km] (row: transform fitted on set k, column: evaluated on set j)", f.mean_km);
    error_table("Maximal transformation errors [km] (row: transform fitted on set k, column: evaluated on set j)", f.max_km);

    if (!r.regions.empty()) {
        out << "Dirichlet regions:";
        for (const auto& n : r.regions) out << ' ' << n << ';';
        out << "\nGrid " << r.grid_n1 << " x " << r.grid_n2 << ", solver residual " << r.field_residual << "\n\n";
    }

    if (!r.curves.empty()) {
        out << "Curves\n";
        for (const auto& c : r.curves)
            out << "  " << pad(c.name, 10, false) << pad(std::to_string(c.points), 8) << " points " << pad(km(c.length_m), 12)
                << " km\n";
        out << '\n';
    }

    if (!r.sources.empty()) {
        out << "Distance of river sources [km]\n";
        for (const auto& s : r.sources) out << "  " << s.a << " - " << s.b << ": " << fixed(s.km, 3) << " km\n";
        out << '\n';
    }

    if (!r.comparisons.empty()) {
        out << "Hausdorff distances [km]\n";
        out << "  " << pad("A", 8, false) << pad("B", 8, false) << pad("dH(A,B)", 12) << pad("max HD", 12)
            << pad("mdH(A,B)", 12) << pad("mean HD", 12) << '\n';
        for (const auto& c : r.comparisons) {
            out << "  " << pad(c.a_name, 8, false) << pad(c.b_name, 8, false) << pad(km(c.directed_max_ab), 12)
                << pad(km(c.max), 12) << pad(km(c.directed_mean_ab), 12) << pad(km(c.mean), 12) << '\n';
            out << "  " << pad(c.b_name, 8, false) << pad(c.a_name, 8, false) << pad(km(c.directed_max_ba), 12)
                << pad("", 12) << pad(km(c.directed_mean_ba), 12) << '\n';
        }
        out << '\n';

        out << "Matching lengths [km]\n";
        out << "  " << pad("A", 8, false) << pad("L_A", 12) << "  " << pad("B", 8, false);
        for (double b : r.bands_m) out << pad("d_t=" + fixed(b / 1000.0, 0), 22);
        out << '\n';
        auto cell = [&](const curves::MatchingLength& m) { return pad(km(m.meters) + " (" + pct(m.percent) + "%)", 22); };
        for (const auto& c : r.comparisons) {
            out << "  " << pad(c.a_name, 8, false) << pad(km(c.a_length), 12) << "  " << pad(c.b_name, 8, false);
            for (const auto& b : c.bands) out << cell(b.ab);
            out << "\n  " << pad(c.b_name, 8, false) << pad(km(c.b_length), 12) << "  " << pad(c.a_name, 8, false);
            for (const auto& b : c.bands) out << cell(b.ba);
            out << "\n  " << pad("Average", 30, false);
            for (const auto& b : c.bands) out << cell(b.average);
            out << '\n';
        }
    }
    return out.str();
}

inline nlohmann::json to_json(const MetricsReport& r) {
    using nlohmann::json;
    json fit = json::object();
    fit["sets"] = r.fit.set_names;
    fit["sizes"] = r.fit.set_sizes;
    json params = json::array();
    for (const auto& t : r.fit.transforms) params.push_back({t.a1, t.a2, t.a3, t.a4, t.b1, t.b2});
    fit["parameters_a1_a2_a3_a4_b1_b2"] = params;
    fit["mean_error_km"] = r.fit.mean_km;
    fit["max_error_km"] = r.fit.max_km;

    json curves_j = json::array();
    for (const auto& c : r.curves) curves_j.push_back({{"name", c.name}, {"points", c.points}, {"length_m", c.length_m}});
    json sources = json::array();
    for (const auto& s : r.sources) sources.push_back({{"a", s.a}, {"b", s.b}, {"distance_km", s.km}});
    json comps = json::array();
    for (const auto& c : r.comparisons) {
        json bands = json::array();
        for (const auto& b : c.bands) {
            bands.push_back({{"threshold_m", b.threshold},
                             {"ab_m", b.ab.meters},
                             {"ab_percent", b.ab.percent},
                             {"ba_m", b.ba.meters},
                             {"ba_percent", b.ba.percent},
                             {"average_m", b.average.meters},
                             {"average_percent", b.average.percent}});
        }
        comps.push_back({{"a", c.a_name},
                         {"b", c.b_name},
                         {"a_points", c.a_points},
                         {"b_points", c.b_points},
                         {"a_length_m", c.a_length},
                         {"b_length_m", c.b_length},
                         {"directed_max_ab_m", c.directed_max_ab},
                         {"directed_max_ba_m", c.directed_max_ba},
                         {"max_m", c.max},
                         {"directed_mean_ab_m", c.directed_mean_ab},
                         {"directed_mean_ba_m", c.directed_mean_ba},
                         {"mean_m", c.mean},
                         {"matching", bands}});
    }
    return {{"fit", fit},
            {"regions", r.regions},
            {"grid", {r.grid_n1, r.grid_n2}},
            {"field_residual", r.field_residual},
            {"curves", curves_j},
            {"sources", sources},
            {"comparisons", comps}};
}

}  // namespace lagl::report
