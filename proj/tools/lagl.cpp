// lagl: fit regional affines, solve the parameter field, transform curves and
// compare them.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "lagl/lagl.hpp"

namespace fs = std::filesystem;
using namespace lagl;

namespace {

field::GridDomain parse_domain(const std::vector<double>& v) {
    if (v.size() != 4) throw Error(ErrorCategory::config, "--domain expects x1_min,x2_min,x1_max,x2_max");
    return field::GridDomain::from_rectangle(v[0], v[1], v[2], v[3]);
}

field::ParameterField solve_from_sets(const std::string& sets_file, const std::vector<double>& domain,
                                      const std::vector<std::string>& regions, bool hull) {
    const auto sets = pipeline::read_all_sets({sets_file});
    const auto selected =
        pipeline::select_regions(sets, regions, hull ? field::PolygonMode::hull : field::PolygonMode::ordered);
    return pipeline::build_field(parse_domain(domain), selected);
}

void emit(const fs::path& dir, const std::vector<std::pair<std::string, std::string>>& files) {
    pipeline::write_files(dir, files);
    for (const auto& f : files) std::cout << "wrote " << (dir / f.first).string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Locally affine, globally Laplace map registration"};
    app.require_subcommand(1);

    // fit
    std::string fit_sets;
    std::string fit_out;
    auto* fit = app.add_subcommand("fit", "Fit an affine per correspondence set and print the cross-error tables");
    fit->add_option("sets", fit_sets, "Correspondence file")->required()->check(CLI::ExistingFile);
    fit->add_option("-o,--out", fit_out, "Write parameters.csv and transform_errors.csv here");

    // field
    std::string field_sets;
    std::vector<double> field_domain;
    std::vector<std::string> field_regions;
    bool field_hull = false;
    std::string field_out = "field";
    auto* fld = app.add_subcommand("field", "Solve the parameter field and dump one CSV grid per parameter");
    fld->add_option("sets", field_sets, "Correspondence file")->required()->check(CLI::ExistingFile);
    fld->add_option("-d,--domain", field_domain, "x1_min,x2_min,x1_max,x2_max")->required()->delimiter(',');
    fld->add_option("-r,--region", field_regions, "Set used as a Dirichlet region (repeatable; default all)");
    fld->add_flag("--hull", field_hull, "Use the convex hull of each set as its polygon");
    fld->add_option("-o,--out", field_out, "Output directory");

    // transform
    std::string tr_sets;
    std::vector<double> tr_domain;
    std::vector<std::string> tr_regions;
    std::vector<std::string> tr_curves;
    bool tr_hull = false;
    std::string tr_out;
    auto* tr = app.add_subcommand("transform", "Map pixel curves through the parameter field to GeoJSON");
    tr->add_option("sets", tr_sets, "Correspondence file")->required()->check(CLI::ExistingFile);
    tr->add_option("curves", tr_curves, "Pixel curve files")->required()->check(CLI::ExistingFile);
    tr->add_option("-d,--domain", tr_domain, "x1_min,x2_min,x1_max,x2_max")->required()->delimiter(',');
    tr->add_option("-r,--region", tr_regions, "Set used as a Dirichlet region (repeatable; default all)");
    tr->add_flag("--hull", tr_hull, "Use the convex hull of each set as its polygon");
    tr->add_option("-o,--out", tr_out, "Output GeoJSON file (default: stdout)");

    // compare
    std::vector<std::string> cmp_files;
    std::vector<std::string> cmp_pairs;
    std::vector<double> cmp_bands{10.0, 50.0, 100.0};
    std::string cmp_out;
    auto* cmp = app.add_subcommand("compare", "Hausdorff distances and matching lengths of geographic curves");
    cmp->add_option("files", cmp_files, "GeoJSON files with line features")->required()->check(CLI::ExistingFile);
    cmp->add_option("-p,--pair", cmp_pairs, "A,B curve names to compare (repeatable; default first vs each other)");
    cmp->add_option("-b,--bands", cmp_bands, "Band thresholds in km")->delimiter(',');
    cmp->add_option("-o,--out", cmp_out, "Write hausdorff.csv, matching.csv, sources.csv and metrics.json here");

    // run
    std::string run_config;
    std::string run_out;
    auto* run = app.add_subcommand("run", "Run a full experiment from a JSON config");
    run->add_option("config", run_config, "Experiment config")->required()->check(CLI::ExistingFile);
    run->add_option("-o,--out", run_out, "Output directory (overrides the config)");

    // stadia
    double stadia = 0.0;
    auto* st = app.add_subcommand("stadia", "Convert a distance in stadia to a kilometre interval");
    st->add_option("count", stadia, "Number of stadia")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // usage problems share the exit code of configuration errors
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_code(ErrorCategory::argument);
    }

    try {
        if (*fit) {
            const auto sets = pipeline::read_all_sets({fit_sets});
            report::MetricsReport r;
            r.fit = report::fit_report(sets);
            std::cout << report::text_report(r);
            std::cout << "Parameters (a1, a2, a3, a4, b1, b2)\n" << report::parameters_csv(r.fit);
            if (!fit_out.empty()) {
                emit(fit_out, {{"parameters.csv", report::parameters_csv(r.fit)},
                               {"transform_errors.csv", report::transform_errors_csv(r.fit)}});
            }
        } else if (*fld) {
            const auto f = solve_from_sets(field_sets, field_domain, field_regions, field_hull);
            std::vector<std::pair<std::string, std::string>> files;
            for (std::size_t p = 0; p < affine::AffineParams::size; ++p) {
                std::ostringstream s;
                io::write_field_csv(s, f, p);
                files.emplace_back("field_" + std::string(affine::AffineParams::names[p]) + ".csv", s.str());
            }
            std::cout << "grid " << f.grid.n1 << " x " << f.grid.n2 << ", residual " << f.residual << '\n';
            emit(field_out, files);
        } else if (*tr) {
            const auto f = solve_from_sets(tr_sets, tr_domain, tr_regions, tr_hull);
            std::vector<curves::DiscreteCurve> out;
            for (const auto& file : tr_curves) out.push_back(pipeline::transform_curve(f, io::read_pixel_curve(file)));
            const std::string doc = io::to_feature_collection(std::span<const curves::DiscreteCurve>(out)).dump() + "\n";
            if (tr_out.empty()) {
                std::cout << doc;
            } else {
                std::ofstream o(tr_out, std::ios::binary);
                o << doc;
                if (!o) throw Error(ErrorCategory::config, "cannot write '" + tr_out + "'");
            }
        } else if (*cmp) {
            std::vector<curves::DiscreteCurve> all;
            for (const auto& file : cmp_files) {
                for (auto& l : io::read_geo_lines(file)) all.push_back(curves::build_segments(std::move(l.points), l.name));
            }
            auto find = [&](const std::string& n) -> const curves::DiscreteCurve& {
                for (const auto& c : all)
                    if (c.name() == n) return c;
                throw Error(ErrorCategory::config, "unknown curve '" + n + "'");
            };
            std::vector<std::pair<std::string, std::string>> pairs;
            for (const auto& p : cmp_pairs) {
                const auto comma = p.find(',');
                if (comma == std::string::npos) throw Error(ErrorCategory::config, "--pair expects A,B");
                pairs.emplace_back(p.substr(0, comma), p.substr(comma + 1));
            }
            if (pairs.empty()) {
                for (std::size_t k = 1; k < all.size(); ++k) pairs.emplace_back(all[0].name(), all[k].name());
            }
            std::vector<curves::BandThreshold> bands;
            report::MetricsReport r;
            for (double b : cmp_bands) {
                bands.push_back(curves::BandThreshold::km(b));
                r.bands_m.push_back(bands.back().meters);
            }
            for (const auto& c : all) r.curves.push_back({c.name(), c.size(), c.length()});
            for (const auto& [a, b] : pairs) {
                r.sources.push_back({a, b, curves::source_distance(find(a), find(b))});
                r.comparisons.push_back(curves::compare(find(a), find(b), bands));
            }
            report::check_consistency(r);
            const auto text = report::text_report(r);
            // the fit tables are empty here; print from the curve summary onwards
            std::cout << text.substr(text.find("Curves"));
            if (!cmp_out.empty()) {
                emit(cmp_out, {{"sources.csv", report::sources_csv(r)},
                               {"hausdorff.csv", report::hausdorff_csv(r)},
                               {"matching.csv", report::matching_csv(r)},
                               {"metrics.json", report::to_json(r).dump(2) + "\n"}});
            }
        } else if (*run) {
            auto cfg = pipeline::load_config(run_config);
            if (!run_out.empty()) cfg.output_dir = run_out;
            const auto result = pipeline::run_experiment(cfg);
            const auto files = pipeline::render_outputs(result, cfg.dump_field);
            std::cout << report::text_report(result.report);
            emit(cfg.output_dir, files);
        } else if (*st) {
            const auto km = pipeline::stadia_to_km(stadia);
            std::cout << report::fixed(km.low, 3) << " - " << report::fixed(km.high, 3) << " km\n";
        }
    } catch (const Error& e) {
        std::cerr << "lagl: " << to_string(e.category()) << " error: " << e.what() << '\n';
        return exit_code(e.category());
    } catch (const std::exception& e) {
        std::cerr << "lagl: internal error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
