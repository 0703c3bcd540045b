#pragma once

// Harmonic extension of regional affine parameters over the pixel grid.
//
// Nodes inside each correspondence polygon, together with their 4-neighbour
// ring, carry Dirichlet values equal to the region's fitted affine parameters.
// Every other node satisfies the 5-point discrete Laplace equation, with the
// zero-Neumann boundary handled by reflecting the missing neighbour across the
// domain edge. All six parameters share one matrix and one factorisation.

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lagl/affine.hpp"
#include "lagl/error.hpp"

namespace lagl::field {

using affine::AffineParams;
using affine::PixelPoint;

/// Uniform grid with unit spacing; node (1,1) sits at `origin`.
struct GridDomain {
    PixelPoint origin;
    std::size_t n1 = 0;  // nodes along x1
    std::size_t n2 = 0;  // nodes along x2

    GridDomain() = default;
    GridDomain(PixelPoint origin_, std::size_t n1_, std::size_t n2_) : origin(origin_), n1(n1_), n2(n2_) {
        if (n1 < 3 || n2 < 3) {
            throw Error(ErrorCategory::config, "grid needs at least 3x3 nodes, got " + std::to_string(n1) + "x" +
                                                   std::to_string(n2));
        }
    }

    /// Grid covering the pixel rectangle [x1_min, x1_max] x [x2_min, x2_max].
    static GridDomain from_rectangle(double x1_min, double x2_min, double x1_max, double x2_max) {
        if (!(x1_max > x1_min) || !(x2_max > x2_min)) {
            throw Error(ErrorCategory::config, "domain rectangle is empty");
        }
        return GridDomain({x1_min, x2_min}, static_cast<std::size_t>(std::floor(x1_max - x1_min)) + 1,
                          static_cast<std::size_t>(std::floor(x2_max - x2_min)) + 1);
    }

    std::size_t size() const { return n1 * n2; }

    /// Linear index of the zero-based node (i, j).
    std::size_t index(std::size_t i, std::size_t j) const { return j * n1 + i; }
    std::size_t column(std::size_t k) const { return k % n1; }
    std::size_t row(std::size_t k) const { return k / n1; }

    PixelPoint center(std::size_t i, std::size_t j) const {
        return {origin.x1 + static_cast<double>(i), origin.x2 + static_cast<double>(j)};
    }

    bool on_boundary(std::size_t i, std::size_t j) const {
        return i == 0 || j == 0 || i + 1 == n1 || j + 1 == n2;
    }

    double x1_max() const { return origin.x1 + static_cast<double>(n1 - 1); }
    double x2_max() const { return origin.x2 + static_cast<double>(n2 - 1); }

    bool contains(const PixelPoint& x) const {
        return x.x1 >= origin.x1 && x.x1 <= x1_max() && x.x2 >= origin.x2 && x.x2 <= x2_max();
    }
};

// ---------------------------------------------------------------------------
// Polygons

namespace detail {

inline double cross(const PixelPoint& o, const PixelPoint& a, const PixelPoint& b) {
    return (a.x1 - o.x1) * (b.x2 - o.x2) - (a.x2 - o.x2) * (b.x1 - o.x1);
}

inline bool on_segment(const PixelPoint& p, const PixelPoint& a, const PixelPoint& b) {
    const double scale = std::max({std::abs(a.x1), std::abs(a.x2), std::abs(b.x1), std::abs(b.x2), 1.0});
    if (std::abs(cross(a, b, p)) > 1e-12 * scale * scale) {
        return false;
    }
    return p.x1 >= std::min(a.x1, b.x1) && p.x1 <= std::max(a.x1, b.x1) && p.x2 >= std::min(a.x2, b.x2) &&
           p.x2 <= std::max(a.x2, b.x2);
}

inline int orientation(const PixelPoint& a, const PixelPoint& b, const PixelPoint& c) {
    const double v = cross(a, b, c);
    return (v > 0.0) - (v < 0.0);
}

inline bool segments_intersect(const PixelPoint& p1, const PixelPoint& p2, const PixelPoint& q1,
                               const PixelPoint& q2) {
    const int o1 = orientation(p1, p2, q1);
    const int o2 = orientation(p1, p2, q2);
    const int o3 = orientation(q1, q2, p1);
    const int o4 = orientation(q1, q2, p2);
    if (o1 != o2 && o3 != o4) {
        return true;
    }
    return (o1 == 0 && on_segment(q1, p1, p2)) || (o2 == 0 && on_segment(q2, p1, p2)) ||
           (o3 == 0 && on_segment(p1, q1, q2)) || (o4 == 0 && on_segment(p2, q1, q2));
}

}  // namespace detail

/// Even-odd containment with points on an edge counted as inside.
inline bool inside_or_on(const PixelPoint& p, std::span<const PixelPoint> polygon) {
    const std::size_t n = polygon.size();
    bool inside = false;
    for (std::size_t k = 0, prev = n - 1; k < n; prev = k++) {
        const auto& a = polygon[prev];
        const auto& b = polygon[k];
        if (detail::on_segment(p, a, b)) {
            return true;
        }
        if ((a.x2 > p.x2) != (b.x2 > p.x2)) {
            const double x = a.x1 + (p.x2 - a.x2) * (b.x1 - a.x1) / (b.x2 - a.x2);
            if (p.x1 < x) {
                inside = !inside;
            }
        }
    }
    return inside;
}

/// True when no two non-adjacent edges of the closed polygon meet.
inline bool is_simple(std::span<const PixelPoint> polygon) {
    const std::size_t n = polygon.size();
    if (n < 3) {
        return false;
    }
    for (std::size_t e = 0; e < n; ++e) {
        const auto& a1 = polygon[e];
        const auto& a2 = polygon[(e + 1) % n];
        if (a1 == a2) {
            return false;
        }
        for (std::size_t g = e + 1; g < n; ++g) {
            const bool adjacent = g == e + 1 || (e == 0 && g == n - 1);
            if (adjacent) {
                continue;
            }
            if (detail::segments_intersect(a1, a2, polygon[g], polygon[(g + 1) % n])) {
                return false;
            }
        }
    }
    return true;
}

/// Counter-clockwise convex hull (monotone chain), collinear points dropped.
inline std::vector<PixelPoint> convex_hull(std::vector<PixelPoint> points) {
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    if (points.size() < 3) {
        return points;
    }
    std::vector<PixelPoint> hull(2 * points.size());
    std::size_t k = 0;
    for (const auto& p : points) {
        while (k >= 2 && detail::cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = points.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && detail::cross(hull[k - 2], hull[k - 1], points[i]) <= 0.0) --k;
        hull[k++] = points[i];
    }
    hull.resize(k - 1);
    return hull;
}

enum class PolygonMode { ordered, hull };

struct DirichletRegion {
    std::string name;
    std::vector<PixelPoint> polygon;
    AffineParams value;
};

/// Region from a correspondence set: its polygon (user order or convex hull) and its fitted affine.
inline DirichletRegion make_region(const affine::CorrespondenceSet& set, PolygonMode mode = PolygonMode::ordered) {
    std::vector<PixelPoint> vertices;
    vertices.reserve(set.pairs.size());
    for (const auto& p : set.pairs) {
        if (vertices.empty() || !(vertices.back() == p.source)) {
            vertices.push_back(p.source);
        }
    }
    if (vertices.size() > 1 && vertices.front() == vertices.back()) {
        vertices.pop_back();
    }
    if (mode == PolygonMode::hull) {
        vertices = convex_hull(std::move(vertices));
    }
    if (!is_simple(vertices)) {
        throw Error(ErrorCategory::degenerate,
                    "polygon of region '" + set.name + "' is not simple; reorder its points or use the hull mode");
    }
    return {set.name, std::move(vertices), affine::fit_affine(set)};
}

// ---------------------------------------------------------------------------
// Rasterisation

struct RasterizedRegion {
    std::vector<std::size_t> nodes;  // sorted linear indices, interior and ring
    std::size_t interior_count = 0;
};

/// Nodes inside or on the polygon plus their 4-neighbour ring.
inline RasterizedRegion rasterize_envelope(const DirichletRegion& region, const GridDomain& grid) {
    const auto& poly = region.polygon;
    if (poly.size() < 3) {
        throw Error(ErrorCategory::degenerate, "region '" + region.name + "' needs at least 3 polygon vertices");
    }
    double lo1 = poly[0].x1, hi1 = poly[0].x1, lo2 = poly[0].x2, hi2 = poly[0].x2;
    for (const auto& v : poly) {
        if (!grid.contains(v)) {
            throw Error(ErrorCategory::range, "region '" + region.name + "' has a vertex outside the grid domain");
        }
        lo1 = std::min(lo1, v.x1);
        hi1 = std::max(hi1, v.x1);
        lo2 = std::min(lo2, v.x2);
        hi2 = std::max(hi2, v.x2);
    }
    const auto first1 = static_cast<std::size_t>(std::ceil(lo1 - grid.origin.x1));
    const auto last1 = static_cast<std::size_t>(std::floor(hi1 - grid.origin.x1));
    const auto first2 = static_cast<std::size_t>(std::ceil(lo2 - grid.origin.x2));
    const auto last2 = static_cast<std::size_t>(std::floor(hi2 - grid.origin.x2));

    std::vector<std::uint8_t> mark(grid.size(), 0);
    RasterizedRegion out;
    for (std::size_t j = first2; j <= last2 && j < grid.n2; ++j) {
        for (std::size_t i = first1; i <= last1 && i < grid.n1; ++i) {
            if (inside_or_on(grid.center(i, j), poly)) {
                mark[grid.index(i, j)] = 1;
                ++out.interior_count;
            }
        }
    }
    if (out.interior_count == 0) {
        throw Error(ErrorCategory::degenerate, "region '" + region.name + "' encloses no grid node");
    }

    auto claim = [&](std::size_t i, std::size_t j) {
        if (grid.on_boundary(i, j)) {
            throw Error(ErrorCategory::range, "region '" + region.name + "' envelope touches the domain boundary at node (" +
                                                  std::to_string(i + 1) + ", " + std::to_string(j + 1) + ")");
        }
        auto& m = mark[grid.index(i, j)];
        if (m == 0) m = 2;
    };
    for (std::size_t j = first2; j <= last2 && j < grid.n2; ++j) {
        for (std::size_t i = first1; i <= last1 && i < grid.n1; ++i) {
            if (mark[grid.index(i, j)] != 1) continue;
            claim(i, j);
            claim(i - 1, j);  // i, j > 0 here because interior nodes are never on the boundary
            claim(i + 1, j);
            claim(i, j - 1);
            claim(i, j + 1);
        }
    }
    for (std::size_t k = 0; k < mark.size(); ++k) {
        if (mark[k] != 0) out.nodes.push_back(k);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dirichlet data

/// Per-node Dirichlet assignment: `owner[k]` indexes `values`, or is -1 for a free node.
struct DirichletNodes {
    std::vector<std::int32_t> owner;
    std::vector<AffineParams> values;
    std::vector<std::string> names;

    explicit DirichletNodes(const GridDomain& grid) : owner(grid.size(), -1) {}

    std::int32_t add_value(const AffineParams& v, std::string name = {}) {
        values.push_back(v);
        names.push_back(std::move(name));
        return static_cast<std::int32_t>(values.size() - 1);
    }

    /// Fix one node; a second claim with a different value is a conflict.
    void fix(const GridDomain& grid, std::size_t k, std::int32_t value_id) {
        auto& o = owner[k];
        if (o >= 0 && o != value_id && !(values[static_cast<std::size_t>(o)] == values[static_cast<std::size_t>(value_id)])) {
            throw Error(ErrorCategory::conflict, "node (" + std::to_string(grid.column(k) + 1) + ", " +
                                                     std::to_string(grid.row(k) + 1) + ") claimed by regions '" +
                                                     names[static_cast<std::size_t>(o)] + "' and '" +
                                                     names[static_cast<std::size_t>(value_id)] + "' with different values");
        }
        if (o < 0) o = value_id;
    }

    std::size_t fixed_count() const {
        return static_cast<std::size_t>(std::count_if(owner.begin(), owner.end(), [](std::int32_t o) { return o >= 0; }));
    }
};

inline DirichletNodes dirichlet_from_regions(const GridDomain& grid, std::span<const DirichletRegion> regions) {
    DirichletNodes d(grid);
    for (const auto& r : regions) {
        const auto raster = rasterize_envelope(r, grid);
        const auto id = d.add_value(r.value, r.name);
        for (std::size_t k : raster.nodes) {
            d.fix(grid, k, id);
        }
    }
    return d;
}

// ---------------------------------------------------------------------------
// Assembly

/// Equation classes: A Dirichlet, B interior, C..F corners, G..J edges.
enum class NodeCase : char { A = 'A', B = 'B', C = 'C', D = 'D', E = 'E', F = 'F', G = 'G', H = 'H', I = 'I', J = 'J' };

inline NodeCase classify(const GridDomain& grid, std::size_t i, std::size_t j, bool dirichlet) {
    if (dirichlet) return NodeCase::A;
    const bool left = i == 0, right = i + 1 == grid.n1, top = j == 0, bottom = j + 1 == grid.n2;
    if (left && top) return NodeCase::C;
    if (left && bottom) return NodeCase::D;
    if (right && top) return NodeCase::E;
    if (right && bottom) return NodeCase::F;
    if (right) return NodeCase::G;
    if (bottom) return NodeCase::H;
    if (top) return NodeCase::I;
    if (left) return NodeCase::J;
    return NodeCase::B;
}

using SparseMatrix = Eigen::SparseMatrix<double>;

struct LaplaceSystem {
    GridDomain grid;
    SparseMatrix matrix;                                  // shared by all six parameters
    Eigen::Matrix<double, Eigen::Dynamic, 6> rhs;         // one column per parameter
    std::vector<std::int32_t> owner;                      // Dirichlet owner per node, -1 if free
    std::vector<AffineParams> values;

    NodeCase node_case(std::size_t i, std::size_t j) const {
        return classify(grid, i, j, owner[grid.index(i, j)] >= 0);
    }
};

/// Assemble rows for every node. Dirichlet rows are identity rows; the rest
/// are the 5-point stencil with reflected neighbours on the domain edges.
inline LaplaceSystem assemble_system(const GridDomain& grid, DirichletNodes dirichlet) {
    const std::size_t n = grid.size();
    LaplaceSystem sys;
    sys.grid = grid;
    sys.rhs.setZero(static_cast<Eigen::Index>(n), 6);
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(5 * n);

    for (std::size_t j = 0; j < grid.n2; ++j) {
        for (std::size_t i = 0; i < grid.n1; ++i) {
            const auto k = static_cast<Eigen::Index>(grid.index(i, j));
            const std::int32_t o = dirichlet.owner[static_cast<std::size_t>(k)];
            if (o >= 0) {
                triplets.emplace_back(k, k, 1.0);
                const auto& v = dirichlet.values[static_cast<std::size_t>(o)];
                for (std::size_t p = 0; p < AffineParams::size; ++p) {
                    sys.rhs(k, static_cast<Eigen::Index>(p)) = v[p];
                }
                continue;
            }
            triplets.emplace_back(k, k, 4.0);
            auto couple = [&](std::size_t ni, std::size_t nj, double w) {
                triplets.emplace_back(k, static_cast<Eigen::Index>(grid.index(ni, nj)), w);
            };
            // x1 direction
            if (i == 0) {
                couple(i + 1, j, -2.0);
            } else if (i + 1 == grid.n1) {
                couple(i - 1, j, -2.0);
            } else {
                couple(i - 1, j, -1.0);
                couple(i + 1, j, -1.0);
            }
            // x2 direction
            if (j == 0) {
                couple(i, j + 1, -2.0);
            } else if (j + 1 == grid.n2) {
                couple(i, j - 1, -2.0);
            } else {
                couple(i, j - 1, -1.0);
                couple(i, j + 1, -1.0);
            }
        }
    }
    sys.matrix.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
    sys.matrix.makeCompressed();
    sys.owner = std::move(dirichlet.owner);
    sys.values = std::move(dirichlet.values);
    return sys;
}

inline LaplaceSystem assemble_system(const GridDomain& grid, std::span<const DirichletRegion> regions) {
    return assemble_system(grid, dirichlet_from_regions(grid, regions));
}

// ---------------------------------------------------------------------------
// Solution

enum class SolverPath { sparse_lu, bicgstab };

struct ParameterField {
    GridDomain grid;
    std::array<std::vector<double>, AffineParams::size> values;
    std::vector<std::int32_t> owner;  // node classification mask: Dirichlet owner or -1
    double residual = 0.0;            // achieved max-norm residual over all six systems
    SolverPath solver = SolverPath::sparse_lu;

    double at(std::size_t param, std::size_t i, std::size_t j) const { return values[param][grid.index(i, j)]; }

    AffineParams node(std::size_t i, std::size_t j) const {
        AffineParams t;
        const std::size_t k = grid.index(i, j);
        for (std::size_t p = 0; p < AffineParams::size; ++p) t[p] = values[p][k];
        return t;
    }
};

inline double residual_norm(const SparseMatrix& m, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
    return (m * x - b).cwiseAbs().maxCoeff();
}

/// Solve all six systems. Direct sparse LU by default; BiCGSTAB only if the LU
/// path cannot meet the residual contract ||Mu - f||_inf <= 1e-8 max(1, ||f||_inf).
inline ParameterField solve_field(const LaplaceSystem& sys) {
    const bool any_fixed = std::any_of(sys.owner.begin(), sys.owner.end(), [](std::int32_t o) { return o >= 0; });
    if (!any_fixed) {
        throw Error(ErrorCategory::degenerate, "no Dirichlet nodes: the pure Neumann system is singular");
    }

    const auto n = sys.matrix.rows();
    Eigen::Matrix<double, Eigen::Dynamic, 6> solution(n, 6);

    // Free rows annihilate constants, so shifting every Dirichlet value by the
    // midpoint of its range shifts the solution by the same amount. Solving for
    // the deviation keeps round-off proportional to the spread, not the magnitude.
    Eigen::Matrix<double, 1, 6> shift;
    for (Eigen::Index p = 0; p < 6; ++p) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto& v : sys.values) {
            lo = std::min(lo, v[static_cast<std::size_t>(p)]);
            hi = std::max(hi, v[static_cast<std::size_t>(p)]);
        }
        shift(p) = sys.values.empty() ? 0.0 : 0.5 * (lo + hi);
    }
    Eigen::Matrix<double, Eigen::Dynamic, 6> rhs = sys.rhs;
    for (Eigen::Index k = 0; k < n; ++k) {
        if (sys.owner[static_cast<std::size_t>(k)] >= 0) rhs.row(k) -= shift;
    }
    SolverPath path = SolverPath::sparse_lu;

    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(sys.matrix);
    lu.factorize(sys.matrix);
    bool lu_ok = lu.info() == Eigen::Success;
    if (lu_ok) {
        solution = lu.solve(rhs);
        lu_ok = lu.info() == Eigen::Success;
    }

    auto tolerance = [&](Eigen::Index p) { return 1e-8 * std::max(1.0, sys.rhs.col(p).cwiseAbs().maxCoeff()); };

    for (Eigen::Index p = 0; p < 6; ++p) {
        const Eigen::VectorXd b = rhs.col(p);
        if (lu_ok) {
            // one round of iterative refinement is usually enough to reach round-off
            for (int pass = 0; pass < 2 && residual_norm(sys.matrix, solution.col(p), b) > 1e-2 * tolerance(p); ++pass) {
                const Eigen::VectorXd r = b - sys.matrix * solution.col(p);
                solution.col(p) += lu.solve(r);
            }
        }
        if (!lu_ok || residual_norm(sys.matrix, solution.col(p), b) > tolerance(p)) {
            Eigen::BiCGSTAB<SparseMatrix, Eigen::IncompleteLUT<double>> it;
            it.setTolerance(1e-14);
            it.setMaxIterations(20 * static_cast<int>(std::sqrt(static_cast<double>(n))) + 1000);
            it.compute(sys.matrix);
            const Eigen::VectorXd guess = lu_ok ? Eigen::VectorXd(solution.col(p)) : Eigen::VectorXd::Zero(n);
            solution.col(p) = it.solveWithGuess(b, guess);
            path = SolverPath::bicgstab;
        }
        solution.col(p).array() += shift(p);
    }

    // Dirichlet rows are reproduced exactly, then the contract is checked on the final values.
    for (Eigen::Index k = 0; k < n; ++k) {
        const std::int32_t o = sys.owner[static_cast<std::size_t>(k)];
        if (o < 0) continue;
        const auto& v = sys.values[static_cast<std::size_t>(o)];
        for (Eigen::Index p = 0; p < 6; ++p) solution(k, p) = v[static_cast<std::size_t>(p)];
    }

    ParameterField out;
    out.grid = sys.grid;
    out.owner = sys.owner;
    out.solver = path;
    for (Eigen::Index p = 0; p < 6; ++p) {
        const Eigen::VectorXd b = sys.rhs.col(p);
        const Eigen::VectorXd x = solution.col(p);
        const double r = residual_norm(sys.matrix, x, b);
        out.residual = std::max(out.residual, r);
        if (!(r <= tolerance(p)) || !x.allFinite()) {
            throw Error(ErrorCategory::convergence, "parameter " + std::string(AffineParams::names[static_cast<std::size_t>(p)]) +
                                                        ": residual " + std::to_string(r) + " exceeds " +
                                                        std::to_string(tolerance(p)));
        }
        out.values[static_cast<std::size_t>(p)].assign(x.data(), x.data() + n);
    }
    return out;
}

/// Bilinear interpolation of the six parameter grids at a pixel position.
inline AffineParams sample_field(const ParameterField& field, const PixelPoint& x) {
    const auto& g = field.grid;
    if (!std::isfinite(x.x1) || !std::isfinite(x.x2) || !g.contains(x)) {
        throw Error(ErrorCategory::range, "pixel (" + std::to_string(x.x1) + ", " + std::to_string(x.x2) +
                                              ") lies outside the field domain");
    }
    const double u = x.x1 - g.origin.x1;
    const double v = x.x2 - g.origin.x2;
    const auto i = std::min(static_cast<std::size_t>(u), g.n1 - 2);
    const auto j = std::min(static_cast<std::size_t>(v), g.n2 - 2);
    const double fu = u - static_cast<double>(i);
    const double fv = v - static_cast<double>(j);
    const std::size_t k00 = g.index(i, j), k10 = g.index(i + 1, j), k01 = g.index(i, j + 1), k11 = g.index(i + 1, j + 1);
    AffineParams t;
    for (std::size_t p = 0; p < AffineParams::size; ++p) {
        const auto& f = field.values[p];
        t[p] = (1.0 - fu) * (1.0 - fv) * f[k00] + fu * (1.0 - fv) * f[k10] + (1.0 - fu) * fv * f[k01] + fu * fv * f[k11];
    }
    return t;
}

}  // namespace lagl::field
