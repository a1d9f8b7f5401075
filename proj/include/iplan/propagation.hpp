#pragma once

// Multi-wall pathloss model and coverage evaluation.
//
// Pathloss between a transmitter and a receiver is the log-distance formula
// plus one fixed attenuation per wall crossed on the direct path, with
// openings (doors, windows) substituting their own material inside their
// span:
//
//   PL(d) = PL0 + 10 * n * log10(max(d, d0) / d0) + sum(attenuation of each crossing)
//
// A coverage grid rasterizes the plan boundary and stores, per cell, the
// best-server (minimum) pathloss over all APs. Everything here is pure and
// deterministic; grids for different deployments may be computed concurrently.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "iplan/geometry.hpp"

namespace iplan {

// APs may not sit closer to a wall than this (meters).
inline constexpr double kApWallClearance = 1e-3;

struct RadioConfig {
    double frequency_mhz = 2400.0;
    double reference_pathloss_db = 40.05;   // PL0 at the reference distance
    double reference_distance_m = 1.0;
    double pathloss_exponent = 2.0;

    bool valid() const {
        return frequency_mhz > 0.0 && reference_distance_m > 0.0 && pathloss_exponent >= 1.0;
    }
};

// Per-crossing attenuations representative of published multi-wall fits.
inline std::vector<Material> default_materials() {
    return {{"concrete", 12.0}, {"brick", 8.0}, {"drywall", 3.0}, {"glass", 2.0}, {"wood", 3.0}};
}

struct Deployment {
    std::vector<Point2D> aps;
    RadioConfig config;
};

struct InvalidDeployment : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// First violated deployment invariant as a message, or nothing when valid.
// APs must exist, respect the cap, sit strictly inside the boundary, and keep
// kApWallClearance to every wall.
inline std::optional<std::string> deployment_violation(
    const FloorPlan& plan, const Deployment& deployment,
    std::size_t max_aps = std::numeric_limits<std::size_t>::max()) {
    if (deployment.aps.empty()) return "deployment has no aps";
    if (deployment.aps.size() > max_aps)
        return "deployment has " + std::to_string(deployment.aps.size()) + " aps, max is " +
               std::to_string(max_aps);
    for (std::size_t i = 0; i < deployment.aps.size(); ++i) {
        const Point2D p = deployment.aps[i];
        if (!is_finite(p)) return "ap " + std::to_string(i) + " has non-finite coordinates";
        if (!plan.boundary.strictly_contains(p))
            return "ap " + std::to_string(i) + " outside boundary";
        if (min_wall_distance(plan, p) <= kApWallClearance)
            return "ap " + std::to_string(i) + " too close to a wall";
    }
    return std::nullopt;
}

// ============================================================================
// Pathloss
// ============================================================================

namespace detail {

inline double log_distance_db(double d, const RadioConfig& config) {
    const double clamped = std::max(d, config.reference_distance_m);
    return config.reference_pathloss_db +
           10.0 * config.pathloss_exponent * std::log10(clamped / config.reference_distance_m);
}

inline double crossing_loss_db(const FloorPlan& plan, const std::vector<WallCrossing>& crossings) {
    double loss = 0.0;
    for (const WallCrossing& c : crossings) loss += plan.materials[c.material].attenuation_db;
    return loss;
}

}  // namespace detail

inline double pathloss(Point2D tx, Point2D rx, const FloorPlan& plan,
                       const RadioConfig& config = {}) {
    return detail::log_distance_db(distance(tx, rx), config) +
           detail::crossing_loss_db(plan, wall_crossings({tx, rx}, plan));
}

inline double pathloss(Point2D tx, Point2D rx, const FloorPlan& plan, const SpatialIndex& index,
                       const RadioConfig& config = {}) {
    return detail::log_distance_db(distance(tx, rx), config) +
           detail::crossing_loss_db(plan, wall_crossings({tx, rx}, plan, index));
}

// ============================================================================
// Coverage grid
// ============================================================================

struct CoverageGrid {
    Point2D origin;          // lower-left corner of the rasterized boundary
    double cell_size = 0.25;
    int ncols = 0;
    int nrows = 0;
    std::vector<double> values;   // row-major, row 0 = bottom row; best-server dB

    double value(int ix, int iy) const { return values[static_cast<std::size_t>(iy) * ncols + ix]; }
    double& value(int ix, int iy) { return values[static_cast<std::size_t>(iy) * ncols + ix]; }

    Point2D cell_center(int ix, int iy) const {
        return {origin.x + (ix + 0.5) * cell_size, origin.y + (iy + 0.5) * cell_size};
    }
};

// Rasterizes the plan boundary (cells of cell_size, centers evaluated) and
// fills each cell with the minimum pathloss over the deployment's APs.
// Throws InvalidDeployment when the deployment breaks its invariants.
inline CoverageGrid compute_grid(const FloorPlan& plan, const Deployment& deployment,
                                 double cell_size = 0.25) {
    if (cell_size <= 0.0) throw std::invalid_argument("compute_grid: cell_size must be > 0");
    if (const auto why = deployment_violation(plan, deployment))
        throw InvalidDeployment("compute_grid: " + *why);

    CoverageGrid grid;
    grid.origin = plan.boundary.origin;
    grid.cell_size = cell_size;
    grid.ncols = std::max(1, static_cast<int>(std::ceil(plan.boundary.width / cell_size - 1e-9)));
    grid.nrows = std::max(1, static_cast<int>(std::ceil(plan.boundary.depth / cell_size - 1e-9)));
    grid.values.assign(static_cast<std::size_t>(grid.ncols) * grid.nrows,
                       std::numeric_limits<double>::infinity());

    const SpatialIndex index(plan);
    for (int iy = 0; iy < grid.nrows; ++iy) {
        for (int ix = 0; ix < grid.ncols; ++ix) {
            const Point2D rx = grid.cell_center(ix, iy);
            double best = std::numeric_limits<double>::infinity();
            for (const Point2D& ap : deployment.aps)
                best = std::min(best, pathloss(ap, rx, plan, index, deployment.config));
            grid.value(ix, iy) = best;
        }
    }
    return grid;
}

// ============================================================================
// Coverage statistics
// ============================================================================

struct CoverageStats {
    double coverage_fraction = 0.0;
    double threshold_db = 0.0;
    std::size_t covered_cells = 0;
    std::size_t total_cells = 0;
    Point2D worst_cell;            // center of the argmax-pathloss cell
    double worst_pathloss_db = 0.0;
};

// Covered means strictly below the threshold. The worst cell is the first
// maximum in storage (row-major, bottom row first) order.
inline CoverageStats coverage_fraction(const CoverageGrid& grid, double threshold_db) {
    CoverageStats stats;
    stats.threshold_db = threshold_db;
    stats.total_cells = grid.values.size();
    double worst = -std::numeric_limits<double>::infinity();
    int worst_ix = 0, worst_iy = 0;
    for (int iy = 0; iy < grid.nrows; ++iy) {
        for (int ix = 0; ix < grid.ncols; ++ix) {
            const double v = grid.value(ix, iy);
            if (v < threshold_db) ++stats.covered_cells;
            if (v > worst) {
                worst = v;
                worst_ix = ix;
                worst_iy = iy;
            }
        }
    }
    stats.coverage_fraction =
        static_cast<double>(stats.covered_cells) / static_cast<double>(stats.total_cells);
    stats.worst_cell = grid.cell_center(worst_ix, worst_iy);
    stats.worst_pathloss_db = worst;
    return stats;
}

// ============================================================================
// Worst regions
// ============================================================================

struct WorstRegion {
    Point2D center;
    double pathloss_db = 0.0;
};

// Top-k worst cells, greedily suppressing any cell within min_separation of
// an already-picked one so the k picks describe distinct trouble spots.
// Ties break in storage order, keeping the result deterministic.
inline std::vector<WorstRegion> worst_regions(const CoverageGrid& grid, std::size_t k = 5,
                                              double min_separation = 2.0) {
    struct Cell {
        double v;
        int ix, iy;
    };
    std::vector<Cell> cells;
    cells.reserve(grid.values.size());
    for (int iy = 0; iy < grid.nrows; ++iy)
        for (int ix = 0; ix < grid.ncols; ++ix) cells.push_back({grid.value(ix, iy), ix, iy});
    std::stable_sort(cells.begin(), cells.end(),
                     [](const Cell& a, const Cell& b) { return a.v > b.v; });

    std::vector<WorstRegion> out;
    for (const Cell& c : cells) {
        if (out.size() >= k) break;
        const Point2D p = grid.cell_center(c.ix, c.iy);
        bool too_close = false;
        for (const WorstRegion& r : out)
            if (distance(p, r.center) < min_separation) {
                too_close = true;
                break;
            }
        if (!too_close) out.push_back({p, c.v});
    }
    return out;
}

// ============================================================================
// Heatmap export
// ============================================================================

namespace detail {

// Linear color map over [vmin, threshold): blue at vmin through red just
// below the threshold; cells at or past the threshold render dark gray.
inline void heatmap_pixel(double v, double vmin, double threshold, unsigned char rgb[3]) {
    if (v >= threshold) {
        rgb[0] = rgb[1] = rgb[2] = 40;
        return;
    }
    const double span = threshold - vmin;
    const double t = span > 0.0 ? std::clamp((v - vmin) / span, 0.0, 1.0) : 0.0;
    rgb[0] = static_cast<unsigned char>(std::lround(255.0 * t));
    rgb[1] = 0;
    rgb[2] = static_cast<unsigned char>(std::lround(255.0 * (1.0 - t)));
}

}  // namespace detail

// Writes the grid as a binary portable pixmap (P6), one pixel per cell, top
// row of the image = top row of the plan. Covered cells sweep blue (best)
// to red (worst still covered) linearly in dB; uncovered cells are gray.
// Byte-deterministic for identical inputs.
inline void export_heatmap(const CoverageGrid& grid, double threshold_db,
                           const std::string& path) {
    double vmin = std::numeric_limits<double>::infinity();
    for (double v : grid.values)
        if (v < threshold_db) vmin = std::min(vmin, v);
    if (!std::isfinite(vmin)) vmin = threshold_db;   // nothing covered: everything renders gray

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("export_heatmap: cannot open " + path);
    out << "P6\n" << grid.ncols << " " << grid.nrows << "\n255\n";
    for (int iy = grid.nrows - 1; iy >= 0; --iy) {
        for (int ix = 0; ix < grid.ncols; ++ix) {
            unsigned char rgb[3];
            detail::heatmap_pixel(grid.value(ix, iy), vmin, threshold_db, rgb);
            out.write(reinterpret_cast<const char*>(rgb), 3);
        }
    }
    if (!out) throw IoError("export_heatmap: write failed for " + path);
}

}  // namespace iplan
