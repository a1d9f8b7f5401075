#pragma once

// Floor-plan data model and 2D geometry: segment intersection, wall-crossing
// queries (with opening-aware effective materials), a uniform-grid spatial
// index, plan validation, and door-to-door circulation checks.
//
// All types are plain values and immutable once built; every operation here
// is pure, so concurrent callers need no synchronization.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace iplan {

// Tolerance for containment / collinearity tests, in meters.
inline constexpr double kCoordTol = 1e-6;
// Walls shorter than this are degenerate.
inline constexpr double kMinWallLength = 1e-6;

// ============================================================================
// Primitive types
// ============================================================================

struct Point2D {
    double x = 0.0;
    double y = 0.0;
};

inline Point2D operator+(Point2D a, Point2D b) { return {a.x + b.x, a.y + b.y}; }
inline Point2D operator-(Point2D a, Point2D b) { return {a.x - b.x, a.y - b.y}; }
inline Point2D operator*(double s, Point2D p) { return {s * p.x, s * p.y}; }
inline bool operator==(Point2D a, Point2D b) { return a.x == b.x && a.y == b.y; }

inline double dot(Point2D a, Point2D b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2D a, Point2D b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2D p) { return std::hypot(p.x, p.y); }
inline double distance(Point2D a, Point2D b) { return norm(b - a); }
inline bool is_finite(Point2D p) { return std::isfinite(p.x) && std::isfinite(p.y); }

// Lexicographic (x, y) order; the project-wide deterministic tie-break.
inline bool lex_less(Point2D a, Point2D b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
}

struct Segment {
    Point2D a;
    Point2D b;
};

inline double length(const Segment& s) { return distance(s.a, s.b); }

// Distance from point to closed segment.
inline double point_segment_distance(Point2D p, const Segment& s) {
    const Point2D d = s.b - s.a;
    const double len2 = dot(d, d);
    if (len2 <= 0.0) return distance(p, s.a);
    const double t = std::clamp(dot(p - s.a, d) / len2, 0.0, 1.0);
    return distance(p, s.a + t * d);
}

struct Rect {
    Point2D origin;   // lower-left corner
    double width = 0.0;
    double depth = 0.0;

    Point2D center() const { return {origin.x + width / 2.0, origin.y + depth / 2.0}; }
    double max_x() const { return origin.x + width; }
    double max_y() const { return origin.y + depth; }

    bool contains(Point2D p, double tol = 0.0) const {
        return p.x >= origin.x - tol && p.x <= max_x() + tol &&
               p.y >= origin.y - tol && p.y <= max_y() + tol;
    }
    bool strictly_contains(Point2D p) const {
        return p.x > origin.x && p.x < max_x() && p.y > origin.y && p.y < max_y();
    }
};

// ============================================================================
// Plan types
// ============================================================================

struct Material {
    std::string name;
    double attenuation_db = 0.0;   // loss per crossing
};

struct Wall {
    Point2D a;
    Point2D b;
    std::size_t material = 0;      // index into FloorPlan::materials
    double thickness = 0.1;        // metadata only; geometry treats walls as segments

    Segment segment() const { return {a, b}; }
    double length() const { return distance(a, b); }
};

enum class OpeningKind { Door, Window };

struct Opening {
    std::size_t wall = 0;          // index into FloorPlan::walls
    double offset = 0.0;           // meters along the wall from endpoint a
    double width = 0.0;
    OpeningKind kind = OpeningKind::Door;
    std::size_t material = 0;      // effective material when crossed inside the span
};

struct Room {
    Point2D origin;                // lower-left corner; rooms are axis-aligned
    double width = 0.0;
    double depth = 0.0;
    std::string label;

    Rect rect() const { return {origin, width, depth}; }
    Point2D center() const { return rect().center(); }
};

struct FloorPlan {
    Rect boundary;
    std::vector<Material> materials;
    std::vector<Wall> walls;
    std::vector<Opening> openings;
    std::vector<Room> rooms;

    std::size_t add_material(std::string name, double attenuation_db) {
        for (std::size_t i = 0; i < materials.size(); ++i)
            if (materials[i].name == name) return i;
        materials.push_back({std::move(name), attenuation_db});
        return materials.size() - 1;
    }

    std::optional<std::size_t> find_material(const std::string& name) const {
        for (std::size_t i = 0; i < materials.size(); ++i)
            if (materials[i].name == name) return i;
        return std::nullopt;
    }

    std::size_t add_wall(Point2D a, Point2D b, std::size_t material, double thickness = 0.1) {
        walls.push_back({a, b, material, thickness});
        return walls.size() - 1;
    }

    std::size_t add_room(Point2D origin, double width, double depth, std::string label) {
        rooms.push_back({origin, width, depth, std::move(label)});
        return rooms.size() - 1;
    }

    std::size_t add_opening(std::size_t wall, double offset, double width, OpeningKind kind,
                            std::size_t material) {
        openings.push_back({wall, offset, width, kind, material});
        return openings.size() - 1;
    }
};

struct InvalidPlan : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ============================================================================
// Segment intersection
// ============================================================================

namespace detail {

struct IntersectParams {
    double t = 0.0;   // parameter along the first segment
    double u = 0.0;   // parameter along the second segment
    Point2D point;
};

// Proper interior crossing only: parallel, collinear, disjoint, and
// endpoint-touching pairs all yield nothing.
inline std::optional<IntersectParams> intersect_params(const Segment& s1, const Segment& s2) {
    const Point2D r = s1.b - s1.a;
    const Point2D s = s2.b - s2.a;
    const double denom = cross(r, s);
    const double scale = norm(r) * norm(s);
    if (std::abs(denom) <= 1e-12 * scale) return std::nullopt;   // parallel or collinear

    const Point2D qp = s2.a - s1.a;
    const double t = cross(qp, s) / denom;
    const double u = cross(qp, r) / denom;
    constexpr double eps = 1e-12;
    if (t <= eps || t >= 1.0 - eps || u <= eps || u >= 1.0 - eps) return std::nullopt;
    return IntersectParams{t, u, s1.a + t * r};
}

}  // namespace detail

inline std::optional<Point2D> segment_intersect(const Segment& a, const Segment& b) {
    if (auto hit = detail::intersect_params(a, b)) return hit->point;
    return std::nullopt;
}

// ============================================================================
// Wall crossings
// ============================================================================

struct WallCrossing {
    std::size_t wall = 0;
    Point2D point;
    std::size_t material = 0;   // effective material (opening material inside a span)
    double path_t = 0.0;        // parameter along the queried path, used for ordering
};

namespace detail {

inline std::optional<WallCrossing> crossing_on_wall(const Segment& path, const FloorPlan& plan,
                                                    std::size_t wall_index) {
    const Wall& w = plan.walls[wall_index];
    const auto hit = intersect_params(path, w.segment());
    if (!hit) return std::nullopt;

    WallCrossing c;
    c.wall = wall_index;
    c.point = hit->point;
    c.path_t = hit->t;
    c.material = w.material;

    // The crossing projects to offset u * |wall| along the wall; if that lands
    // inside an opening's span, the opening's material applies.
    const double offset = hit->u * w.length();
    for (const Opening& op : plan.openings) {
        if (op.wall != wall_index) continue;
        if (offset >= op.offset && offset <= op.offset + op.width) {
            c.material = op.material;
            break;
        }
    }
    return c;
}

inline void sort_crossings(std::vector<WallCrossing>& crossings) {
    std::sort(crossings.begin(), crossings.end(), [](const WallCrossing& a, const WallCrossing& b) {
        return a.path_t < b.path_t || (a.path_t == b.path_t && a.wall < b.wall);
    });
}

}  // namespace detail

// Brute-force scan over all walls, ordered by distance from path.a.
inline std::vector<WallCrossing> wall_crossings(const Segment& path, const FloorPlan& plan) {
    std::vector<WallCrossing> out;
    for (std::size_t i = 0; i < plan.walls.size(); ++i)
        if (auto c = detail::crossing_on_wall(path, plan, i)) out.push_back(*c);
    detail::sort_crossings(out);
    return out;
}

// ============================================================================
// Spatial index
// ============================================================================

// Uniform grid over the plan boundary mapping bins to the walls overlapping
// them. Queries return exactly the brute-force result; the index only prunes
// which walls get the exact intersection test. Read-only after construction.
class SpatialIndex {
  public:
    SpatialIndex() = default;

    explicit SpatialIndex(const FloorPlan& plan, double bin_size = 1.0)
        : origin_(plan.boundary.origin), bin_size_(bin_size) {
        if (bin_size <= 0.0) throw std::invalid_argument("spatial index bin_size must be > 0");
        cols_ = std::max(1, static_cast<int>(std::ceil(plan.boundary.width / bin_size - 1e-9)));
        rows_ = std::max(1, static_cast<int>(std::ceil(plan.boundary.depth / bin_size - 1e-9)));
        bins_.resize(static_cast<std::size_t>(cols_) * rows_);
        for (std::size_t i = 0; i < plan.walls.size(); ++i) {
            for_each_overlapped_bin(plan.walls[i].segment(),
                                    [&](int bx, int by) { bins_[bin_offset(bx, by)].push_back(i); });
        }
    }

    int cols() const { return cols_; }
    int rows() const { return rows_; }
    double bin_size() const { return bin_size_; }

    const std::vector<std::size_t>& bin(int bx, int by) const { return bins_[bin_offset(bx, by)]; }

    bool empty() const {
        return std::all_of(bins_.begin(), bins_.end(), [](const auto& b) { return b.empty(); });
    }

    // Deduplicated, ascending wall indices whose bins the path passes through.
    std::vector<std::size_t> candidates(const Segment& path) const {
        std::vector<std::size_t> out;
        for_each_overlapped_bin(path, [&](int bx, int by) {
            const auto& b = bins_[bin_offset(bx, by)];
            out.insert(out.end(), b.begin(), b.end());
        });
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

  private:
    std::size_t bin_offset(int bx, int by) const {
        return static_cast<std::size_t>(by) * cols_ + bx;
    }

    // Visits every bin whose (slightly expanded) rectangle the segment
    // touches. The expansion keeps walls lying exactly on bin boundaries
    // visible from both neighbouring bins.
    template <typename Fn>
    void for_each_overlapped_bin(const Segment& s, Fn&& fn) const {
        const double inv = 1.0 / bin_size_;
        auto bin_x = [&](double x) { return static_cast<int>(std::floor((x - origin_.x) * inv)); };
        auto bin_y = [&](double y) { return static_cast<int>(std::floor((y - origin_.y) * inv)); };
        // The range is widened by the same epsilon the rect test uses, so a
        // segment sitting exactly on a bin border reaches both neighbours.
        const int x0 = std::clamp(bin_x(std::min(s.a.x, s.b.x) - 1e-9), 0, cols_ - 1);
        const int x1 = std::clamp(bin_x(std::max(s.a.x, s.b.x) + 1e-9), 0, cols_ - 1);
        const int y0 = std::clamp(bin_y(std::min(s.a.y, s.b.y) - 1e-9), 0, rows_ - 1);
        const int y1 = std::clamp(bin_y(std::max(s.a.y, s.b.y) + 1e-9), 0, rows_ - 1);
        for (int by = y0; by <= y1; ++by) {
            for (int bx = x0; bx <= x1; ++bx) {
                const double cx0 = origin_.x + bx * bin_size_;
                const double cy0 = origin_.y + by * bin_size_;
                if (segment_touches_rect(s, cx0 - 1e-9, cy0 - 1e-9, cx0 + bin_size_ + 1e-9,
                                         cy0 + bin_size_ + 1e-9))
                    fn(bx, by);
            }
        }
    }

    // Liang-Barsky clip; touching counts as overlap.
    static bool segment_touches_rect(const Segment& s, double x0, double y0, double x1, double y1) {
        const double dx = s.b.x - s.a.x;
        const double dy = s.b.y - s.a.y;
        double t0 = 0.0, t1 = 1.0;
        const double p[4] = {-dx, dx, -dy, dy};
        const double q[4] = {s.a.x - x0, x1 - s.a.x, s.a.y - y0, y1 - s.a.y};
        for (int i = 0; i < 4; ++i) {
            if (p[i] == 0.0) {
                if (q[i] < 0.0) return false;
            } else {
                const double r = q[i] / p[i];
                if (p[i] < 0.0) {
                    if (r > t1) return false;
                    t0 = std::max(t0, r);
                } else {
                    if (r < t0) return false;
                    t1 = std::min(t1, r);
                }
            }
        }
        return t0 <= t1;
    }

    Point2D origin_;
    double bin_size_ = 1.0;
    int cols_ = 0;
    int rows_ = 0;
    std::vector<std::vector<std::size_t>> bins_;
};

inline SpatialIndex build_spatial_index(const FloorPlan& plan, double bin_size = 1.0) {
    return SpatialIndex(plan, bin_size);
}

// Index-accelerated variant; result is identical to the brute-force scan.
inline std::vector<WallCrossing> wall_crossings(const Segment& path, const FloorPlan& plan,
                                                const SpatialIndex& index) {
    std::vector<WallCrossing> out;
    for (std::size_t i : index.candidates(path))
        if (auto c = detail::crossing_on_wall(path, plan, i)) out.push_back(*c);
    detail::sort_crossings(out);
    return out;
}

// ============================================================================
// Position clearance helpers
// ============================================================================

inline double min_wall_distance(const FloorPlan& plan, Point2D p) {
    double best = std::numeric_limits<double>::infinity();
    for (const Wall& w : plan.walls)
        best = std::min(best, point_segment_distance(p, w.segment()));
    return best;
}

// True when p sits strictly inside the boundary with at least `clearance`
// meters to every wall and to the boundary edges.
inline bool position_is_clear(const FloorPlan& plan, Point2D p, double clearance) {
    // Slight slack so lattice points that land exactly at the clearance
    // radius are not lost to rounding.
    const double c = clearance - 1e-9;
    const Rect& b = plan.boundary;
    if (p.x < b.origin.x + c || p.x > b.max_x() - c || p.y < b.origin.y + c ||
        p.y > b.max_y() - c)
        return false;
    return min_wall_distance(plan, p) >= c;
}

// Nearest clear position to p, searched over expanding rings of a local
// lattice. Ties break on (distance, x, y). Returns nothing only when the
// plan has no clear cell at all within the boundary.
inline std::optional<Point2D> nearest_clear_position(const FloorPlan& plan, Point2D p,
                                                     double clearance = 0.1, double step = 0.05) {
    if (position_is_clear(plan, p, clearance)) return p;
    const Rect& b = plan.boundary;
    if (b.width < 2.0 * clearance || b.depth < 2.0 * clearance) return std::nullopt;
    const Point2D c{std::clamp(p.x, b.origin.x + clearance, b.max_x() - clearance),
                    std::clamp(p.y, b.origin.y + clearance, b.max_y() - clearance)};
    const int max_ring = static_cast<int>(std::ceil(std::hypot(b.width, b.depth) / step)) + 1;
    for (int ring = 0; ring <= max_ring; ++ring) {
        Point2D best;
        double best_d = std::numeric_limits<double>::infinity();
        bool found = false;
        for (int iy = -ring; iy <= ring; ++iy) {
            for (int ix = -ring; ix <= ring; ++ix) {
                if (std::max(std::abs(ix), std::abs(iy)) != ring) continue;
                const Point2D q{c.x + ix * step, c.y + iy * step};
                if (!position_is_clear(plan, q, clearance)) continue;
                const double d = distance(p, q);
                if (!found || d < best_d - 1e-12 ||
                    (std::abs(d - best_d) <= 1e-12 && lex_less(q, best))) {
                    best = q;
                    best_d = d;
                    found = true;
                }
            }
        }
        if (found) return best;
    }
    return std::nullopt;
}

// ============================================================================
// Validation
// ============================================================================

enum class ViolationCode {
    NonFiniteCoordinate,
    EmptyMaterialName,
    DuplicateMaterial,
    NegativeAttenuation,
    UnknownMaterial,
    DegenerateWall,
    NonPositiveThickness,
    WallOutsideBoundary,
    UnknownHostWall,
    BadOpeningSpan,
    NonPositiveRoomSize,
    RoomOutsideBoundary,
    RoomOverlap,
    RoomSizeMismatch,
    RoomNotAnchored,
    DoorCount,
    DoorWidth,
    DoorMaterial,
    NoOuterDoor,
    NoCirculation,
};

inline const char* to_string(ViolationCode code) {
    switch (code) {
        case ViolationCode::NonFiniteCoordinate: return "non-finite-coordinate";
        case ViolationCode::EmptyMaterialName: return "empty-material-name";
        case ViolationCode::DuplicateMaterial: return "duplicate-material";
        case ViolationCode::NegativeAttenuation: return "negative-attenuation";
        case ViolationCode::UnknownMaterial: return "unknown-material";
        case ViolationCode::DegenerateWall: return "degenerate-wall";
        case ViolationCode::NonPositiveThickness: return "non-positive-thickness";
        case ViolationCode::WallOutsideBoundary: return "wall-outside-boundary";
        case ViolationCode::UnknownHostWall: return "unknown-host-wall";
        case ViolationCode::BadOpeningSpan: return "bad-opening-span";
        case ViolationCode::NonPositiveRoomSize: return "non-positive-room-size";
        case ViolationCode::RoomOutsideBoundary: return "room-outside-boundary";
        case ViolationCode::RoomOverlap: return "room-overlap";
        case ViolationCode::RoomSizeMismatch: return "room-size-mismatch";
        case ViolationCode::RoomNotAnchored: return "room-not-anchored";
        case ViolationCode::DoorCount: return "door-count";
        case ViolationCode::DoorWidth: return "door-width";
        case ViolationCode::DoorMaterial: return "door-material";
        case ViolationCode::NoOuterDoor: return "no-outer-door";
        case ViolationCode::NoCirculation: return "no-circulation";
    }
    return "unknown";
}

struct PlanViolation {
    ViolationCode code;
    std::string where;    // field-style address, e.g. "walls[2]"
    std::string detail;
};

// Task-level architectural rules layered on top of the structural invariants.
struct ArchitecturalRules {
    std::vector<std::pair<double, double>> room_sizes;   // required (width, depth), orientation-free
    double door_width = 0.8;
    std::string door_material;                            // empty = unchecked
    bool require_outer_door = true;
    bool require_circulation = true;
    double circulation_step = 0.1;
};

namespace detail {

inline bool on_boundary_edge(const FloorPlan& plan, const Segment& s) {
    const Rect& b = plan.boundary;
    auto near = [](double u, double v) { return std::abs(u - v) <= kCoordTol; };
    auto within = [](double lo, double u, double hi) {
        return u >= lo - kCoordTol && u <= hi + kCoordTol;
    };
    if (near(s.a.y, s.b.y) && (near(s.a.y, b.origin.y) || near(s.a.y, b.max_y())))
        return within(b.origin.x, s.a.x, b.max_x()) && within(b.origin.x, s.b.x, b.max_x());
    if (near(s.a.x, s.b.x) && (near(s.a.x, b.origin.x) || near(s.a.x, b.max_x())))
        return within(b.origin.y, s.a.y, b.max_y()) && within(b.origin.y, s.b.y, b.max_y());
    return false;
}

inline Segment opening_span(const FloorPlan& plan, const Opening& op) {
    const Wall& w = plan.walls[op.wall];
    const double len = w.length();
    const Point2D dir = (1.0 / len) * (w.b - w.a);
    return {w.a + op.offset * dir, w.a + (op.offset + op.width) * dir};
}

// True when segment s lies on the room's perimeter (collinear with one of the
// four edges and contained in its span).
inline bool on_room_perimeter(const Room& room, const Segment& s) {
    const Rect r = room.rect();
    auto near = [](double u, double v) { return std::abs(u - v) <= kCoordTol; };
    auto within = [](double lo, double u, double hi) {
        return u >= lo - kCoordTol && u <= hi + kCoordTol;
    };
    const bool horiz = near(s.a.y, s.b.y);
    const bool vert = near(s.a.x, s.b.x);
    if (horiz && (near(s.a.y, r.origin.y) || near(s.a.y, r.max_y())))
        return within(r.origin.x, s.a.x, r.max_x()) && within(r.origin.x, s.b.x, r.max_x());
    if (vert && (near(s.a.x, r.origin.x) || near(s.a.x, r.max_x())))
        return within(r.origin.y, s.a.y, r.max_y()) && within(r.origin.y, s.b.y, r.max_y());
    return false;
}

inline bool rooms_overlap(const Room& a, const Room& b) {
    const Rect ra = a.rect(), rb = b.rect();
    const double ox = std::min(ra.max_x(), rb.max_x()) - std::max(ra.origin.x, rb.origin.x);
    const double oy = std::min(ra.max_y(), rb.max_y()) - std::max(ra.origin.y, rb.origin.y);
    return ox > kCoordTol && oy > kCoordTol;   // interiors must intersect, touching is fine
}

inline bool room_anchored_to_boundary(const FloorPlan& plan, const Room& room) {
    const Rect r = room.rect();
    const Rect& b = plan.boundary;
    auto near = [](double u, double v) { return std::abs(u - v) <= kCoordTol; };
    return near(r.origin.y, b.origin.y) || near(r.max_y(), b.max_y()) ||
           near(r.origin.x, b.origin.x) || near(r.max_x(), b.max_x());
}

}  // namespace detail

bool check_circulation(const FloorPlan& plan, double grid_step);   // defined below

// Structural invariants of the contained types. Violations are data, not
// failures; an empty report means the plan is valid.
inline std::vector<PlanViolation> validate_plan(const FloorPlan& plan) {
    std::vector<PlanViolation> out;
    auto flag = [&](ViolationCode code, std::string where, std::string detail) {
        out.push_back({code, std::move(where), std::move(detail)});
    };

    if (!(plan.boundary.width > 0.0) || !(plan.boundary.depth > 0.0) ||
        !is_finite(plan.boundary.origin) || !std::isfinite(plan.boundary.width) ||
        !std::isfinite(plan.boundary.depth))
        flag(ViolationCode::NonPositiveRoomSize, "boundary", "boundary must have positive extent");

    for (std::size_t i = 0; i < plan.materials.size(); ++i) {
        const Material& m = plan.materials[i];
        const std::string where = "materials[" + std::to_string(i) + "]";
        if (m.name.empty()) flag(ViolationCode::EmptyMaterialName, where, "name must be nonempty");
        if (!(m.attenuation_db >= 0.0))
            flag(ViolationCode::NegativeAttenuation, where, "attenuation must be >= 0 dB");
        for (std::size_t j = i + 1; j < plan.materials.size(); ++j)
            if (!m.name.empty() && m.name == plan.materials[j].name)
                flag(ViolationCode::DuplicateMaterial, "materials[" + std::to_string(j) + "]",
                     "duplicate material name '" + m.name + "'");
    }

    for (std::size_t i = 0; i < plan.walls.size(); ++i) {
        const Wall& w = plan.walls[i];
        const std::string where = "walls[" + std::to_string(i) + "]";
        if (!is_finite(w.a) || !is_finite(w.b)) {
            flag(ViolationCode::NonFiniteCoordinate, where, "endpoints must be finite");
            continue;
        }
        if (w.length() <= kMinWallLength)
            flag(ViolationCode::DegenerateWall, where, "endpoints must be distinct");
        if (!(w.thickness > 0.0))
            flag(ViolationCode::NonPositiveThickness, where, "thickness must be > 0");
        if (w.material >= plan.materials.size())
            flag(ViolationCode::UnknownMaterial, where, "material index out of range");
        if (!plan.boundary.contains(w.a, kCoordTol) || !plan.boundary.contains(w.b, kCoordTol))
            flag(ViolationCode::WallOutsideBoundary, where, "endpoints must lie within the boundary");
    }

    for (std::size_t i = 0; i < plan.openings.size(); ++i) {
        const Opening& op = plan.openings[i];
        const std::string where = "openings[" + std::to_string(i) + "]";
        if (op.wall >= plan.walls.size()) {
            flag(ViolationCode::UnknownHostWall, where, "host wall index out of range");
            continue;
        }
        if (op.material >= plan.materials.size())
            flag(ViolationCode::UnknownMaterial, where, "material index out of range");
        const double wall_len = plan.walls[op.wall].length();
        if (!(op.width > 0.0) || op.offset < 0.0 || op.offset + op.width > wall_len + kCoordTol)
            flag(ViolationCode::BadOpeningSpan, where,
                 "span must satisfy 0 <= offset and offset + width <= wall length");
    }

    for (std::size_t i = 0; i < plan.rooms.size(); ++i) {
        const Room& r = plan.rooms[i];
        const std::string where = "rooms[" + std::to_string(i) + "]";
        if (!is_finite(r.origin) || !std::isfinite(r.width) || !std::isfinite(r.depth)) {
            flag(ViolationCode::NonFiniteCoordinate, where, "room must be finite");
            continue;
        }
        if (!(r.width > 0.0) || !(r.depth > 0.0))
            flag(ViolationCode::NonPositiveRoomSize, where, "width and depth must be > 0");
        const Rect rect = r.rect();
        if (!plan.boundary.contains(rect.origin, kCoordTol) ||
            !plan.boundary.contains({rect.max_x(), rect.max_y()}, kCoordTol))
            flag(ViolationCode::RoomOutsideBoundary, where, "room must lie within the boundary");
        for (std::size_t j = i + 1; j < plan.rooms.size(); ++j)
            if (detail::rooms_overlap(r, plan.rooms[j]))
                flag(ViolationCode::RoomOverlap, where,
                     "overlaps rooms[" + std::to_string(j) + "]");
    }
    return out;
}

// Structural invariants plus the architectural rule set.
inline std::vector<PlanViolation> validate_plan(const FloorPlan& plan,
                                                const ArchitecturalRules& rules) {
    std::vector<PlanViolation> out = validate_plan(plan);
    if (!out.empty()) return out;   // rule checks assume a structurally sound plan
    auto flag = [&](ViolationCode code, std::string where, std::string detail) {
        out.push_back({code, std::move(where), std::move(detail)});
    };

    // Required room sizes, orientation-free, matched as a multiset.
    if (!rules.room_sizes.empty()) {
        auto canon = [](double w, double d) {
            return std::pair<double, double>{std::min(w, d), std::max(w, d)};
        };
        std::vector<std::pair<double, double>> wanted;
        for (auto [w, d] : rules.room_sizes) wanted.push_back(canon(w, d));
        std::vector<bool> used(wanted.size(), false);
        for (std::size_t i = 0; i < plan.rooms.size(); ++i) {
            const auto have = canon(plan.rooms[i].width, plan.rooms[i].depth);
            bool matched = false;
            for (std::size_t j = 0; j < wanted.size(); ++j) {
                if (used[j]) continue;
                if (std::abs(wanted[j].first - have.first) <= kCoordTol &&
                    std::abs(wanted[j].second - have.second) <= kCoordTol) {
                    used[j] = true;
                    matched = true;
                    break;
                }
            }
            if (!matched)
                flag(ViolationCode::RoomSizeMismatch, "rooms[" + std::to_string(i) + "]",
                     "size not in the required set");
        }
        if (plan.rooms.size() != wanted.size())
            flag(ViolationCode::RoomSizeMismatch, "rooms",
                 "expected " + std::to_string(wanted.size()) + " rooms, found " +
                     std::to_string(plan.rooms.size()));
    }

    for (std::size_t i = 0; i < plan.rooms.size(); ++i)
        if (!detail::room_anchored_to_boundary(plan, plan.rooms[i]))
            flag(ViolationCode::RoomNotAnchored, "rooms[" + std::to_string(i) + "]",
                 "no edge collinear with an outer wall");

    // Exactly one door per room, of the required width (and material, when named).
    for (std::size_t i = 0; i < plan.rooms.size(); ++i) {
        const Room& room = plan.rooms[i];
        const std::string where = "rooms[" + std::to_string(i) + "]";
        int doors = 0;
        for (const Opening& op : plan.openings) {
            if (op.kind != OpeningKind::Door) continue;
            const Segment span = detail::opening_span(plan, op);
            if (detail::on_boundary_edge(plan, span)) continue;   // the outer door
            if (!detail::on_room_perimeter(room, span)) continue;
            ++doors;
            if (std::abs(op.width - rules.door_width) > kCoordTol)
                flag(ViolationCode::DoorWidth, where,
                     "door width must be " + std::to_string(rules.door_width) + " m");
            if (!rules.door_material.empty() &&
                plan.materials[op.material].name != rules.door_material)
                flag(ViolationCode::DoorMaterial, where,
                     "door material must be " + rules.door_material);
        }
        if (doors != 1)
            flag(ViolationCode::DoorCount, where,
                 "expected exactly 1 door, found " + std::to_string(doors));
    }

    bool has_outer_door = false;
    for (const Opening& op : plan.openings)
        if (op.kind == OpeningKind::Door &&
            detail::on_boundary_edge(plan, detail::opening_span(plan, op)))
            has_outer_door = true;
    if (rules.require_outer_door && !has_outer_door)
        flag(ViolationCode::NoOuterDoor, "openings", "no door on an outer wall");

    if (rules.require_circulation && has_outer_door && out.empty() &&
        !check_circulation(plan, rules.circulation_step))
        flag(ViolationCode::NoCirculation, "plan",
             "outer door does not reach every room door");
    return out;
}

// ============================================================================
// Circulation
// ============================================================================

namespace detail {

// Wall solids with opening spans removed, as sub-segments.
inline std::vector<Segment> solid_wall_segments(const FloorPlan& plan) {
    std::vector<Segment> out;
    for (std::size_t wi = 0; wi < plan.walls.size(); ++wi) {
        const Wall& w = plan.walls[wi];
        const double len = w.length();
        if (len <= kMinWallLength) continue;
        std::vector<std::pair<double, double>> holes;
        for (const Opening& op : plan.openings)
            if (op.wall == wi)
                holes.emplace_back(std::clamp(op.offset, 0.0, len),
                                   std::clamp(op.offset + op.width, 0.0, len));
        std::sort(holes.begin(), holes.end());
        const Point2D dir = (1.0 / len) * (w.b - w.a);
        double cursor = 0.0;
        for (auto [lo, hi] : holes) {
            if (lo > cursor + kCoordTol)
                out.push_back({w.a + cursor * dir, w.a + lo * dir});
            cursor = std::max(cursor, hi);
        }
        if (cursor < len - kCoordTol) out.push_back({w.a + cursor * dir, w.a + len * dir});
    }
    return out;
}

inline std::optional<std::size_t> find_outer_door(const FloorPlan& plan) {
    for (std::size_t i = 0; i < plan.openings.size(); ++i)
        if (plan.openings[i].kind == OpeningKind::Door &&
            on_boundary_edge(plan, opening_span(plan, plan.openings[i])))
            return i;
    return std::nullopt;
}

// Unit normal of the opening's host wall pointing away from `from`.
inline Point2D away_normal(const FloorPlan& plan, const Opening& op, Point2D from) {
    const Wall& w = plan.walls[op.wall];
    const Point2D dir = (1.0 / w.length()) * (w.b - w.a);
    Point2D n{-dir.y, dir.x};
    const Segment span = opening_span(plan, op);
    const Point2D mid = 0.5 * (span.a + span.b);
    if (dot(n, mid - from) < 0.0) n = {-n.x, -n.y};
    return n;
}

class OccupancyGrid {
  public:
    OccupancyGrid(const FloorPlan& plan, double step)
        : origin_(plan.boundary.origin), step_(step),
          nx_(std::max(1, static_cast<int>(std::ceil(plan.boundary.width / step - 1e-9)))),
          ny_(std::max(1, static_cast<int>(std::ceil(plan.boundary.depth / step - 1e-9)))),
          blocked_(static_cast<std::size_t>(nx_) * ny_, false) {
        for (const Segment& s : solid_wall_segments(plan)) mark_blocked(s);
    }

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    bool blocked(int ix, int iy) const { return blocked_[idx(ix, iy)]; }
    bool in_bounds(int ix, int iy) const { return ix >= 0 && ix < nx_ && iy >= 0 && iy < ny_; }

    std::optional<std::pair<int, int>> cell_of(Point2D p) const {
        const int ix = static_cast<int>(std::floor((p.x - origin_.x) / step_));
        const int iy = static_cast<int>(std::floor((p.y - origin_.y) / step_));
        if (!in_bounds(ix, iy)) return std::nullopt;
        return std::pair{ix, iy};
    }

    // 4-connected flood fill over free cells.
    std::vector<bool> reachable_from(int ix, int iy) const {
        std::vector<bool> seen(blocked_.size(), false);
        if (!in_bounds(ix, iy) || blocked(ix, iy)) return seen;
        std::vector<std::pair<int, int>> stack{{ix, iy}};
        seen[idx(ix, iy)] = true;
        while (!stack.empty()) {
            auto [cx, cy] = stack.back();
            stack.pop_back();
            constexpr int dx[4] = {1, -1, 0, 0};
            constexpr int dy[4] = {0, 0, 1, -1};
            for (int k = 0; k < 4; ++k) {
                const int mx = cx + dx[k], my = cy + dy[k];
                if (!in_bounds(mx, my) || blocked(mx, my) || seen[idx(mx, my)]) continue;
                seen[idx(mx, my)] = true;
                stack.emplace_back(mx, my);
            }
        }
        return seen;
    }

    std::size_t idx(int ix, int iy) const { return static_cast<std::size_t>(iy) * nx_ + ix; }

  private:
    void mark_blocked(const Segment& s) {
        const double inv = 1.0 / step_;
        const int x0 = std::clamp(static_cast<int>(std::floor((std::min(s.a.x, s.b.x) - origin_.x) * inv)), 0, nx_ - 1);
        const int x1 = std::clamp(static_cast<int>(std::floor((std::max(s.a.x, s.b.x) - origin_.x) * inv)), 0, nx_ - 1);
        const int y0 = std::clamp(static_cast<int>(std::floor((std::min(s.a.y, s.b.y) - origin_.y) * inv)), 0, ny_ - 1);
        const int y1 = std::clamp(static_cast<int>(std::floor((std::max(s.a.y, s.b.y) - origin_.y) * inv)), 0, ny_ - 1);
        for (int iy = y0; iy <= y1; ++iy) {
            for (int ix = x0; ix <= x1; ++ix) {
                const double cx = origin_.x + ix * step_;
                const double cy = origin_.y + iy * step_;
                if (segment_touches_cell(s, cx, cy, step_)) blocked_[idx(ix, iy)] = true;
            }
        }
    }

    static bool segment_touches_cell(const Segment& s, double cx, double cy, double step) {
        const double dx = s.b.x - s.a.x, dy = s.b.y - s.a.y;
        double t0 = 0.0, t1 = 1.0;
        const double p[4] = {-dx, dx, -dy, dy};
        const double q[4] = {s.a.x - cx, cx + step - s.a.x, s.a.y - cy, cy + step - s.a.y};
        for (int i = 0; i < 4; ++i) {
            if (p[i] == 0.0) {
                if (q[i] < 0.0) return false;
            } else {
                const double r = q[i] / p[i];
                if (p[i] < 0.0) {
                    if (r > t1) return false;
                    t0 = std::max(t0, r);
                } else {
                    if (r < t0) return false;
                    t1 = std::min(t1, r);
                }
            }
        }
        return t0 <= t1;
    }

    Point2D origin_;
    double step_;
    int nx_, ny_;
    std::vector<bool> blocked_;
};

// First free in-bounds cell stepping away from a point on a wall.
inline std::optional<std::pair<int, int>> probe_cell(const OccupancyGrid& grid, Point2D at,
                                                     Point2D dir, double step) {
    for (double k : {0.6, 1.2, 1.8, 2.5}) {
        const auto cell = grid.cell_of(at + (k * step) * dir);
        if (cell && !grid.blocked(cell->first, cell->second)) return cell;
    }
    return std::nullopt;
}

}  // namespace detail

// True iff a flood fill over free cells connects the outer door to every
// room's door. Throws InvalidPlan when the plan has no outer door.
inline bool check_circulation(const FloorPlan& plan, double grid_step = 0.1) {
    const auto outer = detail::find_outer_door(plan);
    if (!outer) throw InvalidPlan("check_circulation: plan has no outer door");

    detail::OccupancyGrid grid(plan, grid_step);
    const Opening& outer_door = plan.openings[*outer];
    const Segment outer_span = detail::opening_span(plan, outer_door);
    const Point2D outer_mid = 0.5 * (outer_span.a + outer_span.b);
    // Seed just inside the boundary from the outer door. The wall normal's
    // sign is arbitrary on a boundary wall, so pick the direction that stays
    // inside.
    Point2D seed_dir = detail::away_normal(plan, outer_door, plan.boundary.center());
    seed_dir = {-seed_dir.x, -seed_dir.y};   // toward the interior
    const auto seed = detail::probe_cell(grid, outer_mid, seed_dir, grid_step);
    if (!seed) return false;
    const std::vector<bool> reached = grid.reachable_from(seed->first, seed->second);

    for (const Room& room : plan.rooms) {
        for (const Opening& op : plan.openings) {
            if (op.kind != OpeningKind::Door) continue;
            const Segment span = detail::opening_span(plan, op);
            if (detail::on_boundary_edge(plan, span)) continue;
            if (!detail::on_room_perimeter(room, span)) continue;
            const Point2D mid = 0.5 * (span.a + span.b);
            const Point2D n = detail::away_normal(plan, op, room.center());
            const auto cell = detail::probe_cell(grid, mid, n, grid_step);
            if (!cell || !reached[grid.idx(cell->first, cell->second)]) return false;
        }
    }
    return true;
}

}  // namespace iplan
