#pragma once

// Discrete filtered sets truncated at a horizon, their singular support in
// R>=0 x C, and the geometry of allowed paths.

#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "resurgence/scalar.hpp"

namespace resurgence {

/// Points closer than this are identified.
inline constexpr double kMergeTolerance = 1e-12;

struct FilteredPoint {
    cplx omega;
    double level;  // minimal filtration level at which omega appears
};

/// A discrete filtered set stored as finitely many points with their minimal
/// levels. The singular support is the union of half-lines {(l, omega) : l >= level}.
class FilteredSet {
public:
    FilteredSet() = default;
    /// Merges duplicates (keeping the smaller level) and drops points above the horizon.
    FilteredSet(std::vector<FilteredPoint> points, double horizon);

    static FilteredSet empty(double horizon) { return FilteredSet({}, horizon); }

    const std::vector<FilteredPoint>& points() const { return points_; }
    double horizon() const { return horizon_; }
    bool empty() const { return points_.empty(); }
    std::size_t size() const { return points_.size(); }

    /// Omega_L = {omega : level(omega) <= L}.
    std::vector<cplx> at_level(double L) const;
    /// Level of omega, if present.
    std::optional<double> level_of(cplx omega) const;
    /// Omega_L subset of other_L for all L.
    bool is_subset_of(const FilteredSet& other) const;

    /// Exact comparison of canonical forms up to kMergeTolerance on points
    /// and `level_tol` on levels.
    bool same_as(const FilteredSet& other, double level_tol = 1e-12) const;

private:
    std::vector<FilteredPoint> points_;  // sorted by (re, im)
    double horizon_ = 0.0;
};

FilteredSet dfs_sum(const FilteredSet& a, const FilteredSet& b);
FilteredSet dfs_star_power(const FilteredSet& a, int n);
FilteredSet dfs_star_closure(const FilteredSet& a);

/// sup{r : Omega_r empty}: the smallest level, or the horizon when empty.
double rho(const FilteredSet& a);

/// Euclidean distance in R^3 from (lambda, xi) to the closed singular
/// support, optionally with the origin (0,0) adjoined.
double dist_to_support(const FilteredSet& a, double lambda, cplx xi, bool include_origin = false);

/// Unit vector pointing away from the nearest support feature (the gradient
/// of dist_to_support), as (d/dlambda, d/dRe xi, d/dIm xi).
struct DistanceWithGradient {
    double distance;
    double grad[3];
};
DistanceWithGradient dist_to_support_with_gradient(const FilteredSet& a, double lambda, cplx xi, bool include_origin);

/// Polygonal path from the origin with arclength bookkeeping. The time
/// parameter t in [0,1] is proportional to arclength.
class PathSpec {
public:
    PathSpec() = default;
    explicit PathSpec(std::vector<cplx> vertices, std::optional<double> marker = std::nullopt);

    static PathSpec straight(cplx end) { return PathSpec({cplx{0.0, 0.0}, end}); }

    const std::vector<cplx>& vertices() const { return vertices_; }
    /// Cumulative arclength at each vertex.
    const std::vector<double>& arclengths() const { return arclengths_; }
    double length() const { return arclengths_.back(); }
    cplx endpoint() const { return vertices_.back(); }
    std::size_t segment_count() const { return vertices_.size() - 1; }

    /// Fraction a of total arclength where the radial head ends (normal form).
    std::optional<double> marker() const { return marker_; }
    /// Arclength at which the radial head ends, i.e. a * length().
    std::optional<double> head_length() const;

    cplx point_at_arclength(double s) const;
    /// Tangent direction of the segment containing arclength s (right-continuous).
    cplx direction_at_arclength(double s) const;

    /// Path followed by `tail` appended after this one (tail starts where this ends).
    PathSpec concatenated(const std::vector<cplx>& tail) const;

private:
    std::vector<cplx> vertices_;
    std::vector<double> arclengths_;
    std::optional<double> marker_;
};

struct AllowednessReport {
    bool allowed = false;
    double min_clearance = 0.0;     // min over the path of dist((L(gamma|t), gamma(t)), support)
    double worst_arclength = 0.0;   // where that minimum is attained
    cplx worst_point{0.0, 0.0};
    double total_length = 0.0;
};

/// Closed-form check that the lifted path keeps distance >= delta from the
/// support and has total length <= L.
AllowednessReport is_allowed_path(const FilteredSet& a, const PathSpec& path, double delta, double L);

/// Minimum over the lifted path of the distance to the support (closed form per segment).
AllowednessReport lifted_clearance(const FilteredSet& a, const PathSpec& path, bool include_origin = false);

struct UnsupportedPathError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Replaces the part of the path inside the disc |xi| < radius by the radial
/// segment to its first crossing of |xi| = radius and records the marker.
/// Throws UnsupportedPathError if the path re-enters the disc afterwards, and
/// std::invalid_argument if it never reaches the circle.
PathSpec normalize_radial_head(const PathSpec& path, double radius);

using PathEvaluator = std::function<cplx(const PathSpec&)>;

struct SeminormEstimate {
    double value = 0.0;          // lower bound on the seminorm
    PathSpec witness;            // path whose endpoint attains it
    std::size_t admissible = 0;  // paths that passed the allowedness test
    std::size_t sampled = 0;
};

/// Deterministic + randomized family of polygonal paths of length <= L
/// (straight rays, one-bend and two-bend detours on both sides of each point
/// of `a`, random polylines).
std::vector<PathSpec> seminorm_path_family(const FilteredSet& a, double delta, double L, std::size_t budget,
                                           unsigned seed);

/// Lower bound on the seminorm: max of |germ| at endpoints of the admissible
/// members of `family`.
SeminormEstimate seminorm_estimate_on(const PathEvaluator& germ, const FilteredSet& a, double delta, double L,
                                      const std::vector<PathSpec>& family);

SeminormEstimate seminorm_estimate(const PathEvaluator& germ, const FilteredSet& a, double delta, double L,
                                   std::size_t budget = 4000, unsigned seed = 1);

}  // namespace resurgence
