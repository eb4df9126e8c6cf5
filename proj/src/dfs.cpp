#include "resurgence/dfs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace resurgence {

namespace {

bool less_point(const FilteredPoint& a, const FilteredPoint& b) {
    if (a.omega.real() != b.omega.real()) return a.omega.real() < b.omega.real();
    return a.omega.imag() < b.omega.imag();
}

std::vector<FilteredPoint> canonicalize(std::vector<FilteredPoint> pts, double horizon) {
    std::erase_if(pts, [&](const FilteredPoint& p) { return p.level > horizon; });
    std::sort(pts.begin(), pts.end(), less_point);
    std::vector<FilteredPoint> out;
    out.reserve(pts.size());
    for (const auto& p : pts) {
        bool merged = false;
        for (auto it = out.rbegin(); it != out.rend(); ++it) {
            if (p.omega.real() - it->omega.real() > kMergeTolerance) break;
            if (std::abs(p.omega - it->omega) < kMergeTolerance) {
                it->level = std::min(it->level, p.level);
                merged = true;
                break;
            }
        }
        if (!merged) out.push_back(p);
    }
    return out;
}

struct QuadMin {
    double value;
    double tau;
};

// min of a tau^2 + b tau + c over [lo, hi]
QuadMin min_quadratic(double a, double b, double c, double lo, double hi) {
    auto q = [&](double t) { return (a * t + b) * t + c; };
    QuadMin best{q(lo), lo};
    const double qh = q(hi);
    if (qh < best.value) best = {qh, hi};
    if (a > 0) {
        const double t = -b / (2 * a);
        if (t > lo && t < hi) {
            const double qt = q(t);
            if (qt < best.value) best = {qt, t};
        }
    }
    return best;
}

// Squared distance from the lifted segment (lambda0 + tau*len, z0 + tau*d),
// tau in [0,1], to the half-line {(l, omega) : l >= level}.
QuadMin segment_halfline_min(double lambda0, cplx z0, cplx d, double len, cplx omega, double level) {
    const cplx e = z0 - omega;
    const double a1 = std::norm(d);
    const double b1 = 2.0 * (e.real() * d.real() + e.imag() * d.imag());
    const double c1 = std::norm(e);
    // Above the break the vertical gap vanishes.
    double tb = len > 0 ? (level - lambda0) / len : (lambda0 >= level ? -1.0 : 2.0);
    QuadMin best{std::numeric_limits<double>::infinity(), 0.0};
    if (tb < 1.0) {
        const double lo = std::max(0.0, tb);
        auto m = min_quadratic(a1, b1, c1, lo, 1.0);
        if (m.value < best.value) best = m;
    }
    if (tb > 0.0) {
        const double hi = std::min(1.0, tb);
        const double g = level - lambda0;  // (g - tau*len)^2
        auto m = min_quadratic(a1 + len * len, b1 - 2.0 * g * len, c1 + g * g, 0.0, hi);
        if (m.value < best.value) best = m;
    }
    best.value = std::max(best.value, 0.0);
    return best;
}

QuadMin segment_origin_min(double lambda0, cplx z0, cplx d, double len) {
    const double a = std::norm(d) + len * len;
    const double b = 2.0 * (z0.real() * d.real() + z0.imag() * d.imag()) + 2.0 * lambda0 * len;
    const double c = std::norm(z0) + lambda0 * lambda0;
    auto m = min_quadratic(a, b, c, 0.0, 1.0);
    m.value = std::max(m.value, 0.0);
    return m;
}

}  // namespace

FilteredSet::FilteredSet(std::vector<FilteredPoint> points, double horizon) : horizon_(horizon) {
    if (!(horizon > 0)) throw std::invalid_argument("FilteredSet: horizon must be positive");
    for (const auto& p : points)
        if (!(p.level > 0)) throw std::invalid_argument("FilteredSet: levels must be strictly positive");
    points_ = canonicalize(std::move(points), horizon);
}

std::vector<cplx> FilteredSet::at_level(double L) const {
    std::vector<cplx> out;
    for (const auto& p : points_)
        if (p.level <= L) out.push_back(p.omega);
    return out;
}

std::optional<double> FilteredSet::level_of(cplx omega) const {
    for (const auto& p : points_)
        if (std::abs(p.omega - omega) < kMergeTolerance) return p.level;
    return std::nullopt;
}

bool FilteredSet::is_subset_of(const FilteredSet& other) const {
    for (const auto& p : points_) {
        auto l = other.level_of(p.omega);
        if (!l || *l > p.level + 1e-12) return false;
    }
    return true;
}

bool FilteredSet::same_as(const FilteredSet& other, double level_tol) const {
    if (points_.size() != other.points_.size()) return false;
    for (const auto& p : points_) {
        auto l = other.level_of(p.omega);
        if (!l || std::abs(*l - p.level) > level_tol) return false;
    }
    return true;
}

FilteredSet dfs_sum(const FilteredSet& a, const FilteredSet& b) {
    if (std::abs(a.horizon() - b.horizon()) > 1e-12) throw std::invalid_argument("dfs_sum: horizons differ");
    const double h = a.horizon();
    std::vector<FilteredPoint> pts = a.points();
    pts.insert(pts.end(), b.points().begin(), b.points().end());
    for (const auto& p : a.points())
        for (const auto& q : b.points())
            if (p.level + q.level <= h) pts.push_back({p.omega + q.omega, p.level + q.level});
    return FilteredSet(std::move(pts), h);
}

FilteredSet dfs_star_power(const FilteredSet& a, int n) {
    if (n < 1) throw std::invalid_argument("dfs_star_power: n must be >= 1");
    FilteredSet x = a;
    for (int i = 1; i < n; ++i) {
        FilteredSet y = dfs_sum(x, a);
        if (y.same_as(x)) break;  // later powers coincide
        x = std::move(y);
    }
    return x;
}

FilteredSet dfs_star_closure(const FilteredSet& a) {
    if (a.empty()) return a;
    const int max_iter = static_cast<int>(std::ceil(a.horizon() / rho(a))) + 1;
    FilteredSet x = a;
    for (int i = 0; i < max_iter; ++i) {
        FilteredSet y = dfs_sum(x, a);
        if (y.same_as(x)) return y;
        x = std::move(y);
    }
    return x;
}

double rho(const FilteredSet& a) {
    if (a.empty()) return a.horizon();
    double m = a.points().front().level;
    for (const auto& p : a.points()) m = std::min(m, p.level);
    return m;
}

DistanceWithGradient dist_to_support_with_gradient(const FilteredSet& a, double lambda, cplx xi, bool include_origin) {
    DistanceWithGradient best{std::numeric_limits<double>::infinity(), {0.0, 0.0, 0.0}};
    auto consider = [&](double dl, cplx dz) {
        const double d = std::sqrt(dl * dl + std::norm(dz));
        if (d < best.distance) {
            best.distance = d;
            if (d > 0) {
                best.grad[0] = dl / d;
                best.grad[1] = dz.real() / d;
                best.grad[2] = dz.imag() / d;
            } else {
                best.grad[0] = best.grad[1] = best.grad[2] = 0.0;
            }
        }
    };
    if (include_origin) consider(lambda, xi);
    for (const auto& p : a.points()) consider(lambda >= p.level ? 0.0 : lambda - p.level, xi - p.omega);
    return best;
}

double dist_to_support(const FilteredSet& a, double lambda, cplx xi, bool include_origin) {
    return dist_to_support_with_gradient(a, lambda, xi, include_origin).distance;
}

PathSpec::PathSpec(std::vector<cplx> vertices, std::optional<double> marker)
    : vertices_(std::move(vertices)), marker_(marker) {
    if (vertices_.size() < 2) throw std::invalid_argument("PathSpec: need at least two vertices");
    if (std::abs(vertices_.front()) != 0.0) throw std::invalid_argument("PathSpec: path must start at 0");
    // Drop zero-length segments.
    std::vector<cplx> v{vertices_.front()};
    for (std::size_t i = 1; i < vertices_.size(); ++i)
        if (std::abs(vertices_[i] - v.back()) > 0.0) v.push_back(vertices_[i]);
    if (v.size() < 2) throw std::invalid_argument("PathSpec: path has zero length");
    vertices_ = std::move(v);
    arclengths_.assign(vertices_.size(), 0.0);
    for (std::size_t i = 1; i < vertices_.size(); ++i)
        arclengths_[i] = arclengths_[i - 1] + std::abs(vertices_[i] - vertices_[i - 1]);
    if (marker_ && !(*marker_ > 0.0 && *marker_ < 1.0)) throw std::invalid_argument("PathSpec: marker must lie in (0,1)");
}

std::optional<double> PathSpec::head_length() const {
    if (!marker_) return std::nullopt;
    return *marker_ * length();
}

cplx PathSpec::point_at_arclength(double s) const {
    if (s <= 0) return vertices_.front();
    if (s >= length()) return vertices_.back();
    auto it = std::upper_bound(arclengths_.begin(), arclengths_.end(), s);
    const std::size_t i = static_cast<std::size_t>(it - arclengths_.begin()) - 1;
    const double seg = arclengths_[i + 1] - arclengths_[i];
    return vertices_[i] + (vertices_[i + 1] - vertices_[i]) * ((s - arclengths_[i]) / seg);
}

cplx PathSpec::direction_at_arclength(double s) const {
    auto it = std::upper_bound(arclengths_.begin(), arclengths_.end(), s);
    std::size_t i = static_cast<std::size_t>(it - arclengths_.begin());
    i = std::clamp<std::size_t>(i, 1, vertices_.size() - 1) - 1;
    const cplx d = vertices_[i + 1] - vertices_[i];
    return d / std::abs(d);
}

PathSpec PathSpec::concatenated(const std::vector<cplx>& tail) const {
    std::vector<cplx> v = vertices_;
    v.insert(v.end(), tail.begin(), tail.end());
    return PathSpec(std::move(v));
}

AllowednessReport lifted_clearance(const FilteredSet& a, const PathSpec& path, bool include_origin) {
    AllowednessReport r;
    r.total_length = path.length();
    double best = std::numeric_limits<double>::infinity();
    double best_s = 0.0;
    const auto& v = path.vertices();
    const auto& L = path.arclengths();
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        const cplx d = v[i + 1] - v[i];
        const double len = L[i + 1] - L[i];
        auto take = [&](QuadMin m) {
            if (m.value < best) {
                best = m.value;
                best_s = L[i] + m.tau * len;
            }
        };
        if (include_origin) take(segment_origin_min(L[i], v[i], d, len));
        for (const auto& p : a.points()) take(segment_halfline_min(L[i], v[i], d, len, p.omega, p.level));
    }
    r.min_clearance = std::sqrt(best);
    r.worst_arclength = best_s;
    r.worst_point = path.point_at_arclength(best_s);
    return r;
}

AllowednessReport is_allowed_path(const FilteredSet& a, const PathSpec& path, double delta, double L) {
    AllowednessReport r = lifted_clearance(a, path, false);
    r.allowed = r.min_clearance >= delta && path.length() <= L;
    return r;
}

PathSpec normalize_radial_head(const PathSpec& path, double radius) {
    if (!(radius > 0)) throw std::invalid_argument("normalize_radial_head: radius must be positive");
    const auto& v = path.vertices();
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        const cplx z0 = v[i];
        const cplx d = v[i + 1] - v[i];
        if (std::abs(v[i + 1]) < radius) continue;
        // smallest tau in [0,1] with |z0 + tau d| = radius; |z0| < radius here
        const double a = std::norm(d);
        const double b = 2.0 * (z0.real() * d.real() + z0.imag() * d.imag());
        const double c = std::norm(z0) - radius * radius;
        const double tau = (-b + std::sqrt(std::max(0.0, b * b - 4 * a * c))) / (2 * a);
        const cplx p = z0 + tau * d;
        std::vector<cplx> out{cplx{0.0, 0.0}, p};
        for (std::size_t j = i + 1; j < v.size(); ++j) out.push_back(v[j]);
        PathSpec candidate(out);
        // The remainder must stay outside the open disc.
        const auto& w = candidate.vertices();
        for (std::size_t j = 1; j + 1 < w.size(); ++j) {
            const cplx e = w[j + 1] - w[j];
            const double t = std::clamp(-(w[j].real() * e.real() + w[j].imag() * e.imag()) / std::norm(e), 0.0, 1.0);
            if (std::abs(w[j] + t * e) < radius * (1.0 - 1e-12))
                throw UnsupportedPathError("path re-enters the disc |xi| < " + std::to_string(radius) +
                                           " after its radial head");
        }
        return PathSpec(out, radius / candidate.length());
    }
    throw std::invalid_argument("normalize_radial_head: path never reaches |xi| = " + std::to_string(radius));
}

std::vector<PathSpec> seminorm_path_family(const FilteredSet& a, double delta, double L, std::size_t budget,
                                           unsigned seed) {
    std::vector<PathSpec> family;
    const double two_pi = 2.0 * std::numbers::pi;
    const std::size_t ray_budget = budget * 2 / 5;
    const std::size_t nr = std::max<std::size_t>(4, static_cast<std::size_t>(std::sqrt(ray_budget / 2.0)));
    const std::size_t nt = std::max<std::size_t>(8, ray_budget / nr);
    for (std::size_t i = 1; i <= nr; ++i)
        for (std::size_t j = 0; j < nt; ++j) {
            const double r = L * static_cast<double>(i) / static_cast<double>(nr);
            family.push_back(PathSpec::straight(std::polar(r, two_pi * static_cast<double>(j) / static_cast<double>(nt))));
        }

    const auto singular = a.at_level(L);
    if (!singular.empty()) {
        const std::size_t per_point = budget * 2 / 5 / singular.size();
        for (const cplx& w : singular) {
            const double m = std::abs(w);
            const cplx u = m > 0 ? w / m : cplx{1.0, 0.0};
            const cplx perp = cplx{0.0, 1.0} * u;
            std::size_t made = 0;
            for (int side : {+1, -1}) {
                for (double hf : {1.2, 2.0, 4.0}) {
                    const cplx bend = w + static_cast<double>(side) * hf * delta * perp;
                    // endpoints on small circles around w
                    for (double rf : {1.05, 1.5, 2.5})
                        for (int k = 0; k < 12 && made < per_point; ++k, ++made) {
                            const cplx end = w + std::polar(rf * delta, two_pi * k / 12.0);
                            family.emplace_back(std::vector<cplx>{0.0, bend, end});
                        }
                    // two-bend detours passing w on this side
                    for (double cf : {1.5, 3.0})
                        for (int k = 0; k < 8 && made < per_point; ++k, ++made) {
                            const cplx b1 = w - cf * delta * u + static_cast<double>(side) * hf * delta * perp;
                            const cplx b2 = w + cf * delta * u + static_cast<double>(side) * hf * delta * perp;
                            const cplx end = w + std::polar((1.05 + 0.3 * k) * delta, two_pi * k / 8.0);
                            family.emplace_back(std::vector<cplx>{0.0, b1, b2, end});
                        }
                }
            }
        }
    }

    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> radius(0.0, L), angle(0.0, two_pi);
    std::uniform_int_distribution<int> bends(1, 2);
    while (family.size() < budget) {
        std::vector<cplx> v{0.0};
        const int nb = bends(rng);
        for (int b = 0; b <= nb; ++b) v.push_back(std::polar(radius(rng) / (nb + 1) * (b + 1), angle(rng)));
        family.emplace_back(std::move(v));
    }
    return family;
}

SeminormEstimate seminorm_estimate_on(const PathEvaluator& germ, const FilteredSet& a, double delta, double L,
                                      const std::vector<PathSpec>& family) {
    SeminormEstimate est;
    est.sampled = family.size();
    for (const auto& p : family) {
        if (!is_allowed_path(a, p, delta, L).allowed) continue;
        ++est.admissible;
        const double v = std::abs(germ(p));
        if (est.admissible == 1 || v > est.value) {
            est.value = v;
            est.witness = p;
        }
    }
    return est;
}

SeminormEstimate seminorm_estimate(const PathEvaluator& germ, const FilteredSet& a, double delta, double L,
                                   std::size_t budget, unsigned seed) {
    return seminorm_estimate_on(germ, a, delta, L, seminorm_path_family(a, delta, L, budget, seed));
}

}  // namespace resurgence
