#pragma once

/**
 * Geometric primitives for polygonal chains in d-dimensional Euclidean space.
 *
 * Conventions used throughout the library:
 *  - A chain with n vertices is parameterized over [1, n]; parameter i + u
 *    with integer i and u in [0, 1) interpolates the edge from vertex i to
 *    vertex i + 1 (vertex access is 1-based to match).
 *  - All geometric predicates are closed comparisons with a tolerance
 *    tolerance(scale) = 1e-9 * max(1, |scale|), where scale is the magnitude
 *    of the coordinates involved.
 */

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace frechet {

using Point = std::vector<double>;

inline double tolerance(double scale) {
    return 1e-9 * std::max(1.0, std::abs(scale));
}

inline double sq_dist(const Point& a, const Point& b) {
    assert(a.size() == b.size());
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double diff = a[k] - b[k];
        s += diff * diff;
    }
    return s;
}

inline double dist(const Point& a, const Point& b) { return std::sqrt(sq_dist(a, b)); }

inline Point lerp(const Point& a, const Point& b, double u) {
    Point p(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) p[k] = a[k] + u * (b[k] - a[k]);
    return p;
}

inline double max_abs_coord(const Point& p) {
    double m = 0.0;
    for (double c : p) m = std::max(m, std::abs(c));
    return m;
}

/** Closed interval of parameters; emptiness is conveyed by std::optional at call sites. */
struct ParamRange {
    double lo = 0.0;
    double hi = 0.0;

    double length() const { return hi - lo; }
    bool contains(double x, double tau = 0.0) const { return x >= lo - tau && x <= hi + tau; }
};

/** Directed line segment with its own parameter u in [0, 1]. */
struct Segment {
    Point a;
    Point b;

    Point point_at(double u) const { return lerp(a, b, u); }
};

/** Axis-aligned cube given by its low corner and side length. */
struct Box {
    Point lo;
    double side = 0.0;

    bool contains(const Point& p, double tau = 0.0) const {
        for (std::size_t k = 0; k < lo.size(); ++k)
            if (p[k] < lo[k] - tau || p[k] > lo[k] + side + tau) return false;
        return true;
    }

    /** Euclidean distance from p to the closed box (0 inside). */
    double distance_to(const Point& p) const {
        double s = 0.0;
        for (std::size_t k = 0; k < lo.size(); ++k) {
            const double below = lo[k] - p[k];
            const double above = p[k] - (lo[k] + side);
            const double gap = std::max({below, above, 0.0});
            s += gap * gap;
        }
        return std::sqrt(s);
    }
};

/**
 * Polygonal chain. Construction collapses exactly-coincident consecutive
 * vertices and rejects empty vertex lists and mixed dimensions.
 */
class Chain {
  public:
    Chain() = default;

    explicit Chain(std::vector<Point> vertices) {
        if (vertices.empty()) throw std::invalid_argument("chain needs at least one vertex");
        const std::size_t d = vertices.front().size();
        if (d == 0) throw std::invalid_argument("chain vertices need dimension >= 1");
        verts_.reserve(vertices.size());
        for (auto& v : vertices) {
            if (v.size() != d) throw std::invalid_argument("chain vertices have mixed dimensions");
            if (!verts_.empty() && v == verts_.back()) continue;
            verts_.push_back(std::move(v));
        }
    }

    std::size_t size() const { return verts_.size(); }
    std::size_t dim() const { return verts_.empty() ? 0 : verts_.front().size(); }

    /** 1-based vertex access, matching the curve parameter convention. */
    const Point& vertex(std::size_t i) const {
        assert(i >= 1 && i <= verts_.size());
        return verts_[i - 1];
    }

    const std::vector<Point>& vertices() const { return verts_; }

    double coordinate_scale() const {
        double m = 0.0;
        for (const auto& v : verts_) m = std::max(m, max_abs_coord(v));
        return m;
    }

  private:
    std::vector<Point> verts_;
};

/** Point on the chain at parameter s in [1, size()]; clamped within tolerance. */
inline Point point_at(const Chain& chain, double s) {
    const double n = static_cast<double>(chain.size());
    if (!(s >= 1.0 - tolerance(n) && s <= n + tolerance(n)))
        throw std::domain_error("curve parameter out of range");
    if (chain.size() == 1) return chain.vertex(1);
    s = std::clamp(s, 1.0, n);
    std::size_t i = static_cast<std::size_t>(s);
    if (i >= chain.size()) i = chain.size() - 1;
    const double u = s - static_cast<double>(i);
    if (u == 0.0) return chain.vertex(i);
    return lerp(chain.vertex(i), chain.vertex(i + 1), u);
}

/**
 * Parameters u in [0, 1] where the segment meets the closed ball
 * d(seg(u), center) <= radius. Tangency yields a degenerate range.
 */
inline std::optional<ParamRange> ball_segment_intersection(const Point& center, double radius,
                                                           const Segment& seg) {
    if (radius < 0.0) throw std::domain_error("negative ball radius");
    assert(center.size() == seg.a.size() && center.size() == seg.b.size());
    double A = 0.0, B = 0.0, C = 0.0, D = 0.0;
    double scale = std::abs(radius);
    for (std::size_t k = 0; k < center.size(); ++k) {
        const double dir = seg.b[k] - seg.a[k];
        const double rel = seg.a[k] - center[k];
        const double relb = seg.b[k] - center[k];
        A += dir * dir;
        B += 2.0 * rel * dir;
        C += rel * rel;
        D += relb * relb;
        scale = std::max({scale, std::abs(seg.a[k]), std::abs(seg.b[k]), std::abs(center[k])});
    }
    const double tau = tolerance(scale);
    const double r = radius + tau;
    const double rr = r * r;
    // Endpoint membership is decided on the directly summed squares: the
    // quadratic form below cancels catastrophically near touching endpoints,
    // where C - B^2/4A carries an absolute error of order eps * scale^2 that
    // can dwarf rr for small radii.
    const bool a_in = C <= rr;
    const bool b_in = D <= rr;
    if (A <= tau * tau) {
        // Degenerate segment: a single point.
        if (a_in || b_in) return ParamRange{0.0, 1.0};
        return std::nullopt;
    }
    const double u0 = -B / (2.0 * A);
    const double dmin_sq = std::max(0.0, C - (B * B) / (4.0 * A));
    double lo = 1.0, hi = 0.0;
    if (dmin_sq <= rr) {
        const double h = std::sqrt(std::max(0.0, (rr - dmin_sq) / A));
        lo = u0 - h;
        hi = u0 + h;
    } else if (!a_in && !b_in) {
        return std::nullopt;
    }
    if (a_in) lo = std::min(lo, 0.0);
    if (b_in) hi = std::max(hi, 1.0);
    if (hi < 0.0 || lo > 1.0) return std::nullopt;
    return ParamRange{std::clamp(lo, 0.0, 1.0), std::clamp(hi, 0.0, 1.0)};
}

/**
 * Smallest parameter s > s_start at which the chain lies on the boundary of
 * box. The chain point at s_start must lie inside or on the box (within
 * tolerance); std::nullopt when the rest of the chain never meets the
 * boundary.
 */
inline std::optional<double> first_boundary_crossing(const Chain& chain, double s_start,
                                                     const Box& box) {
    const std::size_t n = chain.size();
    const double scale = std::max(chain.coordinate_scale(),
                                  max_abs_coord(box.lo) + std::abs(box.side));
    const double tau = tolerance(scale);
    {
        const Point start = point_at(chain, s_start);
        if (box.distance_to(start) > tau)
            throw std::domain_error("first_boundary_crossing start lies outside the box");
    }
    if (n == 1) return std::nullopt;

    const double inf = std::numeric_limits<double>::infinity();
    double s = std::clamp(s_start, 1.0, static_cast<double>(n));
    std::size_t edge = static_cast<std::size_t>(s);
    if (edge >= n) edge = n - 1;
    Point from = point_at(chain, s);

    for (;;) {
        const Point& to = chain.vertex(edge + 1);
        // Slab intersection of the sub-segment from -> to with the box.
        double t_in = -inf, t_out = inf;
        bool feasible = true;
        for (std::size_t k = 0; k < from.size(); ++k) {
            const double dir = to[k] - from[k];
            const double lo_k = box.lo[k];
            const double hi_k = box.lo[k] + box.side;
            if (dir == 0.0) {
                if (from[k] < lo_k - tau || from[k] > hi_k + tau) {
                    feasible = false;
                    break;
                }
                continue;
            }
            double t0 = (lo_k - from[k]) / dir;
            double t1 = (hi_k - from[k]) / dir;
            if (t0 > t1) std::swap(t0, t1);
            t_in = std::max(t_in, t0);
            t_out = std::min(t_out, t1);
        }
        if (feasible && t_in <= t_out) {
            const double s_to = static_cast<double>(edge + 1);
            // Boundary touches: entry from outside (t_in > 0) and exit (t_out).
            for (double u : {t_in, t_out}) {
                if (u < 0.0 || u > 1.0) continue;
                const double s_cross = s + u * (s_to - s);
                if (s_cross > s_start) return s_cross;
            }
        }
        if (edge + 1 == n) return std::nullopt;
        ++edge;
        s = static_cast<double>(edge);
        from = chain.vertex(edge);
    }
}

/**
 * True when every point of the chain restricted to range lies within margin
 * of the closed box. Point-to-box distance is convex along a segment, so the
 * maximum over each edge is attained at its endpoints.
 */
inline bool within_expanded_box(const Chain& chain, const ParamRange& range, const Box& box,
                                double margin) {
    if (range.lo > range.hi + tolerance(static_cast<double>(chain.size())))
        throw std::invalid_argument("within_expanded_box needs range.lo <= range.hi");
    const double scale = std::max(chain.coordinate_scale(),
                                  max_abs_coord(box.lo) + std::abs(box.side));
    const double bound = margin + tolerance(std::max(scale, margin));
    if (box.distance_to(point_at(chain, range.lo)) > bound) return false;
    if (box.distance_to(point_at(chain, range.hi)) > bound) return false;
    const std::size_t first = static_cast<std::size_t>(std::floor(range.lo)) + 1;
    for (std::size_t i = first; static_cast<double>(i) < range.hi; ++i) {
        if (box.distance_to(chain.vertex(i)) > bound) return false;
    }
    return true;
}

/** Largest distance between a vertex of a and a vertex of b. */
inline double max_pairwise_vertex_distance(const Chain& a, const Chain& b) {
    double m = 0.0;
    for (const auto& p : a.vertices())
        for (const auto& q : b.vertices()) m = std::max(m, sq_dist(p, q));
    return std::sqrt(m);
}

}  // namespace frechet
