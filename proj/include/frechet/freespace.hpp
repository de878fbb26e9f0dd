#pragma once

/**
 * Free-space diagram machinery for the continuous Frechet distance.
 *
 * For chains P (m vertices) and Q (n vertices) and a radius delta, the free
 * space is the set of parameter pairs (s, t) in [1,m] x [1,n] with
 * d(P(s), Q(t)) <= delta. Cell (i, j) = [i-1,i] x [j-1,j] for i in [2,m],
 * j in [2,n]; the free region inside a cell is convex, so reachability
 * propagates across a cell from the lowest entry parameter alone.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "frechet/geometry.hpp"

namespace frechet {

/** Monotone breakpoint list over [1,m] x [1,n]; straight between breakpoints. */
struct Correspondence {
    std::vector<std::array<double, 2>> pts;

    std::size_t size() const { return pts.size(); }
    bool empty() const { return pts.empty(); }

    /** Append clamped to keep coordinates non-decreasing; drops exact repeats. */
    void append(double s, double t) {
        if (!pts.empty()) {
            s = std::max(s, pts.back()[0]);
            t = std::max(t, pts.back()[1]);
            if (s == pts.back()[0] && t == pts.back()[1]) return;
        }
        pts.push_back({s, t});
    }
};

inline bool is_valid_correspondence(const Correspondence& corr, std::size_t m, std::size_t n) {
    if (corr.pts.empty()) return false;
    const double tau = tolerance(static_cast<double>(std::max(m, n)));
    const auto& first = corr.pts.front();
    const auto& last = corr.pts.back();
    if (std::abs(first[0] - 1.0) > tau || std::abs(first[1] - 1.0) > tau) return false;
    if (std::abs(last[0] - static_cast<double>(m)) > tau ||
        std::abs(last[1] - static_cast<double>(n)) > tau)
        return false;
    for (std::size_t k = 0; k < corr.pts.size(); ++k) {
        if (corr.pts[k][0] < 1.0 - tau || corr.pts[k][0] > static_cast<double>(m) + tau)
            return false;
        if (corr.pts[k][1] < 1.0 - tau || corr.pts[k][1] > static_cast<double>(n) + tau)
            return false;
        if (k > 0 && (corr.pts[k][0] < corr.pts[k - 1][0] - tau ||
                      corr.pts[k][1] < corr.pts[k - 1][1] - tau))
            return false;
    }
    return true;
}

/** The four free intervals of one cell, in global curve parameters. */
struct FreeCell {
    std::optional<ParamRange> left;    // t-range on {i-1} x [j-1, j]
    std::optional<ParamRange> right;   // t-range on {i}   x [j-1, j]
    std::optional<ParamRange> bottom;  // s-range on [i-1, i] x {j-1}
    std::optional<ParamRange> top;     // s-range on [i-1, i] x {j}
};

/** Free range on chain edge [edge, edge+1] inside ball(center, delta), global params. */
inline std::optional<ParamRange> edge_ball_range(const Point& center, double delta,
                                                 const Chain& chain, std::size_t edge) {
    Segment seg{chain.vertex(edge), chain.vertex(edge + 1)};
    auto r = ball_segment_intersection(center, delta, seg);
    if (!r) return std::nullopt;
    const double base = static_cast<double>(edge);
    return ParamRange{base + r->lo, base + r->hi};
}

inline FreeCell cell_free_intervals(const Chain& P, const Chain& Q, std::size_t i, std::size_t j,
                                    double delta) {
    if (i < 2 || i > P.size() || j < 2 || j > Q.size())
        throw std::domain_error("cell index out of range");
    FreeCell c;
    c.left = edge_ball_range(P.vertex(i - 1), delta, Q, j - 1);
    c.right = edge_ball_range(P.vertex(i), delta, Q, j - 1);
    c.bottom = edge_ball_range(Q.vertex(j - 1), delta, P, i - 1);
    c.top = edge_ball_range(Q.vertex(j), delta, P, i - 1);
    return c;
}

/**
 * Reachable sub-intervals of the right and top edges of a cell, given the
 * reachable sub-intervals of its left and bottom edges. A bottom entry makes
 * the whole right free interval reachable and the top free interval from the
 * entry parameter on; a left entry makes the whole top free interval
 * reachable and the right free interval from the entry parameter on.
 */
inline std::pair<std::optional<ParamRange>, std::optional<ParamRange>> propagate_cell(
    const FreeCell& cell, const std::optional<ParamRange>& left_reach,
    const std::optional<ParamRange>& bottom_reach) {
    std::optional<ParamRange> right, top;
    if (bottom_reach) {
        right = cell.right;
        if (cell.top && cell.top->hi >= bottom_reach->lo)
            top = ParamRange{std::max(cell.top->lo, bottom_reach->lo), cell.top->hi};
    }
    if (left_reach) {
        top = cell.top;
        if (cell.right && cell.right->hi >= left_reach->lo) {
            ParamRange from_left{std::max(cell.right->lo, left_reach->lo), cell.right->hi};
            right = right ? ParamRange{std::min(right->lo, from_left.lo), right->hi} : from_left;
        }
    }
    return {right, top};
}

struct ExactDecision {
    bool reachable = false;
    std::optional<Correspondence> correspondence;
};

namespace detail {

/**
 * Longest prefix [1, T] of the boundary edge sequence that is entirely free:
 * edges[k] is the free range on [k, k+1] against the fixed opposite endpoint.
 */
inline double free_boundary_prefix(const Point& fixed, double delta, const Chain& chain) {
    double top = 1.0;
    for (std::size_t k = 1; k + 1 <= chain.size(); ++k) {
        auto I = edge_ball_range(fixed, delta, chain, k);
        if (!I || I->lo > static_cast<double>(k)) break;
        top = I->hi;
        if (top < static_cast<double>(k + 1)) break;
    }
    return top;
}

}  // namespace detail

/**
 * Decides d_F(P, Q) <= delta exactly (up to the closed tolerance) and, on
 * request, reconstructs a witness correspondence by walking the reachability
 * tables backwards, always taking the earliest feasible entry point.
 */
inline ExactDecision exact_decide(const Chain& P, const Chain& Q, double delta,
                                  bool want_correspondence = false) {
    if (delta < 0.0) throw std::domain_error("negative delta");
    const std::size_t m = P.size(), n = Q.size();
    const double scale = std::max({P.coordinate_scale(), Q.coordinate_scale(), delta});
    const double tau = tolerance(scale);

    if (m == 1 || n == 1) {
        bool ok = true;
        if (m == 1) {
            for (const auto& q : Q.vertices()) ok = ok && dist(P.vertex(1), q) <= delta + tau;
        } else {
            for (const auto& p : P.vertices()) ok = ok && dist(p, Q.vertex(1)) <= delta + tau;
        }
        ExactDecision out;
        out.reachable = ok;
        if (ok && want_correspondence) {
            Correspondence corr;
            corr.append(1.0, 1.0);
            corr.append(static_cast<double>(m), static_cast<double>(n));
            out.correspondence = corr;
        }
        return out;
    }

    if (dist(P.vertex(1), Q.vertex(1)) > delta + tau) return {};
    if (dist(P.vertex(m), Q.vertex(n)) > delta + tau) return {};

    const double left_top = detail::free_boundary_prefix(P.vertex(1), delta, Q);
    const double bottom_right = detail::free_boundary_prefix(Q.vertex(1), delta, P);

    auto boundary_reach = [](const std::optional<ParamRange>& I,
                             double prefix) -> std::optional<ParamRange> {
        if (!I || I->lo > prefix) return std::nullopt;
        return ParamRange{I->lo, std::min(I->hi, prefix)};
    };

    if (!want_correspondence) {
        std::vector<std::optional<ParamRange>> left_reach(n + 1);
        for (std::size_t j = 2; j <= n; ++j)
            left_reach[j] = boundary_reach(edge_ball_range(P.vertex(1), delta, Q, j - 1), left_top);
        std::optional<ParamRange> top_last;
        for (std::size_t i = 2; i <= m; ++i) {
            std::optional<ParamRange> bottom =
                boundary_reach(edge_ball_range(Q.vertex(1), delta, P, i - 1), bottom_right);
            for (std::size_t j = 2; j <= n; ++j) {
                FreeCell cell = cell_free_intervals(P, Q, i, j, delta);
                auto [right, top] = propagate_cell(cell, left_reach[j], bottom);
                left_reach[j] = right;
                bottom = top;
            }
            top_last = bottom;
        }
        ExactDecision out;
        const double nn = static_cast<double>(n), mm = static_cast<double>(m);
        out.reachable = (left_reach[n] && left_reach[n]->hi >= nn - tolerance(nn)) ||
                        (top_last && top_last->hi >= mm - tolerance(mm));
        return out;
    }

    // Full tables for reconstruction.
    const std::size_t cells = (m - 1) * (n - 1);
    auto idx = [n](std::size_t i, std::size_t j) { return (i - 2) * (n - 1) + (j - 2); };
    std::vector<std::optional<ParamRange>> L(cells), B(cells);
    for (std::size_t j = 2; j <= n; ++j)
        L[idx(2, j)] = boundary_reach(edge_ball_range(P.vertex(1), delta, Q, j - 1), left_top);
    for (std::size_t i = 2; i <= m; ++i)
        B[idx(i, 2)] = boundary_reach(edge_ball_range(Q.vertex(1), delta, P, i - 1), bottom_right);
    for (std::size_t i = 2; i <= m; ++i) {
        for (std::size_t j = 2; j <= n; ++j) {
            FreeCell cell = cell_free_intervals(P, Q, i, j, delta);
            auto [right, top] = propagate_cell(cell, L[idx(i, j)], B[idx(i, j)]);
            if (i < m) L[idx(i + 1, j)] = right;
            if (j < n) B[idx(i, j + 1)] = top;
            if (i == m && j == n) {
                const double nn = static_cast<double>(n), mm = static_cast<double>(m);
                const bool ok = (right && right->hi >= nn - tolerance(nn)) ||
                                (top && top->hi >= mm - tolerance(mm));
                if (!ok) return {};
            }
        }
    }

    // Backwards walk from (m, n), collecting breakpoints in reverse.
    std::vector<std::array<double, 2>> rev;
    rev.push_back({static_cast<double>(m), static_cast<double>(n)});
    std::size_t ci = m, cj = n;
    double xs = static_cast<double>(m), xt = static_cast<double>(n);
    for (;;) {
        const auto& lr = L[idx(ci, cj)];
        const auto& br = B[idx(ci, cj)];
        const bool l_ok = lr && lr->lo <= xt + tau;
        const bool b_ok = br && br->lo <= xs + tau;
        if (!l_ok && !b_ok) throw std::runtime_error("broken reachability table");
        std::array<double, 2> el{static_cast<double>(ci - 1), l_ok ? lr->lo : 0.0};
        std::array<double, 2> eb{b_ok ? br->lo : 0.0, static_cast<double>(cj - 1)};
        bool use_left;
        if (l_ok && b_ok)
            use_left = (el[0] < eb[0]) || (el[0] == eb[0] && el[1] <= eb[1]);
        else
            use_left = l_ok;
        const auto& e = use_left ? el : eb;
        rev.push_back(e);
        if (use_left) {
            if (ci == 2) break;
            --ci;
        } else {
            if (cj == 2) break;
            --cj;
        }
        xs = e[0];
        xt = e[1];
    }
    Correspondence corr;
    corr.append(1.0, 1.0);
    for (auto it = rev.rbegin(); it != rev.rend(); ++it) corr.append((*it)[0], (*it)[1]);
    ExactDecision out;
    out.reachable = true;
    out.correspondence = std::move(corr);
    return out;
}

/** Chain restricted to a parameter range, with the original parameter of each vertex. */
struct Subchain {
    Chain chain;
    std::vector<double> params;

    double to_original(double u) const {
        if (params.size() == 1) return params.front();
        std::size_t k = static_cast<std::size_t>(u);
        if (k >= params.size()) k = params.size() - 1;
        const double frac = u - static_cast<double>(k);
        return params[k - 1] + frac * (params[k] - params[k - 1]);
    }
};

inline Subchain extract_subchain(const Chain& chain, const ParamRange& range) {
    const double n = static_cast<double>(chain.size());
    const double tau = tolerance(n);
    if (range.lo < 1.0 - tau || range.hi > n + tau || range.lo > range.hi + tau)
        throw std::domain_error("subchain range out of bounds");
    const double lo = std::clamp(range.lo, 1.0, n);
    const double hi = std::clamp(std::max(range.hi, lo), 1.0, n);
    std::vector<Point> vs;
    std::vector<double> ps;
    auto push = [&](Point p, double s) {
        if (!vs.empty() && p == vs.back()) return;
        vs.push_back(std::move(p));
        ps.push_back(s);
    };
    push(point_at(chain, lo), lo);
    for (std::size_t k = static_cast<std::size_t>(lo) + 1; static_cast<double>(k) < hi; ++k)
        push(chain.vertex(k), static_cast<double>(k));
    push(point_at(chain, hi), hi);
    return Subchain{Chain(std::move(vs)), std::move(ps)};
}

/** Decides d_F(seg, chain[range]) <= delta via a two-row free-space sweep. */
inline bool segment_chain_decide(const Segment& seg, const Chain& chain, const ParamRange& range,
                                 double delta) {
    Chain segchain(std::vector<Point>{seg.a, seg.b});
    Subchain sub = extract_subchain(chain, range);
    return exact_decide(segchain, sub.chain, delta, false).reachable;
}

/**
 * Witness for segment_chain_decide: breakpoints (u, t) with u in [1, 2] over
 * the segment and t in [range.lo, range.hi] over the original chain.
 */
inline std::optional<Correspondence> segment_chain_correspondence(const Segment& seg,
                                                                  const Chain& chain,
                                                                  const ParamRange& range,
                                                                  double delta) {
    Chain segchain(std::vector<Point>{seg.a, seg.b});
    Subchain sub = extract_subchain(chain, range);
    ExactDecision dec = exact_decide(segchain, sub.chain, delta, true);
    if (!dec.reachable) return std::nullopt;
    Correspondence out;
    for (const auto& bp : dec.correspondence->pts) {
        const double u = segchain.size() == 1 ? 1.0 + (bp[0] - 1.0) : bp[0];
        out.append(u, sub.to_original(bp[1]));
    }
    // A collapsed segment keeps u = 1; stretch the final breakpoint to u = 2
    // so callers can always map [1, 2] onto the segment.
    if (segchain.size() == 1 && !out.pts.empty()) out.pts.back()[0] = 2.0;
    return out;
}

struct ExactFrechet {
    double value = 0.0;
    double lower = 0.0;  // largest failing radius probed (== value when exact)
    double upper = 0.0;  // smallest succeeding radius probed
};

/**
 * d_F(P, Q) within relative tolerance rel_tol by bisection between the
 * endpoint-distance lower bound and the max vertex-pair upper bound.
 */
inline ExactFrechet exact_frechet(const Chain& P, const Chain& Q, double rel_tol = 1e-10) {
    if (!(rel_tol > 0.0)) throw std::domain_error("rel_tol must be positive");
    const std::size_t m = P.size(), n = Q.size();
    double lo = std::max(dist(P.vertex(1), Q.vertex(1)), dist(P.vertex(m), Q.vertex(n)));
    if (exact_decide(P, Q, lo, false).reachable) return {lo, lo, lo};
    double hi = max_pairwise_vertex_distance(P, Q);
    if (!exact_decide(P, Q, hi, false).reachable)
        throw std::runtime_error("bisection upper bound is not feasible");
    const double floor_abs =
        1e-12 * std::max({1.0, P.coordinate_scale(), Q.coordinate_scale()});
    while (hi - lo > rel_tol * hi + floor_abs) {
        const double mid = 0.5 * (lo + hi);
        if (exact_decide(P, Q, mid, false).reachable)
            hi = mid;
        else
            lo = mid;
    }
    return {0.5 * (lo + hi), lo, hi};
}

/**
 * Maximum distance realized by a correspondence. Between breakpoints both
 * parameters move affinely inside one cell where the distance is convex, so
 * the cost is the maximum over breakpoints refined at integer crossings.
 */
inline double correspondence_cost(const Chain& P, const Chain& Q, const Correspondence& corr) {
    const std::size_t m = P.size(), n = Q.size();
    if (!is_valid_correspondence(corr, m, n))
        throw std::invalid_argument("correspondence is not a monotone (1,1)->(m,n) breakpoint list");
    const double mm = static_cast<double>(m), nn = static_cast<double>(n);
    auto clamp_pt = [&](std::array<double, 2> p) {
        return std::array<double, 2>{std::clamp(p[0], 1.0, mm), std::clamp(p[1], 1.0, nn)};
    };
    double worst = 0.0;
    auto eval = [&](double s, double t) {
        worst = std::max(worst, sq_dist(point_at(P, s), point_at(Q, t)));
    };
    std::vector<double> lambdas;
    auto prev = clamp_pt(corr.pts.front());
    eval(prev[0], prev[1]);
    for (std::size_t k = 1; k < corr.pts.size(); ++k) {
        const auto cur = clamp_pt(corr.pts[k]);
        lambdas.clear();
        for (int axis = 0; axis < 2; ++axis) {
            const double a = prev[axis], b = cur[axis];
            if (b > a) {
                for (double w = std::floor(a) + 1.0; w < b; w += 1.0)
                    if (w > a) lambdas.push_back((w - a) / (b - a));
            }
        }
        std::sort(lambdas.begin(), lambdas.end());
        for (double lam : lambdas)
            eval(prev[0] + lam * (cur[0] - prev[0]), prev[1] + lam * (cur[1] - prev[1]));
        eval(cur[0], cur[1]);
        prev = cur;
    }
    return std::sqrt(worst);
}

/**
 * Composition of correspondences A between P and R, and B between R and Q,
 * merged along the shared R parameter. Plateaus (one side holding R constant)
 * are emitted as rectilinear staircase steps.
 */
inline Correspondence compose_correspondences(const Correspondence& A, const Correspondence& B) {
    if (A.pts.empty() || B.pts.empty())
        throw std::invalid_argument("cannot compose empty correspondences");
    const double r_lo = A.pts.front()[1], r_hi = A.pts.back()[1];
    const double eps = tolerance(std::max(std::abs(r_lo), std::abs(r_hi)));
    if (std::abs(B.pts.front()[0] - r_lo) > eps || std::abs(B.pts.back()[0] - r_hi) > eps)
        throw std::invalid_argument("composed correspondences cover different extents of the shared chain");

    Correspondence out;
    std::size_t ka = 0, kb = 0;
    double s_cur = A.pts.front()[0];
    double t_cur = B.pts.front()[1];
    double r_cur = r_lo;
    out.append(s_cur, t_cur);
    const double inf = std::numeric_limits<double>::infinity();
    while (ka + 1 < A.pts.size() || kb + 1 < B.pts.size()) {
        const double ra_next = ka + 1 < A.pts.size() ? A.pts[ka + 1][1] : inf;
        const double rb_next = kb + 1 < B.pts.size() ? B.pts[kb + 1][0] : inf;
        if (ka + 1 < A.pts.size() && ra_next <= r_cur + eps) {
            ++ka;
            s_cur = std::max(s_cur, A.pts[ka][0]);
            out.append(s_cur, t_cur);
            continue;
        }
        if (kb + 1 < B.pts.size() && rb_next <= r_cur + eps) {
            ++kb;
            t_cur = std::max(t_cur, B.pts[kb][1]);
            out.append(s_cur, t_cur);
            continue;
        }
        const double r_next = std::min(ra_next, rb_next);
        double s_next, t_next;
        if (ra_next <= r_next + eps) {
            ++ka;
            s_next = A.pts[ka][0];
        } else {
            const double denom = ra_next - A.pts[ka][1];
            const double lam = denom > 0.0 ? (r_next - A.pts[ka][1]) / denom : 1.0;
            s_next = A.pts[ka][0] + lam * (A.pts[ka + 1][0] - A.pts[ka][0]);
        }
        if (rb_next <= r_next + eps) {
            ++kb;
            t_next = B.pts[kb][1];
        } else {
            const double denom = rb_next - B.pts[kb][0];
            const double lam = denom > 0.0 ? (r_next - B.pts[kb][0]) / denom : 1.0;
            t_next = B.pts[kb][1] + lam * (B.pts[kb + 1][1] - B.pts[kb][1]);
        }
        s_cur = std::max(s_cur, s_next);
        t_cur = std::max(t_cur, t_next);
        r_cur = r_next;
        out.append(s_cur, t_cur);
    }
    out.append(A.pts.back()[0], B.pts.back()[1]);
    return out;
}

}  // namespace frechet
