#pragma once

/**
 * Approximate decision procedure for the continuous Frechet distance.
 *
 * Decides d_F(P, Q) <= delta against d_F(P, Q) > delta with a one-sided
 * guarantee: Success carries a correspondence whose measured cost is at most
 * sqrt(d) * (alpha + 2) * delta, while Failure certifies that delta is a true
 * lower bound. A shifted grid of side alpha * delta with margin 3 * delta
 * classifies vertices: good vertices sit clear of every grid hyperplane, and
 * reachability intervals are only stored on cell edges that pair a dangerous
 * vertex with a bad edge. Runs of good vertices are crossed by greedy
 * box-to-box walks instead of cell-by-cell propagation, which keeps the
 * number of stored intervals near (n / alpha)^2 on well-spread inputs.
 *
 * Interval keys are processed once, in lexicographic order; every designation
 * targets a strictly later key (checked at runtime), so a single ordered
 * sweep suffices. Each designation carries a provenance record from which a
 * witness correspondence is reassembled backwards from (m, n).
 */

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "frechet/freespace.hpp"
#include "frechet/geometry.hpp"
#include "frechet/grid.hpp"

namespace frechet {

enum class Orientation { Vertical = 0, Horizontal = 1 };

/**
 * Identity of a cell edge that can hold an approximate reachability interval.
 * Vertical(i, j) is the segment {i} x [j-1, j] (vertex p_i against edge
 * Q[j-1, j]); Horizontal(i, j) is [i-1, i] x {j} (edge P[i-1, i] against
 * vertex q_j). Keys order lexicographically by (i, j) with Vertical first,
 * which is exactly the order the main loop consumes them in.
 */
struct IntervalKey {
    Orientation orient = Orientation::Vertical;
    std::size_t i = 0;
    std::size_t j = 0;

    friend bool operator<(const IntervalKey& a, const IntervalKey& b) {
        if (a.i != b.i) return a.i < b.i;
        if (a.j != b.j) return a.j < b.j;
        return static_cast<int>(a.orient) < static_cast<int>(b.orient);
    }
    friend bool operator==(const IntervalKey& a, const IntervalKey& b) {
        return a.orient == b.orient && a.i == b.i && a.j == b.j;
    }
};

/**
 * How one designated sub-range was reached. `local_path` is a monotone list
 * of global parameter pairs from `anchor` (a point on the predecessor
 * interval, or (1, 1) for seeds) to the canonical point; any point of `range`
 * is then reached from the canonical point by one straight in-cell segment.
 */
struct ProvenanceRecord {
    std::optional<IntervalKey> pred;
    std::array<double, 2> anchor{1.0, 1.0};
    std::vector<std::array<double, 2>> local_path;
    ParamRange range{0.0, 0.0};
};

/** Stored interval for one key: the union of designated ranges. */
struct ApproxInterval {
    ParamRange range{0.0, 0.0};
    std::vector<ProvenanceRecord> records;
};

/**
 * Counters for runtime checks of claims the procedure relies on. All stay
 * zero on well-scaled inputs; the strict test suite asserts as much.
 */
struct DecideDiagnostics {
    std::size_t merge_hull = 0;        // union of ranges was not an interval
    std::size_t restriction = 0;       // designation off the bad-edge/dangerous-vertex keys
    std::size_t late_designation = 0;  // designation at or before the processing cursor
    std::size_t walk_overflow = 0;     // greedy walk exceeded its iteration budget
    std::size_t walk_aborted = 0;      // greedy walk lost a numerical precondition

    std::size_t total() const {
        return merge_hull + restriction + late_designation + walk_overflow + walk_aborted;
    }
};

struct DecisionStats {
    double alpha_requested = 0.0;
    double alpha_used = 0.0;
    double delta = 0.0;
    std::size_t intervals_stored = 0;
    std::size_t designations = 0;
    std::size_t trivial_records = 0;
    std::size_t greedy_walks = 0;
    std::size_t greedy_iterations = 0;
    std::size_t bad_p_vertices = 0;
    std::size_t bad_q_vertices = 0;
    std::size_t bad_p_edges = 0;
    std::size_t bad_q_edges = 0;
    std::size_t dangerous_p = 0;
    std::size_t dangerous_q = 0;
    bool exact_fallback = false;  // single-vertex chain, answered by exact_decide
    bool all_bad = false;         // grid too coarse for alpha; every vertex treated bad
    DecideDiagnostics diagnostics;
    std::vector<std::string> warnings;
};

/**
 * Success implies measured_cost = correspondence_cost(P, Q, *correspondence)
 * and measured_cost <= sqrt(d) * (alpha_used + 2) * delta up to tolerance.
 * Failure implies d_F(P, Q) > delta. The correspondence is omitted when the
 * caller asks for a bare decision.
 */
struct DecisionOutcome {
    bool success = false;
    std::optional<Correspondence> correspondence;
    double measured_cost = std::numeric_limits<double>::quiet_NaN();
    DecisionStats stats;
    // Free intervals kept by the sweep, in store order. Vertical keys carry
    // ranges on [j-1, j] of Q at P-vertex i, horizontal ones the mirror.
    std::vector<std::pair<IntervalKey, ParamRange>> intervals;
};

namespace detail {

/** Smallest parameter in [lo, hi] whose chain point lies within delta of center. */
inline std::optional<double> first_entry(const Chain& c, double lo, double hi,
                                         const Point& center, double delta) {
    const std::size_t n = c.size();
    const double tau = tolerance(static_cast<double>(n));
    lo = std::max(lo, 1.0);
    hi = std::min(hi, static_cast<double>(n));
    if (lo > hi + tau) return std::nullopt;
    if (n == 1)
        return dist(c.vertex(1), center) <= delta + tolerance(c.coordinate_scale())
                   ? std::optional<double>(1.0)
                   : std::nullopt;
    const auto e_lo = std::min<std::size_t>(std::max<std::size_t>(
                          static_cast<std::size_t>(std::floor(lo)), 1), n - 1);
    const auto e_hi = std::min<std::size_t>(static_cast<std::size_t>(std::floor(hi)), n - 1);
    for (std::size_t e = e_lo; e <= e_hi; ++e) {
        auto r = edge_ball_range(center, delta, c, e);
        if (!r) continue;
        const double a = std::max(r->lo, lo);
        const double b = std::min(r->hi, hi);
        if (a <= b + tau) return std::clamp(a, lo, hi);
    }
    return std::nullopt;
}

/** Largest parameter in [lo, hi] whose chain point lies within delta of center. */
inline std::optional<double> last_entry(const Chain& c, double lo, double hi,
                                        const Point& center, double delta) {
    const std::size_t n = c.size();
    const double tau = tolerance(static_cast<double>(n));
    lo = std::max(lo, 1.0);
    hi = std::min(hi, static_cast<double>(n));
    if (lo > hi + tau) return std::nullopt;
    if (n == 1)
        return dist(c.vertex(1), center) <= delta + tolerance(c.coordinate_scale())
                   ? std::optional<double>(1.0)
                   : std::nullopt;
    const auto e_lo = std::min<std::size_t>(std::max<std::size_t>(
                          static_cast<std::size_t>(std::floor(lo)), 1), n - 1);
    const auto e_hi = std::min<std::size_t>(static_cast<std::size_t>(std::floor(hi)), n - 1);
    for (std::size_t e = e_hi + 1; e-- > e_lo;) {
        auto r = edge_ball_range(center, delta, c, e);
        if (!r) continue;
        const double a = std::max(r->lo, lo);
        const double b = std::min(r->hi, hi);
        if (a <= b + tau) return std::clamp(b, lo, hi);
    }
    return std::nullopt;
}

/** Largest distance from any point of chain[range] to center. The maximum
 *  over a polyline is attained at a vertex or a range endpoint. */
inline double max_distance_to_point(const Chain& c, ParamRange range, const Point& center) {
    const double n = static_cast<double>(c.size());
    const double lo = std::clamp(range.lo, 1.0, n);
    const double hi = std::clamp(std::max(range.hi, range.lo), 1.0, n);
    double best = std::max(dist(point_at(c, lo), center), dist(point_at(c, hi), center));
    for (double v = std::floor(lo) + 1.0; v < hi; v += 1.0)
        best = std::max(best, dist(c.vertex(static_cast<std::size_t>(v)), center));
    return best;
}

/** State shared by one approx_decide invocation; never escapes it. */
struct DecideContext {
    const Chain& P;
    const Chain& Q;
    DecideContext(const Chain& p, const Chain& q) : P(p), Q(q) {}
    double delta = 0.0;
    double tau_par = 0.0;   // tolerance in parameter space
    double tau_coord = 0.0; // tolerance in coordinate space
    GridSpec grid;
    ChainLabels lab_p, lab_q;
    std::map<IntervalKey, ApproxInterval> store;
    std::vector<ProvenanceRecord> trivial;  // records landing exactly on (m, n)
    IntervalKey cursor{};
    bool cursor_set = false;
    DecisionStats stats;
};

/** Keys may only pair a dangerous vertex with a bad edge. */
inline bool key_allowed(const DecideContext& ctx, const IntervalKey& k) {
    if (k.orient == Orientation::Vertical)
        return ctx.lab_q.edge_bad[k.j - 1] && ctx.lab_p.vertex_dangerous[k.i];
    return ctx.lab_p.edge_bad[k.i - 1] && ctx.lab_q.vertex_dangerous[k.j];
}

/**
 * Unions `range` into the interval stored for `key`. All ranges designated to
 * one key share their upper endpoint, so the union stays an interval; a
 * mismatch falls back to the convex hull and is counted as a diagnostic, as
 * is any designation that does not lie strictly after the processing cursor.
 */
inline void designate(DecideContext& ctx, const IntervalKey& key, ParamRange range,
                      ProvenanceRecord record) {
    const double cell_lo = key.orient == Orientation::Vertical
                               ? static_cast<double>(key.j - 1)
                               : static_cast<double>(key.i - 1);
    const double cell_hi = cell_lo + 1.0;
    range.lo = std::max(range.lo, cell_lo);
    range.hi = std::min(range.hi, cell_hi);
    if (range.lo > range.hi + ctx.tau_par) return;
    range.lo = std::min(range.lo, range.hi);

    ++ctx.stats.designations;
    if (!key_allowed(ctx, key)) ++ctx.stats.diagnostics.restriction;
    if (ctx.cursor_set && !(ctx.cursor < key)) ++ctx.stats.diagnostics.late_designation;

    record.range = range;
    auto [it, inserted] = ctx.store.try_emplace(key);
    ApproxInterval& iv = it->second;
    if (inserted) {
        iv.range = range;
    } else {
        if (std::abs(iv.range.hi - range.hi) > ctx.tau_par)
            ++ctx.stats.diagnostics.merge_hull;
        iv.range.lo = std::min(iv.range.lo, range.lo);
        iv.range.hi = std::max(iv.range.hi, range.hi);
    }
    iv.records.push_back(std::move(record));
}

inline void designate_trivial(DecideContext& ctx, ProvenanceRecord record) {
    ++ctx.stats.designations;
    ctx.trivial.push_back(std::move(record));
}

/**
 * Greedy box walk from a free pair (vertex a0 of the leading chain, parameter
 * b0 on the other). The walk repeatedly looks at the grid box of the current
 * anchor vertex and at where both curves first leave it:
 *  - neither curve leaving means both tails may end inside, yielding the
 *    trivial interval at (m, n) when the other tail stays within the expanded
 *    box;
 *  - a good exit edge is crossed in one step by matching it against the
 *    stretch of the other curve between the last and first contacts of its
 *    endpoints, after which the walk continues from the next box (swapping
 *    the leading chain when the other curve exits first);
 *  - two bad exit edges terminate the walk, designating intervals for every
 *    edge of the other curve that comes within delta of the exit point.
 * `swapped` = true makes Q the leading chain; designations and path points
 * are always recorded in (P, Q) coordinates.
 */
inline void greedy_mapping(DecideContext& ctx, bool swapped, std::size_t a0, double b0,
                           const IntervalKey& pred_key) {
    bool sw = swapped;
    std::size_t a = a0;
    double b = b0;
    const double delta = ctx.delta;
    const double tau_par = ctx.tau_par;
    ++ctx.stats.greedy_walks;

    std::vector<std::array<double, 2>> path;
    auto emit = [&](double a_par, double b_par) {
        std::array<double, 2> pt = sw ? std::array<double, 2>{b_par, a_par}
                                      : std::array<double, 2>{a_par, b_par};
        if (!path.empty()) {
            pt[0] = std::max(pt[0], path.back()[0]);
            pt[1] = std::max(pt[1], path.back()[1]);
            if (pt == path.back()) return;
        }
        path.push_back(pt);
    };
    emit(static_cast<double>(a), b);

    // Record factory: the shared walk prefix plus this designation's closing
    // hops, all in (P, Q) coordinates via emit's convention at call time.
    auto make_record = [&](std::initializer_list<std::array<double, 2>> frame_hops) {
        const std::size_t base = path.size();
        for (const auto& hop : frame_hops) emit(hop[0], hop[1]);
        ProvenanceRecord rec;
        rec.pred = pred_key;
        rec.anchor = path.front();
        rec.local_path = path;
        path.resize(base);  // undo the closing hops for the next designation
        return rec;
    };
    auto frame_key = [&](Orientation o, std::size_t fa, std::size_t fb) {
        if (!sw) return IntervalKey{o, fa, fb};
        return IntervalKey{o == Orientation::Vertical ? Orientation::Horizontal
                                                      : Orientation::Vertical,
                           fb, fa};
    };

    const std::size_t budget = ctx.P.size() + ctx.Q.size() + 4;
    for (std::size_t iter = 0;; ++iter) {
        if (iter >= budget) {
            ++ctx.stats.diagnostics.walk_overflow;
            return;
        }
        ++ctx.stats.greedy_iterations;
        const Chain& A = sw ? ctx.Q : ctx.P;
        const Chain& B = sw ? ctx.P : ctx.Q;
        const ChainLabels& lab_a = sw ? ctx.lab_q : ctx.lab_p;
        const ChainLabels& lab_b = sw ? ctx.lab_p : ctx.lab_q;
        const std::size_t ma = A.size();
        const std::size_t nb = B.size();

        const GridCell cell = box_of(A.vertex(a), ctx.grid);
        const Box& box = cell.box;

        std::optional<double> a_exit, b_exit;
        try {
            a_exit = first_boundary_crossing(A, static_cast<double>(a), box);
            b_exit = first_boundary_crossing(B, b, box);
        } catch (const std::domain_error&) {
            ++ctx.stats.diagnostics.walk_aborted;
            return;
        }

        if (!a_exit) {
            // The leading chain ends inside the box; if the rest of the other
            // curve stays within the expanded box the goal is reachable.
            if (within_expanded_box(B, ParamRange{b, static_cast<double>(nb)}, box, delta)) {
                designate_trivial(ctx, make_record({{static_cast<double>(ma), b},
                                                    {static_cast<double>(ma),
                                                     static_cast<double>(nb)}}));
            }
            return;
        }
        if (!b_exit) {
            if (within_expanded_box(A, ParamRange{static_cast<double>(a),
                                                  static_cast<double>(ma)},
                                    box, delta)) {
                designate_trivial(ctx, make_record({{static_cast<double>(a),
                                                     static_cast<double>(nb)},
                                                    {static_cast<double>(ma),
                                                     static_cast<double>(nb)}}));
            }
            return;
        }

        // Snap boundary touches onto integer vertices before taking ceilings
        // so an exit through a vertex names that vertex, not the next one.
        auto exit_index = [&](double x, std::size_t nmax) {
            const double r = std::round(x);
            const double v = std::abs(x - r) <= tau_par ? r : std::ceil(x);
            const auto idx = static_cast<std::size_t>(std::max(v, 1.0));
            return std::min(idx, nmax);
        };
        std::size_t ie = exit_index(*a_exit, ma);
        if (ie <= a) ie = a + 1;
        std::size_t je = exit_index(*b_exit, nb);
        const auto jfloor = static_cast<std::size_t>(std::floor(b + tau_par));
        if (je <= jfloor) je = jfloor + 1;
        if (je > nb) je = nb;

        const bool a_edge_good = !lab_a.edge_bad[ie - 1];
        const bool b_edge_good = !lab_b.edge_bad[je - 1];

        if (a_edge_good) {
            // Cross the exit edge of the leading chain in one step.
            auto bf = first_entry(B, b, static_cast<double>(nb), A.vertex(ie), delta);
            if (!bf) return;
            auto bc = last_entry(B, b, *bf, A.vertex(ie - 1), delta);
            if (!bc) return;
            if (!within_expanded_box(B, ParamRange{b, *bc}, box, delta)) return;
            const Segment edge{A.vertex(ie - 1), A.vertex(ie)};
            auto piece = segment_chain_correspondence(edge, B, ParamRange{*bc, *bf}, delta);
            if (!piece) return;
            emit(static_cast<double>(ie - 1), b);
            emit(static_cast<double>(ie - 1), *bc);
            for (const auto& bp : piece->pts)
                emit(static_cast<double>(ie - 1) + (bp[0] - 1.0), bp[1]);
            a = ie;
            b = *bf;
            continue;
        }

        if (b_edge_good) {
            // The other curve exits over a good edge; cross that edge and
            // hand it the lead. When part of the edge is already within
            // reach of the anchor vertex, the crossing starts from the
            // farthest such point rather than the edge start; this also
            // covers b sitting past the edge start, where the start vertex
            // may be unreachable.
            auto af = first_entry(A, static_cast<double>(a), static_cast<double>(ma),
                                  B.vertex(je), delta);
            if (!af) return;
            std::optional<ParamRange> w = edge_ball_range(A.vertex(a), delta, B, je - 1);
            if (w && std::max(w->lo, b) > w->hi + tau_par) w.reset();
            if (w) {
                const double tx = std::clamp(w->hi, b, static_cast<double>(je));
                const Point bx = point_at(B, tx);
                auto acr = last_entry(A, static_cast<double>(a), *af, bx, delta);
                const double ac = acr ? *acr : static_cast<double>(a);
                const double root_d = std::sqrt(static_cast<double>(A.dim()));
                const double cap =
                    std::max(root_d * (ctx.stats.alpha_used + 1.0), 3.0) * delta +
                    ctx.tau_coord;
                if (max_distance_to_point(A, ParamRange{static_cast<double>(a), ac}, bx) > cap)
                    return;
                const Segment tail{bx, B.vertex(je)};
                auto piece = segment_chain_correspondence(tail, A, ParamRange{ac, *af}, delta);
                if (!piece) return;
                emit(static_cast<double>(a), tx);
                emit(ac, tx);
                for (const auto& bp : piece->pts)
                    emit(bp[1], tx + (bp[0] - 1.0) * (static_cast<double>(je) - tx));
            } else {
                // No part of the edge is reachable from the anchor, so b is
                // at or before the edge start; cross the whole edge.
                auto ac = last_entry(A, static_cast<double>(a), *af, B.vertex(je - 1), delta);
                if (!ac) return;
                if (!within_expanded_box(A, ParamRange{static_cast<double>(a), *ac}, box, delta))
                    return;
                const Segment edge{B.vertex(je - 1), B.vertex(je)};
                auto piece = segment_chain_correspondence(edge, A, ParamRange{*ac, *af}, delta);
                if (!piece) return;
                const double bstart = static_cast<double>(je - 1);
                emit(static_cast<double>(a), std::max(bstart, b));
                emit(*ac, std::max(bstart, b));
                for (const auto& bp : piece->pts) emit(bp[1], bstart + (bp[0] - 1.0));
            }
            a = je;
            b = *af;
            sw = !sw;
            continue;
        }

        // Both exit edges are bad: designate intervals and stop. First the
        // family anchored at the leading chain's exit point...
        const Point exit_a = point_at(A, *a_exit);
        const Point exit_b = point_at(B, *b_exit);
        {
            const auto e_lo = std::min<std::size_t>(std::max<std::size_t>(
                                  static_cast<std::size_t>(std::floor(b)), 1), nb - 1);
            const std::size_t e_hi = je - 1;
            for (std::size_t e = e_lo; e <= e_hi; ++e) {
                auto r = edge_ball_range(exit_a, delta, B, e);
                if (!r) continue;
                const double wlo = std::max(static_cast<double>(e), b);
                const double whi = std::min(static_cast<double>(e + 1), *b_exit);
                const double lo = std::max(r->lo, wlo);
                const double hi = std::min(r->hi, whi);
                if (lo > hi + tau_par) continue;
                const double bk = std::clamp(lo, wlo, whi);
                const std::size_t jk = e + 1;
                if (auto vr = edge_ball_range(A.vertex(ie), delta, B, e)) {
                    ParamRange range{std::max(vr->lo, bk), vr->hi};
                    if (range.lo <= range.hi + tau_par)
                        designate(ctx, frame_key(Orientation::Vertical, ie, jk), range,
                                  make_record({{*a_exit, b}, {*a_exit, bk}}));
                }
                if (auto hr = edge_ball_range(B.vertex(jk), delta, A, ie - 1)) {
                    ParamRange range{std::max(hr->lo, *a_exit), hr->hi};
                    if (range.lo <= range.hi + tau_par)
                        designate(ctx, frame_key(Orientation::Horizontal, ie, jk), range,
                                  make_record({{*a_exit, b}, {*a_exit, bk}}));
                }
            }
        }
        // ... then the family anchored at the other curve's exit point.
        {
            const auto e_lo = std::min<std::size_t>(a, ma - 1);
            const std::size_t e_hi = ie - 1;
            for (std::size_t e = e_lo; e <= e_hi; ++e) {
                auto r = edge_ball_range(exit_b, delta, A, e);
                if (!r) continue;
                const double wlo = std::max(static_cast<double>(e), static_cast<double>(a));
                const double whi = std::min(static_cast<double>(e + 1), *a_exit);
                const double lo = std::max(r->lo, wlo);
                const double hi = std::min(r->hi, whi);
                if (lo > hi + tau_par) continue;
                const double sk = std::clamp(lo, wlo, whi);
                const std::size_t ik = e + 1;
                if (auto hr = edge_ball_range(B.vertex(je), delta, A, e)) {
                    ParamRange range{std::max(hr->lo, sk), hr->hi};
                    if (range.lo <= range.hi + tau_par)
                        designate(ctx, frame_key(Orientation::Horizontal, ik, je), range,
                                  make_record({{static_cast<double>(a), *b_exit},
                                               {sk, *b_exit}}));
                }
                if (auto vr = edge_ball_range(A.vertex(ik), delta, B, je - 1)) {
                    ParamRange range{std::max(vr->lo, *b_exit), vr->hi};
                    if (range.lo <= range.hi + tau_par)
                        designate(ctx, frame_key(Orientation::Vertical, ik, je), range,
                                  make_record({{static_cast<double>(a), *b_exit},
                                               {sk, *b_exit}}));
                }
            }
        }
        return;
    }
}

/**
 * Walks provenance records backwards from (m, n) to (1, 1), always following
 * the record with the smallest anchor (ties by creation order), and
 * concatenates the recorded paths into one monotone correspondence.
 */
inline Correspondence reconstruct(const DecideContext& ctx) {
    const auto m = static_cast<double>(ctx.P.size());
    const auto n = static_cast<double>(ctx.Q.size());
    const double tau = ctx.tau_par;

    auto pick = [&](const std::vector<ProvenanceRecord>& records,
                    std::optional<double> coordinate) -> const ProvenanceRecord* {
        const ProvenanceRecord* best = nullptr;
        for (const auto& rec : records) {
            if (coordinate && !rec.range.contains(*coordinate, 4.0 * tau)) continue;
            if (!best || rec.anchor[0] < best->anchor[0] - tau ||
                (std::abs(rec.anchor[0] - best->anchor[0]) <= tau &&
                 rec.anchor[1] < best->anchor[1] - tau))
                best = &rec;
        }
        return best;
    };

    std::array<double, 2> cur{m, n};
    const ProvenanceRecord* rec = nullptr;
    if (!ctx.trivial.empty()) {
        rec = pick(ctx.trivial, std::nullopt);
    } else {
        auto vit = ctx.store.find(IntervalKey{Orientation::Vertical, ctx.P.size(), ctx.Q.size()});
        if (vit != ctx.store.end() && vit->second.range.hi >= n - tau)
            rec = pick(vit->second.records, n);
        if (!rec) {
            auto hit = ctx.store.find(
                IntervalKey{Orientation::Horizontal, ctx.P.size(), ctx.Q.size()});
            if (hit != ctx.store.end() && hit->second.range.hi >= m - tau)
                rec = pick(hit->second.records, m);
        }
    }
    if (!rec) throw std::runtime_error("broken provenance chain: no record reaches (m, n)");

    std::vector<std::vector<std::array<double, 2>>> pieces;
    for (std::size_t guard = ctx.store.size() + 2; guard-- > 0;) {
        std::vector<std::array<double, 2>> piece = rec->local_path;
        if (piece.empty() || piece.back() != cur) piece.push_back(cur);
        pieces.push_back(std::move(piece));
        if (!rec->pred) {
            std::reverse(pieces.begin(), pieces.end());
            Correspondence corr;
            corr.append(1.0, 1.0);
            for (const auto& p : pieces)
                for (const auto& pt : p) corr.append(pt[0], pt[1]);
            corr.append(m, n);
            return corr;
        }
        cur = rec->anchor;
        const IntervalKey key = *rec->pred;
        auto it = ctx.store.find(key);
        if (it == ctx.store.end())
            throw std::runtime_error("broken provenance chain: missing predecessor interval");
        const double coordinate = key.orient == Orientation::Vertical ? cur[1] : cur[0];
        rec = pick(it->second.records, coordinate);
        if (!rec)
            throw std::runtime_error("broken provenance chain: anchor off every record");
    }
    throw std::runtime_error("broken provenance chain: predecessor cycle");
}

inline ChainLabels all_bad_labels(const Chain& chain) {
    const std::size_t n = chain.size();
    ChainLabels lab;
    lab.vertex_good.assign(n + 1, 0);
    lab.edge_bad.assign(n + 1, 0);
    lab.vertex_dangerous.assign(n + 1, 1);
    lab.vertex_dangerous[0] = 0;
    for (std::size_t k = 1; k + 1 <= n; ++k) lab.edge_bad[k] = 1;
    lab.bad_vertex_count = n;
    lab.bad_edge_count = n - 1;
    lab.dangerous_count = n;
    return lab;
}

}  // namespace detail

/**
 * Approximate Frechet decision at radius delta with approximation parameter
 * alpha (clamped into [sqrt(N), N] for N = max(m, n)). Success returns a
 * witness correspondence (unless want_correspondence is false) together with
 * its independently measured cost; Failure certifies d_F(P, Q) > delta.
 * Distinct invocations share nothing and may run concurrently.
 */
inline DecisionOutcome approx_decide(const Chain& P, const Chain& Q, double delta, double alpha,
                                     bool want_correspondence = true) {
    if (P.dim() != Q.dim()) throw std::invalid_argument("chains must share a dimension");
    if (delta < 0.0) throw std::domain_error("delta must be nonnegative");
    if (!(alpha > 0.0)) throw std::domain_error("alpha must be positive");

    const std::size_t m = P.size();
    const std::size_t n = Q.size();
    DecisionOutcome out;
    out.stats.alpha_requested = alpha;
    out.stats.delta = delta;

    const double coord_scale = std::max(P.coordinate_scale(), Q.coordinate_scale());
    const double tau_c = tolerance(coord_scale);

    if (m == 1 || n == 1) {
        out.stats.exact_fallback = true;
        out.stats.alpha_used = alpha;
        out.stats.warnings.push_back("single-vertex chain: answered by the exact decision");
        ExactDecision dec = exact_decide(P, Q, delta, want_correspondence);
        out.success = dec.reachable;
        if (dec.reachable && want_correspondence) {
            out.correspondence = std::move(dec.correspondence);
            out.measured_cost = correspondence_cost(P, Q, *out.correspondence);
        }
        return out;
    }

    const auto N = static_cast<double>(std::max(m, n));
    const double alpha_used = std::clamp(alpha, std::sqrt(N), N);
    out.stats.alpha_used = alpha_used;
    if (std::abs(alpha_used - alpha) > tolerance(alpha)) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "alpha %.6g clamped to %.6g", alpha, alpha_used);
        out.stats.warnings.emplace_back(buf);
    }

    // A correspondence pins the endpoints, so either endpoint pair farther
    // than delta settles the decision immediately.
    if (dist(P.vertex(1), Q.vertex(1)) > delta + tau_c) return out;
    if (dist(P.vertex(m), Q.vertex(n)) > delta + tau_c) return out;

    // Equal inputs short-circuit to the diagonal, which costs exactly zero;
    // the walk would otherwise anchor at ball-window endpoints and return a
    // correspondence of cost up to the delta-scaled bound.
    if (m == n) {
        bool equal = true;
        for (std::size_t i = 1; equal && i <= m; ++i) {
            const Point& p = P.vertex(i);
            const Point& q = Q.vertex(i);
            for (std::size_t k = 0; k < p.size(); ++k)
                if (p[k] != q[k]) {
                    equal = false;
                    break;
                }
        }
        if (equal) {
            out.success = true;
            if (want_correspondence) {
                Correspondence diag;
                for (std::size_t i = 1; i <= m; ++i)
                    diag.append(static_cast<double>(i), static_cast<double>(i));
                out.measured_cost = correspondence_cost(P, Q, diag);
                out.correspondence = std::move(diag);
            }
            return out;
        }
    }

    detail::DecideContext ctx(P, Q);
    ctx.delta = delta;
    ctx.tau_par = tolerance(N);
    ctx.tau_coord = tolerance(std::max(coord_scale, delta));
    ctx.stats = std::move(out.stats);

    const double margin = 3.0 * delta;
    double side = alpha_used * delta;
    if (delta <= 0.0) side = alpha_used * 1e-12 * std::max(1.0, coord_scale);
    bool all_bad = false;
    if (margin > 0.0 && !(side > 2.0 * margin)) {
        // alpha <= 6 leaves no room between hyperplane margins; fall back to
        // treating every vertex as bad, which degrades to exact propagation
        // over designated windows.
        all_bad = true;
        ctx.stats.warnings.push_back(
            "alpha too small for a shifted grid: treating every vertex as bad");
    }
    ctx.grid.side = side;
    ctx.grid.margin = margin;
    ctx.grid.offsets = all_bad ? std::vector<double>(P.dim(), 0.0)
                               : choose_offsets(P, Q, side, margin);
    if (all_bad) {
        ctx.lab_p = detail::all_bad_labels(P);
        ctx.lab_q = detail::all_bad_labels(Q);
    } else {
        ctx.lab_p = classify_chain(P, ctx.grid);
        ctx.lab_q = classify_chain(Q, ctx.grid);
    }
    ctx.stats.all_bad = all_bad;
    ctx.stats.bad_p_vertices = ctx.lab_p.bad_vertex_count;
    ctx.stats.bad_q_vertices = ctx.lab_q.bad_vertex_count;
    ctx.stats.bad_p_edges = ctx.lab_p.bad_edge_count;
    ctx.stats.bad_q_edges = ctx.lab_q.bad_edge_count;
    ctx.stats.dangerous_p = ctx.lab_p.dangerous_count;
    ctx.stats.dangerous_q = ctx.lab_q.dangerous_count;

    // Seeds: the maximal free prefixes of the first cell's boundary edges.
    if (auto vseed = edge_ball_range(P.vertex(1), delta, Q, 1)) {
        ProvenanceRecord rec;
        rec.local_path.push_back({1.0, 1.0});
        detail::designate(ctx, IntervalKey{Orientation::Vertical, 1, 2},
                          ParamRange{1.0, vseed->hi}, std::move(rec));
    }
    if (auto hseed = edge_ball_range(Q.vertex(1), delta, P, 1)) {
        ProvenanceRecord rec;
        rec.local_path.push_back({1.0, 1.0});
        detail::designate(ctx, IntervalKey{Orientation::Horizontal, 2, 1},
                          ParamRange{1.0, hseed->hi}, std::move(rec));
    }

    // Single ordered sweep; designations only ever land on later keys, so
    // in-order iteration over the map visits everything exactly once.
    for (auto it = ctx.store.begin(); it != ctx.store.end(); ++it) {
        const IntervalKey key = it->first;
        ctx.cursor = key;
        ctx.cursor_set = true;
        const ParamRange range = it->second.range;
        if (key.orient == Orientation::Vertical) {
            const std::size_t iv = key.i;
            const std::size_t j = key.j;
            if (iv >= m) continue;
            if (!ctx.lab_p.edge_bad[iv]) {
                detail::greedy_mapping(ctx, false, iv, range.lo, key);
            } else {
                ProvenanceRecord rec;
                rec.pred = key;
                rec.anchor = {static_cast<double>(iv), range.lo};
                rec.local_path.push_back(rec.anchor);
                if (auto vr = edge_ball_range(P.vertex(iv + 1), delta, Q, j - 1)) {
                    ParamRange r{std::max(vr->lo, range.lo), vr->hi};
                    if (r.lo <= r.hi + ctx.tau_par)
                        detail::designate(ctx, IntervalKey{Orientation::Vertical, iv + 1, j},
                                          r, rec);
                }
                if (auto hr = edge_ball_range(Q.vertex(j), delta, P, iv))
                    detail::designate(ctx, IntervalKey{Orientation::Horizontal, iv + 1, j},
                                      *hr, rec);
            }
        } else {
            const std::size_t i = key.i;
            const std::size_t jh = key.j;
            if (jh >= n) continue;
            if (!ctx.lab_q.edge_bad[jh]) {
                detail::greedy_mapping(ctx, true, jh, range.lo, key);
            } else {
                ProvenanceRecord rec;
                rec.pred = key;
                rec.anchor = {range.lo, static_cast<double>(jh)};
                rec.local_path.push_back(rec.anchor);
                if (auto vr = edge_ball_range(P.vertex(i), delta, Q, jh))
                    detail::designate(ctx, IntervalKey{Orientation::Vertical, i, jh + 1},
                                      *vr, rec);
                if (auto hr = edge_ball_range(Q.vertex(jh + 1), delta, P, i - 1)) {
                    ParamRange r{std::max(hr->lo, range.lo), hr->hi};
                    if (r.lo <= r.hi + ctx.tau_par)
                        detail::designate(ctx, IntervalKey{Orientation::Horizontal, i, jh + 1},
                                          r, rec);
                }
            }
        }
    }

    ctx.stats.trivial_records = ctx.trivial.size();
    ctx.stats.intervals_stored = ctx.store.size() + (ctx.trivial.empty() ? 0 : 1);

    bool success = !ctx.trivial.empty();
    if (!success) {
        auto vit = ctx.store.find(IntervalKey{Orientation::Vertical, m, n});
        if (vit != ctx.store.end() &&
            vit->second.range.hi >= static_cast<double>(n) - ctx.tau_par)
            success = true;
    }
    if (!success) {
        auto hit = ctx.store.find(IntervalKey{Orientation::Horizontal, m, n});
        if (hit != ctx.store.end() &&
            hit->second.range.hi >= static_cast<double>(m) - ctx.tau_par)
            success = true;
    }

    out.success = success;
    out.stats = std::move(ctx.stats);
    out.intervals.reserve(ctx.store.size());
    for (const auto& [key, iv] : ctx.store) out.intervals.emplace_back(key, iv.range);
    if (success && want_correspondence) {
        out.correspondence = detail::reconstruct(ctx);
        out.measured_cost = correspondence_cost(P, Q, *out.correspondence);
    }
    return out;
}

}  // namespace frechet
