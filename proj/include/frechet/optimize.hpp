#pragma once

/**
 * Turns the approximate decision procedure into a value approximation:
 * binary searches over candidate distances, geometric refinement ladders
 * around the bracketing candidates, and a simplify-and-solve branch for
 * instances whose Frechet distance falls in a wide candidate gap.
 *
 * Every branch returns an explicit correspondence; the reported value is
 * always the evaluated cost of that correspondence, so the result can never
 * undershoot the true distance by more than evaluation tolerance.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "frechet/approx_decision.hpp"
#include "frechet/freespace.hpp"
#include "frechet/geometry.hpp"

namespace frechet {

struct CandidateSet {
    std::vector<double> Z;  // positive pairwise vertex distances, ascending
    std::optional<double> a;  // largest candidate where the decision failed
    std::optional<double> b;  // smallest candidate where it succeeded
};

/**
 * All distances between distinct vertex points of P and Q, deduplicated at
 * relative tolerance 1e-12. Coincident vertices contribute nothing, so every
 * entry is positive. Quadratic in the vertex count, which is acceptable at
 * the scales this library targets.
 */
inline CandidateSet candidate_distances(const Chain& P, const Chain& Q) {
    if (P.dim() != Q.dim()) throw std::invalid_argument("chains must share a dimension");
    std::vector<const Point*> v;
    v.reserve(P.size() + Q.size());
    for (const auto& p : P.vertices()) v.push_back(&p);
    for (const auto& q : Q.vertices()) v.push_back(&q);
    std::vector<double> zs;
    zs.reserve(v.size() * (v.size() - 1) / 2);
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j) {
            const double d = dist(*v[i], *v[j]);
            if (d > 0.0) zs.push_back(d);
        }
    std::sort(zs.begin(), zs.end());
    CandidateSet out;
    for (double z : zs)
        if (out.Z.empty() || z > out.Z.back() * (1.0 + 1e-12)) out.Z.push_back(z);
    return out;
}

struct SimplificationResult {
    Chain simplified;
    std::vector<std::size_t> marks;  // 1-based source indices, first is 1
};

/**
 * Greedy simplification: mark the first vertex, then repeatedly mark the
 * first vertex at distance >= nu from the last mark. Every output edge has
 * length >= nu; the final source vertex is not necessarily marked. The
 * simplified chain stays within Frechet distance nu of the source.
 */
inline SimplificationResult nu_simplify(const Chain& R, double nu) {
    if (!(nu > 0.0)) throw std::domain_error("nu must be positive");
    std::vector<std::size_t> marks{1};
    std::vector<Point> verts{R.vertex(1)};
    std::size_t cur = 1;
    for (std::size_t i = 2; i <= R.size(); ++i)
        if (dist(R.vertex(i), R.vertex(cur)) >= nu) {
            marks.push_back(i);
            verts.push_back(R.vertex(i));
            cur = i;
        }
    return {Chain(std::move(verts)), std::move(marks)};
}

/**
 * Explicit witness that the simplified chain stays within nu: hold the
 * simplified chain at mark k while the source runs through the vertices that
 * were skipped (each is within nu of the mark, and in-cell distance is
 * convex), then traverse the source edge into the next mark jointly with the
 * simplified edge, and finally hold the last mark over the unmarked tail.
 * First coordinate parameterizes R, second the simplified chain.
 */
inline Correspondence simplification_correspondence(const Chain& R,
                                                    const SimplificationResult& result,
                                                    double nu) {
    SimplificationResult expect = nu_simplify(R, nu);
    if (expect.marks != result.marks || expect.simplified.size() != result.simplified.size())
        throw std::invalid_argument("simplification does not match the source chain and nu");
    const auto& marks = result.marks;
    Correspondence corr;
    corr.append(1.0, 1.0);
    for (std::size_t k = 0; k + 1 < marks.size(); ++k) {
        corr.append(static_cast<double>(marks[k + 1] - 1), static_cast<double>(k + 1));
        corr.append(static_cast<double>(marks[k + 1]), static_cast<double>(k + 2));
    }
    corr.append(static_cast<double>(R.size()), static_cast<double>(marks.size()));
    return corr;
}

/** Same correspondence with the two chains' roles swapped. */
inline Correspondence reverse_correspondence(const Correspondence& c) {
    Correspondence out;
    out.pts.reserve(c.pts.size());
    for (const auto& p : c.pts) out.append(p[1], p[0]);
    return out;
}

/**
 * branch records which driver step produced the result: 0 zero-probe
 * success, 2 no failing candidate, 3 ladder above the largest failure,
 * 4 ladder below the smallest success, 5 simplify-and-solve. stats is
 * absent for branch 5, whose correspondence comes from the exact solver
 * rather than an approximate decision.
 */
struct ApproxResult {
    double value = 0.0;
    Correspondence correspondence;
    int branch = 0;
    std::size_t probes = 0;  // approximate decision invocations
    double a = std::numeric_limits<double>::quiet_NaN();
    double b = std::numeric_limits<double>::quiet_NaN();
    std::optional<DecisionStats> stats;
};

/**
 * Value approximation within (1+eps) * sqrt(d) * (alpha+2) of the Frechet
 * distance, 0 < eps <= 1. The decision procedure is used as a black box:
 * a binary search over candidate distances brackets the distance between
 * the largest failing value a and smallest succeeding value b, then either
 * a geometric ladder pins the answer to a (1+eps) factor or, when the
 * distance falls in the gap (12a/eps, b / (2(1+eps/2)(1+sqrt(d))alpha)),
 * both chains are 3a-simplified, solved exactly, and the correspondence is
 * lifted back through the simplifications.
 */
inline ApproxResult approx_frechet(const Chain& P, const Chain& Q, double alpha, double eps) {
    if (P.dim() != Q.dim()) throw std::invalid_argument("chains must share a dimension");
    if (!(eps > 0.0) || eps > 1.0) throw std::domain_error("eps must lie in (0, 1]");

    ApproxResult out;
    auto probe = [&](double delta, bool want_corr) {
        ++out.probes;
        return approx_decide(P, Q, delta, alpha, want_corr);
    };
    auto finish = [&](Correspondence corr, int branch,
                      std::optional<DecisionStats> stats) -> ApproxResult& {
        out.value = correspondence_cost(P, Q, corr);
        out.correspondence = std::move(corr);
        out.branch = branch;
        out.stats = std::move(stats);
        return out;
    };

    auto zero = probe(0.0, true);
    if (zero.success) return finish(std::move(*zero.correspondence), 0, std::move(zero.stats));

    CandidateSet cs = candidate_distances(P, Q);
    // All vertices coincident would force Frechet distance zero, which the
    // zero probe accepts by completeness.
    if (cs.Z.empty()) throw std::logic_error("no candidate distances after a failed zero probe");

    // Bracket the distance in Z. Acceptance is monotone in delta, so a plain
    // bisection between a failing and a succeeding index applies; the top
    // candidate is the largest vertex-pair distance, which dominates the
    // Frechet distance and therefore must be accepted.
    if (probe(cs.Z.front(), false).success) {
        cs.b = cs.Z.front();
        const double end_gap = std::max(dist(P.vertex(1), Q.vertex(1)),
                                        dist(P.vertex(P.size()), Q.vertex(Q.size())));
        if (end_gap > 0.0) {
            // The larger endpoint distance is a candidate, so b never
            // exceeds it, and it lower-bounds the Frechet distance; the
            // returned cost is within the decision's factor of b.
            out.b = *cs.b;
            auto res = probe(*cs.b, true);
            if (!res.success)
                throw std::logic_error("accepted candidate rejected on recomputation");
            return finish(std::move(*res.correspondence), 2, std::move(res.stats));
        }
        // Both endpoint pairs coincide, so no candidate bounds the distance
        // from below and the usual cost argument for b breaks. The failed
        // zero probe certifies delta = 0 as a failing value; continue with
        // a = 0, under which the gap branch degenerates to the exact solver.
        cs.a = 0.0;
    } else if (cs.Z.size() == 1 || !probe(cs.Z.back(), false).success) {
        throw std::runtime_error("decision failed at the maximum vertex distance");
    } else {
        std::size_t lo_fail = 0;
        std::size_t hi_succ = cs.Z.size() - 1;
        while (hi_succ - lo_fail > 1) {
            const std::size_t mid = lo_fail + (hi_succ - lo_fail) / 2;
            if (probe(cs.Z[mid], false).success)
                hi_succ = mid;
            else
                lo_fail = mid;
        }
        cs.a = cs.Z[lo_fail];
        cs.b = cs.Z[hi_succ];
    }
    out.a = *cs.a;
    out.b = *cs.b;

    const double a_val = *cs.a;
    const double b_val = *cs.b;
    const double root_d = std::sqrt(static_cast<double>(P.dim()));
    const auto N = static_cast<double>(std::max(P.size(), Q.size()));
    const double alpha_c = std::clamp(alpha, std::sqrt(N), N);

    struct Hit {
        double delta;
        double cost;
        Correspondence corr;
        DecisionStats stats;
    };
    std::vector<Hit> hits;
    auto take = [&](double delta, DecisionOutcome&& r) {
        hits.push_back({delta, r.measured_cost, std::move(*r.correspondence), std::move(r.stats)});
    };
    auto cheapest = [&](int branch) -> ApproxResult& {
        std::size_t best = 0;
        for (std::size_t i = 1; i < hits.size(); ++i)
            if (hits[i].cost < hits[best].cost ||
                (hits[i].cost == hits[best].cost && hits[i].delta < hits[best].delta))
                best = i;
        return finish(std::move(hits[best].corr), branch, std::move(hits[best].stats));
    };

    // Ladder searches assume rung f fails while rung s succeeds and keep the
    // indices adjacent; the bound then follows from the (1+eps) rung ratio.
    // Rung counts are extended to cover the anchor ratios so the virtual
    // end rungs never leave a gap wider than one ladder step.
    const double log_step = std::log1p(eps);

    // With a = 0 the upper gate delta is 0, which the zero probe already
    // rejected, so the ladder above a never applies.
    if (a_val > 0.0) {
        const double delta_a = 12.0 * a_val / eps;
        auto gate_a = probe(delta_a, true);
        if (gate_a.success) {
            take(delta_a, std::move(gate_a));
            const double span = 12.0 / eps;
            const long K = static_cast<long>(
                std::max(std::ceil(span), std::ceil(std::log(span) / log_step)));
            auto rung = [&](long k) {
                return std::pow(1.0 + eps, static_cast<double>(k)) * a_val;
            };
            long f = 0, s = K + 1;  // rung 0 = a (failed above); K+1 stands for delta_a
            while (s - f > 1) {
                const long mid = f + (s - f) / 2;
                auto r = probe(rung(mid), true);
                if (r.success) {
                    s = mid;
                    take(rung(mid), std::move(r));
                } else {
                    f = mid;
                }
            }
            return cheapest(3);
        }
    }

    const double gap = 2.0 * (1.0 + 0.5 * eps) * (1.0 + root_d) * alpha_c;
    const double delta_b = b_val / gap;
    if (!probe(delta_b, false).success) {
        const long K = static_cast<long>(
            std::max(std::ceil(gap), std::ceil(std::log(gap) / log_step)));
        auto rung = [&](long k) { return b_val / std::pow(1.0 + eps, static_cast<double>(k)); };
        long s = 0, f = K + 1;  // rung 0 = b (succeeded above); K+1 stands for delta_b
        while (f - s > 1) {
            const long mid = s + (f - s) / 2;
            auto r = probe(rung(mid), true);
            if (r.success) {
                s = mid;
                take(rung(mid), std::move(r));
            } else {
                f = mid;
            }
        }
        if (hits.empty()) {
            auto r = probe(b_val, true);
            if (!r.success) throw std::logic_error("accepted candidate rejected on recomputation");
            take(b_val, std::move(r));
        }
        return cheapest(4);
    }

    // The distance sits in a gap wide enough that 3a-simplification leaves
    // every edge long relative to the simplified distance, so the exact
    // solver applies and the lift adds at most 3a per side. When a is the
    // degenerate zero anchor, the simplification is the identity and the
    // branch reduces to solving the original instance exactly.
    if (a_val == 0.0) {
        ExactFrechet ex0 = exact_frechet(P, Q);
        ExactDecision dec0 = exact_decide(P, Q, ex0.upper, true);
        if (!dec0.reachable || !dec0.correspondence)
            throw std::logic_error("exact reconstruction failed at its succeeding radius");
        return finish(std::move(*dec0.correspondence), 5, std::nullopt);
    }
    const double nu = 3.0 * a_val;
    SimplificationResult sp = nu_simplify(P, nu);
    SimplificationResult sq = nu_simplify(Q, nu);
    for (std::size_t i = 1; i <= P.size() + Q.size(); ++i)
        for (std::size_t j = i + 1; j <= P.size() + Q.size(); ++j) {
            const Point& u = i <= P.size() ? P.vertex(i) : Q.vertex(i - P.size());
            const Point& w = j <= P.size() ? P.vertex(j) : Q.vertex(j - P.size());
            const double d = dist(u, w);
            if (d > 2.0 * a_val && d < 0.5 * b_val)
                throw std::logic_error("vertex distance inside the simplification gap");
        }
    ExactFrechet ex = exact_frechet(sp.simplified, sq.simplified);
    for (const auto* s : {&sp.simplified, &sq.simplified})
        for (std::size_t e = 1; e + 1 <= s->size(); ++e)
            if (dist(s->vertex(e), s->vertex(e + 1)) <
                (1.0 + root_d) * ex.value * (1.0 - 1e-9))
                throw std::logic_error("simplified edge shorter than the long-edge bound");
    ExactDecision hat = exact_decide(sp.simplified, sq.simplified, ex.upper, true);
    if (!hat.reachable || !hat.correspondence)
        throw std::logic_error("exact reconstruction failed at its succeeding radius");
    Correspondence lifted = compose_correspondences(
        simplification_correspondence(P, sp, nu),
        compose_correspondences(*hat.correspondence,
                                reverse_correspondence(simplification_correspondence(Q, sq, nu))));
    return finish(std::move(lifted), 5, std::nullopt);
}

}  // namespace frechet
