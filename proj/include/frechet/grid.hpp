#pragma once

/**
 * Shifted-grid machinery for the approximate decision procedure.
 *
 * The grid has cells of side L with per-dimension offsets. A vertex is good
 * when its clearance (distance to the nearest grid hyperplane in any
 * dimension) exceeds the margin; otherwise it is bad. Offsets are chosen per
 * dimension from the candidates {0, 2*margin, 4*margin, ...} so that few
 * vertices land within the margin of a hyperplane: each coordinate rules out
 * at most two candidates, so by pigeonhole the best candidate collects at
 * most 2*N/K bad marks from N coordinates and K candidates.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "frechet/geometry.hpp"

namespace frechet {

struct GridSpec {
    double side = 0.0;
    double margin = 0.0;
    std::vector<double> offsets;  // one per dimension
};

namespace detail {

inline double positive_fmod(double x, double period) {
    double r = std::fmod(x, period);
    if (r < 0.0) r += period;
    if (r >= period) r = 0.0;
    return r;
}

}  // namespace detail

/**
 * Per-dimension offsets minimizing the number of coordinates within `margin`
 * of a grid hyperplane. Ties resolve to the smallest candidate. Requires
 * side > 2*margin when margin > 0; margin <= 0 yields all-zero offsets.
 */
inline std::vector<double> choose_offsets(const Chain& P, const Chain& Q, double side,
                                          double margin) {
    if (P.dim() != Q.dim()) throw std::invalid_argument("chains must share a dimension");
    const std::size_t d = P.dim();
    if (margin <= 0.0) return std::vector<double>(d, 0.0);
    if (!(side > 2.0 * margin))
        throw std::domain_error("grid side must exceed twice the margin");
    const double step = 2.0 * margin;
    const std::size_t K = static_cast<std::size_t>(std::floor(side / step));

    std::vector<double> offsets(d, 0.0);
    std::vector<std::size_t> counts(K);
    for (std::size_t k = 0; k < d; ++k) {
        std::fill(counts.begin(), counts.end(), 0);
        auto mark_window = [&](double wlo, double whi) {
            const long long jlo = static_cast<long long>(std::ceil(wlo / step - 1e-12));
            const long long jhi = static_cast<long long>(std::floor(whi / step + 1e-12));
            for (long long j = jlo; j <= jhi; ++j)
                if (j >= 0 && j < static_cast<long long>(K)) ++counts[static_cast<std::size_t>(j)];
        };
        auto mark_coord = [&](double c) {
            const double r = detail::positive_fmod(c, side);
            mark_window(r - margin, r + margin);
            mark_window(r - margin - side, r + margin - side);
            mark_window(r - margin + side, r + margin + side);
        };
        for (const auto& v : P.vertices()) mark_coord(v[k]);
        for (const auto& v : Q.vertices()) mark_coord(v[k]);
        std::size_t best = 0;
        for (std::size_t j = 1; j < K; ++j)
            if (counts[j] < counts[best]) best = j;
        offsets[k] = step * static_cast<double>(best);
    }
    return offsets;
}

/** Distance from p to the nearest grid hyperplane over all dimensions. */
inline double grid_clearance(const Point& p, const GridSpec& g) {
    double cl = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < p.size(); ++k) {
        const double r = detail::positive_fmod(p[k] - g.offsets[k], g.side);
        cl = std::min(cl, std::min(r, g.side - r));
    }
    return cl;
}

struct ChainLabels {
    std::vector<char> vertex_good;       // 1-based; [0] unused
    std::vector<char> edge_bad;          // 1-based; edge k joins vertices k, k+1
    std::vector<char> vertex_dangerous;  // 1-based; has an incident bad edge
    std::size_t bad_vertex_count = 0;
    std::size_t bad_edge_count = 0;
    std::size_t dangerous_count = 0;
};

/**
 * Labels vertices good/bad by clearance (conservatively: within tolerance of
 * the margin counts as bad), forces both endpoints bad, then derives bad
 * edges (an endpoint is bad) and dangerous vertices (an incident edge is bad).
 */
inline ChainLabels classify_chain(const Chain& chain, const GridSpec& g,
                                  bool force_endpoints_bad = true) {
    const std::size_t n = chain.size();
    const double tau = tolerance(std::max(chain.coordinate_scale(), g.side));
    ChainLabels lab;
    lab.vertex_good.assign(n + 1, 0);
    lab.edge_bad.assign(n + 1, 0);
    lab.vertex_dangerous.assign(n + 1, 0);
    for (std::size_t k = 1; k <= n; ++k) {
        const bool good = grid_clearance(chain.vertex(k), g) > g.margin + tau;
        lab.vertex_good[k] = good ? 1 : 0;
    }
    if (force_endpoints_bad) {
        lab.vertex_good[1] = 0;
        lab.vertex_good[n] = 0;
    }
    for (std::size_t k = 1; k <= n; ++k)
        if (!lab.vertex_good[k]) ++lab.bad_vertex_count;
    for (std::size_t k = 1; k + 1 <= n; ++k) {
        lab.edge_bad[k] = (!lab.vertex_good[k] || !lab.vertex_good[k + 1]) ? 1 : 0;
        if (lab.edge_bad[k]) ++lab.bad_edge_count;
    }
    for (std::size_t k = 1; k <= n; ++k) {
        const bool left = k > 1 && lab.edge_bad[k - 1];
        const bool right = k + 1 <= n && lab.edge_bad[k];
        lab.vertex_dangerous[k] = (left || right) ? 1 : 0;
        if (lab.vertex_dangerous[k]) ++lab.dangerous_count;
    }
    return lab;
}

struct GridCell {
    std::vector<std::int64_t> index;
    Box box;
};

/** Grid cell containing p: per-dimension floor((coord - offset) / side). */
inline GridCell box_of(const Point& p, const GridSpec& g) {
    GridCell cell;
    cell.index.resize(p.size());
    cell.box.lo.resize(p.size());
    cell.box.side = g.side;
    for (std::size_t k = 0; k < p.size(); ++k) {
        const double q = (p[k] - g.offsets[k]) / g.side;
        const auto ix = static_cast<std::int64_t>(std::floor(q));
        cell.index[k] = ix;
        cell.box.lo[k] = g.offsets[k] + static_cast<double>(ix) * g.side;
    }
    return cell;
}

}  // namespace frechet
