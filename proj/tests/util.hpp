#pragma once

/** Shared helpers for the test suite: seeded random instances and conversions. */

#include <cstddef>
#include <random>
#include <vector>

#include "frechet/geometry.hpp"
#include "oracle.hpp"

namespace testutil {

using frechet::Chain;
using frechet::Point;

/** Independent uniform vertices in [-scale, scale]^d. */
inline Chain random_chain(std::mt19937_64& rng, std::size_t n, std::size_t d, double scale) {
    std::uniform_real_distribution<double> U(-scale, scale);
    std::vector<Point> vs(n, Point(d));
    for (auto& v : vs)
        for (auto& c : v) c = U(rng);
    return Chain(std::move(vs));
}

/** Random walk with per-coordinate steps in [-step, step]; smoother than random_chain. */
inline Chain random_walk_chain(std::mt19937_64& rng, std::size_t n, std::size_t d, double step) {
    std::uniform_real_distribution<double> U(-step, step);
    std::vector<Point> vs;
    vs.reserve(n);
    Point cur(d, 0.0);
    vs.push_back(cur);
    for (std::size_t i = 1; i < n; ++i) {
        for (auto& c : cur) c += U(rng);
        vs.push_back(cur);
    }
    return Chain(std::move(vs));
}

/** Copy of base with every vertex moved by at most rho (uniform per coordinate). */
inline Chain perturbed_copy(std::mt19937_64& rng, const Chain& base, double rho) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<Point> vs = base.vertices();
    const double r = rho / std::sqrt(static_cast<double>(base.dim()));
    for (auto& v : vs)
        for (auto& c : v) c += r * U(rng);
    return Chain(std::move(vs));
}

inline oracle::RawCurve to_raw(const Chain& c) {
    oracle::RawCurve r;
    r.d = c.dim();
    r.coords.reserve(c.size() * c.dim());
    for (const auto& v : c.vertices())
        for (double x : v) r.coords.push_back(x);
    return r;
}

}  // namespace testutil
