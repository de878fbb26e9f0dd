#pragma once

/**
 * Synthetic curve generators for tests and benchmarks. Every generator is
 * fully determined by its arguments: the same seed always produces the same
 * chain. Shapes that need a transverse direction (zigzag, circle) require
 * dimension >= 2.
 */

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "frechet/geometry.hpp"

namespace frechet {

namespace detail {

inline void require_size(std::size_t n) {
    if (n < 2) throw std::domain_error("generators need n >= 2");
}

inline void require_dim(std::size_t d, std::size_t min_d) {
    if (d < min_d)
        throw std::domain_error("generator needs dimension >= " + std::to_string(min_d));
}

}  // namespace detail

/** Random walk from the origin, steps uniform in [-scale, scale]^d. */
inline Chain gen_walk(std::size_t n, std::size_t d, double scale, std::uint64_t seed) {
    detail::require_size(n);
    detail::require_dim(d, 1);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> step(-scale, scale);
    std::vector<Point> vs;
    vs.reserve(n);
    Point cur(d, 0.0);
    vs.push_back(cur);
    for (std::size_t i = 1; i < n; ++i) {
        for (auto& c : cur) c += step(rng);
        vs.push_back(cur);
    }
    return Chain(std::move(vs));
}

/**
 * Unit-spaced zigzag along the first axis whose second coordinate alternates
 * between 0 and the amplitude scale; against its baseline segment the
 * Frechet distance is exactly the amplitude.
 */
inline Chain gen_zigzag(std::size_t n, std::size_t d, double scale) {
    detail::require_size(n);
    detail::require_dim(d, 2);
    std::vector<Point> vs;
    vs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Point v(d, 0.0);
        v[0] = static_cast<double>(i);
        v[1] = i % 2 ? scale : 0.0;
        vs.push_back(std::move(v));
    }
    return Chain(std::move(vs));
}

/** n points evenly spaced on a circle of radius scale in the first plane. */
inline Chain gen_circle(std::size_t n, std::size_t d, double scale) {
    detail::require_size(n);
    detail::require_dim(d, 2);
    std::vector<Point> vs;
    vs.reserve(n);
    const double two_pi = 8.0 * std::atan(1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = two_pi * static_cast<double>(i) / static_cast<double>(n);
        Point v(d, 0.0);
        v[0] = scale * std::cos(t);
        v[1] = scale * std::sin(t);
        vs.push_back(std::move(v));
    }
    return Chain(std::move(vs));
}

/**
 * Copy of base with every vertex displaced by a uniform offset of norm at
 * most rho, so the per-vertex diagonal witnesses Frechet distance <= rho.
 */
inline Chain gen_perturbed_copy(const Chain& base, double rho, std::uint64_t seed) {
    if (rho < 0.0) throw std::domain_error("perturbation radius must be nonnegative");
    std::mt19937_64 rng(seed);
    const double r = rho / std::sqrt(static_cast<double>(base.dim()));
    std::uniform_real_distribution<double> off(-r, r);
    std::vector<Point> vs = base.vertices();
    for (auto& v : vs)
        for (auto& c : v) c += off(rng);
    return Chain(std::move(vs));
}

}  // namespace frechet
