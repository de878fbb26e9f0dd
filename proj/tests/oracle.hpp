#pragma once

/**
 * Reference oracle for tests, independent of the library under test.
 *
 * The continuous Frechet distance is bracketed by the discrete Frechet
 * distance of subdivided chains: if every edge of the subdivided chains has
 * length at most h, then DF - h <= FD <= DF, where DF is the discrete value
 * on the subdivided vertex sequences. Implemented from scratch on a flat
 * coordinate array so the only shared concept with the library is Euclidean
 * distance.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

struct RawCurve {
    std::size_t d = 0;
    std::vector<double> coords;  // flattened row-major, count() * d entries

    std::size_t count() const { return d == 0 ? 0 : coords.size() / d; }
};

inline double sq_dist(const double* a, const double* b, std::size_t d) {
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
        const double t = a[k] - b[k];
        s += t * t;
    }
    return s;
}

/** Subdivide every edge into equal pieces of length <= h; reports the largest piece. */
inline RawCurve resample(const RawCurve& in, double h, double* max_step_out = nullptr) {
    RawCurve out;
    out.d = in.d;
    const std::size_t n = in.count();
    double max_step = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double* a = &in.coords[i * in.d];
        const double* b = &in.coords[(i + 1) * in.d];
        const double len = std::sqrt(sq_dist(a, b, in.d));
        const auto pieces = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / h)));
        max_step = std::max(max_step, len / static_cast<double>(pieces));
        for (std::size_t p = 0; p < pieces; ++p) {
            const double u = static_cast<double>(p) / static_cast<double>(pieces);
            for (std::size_t k = 0; k < in.d; ++k) out.coords.push_back(a[k] + u * (b[k] - a[k]));
        }
    }
    for (std::size_t k = 0; k < in.d; ++k) out.coords.push_back(in.coords[(n - 1) * in.d + k]);
    if (max_step_out) *max_step_out = max_step;
    return out;
}

/** Squared discrete Frechet distance, rolling-row dynamic program. */
template <int D>
inline double discrete_frechet_sq_fixed(const RawCurve& A, const RawCurve& B,
                                        std::vector<double>& prev, std::vector<double>& cur) {
    const std::size_t na = A.count(), nb = B.count();
    prev.resize(nb);
    cur.resize(nb);
    auto d2 = [&](std::size_t i, std::size_t j) {
        const double* a = &A.coords[i * D];
        const double* b = &B.coords[j * D];
        double s = 0.0;
        for (int k = 0; k < D; ++k) {
            const double t = a[k] - b[k];
            s += t * t;
        }
        return s;
    };
    prev[0] = d2(0, 0);
    for (std::size_t j = 1; j < nb; ++j) prev[j] = std::max(prev[j - 1], d2(0, j));
    for (std::size_t i = 1; i < na; ++i) {
        const double* a = &A.coords[i * D];
        cur[0] = std::max(prev[0], d2(i, 0));
        for (std::size_t j = 1; j < nb; ++j) {
            const double best = std::min(std::min(prev[j], prev[j - 1]), cur[j - 1]);
            const double* b = &B.coords[j * D];
            double s = 0.0;
            for (int k = 0; k < D; ++k) {
                const double t = a[k] - b[k];
                s += t * t;
            }
            cur[j] = std::max(best, s);
        }
        std::swap(prev, cur);
    }
    return prev[nb - 1];
}

inline double discrete_frechet_sq_any(const RawCurve& A, const RawCurve& B) {
    const std::size_t na = A.count(), nb = B.count(), d = A.d;
    std::vector<double> prev(nb), cur(nb);
    auto d2 = [&](std::size_t i, std::size_t j) {
        return sq_dist(&A.coords[i * d], &B.coords[j * d], d);
    };
    prev[0] = d2(0, 0);
    for (std::size_t j = 1; j < nb; ++j) prev[j] = std::max(prev[j - 1], d2(0, j));
    for (std::size_t i = 1; i < na; ++i) {
        cur[0] = std::max(prev[0], d2(i, 0));
        for (std::size_t j = 1; j < nb; ++j)
            cur[j] = std::max(std::min(std::min(prev[j], prev[j - 1]), cur[j - 1]), d2(i, j));
        std::swap(prev, cur);
    }
    return prev[nb - 1];
}

inline double discrete_frechet(const RawCurve& A, const RawCurve& B) {
    static thread_local std::vector<double> prev, cur;
    switch (A.d) {
        case 1: return std::sqrt(discrete_frechet_sq_fixed<1>(A, B, prev, cur));
        case 2: return std::sqrt(discrete_frechet_sq_fixed<2>(A, B, prev, cur));
        case 3: return std::sqrt(discrete_frechet_sq_fixed<3>(A, B, prev, cur));
        default: return std::sqrt(discrete_frechet_sq_any(A, B));
    }
}

struct Sandwich {
    double lower = 0.0;  // <= continuous Frechet distance
    double upper = 0.0;  // >= continuous Frechet distance
};

/** Bracket of the continuous Frechet distance to within the subdivision step. */
inline Sandwich frechet_sandwich(const RawCurve& A, const RawCurve& B, double h) {
    double step_a = 0.0, step_b = 0.0;
    const RawCurve Ar = resample(A, h, &step_a);
    const RawCurve Br = resample(B, h, &step_b);
    const double df = discrete_frechet(Ar, Br);
    return {df - std::max(step_a, step_b), df};
}

}  // namespace oracle
