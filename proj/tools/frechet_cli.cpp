// Command-line surface over the frechet library.
//
//   frechet decide  P.txt Q.txt --delta D [--alpha A] [--exact] [--timing]
//   frechet compute P.txt Q.txt [--alpha A --eps E | --exact [--tol T]] [--timing]
//   frechet gen     --kind walk|zigzag|circle|perturbed-copy ...
//   frechet bench   [--bench-sizes N,N,...] [--alpha-policy n|sqrt] [--reps R]
//
// decide and compute print one JSON document to standard output:
//   {command, params, result, cost, breakpoints, stats}
// result is "success"/"failure" for decide and the numeric value for compute;
// cost always equals the emitted breakpoints re-evaluated through
// correspondence_cost, and is null when there is no correspondence. Exit
// codes: 0 success/true, 1 failure/false, 2 usage or input error.
//
// Documents are byte-identical across reruns: stats.wall_time_ms is pinned
// to 0 unless --timing is given. bench always measures real time and prints
// CSV instead of a document.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "frechet/approx_decision.hpp"
#include "frechet/curve_io.hpp"
#include "frechet/freespace.hpp"
#include "frechet/generate.hpp"
#include "frechet/geometry.hpp"
#include "frechet/optimize.hpp"

using frechet::Chain;
using frechet::Correspondence;
using nlohmann::ordered_json;

namespace {

double auto_alpha(const Chain& P, const Chain& Q) {
    return std::sqrt(static_cast<double>(std::max(P.size(), Q.size())));
}

ordered_json breakpoints_json(const Correspondence& corr) {
    ordered_json arr = ordered_json::array();
    for (const auto& bp : corr.pts) arr.push_back({bp[0], bp[1]});
    return arr;
}

/** Fixed stats block: m counts P's vertices, n counts Q's. */
ordered_json stats_json(const Chain& P, const Chain& Q, std::size_t bad_vertices,
                        std::size_t intervals_stored, double wall_time_ms) {
    ordered_json s;
    s["n"] = Q.size();
    s["m"] = P.size();
    s["d"] = P.dim();
    s["bad_vertices"] = bad_vertices;
    s["intervals_stored"] = intervals_stored;
    s["wall_time_ms"] = wall_time_ms;
    return s;
}

void emit(const ordered_json& doc) { std::cout << doc.dump(2) << "\n"; }

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    }
};

int run_decide(const std::string& path_p, const std::string& path_q, double delta, double alpha,
               bool alpha_given, bool exact, bool timing) {
    Chain P = frechet::load_curve(path_p);
    Chain Q = frechet::load_curve(path_q);
    const double a = alpha_given ? alpha : auto_alpha(P, Q);

    ordered_json doc;
    doc["command"] = "decide";
    doc["params"] = {{"delta", delta}, {"alpha", exact ? 1.0 : a}};

    bool success = false;
    std::optional<Correspondence> corr;
    std::size_t bad_vertices = 0;
    std::size_t intervals = 0;
    Timer timer;
    if (exact) {
        auto dec = frechet::exact_decide(P, Q, delta, true);
        success = dec.reachable;
        corr = std::move(dec.correspondence);
    } else {
        auto out = frechet::approx_decide(P, Q, delta, a, true);
        success = out.success;
        corr = std::move(out.correspondence);
        bad_vertices = out.stats.bad_p_vertices + out.stats.bad_q_vertices;
        intervals = out.stats.intervals_stored;
    }
    const double wall = timing ? timer.ms() : 0.0;

    doc["result"] = success ? "success" : "failure";
    if (corr) {
        doc["cost"] = frechet::correspondence_cost(P, Q, *corr);
        doc["breakpoints"] = breakpoints_json(*corr);
    } else {
        doc["cost"] = nullptr;
        doc["breakpoints"] = ordered_json::array();
    }
    doc["stats"] = stats_json(P, Q, bad_vertices, intervals, wall);
    emit(doc);
    return success ? 0 : 1;
}

int run_compute(const std::string& path_p, const std::string& path_q, double alpha,
                bool alpha_given, double eps, bool exact, double tol, bool timing) {
    Chain P = frechet::load_curve(path_p);
    Chain Q = frechet::load_curve(path_q);
    const double a = alpha_given ? alpha : auto_alpha(P, Q);

    ordered_json doc;
    doc["command"] = "compute";
    if (exact)
        doc["params"] = {{"alpha", 1.0}};
    else
        doc["params"] = {{"alpha", a}, {"eps", eps}};

    double value = 0.0;
    Correspondence corr;
    std::size_t bad_vertices = 0;
    std::size_t intervals = 0;
    Timer timer;
    if (exact) {
        auto ex = frechet::exact_frechet(P, Q, tol);
        // ex.upper succeeded during the bisection, so the re-probe is
        // guaranteed to produce a witness.
        auto dec = frechet::exact_decide(P, Q, ex.upper, true);
        if (!dec.reachable || !dec.correspondence)
            throw std::logic_error("exact witness probe failed at a succeeding radius");
        value = ex.value;
        corr = std::move(*dec.correspondence);
    } else {
        auto res = frechet::approx_frechet(P, Q, a, eps);
        value = res.value;
        corr = std::move(res.correspondence);
        if (res.stats) {
            bad_vertices = res.stats->bad_p_vertices + res.stats->bad_q_vertices;
            intervals = res.stats->intervals_stored;
        }
    }
    const double wall = timing ? timer.ms() : 0.0;

    doc["result"] = value;
    doc["cost"] = frechet::correspondence_cost(P, Q, corr);
    doc["breakpoints"] = breakpoints_json(corr);
    doc["stats"] = stats_json(P, Q, bad_vertices, intervals, wall);
    emit(doc);
    return 0;
}

int run_gen(const std::string& kind, std::size_t n, std::size_t d, double scale,
            std::uint64_t seed, const std::string& base_path, double rho, bool rho_given,
            const std::string& out_path) {
    Chain curve = [&] {
        if (kind == "walk") return frechet::gen_walk(n, d, scale, seed);
        if (kind == "zigzag") return frechet::gen_zigzag(n, d, scale);
        if (kind == "circle") return frechet::gen_circle(n, d, scale);
        if (kind == "perturbed-copy") {
            if (base_path.empty()) throw std::domain_error("perturbed-copy needs --base");
            if (!rho_given) throw std::domain_error("perturbed-copy needs --rho");
            return frechet::gen_perturbed_copy(frechet::load_curve(base_path), rho, seed);
        }
        throw std::domain_error("unknown kind '" + kind + "'");
    }();
    if (out_path.empty())
        frechet::write_curve(std::cout, curve);
    else
        frechet::save_curve(out_path, curve);
    return 0;
}

std::size_t bench_threads(std::size_t reps) {
    std::size_t cap = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("FRECHET_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) cap = static_cast<std::size_t>(v);
    }
    return std::min(cap, reps);
}

/**
 * One CSV row per size, deciding a curve against its delta-perturbed copy,
 * which completeness guarantees succeeds, so every rep times the full
 * designation-and-walk pipeline. The walk family stays spatially compact and
 * exercises the near-linear regime; the zigzag family spans several grid
 * boxes so stored intervals grow ~ (n/alpha)^2. Reported time is the minimum
 * over reps; reps run concurrently up to FRECHET_THREADS. The exact oracle
 * fills cost_ratio only at small n, where its bisection is affordable.
 */
std::pair<Chain, double> bench_instance(const std::string& family, std::size_t n, double alpha,
                                        std::uint64_t seed) {
    if (family == "walk") return {frechet::gen_walk(n, 2, 1.0, seed), 1.0};
    const double delta = 0.5;
    const double span = 4.0 * alpha * delta;
    std::vector<frechet::Point> vs(n, frechet::Point(2));
    for (std::size_t i = 0; i < n; ++i) {
        vs[i][0] = span * static_cast<double>(i) / static_cast<double>(n - 1);
        vs[i][1] = (i % 2) ? 0.3 : 0.0;
    }
    return {Chain(std::move(vs)), delta};
}

int run_bench(const std::string& sizes_arg, const std::string& alpha_policy,
              const std::string& family, std::size_t reps, std::uint64_t seed) {
    std::vector<std::size_t> sizes;
    std::istringstream ss(sizes_arg);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        const unsigned long v = std::strtoul(tok.c_str(), nullptr, 10);
        if (v < 2) throw std::domain_error("bench sizes must be integers >= 2");
        sizes.push_back(v);
    }
    if (sizes.empty()) throw std::domain_error("empty --bench-sizes");
    if (alpha_policy != "n" && alpha_policy != "sqrt")
        throw std::domain_error("alpha policy must be 'n' or 'sqrt'");
    if (family != "walk" && family != "zigzag")
        throw std::domain_error("family must be 'walk' or 'zigzag'");
    if (reps < 1) throw std::domain_error("need at least one repetition");

    std::printf("n,alpha,wall_time_ms,intervals_stored,cost_ratio,doubling_ratio\n");
    double prev_time = 0.0;
    std::size_t prev_n = 0;
    for (std::size_t idx = 0; idx < sizes.size(); ++idx) {
        const std::size_t n = sizes[idx];
        const double alpha = alpha_policy == "n" ? static_cast<double>(n)
                                                 : std::sqrt(static_cast<double>(n));
        auto [P, rho] = bench_instance(family, n, alpha, seed + 2 * idx);
        Chain Q = frechet::gen_perturbed_copy(P, rho, seed + 2 * idx + 1);

        std::vector<double> times(reps, 0.0);
        std::vector<frechet::DecisionOutcome> outs(reps);
        const std::size_t workers = bench_threads(reps);
        for (std::size_t base = 0; base < reps; base += workers) {
            std::vector<std::thread> pool;
            for (std::size_t r = base; r < std::min(reps, base + workers); ++r)
                pool.emplace_back([&, r] {
                    Timer t;
                    outs[r] = frechet::approx_decide(P, Q, rho, alpha, true);
                    times[r] = t.ms();
                });
            for (auto& th : pool) th.join();
        }
        const double best = *std::min_element(times.begin(), times.end());
        const auto& out = outs.front();
        if (!out.success) throw std::logic_error("bench decision failed at delta = rho");

        std::string ratio;
        if (n <= 256) {
            const double exact = frechet::exact_frechet(P, Q).value;
            if (exact > 0.0) {
                char buf[64];
                std::snprintf(buf, sizeof buf, "%.6f", out.measured_cost / exact);
                ratio = buf;
            }
        }
        std::string doubling;
        if (idx > 0 && prev_n * 2 == n && prev_time > 0.0) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.3f", best / prev_time);
            doubling = buf;
        }
        std::printf("%zu,%s,%.3f,%zu,%s,%s\n", n, frechet::format_coordinate(alpha).c_str(),
                    best, out.stats.intervals_stored, ratio.c_str(), doubling.c_str());
        std::fflush(stdout);
        prev_time = best;
        prev_n = n;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Frechet distance decisions, approximations, and benchmarks"};
    app.require_subcommand(1);

    std::string path_p, path_q;
    double delta = 0.0, alpha = 0.0, eps = 1.0, tol = 1e-10, rho = 0.0, scale = 1.0;
    bool exact = false, timing = false;
    std::string kind, base_path, out_path;
    std::size_t gen_n = 16, gen_d = 2, reps = 3;
    std::uint64_t seed = 1;
    std::string sizes = "1000,2000,4000,8000";
    std::string alpha_policy = "n";
    std::string family = "walk";

    auto* decide = app.add_subcommand("decide", "Decide whether the distance is at most delta");
    decide->add_option("P", path_p, "first curve file")->required();
    decide->add_option("Q", path_q, "second curve file")->required();
    decide->add_option("--delta", delta, "decision radius")->required()
        ->check(CLI::NonNegativeNumber);
    auto* dec_alpha = decide->add_option("--alpha", alpha, "approximation parameter "
                                         "(default sqrt of the larger vertex count)")
                          ->check(CLI::PositiveNumber);
    decide->add_flag("--exact", exact, "use the exact decision procedure");
    decide->add_flag("--timing", timing, "report real wall time in stats");

    auto* compute = app.add_subcommand("compute", "Approximate or compute the distance");
    compute->add_option("P", path_p, "first curve file")->required();
    compute->add_option("Q", path_q, "second curve file")->required();
    auto* cmp_alpha = compute->add_option("--alpha", alpha, "approximation parameter "
                                          "(default sqrt of the larger vertex count)")
                          ->check(CLI::PositiveNumber);
    compute->add_option("--eps", eps, "ladder resolution, 0 < eps <= 1");
    compute->add_flag("--exact", exact, "bisect to the exact value");
    compute->add_option("--tol", tol, "relative tolerance for --exact")
        ->check(CLI::PositiveNumber);
    compute->add_flag("--timing", timing, "report real wall time in stats");

    auto* gen = app.add_subcommand("gen", "Write a synthetic curve file");
    gen->add_option("--kind", kind, "walk | zigzag | circle | perturbed-copy")->required();
    gen->add_option("--n", gen_n, "vertex count");
    gen->add_option("--d", gen_d, "dimension");
    gen->add_option("--scale", scale, "step size / amplitude / radius");
    gen->add_option("--seed", seed, "PRNG seed");
    gen->add_option("--base", base_path, "base curve for perturbed-copy");
    auto* gen_rho = gen->add_option("--rho", rho, "perturbation radius for perturbed-copy")
                        ->check(CLI::NonNegativeNumber);
    gen->add_option("--out", out_path, "output path (default standard output)");

    auto* bench = app.add_subcommand("bench", "CSV timing table over synthetic instances");
    bench->add_option("--bench-sizes", sizes, "comma-separated vertex counts");
    bench->add_option("--alpha-policy", alpha_policy, "'n' or 'sqrt'");
    bench->add_option("--family", family,
                      "'walk' (compact, near-linear) or 'zigzag' (interval-heavy)");
    bench->add_option("--reps", reps, "repetitions per size; minimum time is reported");
    bench->add_option("--seed", seed, "PRNG seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(decide))
            return run_decide(path_p, path_q, delta, alpha, dec_alpha->count() > 0, exact,
                              timing);
        if (app.got_subcommand(compute)) {
            if (!exact && !(eps > 0.0 && eps <= 1.0)) {
                std::cerr << "error: --eps must lie in (0, 1]\n";
                return 2;
            }
            return run_compute(path_p, path_q, alpha, cmp_alpha->count() > 0, eps, exact, tol,
                               timing);
        }
        if (app.got_subcommand(gen))
            return run_gen(kind, gen_n, gen_d, scale, seed, base_path, rho,
                           gen_rho->count() > 0, out_path);
        if (app.got_subcommand(bench))
            return run_bench(sizes, alpha_policy, family, reps, seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
