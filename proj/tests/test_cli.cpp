#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "frechet/curve_io.hpp"
#include "frechet/freespace.hpp"
#include "frechet/generate.hpp"

using namespace frechet;
using nlohmann::json;

namespace {

struct RunResult {
    int exit_code;
    std::string out;
};

/** Runs the installed binary through the shell; stderr goes to out only on request. */
RunResult run_cli(const std::string& args, bool merge_stderr = false) {
    std::string cmd = std::string(FRECHET_CLI_PATH) + " " + args;
    cmd += merge_stderr ? " 2>&1" : " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
    const int status = pclose(pipe);
    REQUIRE(WIFEXITED(status));
    return {WEXITSTATUS(status), out};
}

std::filesystem::path scratch_dir() {
    static std::filesystem::path dir = [] {
        auto p = std::filesystem::temp_directory_path() /
                 ("frechet_cli_test_" + std::to_string(::getpid()));
        std::filesystem::create_directories(p);
        return p;
    }();
    return dir;
}

std::string fixture(const std::string& name, const Chain& c) {
    const auto path = (scratch_dir() / name).string();
    save_curve(path, c);
    return path;
}

std::string raw_fixture(const std::string& name, const std::string& text) {
    const auto path = (scratch_dir() / name).string();
    FILE* f = std::fopen(path.c_str(), "w");
    REQUIRE(f != nullptr);
    std::fwrite(text.data(), 1, text.size(), f);
    std::fclose(f);
    return path;
}

Correspondence from_breakpoints(const json& arr) {
    Correspondence c;
    for (const auto& bp : arr) c.append(bp.at(0).get<double>(), bp.at(1).get<double>());
    return c;
}

void check_cost_roundtrip(const json& doc, const Chain& P, const Chain& Q) {
    REQUIRE(doc.at("cost").is_number());
    const double cost = doc.at("cost").get<double>();
    const double again = correspondence_cost(P, Q, from_breakpoints(doc.at("breakpoints")));
    REQUIRE(std::abs(again - cost) <= 1e-9 * std::max(1.0, std::abs(cost)));
}

}  // namespace

TEST_CASE("decide accepts identical curves at delta zero") {
    Chain walk = gen_walk(10, 2, 1.0, 21);
    const auto path = fixture("same.txt", walk);
    auto r = run_cli("decide " + path + " " + path + " --delta 0");
    REQUIRE(r.exit_code == 0);
    json doc = json::parse(r.out);
    REQUIRE(doc.at("command") == "decide");
    REQUIRE(doc.at("result") == "success");
    REQUIRE(doc.at("cost").get<double>() == 0.0);
    REQUIRE(doc.at("stats").at("m").get<std::size_t>() == walk.size());
    check_cost_roundtrip(doc, walk, walk);
}

TEST_CASE("exact decide rejects parallel segments beyond delta") {
    Chain a(std::vector<Point>{{0.0, 0.0}, {4.0, 0.0}});
    Chain b(std::vector<Point>{{0.0, 1.0}, {4.0, 1.0}});
    const auto pa = fixture("segA.txt", a), pb = fixture("segB.txt", b);
    auto r = run_cli("decide " + pa + " " + pb + " --delta 0.5 --exact");
    REQUIRE(r.exit_code == 1);
    json doc = json::parse(r.out);
    REQUIRE(doc.at("result") == "failure");
    REQUIRE(doc.at("cost").is_null());
    REQUIRE(doc.at("breakpoints").empty());

    auto ok = run_cli("decide " + pa + " " + pb + " --delta 1.0 --exact");
    REQUIRE(ok.exit_code == 0);
    json okdoc = json::parse(ok.out);
    REQUIRE(okdoc.at("result") == "success");
    check_cost_roundtrip(okdoc, a, b);
}

TEST_CASE("every emitted document survives the cost round trip") {
    for (std::uint64_t seed : {31, 32, 33}) {
        Chain P = gen_walk(14, 2, 1.0, seed);
        Chain Q = gen_perturbed_copy(P, 0.3, seed + 100);
        const auto pp = fixture("rtP.txt", P), pq = fixture("rtQ.txt", Q);
        for (const std::string cmd :
             {"decide " + pp + " " + pq + " --delta 0.3",
              "decide " + pp + " " + pq + " --delta 0.3 --exact",
              "compute " + pp + " " + pq + " --alpha 4 --eps 0.5",
              "compute " + pp + " " + pq + " --exact"}) {
            auto r = run_cli(cmd);
            REQUIRE(r.exit_code == 0);
            check_cost_roundtrip(json::parse(r.out), P, Q);
        }
    }
}

TEST_CASE("exact compute reproduces the translation example") {
    Chain P(std::vector<Point>{{0.0, 0.0}, {1.0, 2.0}, {3.0, 1.0}});
    Chain Q(std::vector<Point>{{3.0, 4.0}, {4.0, 6.0}, {6.0, 5.0}});
    const auto pp = fixture("trP.txt", P), pq = fixture("trQ.txt", Q);
    auto r = run_cli("compute " + pp + " " + pq + " --exact --tol 1e-12");
    REQUIRE(r.exit_code == 0);
    json doc = json::parse(r.out);
    REQUIRE(doc.at("result").get<double>() == Catch::Approx(5.0).margin(1e-9));
    check_cost_roundtrip(doc, P, Q);
}

TEST_CASE("approximate values dominate exact values") {
    for (std::uint64_t seed : {41, 42, 43, 44}) {
        Chain P = gen_walk(9, 2, 1.0, seed);
        Chain Q = gen_walk(7, 2, 1.0, seed + 50);
        const auto pp = fixture("pairP.txt", P), pq = fixture("pairQ.txt", Q);
        auto ap = run_cli("compute " + pp + " " + pq);
        auto ex = run_cli("compute " + pp + " " + pq + " --exact");
        REQUIRE(ap.exit_code == 0);
        REQUIRE(ex.exit_code == 0);
        const double approx = json::parse(ap.out).at("result").get<double>();
        const double exact = json::parse(ex.out).at("result").get<double>();
        REQUIRE(approx >= exact * (1.0 - 1e-9) - 1e-12);
    }
}

TEST_CASE("repeated invocations emit identical bytes") {
    Chain P = gen_walk(11, 3, 1.0, 51);
    Chain Q = gen_perturbed_copy(P, 0.2, 52);
    const auto pp = fixture("detP.txt", P), pq = fixture("detQ.txt", Q);
    for (const std::string cmd : {"compute " + pp + " " + pq + " --alpha 3 --eps 1",
                                  "decide " + pp + " " + pq + " --delta 0.25"}) {
        auto first = run_cli(cmd);
        auto second = run_cli(cmd);
        REQUIRE(first.exit_code == second.exit_code);
        REQUIRE(first.out == second.out);
    }
}

TEST_CASE("gen writes reproducible curves that honor their bounds") {
    auto w1 = run_cli("gen --kind walk --n 12 --d 2 --seed 7");
    auto w2 = run_cli("gen --kind walk --n 12 --d 2 --seed 7");
    REQUIRE(w1.exit_code == 0);
    REQUIRE(w1.out == w2.out);
    std::istringstream in(w1.out);
    REQUIRE(parse_curve(in).size() == 12);

    const auto zig = (scratch_dir() / "zig.txt").string();
    REQUIRE(run_cli("gen --kind zigzag --n 9 --d 2 --scale 0.7 --out " + zig).exit_code == 0);
    Chain base(std::vector<Point>{{0.0, 0.0}, {8.0, 0.0}});
    const auto pb = fixture("zigbase.txt", base);
    auto zr = run_cli("compute " + zig + " " + pb + " --exact");
    REQUIRE(json::parse(zr.out).at("result").get<double>() == Catch::Approx(0.7).margin(1e-9));

    const auto src = fixture("copysrc.txt", gen_walk(8, 2, 1.0, 61));
    const auto dst = (scratch_dir() / "copy.txt").string();
    REQUIRE(run_cli("gen --kind perturbed-copy --base " + src + " --rho 0.15 --seed 62 --out " +
                    dst)
                .exit_code == 0);
    auto ex = exact_frechet(load_curve(src), load_curve(dst));
    REQUIRE(ex.value <= 0.15 * (1.0 + 1e-9) + 1e-12);
}

TEST_CASE("malformed inputs exit 2 with a line diagnostic") {
    const auto bad = raw_fixture("bad.txt", "1 2\n3 4 5\n");
    const auto good = fixture("good.txt", gen_walk(5, 2, 1.0, 71));
    auto r = run_cli("decide " + bad + " " + good + " --delta 1", true);
    REQUIRE(r.exit_code == 2);
    REQUIRE_THAT(r.out, Catch::Matchers::ContainsSubstring("line 2"));

    auto missing = run_cli("decide /nonexistent.txt " + good + " --delta 1", true);
    REQUIRE(missing.exit_code == 2);
}

TEST_CASE("usage errors exit 2") {
    const auto good = fixture("usage.txt", gen_walk(5, 2, 1.0, 81));
    REQUIRE(run_cli("decide " + good + " --delta 1", true).exit_code == 2);
    REQUIRE(run_cli("unknown-subcommand", true).exit_code == 2);
    REQUIRE(run_cli("compute " + good + " " + good + " --eps 2", true).exit_code == 2);
    REQUIRE(run_cli("gen --kind bogus", true).exit_code == 2);
    REQUIRE(run_cli("gen --kind perturbed-copy --base " + good, true).exit_code == 2);
    REQUIRE(run_cli("gen --kind zigzag --n 9 --d 1", true).exit_code == 2);
    REQUIRE(run_cli("bench --family bogus", true).exit_code == 2);
    REQUIRE(run_cli("", true).exit_code == 2);
}

TEST_CASE("bench interval storage grows quadratically in n over alpha") {
    // The zigzag family spans several grid boxes; with alpha = sqrt(n) the
    // stored-interval column must track (n/alpha)^2. Interval counts are
    // deterministic for a fixed seed, unlike times.
    auto r = run_cli(
        "bench --bench-sizes 256,1024,4096 --alpha-policy sqrt --family zigzag --reps 1 "
        "--seed 900");
    REQUIRE(r.exit_code == 0);
    std::istringstream lines(r.out);
    std::string line;
    REQUIRE(std::getline(lines, line));  // header
    std::vector<double> log_na, log_intervals;
    while (std::getline(lines, line)) {
        std::istringstream ls(line);
        std::string n_str, alpha_str, time_str, intervals_str;
        std::getline(ls, n_str, ',');
        std::getline(ls, alpha_str, ',');
        std::getline(ls, time_str, ',');
        std::getline(ls, intervals_str, ',');
        log_na.push_back(std::log(std::stod(n_str) / std::stod(alpha_str)));
        log_intervals.push_back(std::log(std::stod(intervals_str)));
    }
    REQUIRE(log_na.size() == 3);
    const double slope =
        (log_intervals.back() - log_intervals.front()) / (log_na.back() - log_na.front());
    REQUIRE(slope > 1.5);
    REQUIRE(slope < 2.5);
}

TEST_CASE("bench prints the CSV schema") {
    auto r = run_cli("bench --bench-sizes 32,64 --reps 2 --seed 9");
    REQUIRE(r.exit_code == 0);
    std::istringstream lines(r.out);
    std::string header;
    REQUIRE(std::getline(lines, header));
    REQUIRE(header == "n,alpha,wall_time_ms,intervals_stored,cost_ratio,doubling_ratio");
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(lines, line)) {
        std::vector<std::string> cols;
        std::istringstream ls(line);
        std::string col;
        while (std::getline(ls, col, ',')) cols.push_back(col);
        while (cols.size() < 6) cols.emplace_back();
        rows.push_back(cols);
    }
    REQUIRE(rows.size() == 2);
    REQUIRE(rows[0][0] == "32");
    REQUIRE(rows[1][0] == "64");
    // Oracle-feasible sizes fill cost_ratio; the second row doubles the first.
    REQUIRE_FALSE(rows[0][4].empty());
    REQUIRE_FALSE(rows[1][5].empty());
    REQUIRE(std::stod(rows[1][2]) >= 0.0);
    REQUIRE(std::stoul(rows[0][3]) > 0);
}
