#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qrev/adders.hpp"
#include "qrev/cost.hpp"
#include "qrev/errormodel.hpp"
#include "qrev/fftmul.hpp"
#include "qrev/pipeline.hpp"
#include "qrev/simulate.hpp"

namespace {

using qrev::Int;

struct Row {
    long long L = 0;
    std::string algorithm;
    Int S;
    Int T;
    Int T_p;
    double wall_days = 0.0;
    std::string params;
};

std::string format_days(double days) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", days);
    return buf;
}

std::string params_summary(const qrev::ResourceEstimate& est) {
    std::ostringstream out;
    switch (est.algorithm) {
        case qrev::Algorithm::standard:
            out << "serial ripple adders";
            break;
        case qrev::Algorithm::parallel_add:
            out << "block_len=" << est.layout.block_len
                << " blocks=" << est.layout.block_count()
                << " superblock_len=" << est.layout.superblock_len;
            break;
        case qrev::Algorithm::fft2:
            out << "b=" << est.fft_level1.b << " l=" << est.fft_level1.l
                << " ltilde=" << est.fft_level1.l_tilde
                << " bprime=" << est.fft_level2.b_prime;
            break;
    }
    return out.str();
}

Row make_row(qrev::Algorithm alg, long long L, double epsilon, double toffoli_us) {
    qrev::ResourceEstimate est;
    std::string name;
    switch (alg) {
        case qrev::Algorithm::standard:
            est = qrev::standard_cost(L);
            name = "std";
            break;
        case qrev::Algorithm::parallel_add:
            est = qrev::parallel_add_cost(L, epsilon);
            name = "paradd";
            break;
        case qrev::Algorithm::fft2:
            est = qrev::fft_cost(L);
            name = "fft2";
            break;
    }
    Row row;
    row.L = L;
    row.algorithm = name;
    row.S = est.S;
    row.T = est.T;
    row.T_p = est.T_p;
    row.wall_days = qrev::wall_clock_days(est.T_p, toffoli_us);
    row.params = params_summary(est);
    return row;
}

// The zigzag line prices the parallel-adder design squeezed into the
// transform design's memory: same total work, depth stretched by the
// space ratio.
Row make_zigzag_row(long long L, double epsilon, double toffoli_us) {
    Row row;
    row.L = L;
    row.algorithm = "zigzag";
    row.S = qrev::fft_cost(L).S;
    row.T = qrev::parallel_add_cost(L, epsilon).T;
    row.T_p = qrev::zigzag_parallel_cost(L, epsilon);
    row.wall_days = qrev::wall_clock_days(row.T_p, toffoli_us);
    row.params = "parallel adds folded into the transform footprint";
    return row;
}

void print_rows(const std::vector<Row>& rows, const std::string& format) {
    if (format == "csv") {
        std::cout << "L,algorithm,S,T,T_p,wall_days\n";
        for (const Row& r : rows) {
            std::cout << r.L << ',' << r.algorithm << ',' << r.S << ',' << r.T << ',' << r.T_p
                      << ',' << format_days(r.wall_days) << '\n';
        }
    } else if (format == "json") {
        nlohmann::json arr = nlohmann::json::array();
        for (const Row& r : rows) {
            nlohmann::json j;
            j["L"] = r.L;
            j["algorithm"] = r.algorithm;
            j["S"] = r.S.str();
            j["T"] = r.T.str();
            j["T_p"] = r.T_p.str();
            j["wall_days"] = r.wall_days;
            j["params"] = r.params;
            arr.push_back(j);
        }
        std::cout << arr.dump(2) << '\n';
    } else {
        for (const Row& r : rows) {
            std::cout << "L=" << r.L << " algorithm=" << r.algorithm << " S=" << r.S
                      << " T=" << r.T << " T_p=" << r.T_p
                      << " wall_days=" << format_days(r.wall_days) << " params=[" << r.params
                      << "]\n";
        }
    }
}

std::vector<qrev::Algorithm> algorithms_for(const std::string& choice) {
    if (choice == "std") return {qrev::Algorithm::standard};
    if (choice == "paradd") return {qrev::Algorithm::parallel_add};
    if (choice == "fft2") return {qrev::Algorithm::fft2};
    return {qrev::Algorithm::standard, qrev::Algorithm::parallel_add, qrev::Algorithm::fft2};
}

int cmd_estimate(long long bits, const std::string& algorithm, double epsilon, double toffoli_us,
                 const std::string& format) {
    std::vector<Row> rows;
    for (const qrev::Algorithm alg : algorithms_for(algorithm))
        rows.push_back(make_row(alg, bits, epsilon, toffoli_us));
    print_rows(rows, format);
    return 0;
}

int cmd_sweep(int from_log2, int to_log2, int per_octave, double epsilon, double toffoli_us) {
    const std::vector<long long> grid = qrev::log_grid(from_log2, to_log2, per_octave);
    std::vector<Row> rows;
    std::vector<qrev::ResourceEstimate> fft_points;
    for (const long long L : grid) {
        for (const qrev::Algorithm alg :
             {qrev::Algorithm::standard, qrev::Algorithm::parallel_add, qrev::Algorithm::fft2})
            rows.push_back(make_row(alg, L, epsilon, toffoli_us));
        rows.push_back(make_zigzag_row(L, epsilon, toffoli_us));
        fft_points.push_back(qrev::fft_cost(L));
    }
    print_rows(rows, "csv");

    if (fft_points.size() >= 10) {
        const qrev::FitResult total = qrev::fit_powerlaw(fft_points, qrev::CostField::total);
        const qrev::FitResult depth = qrev::fit_powerlaw(fft_points, qrev::CostField::depth);
        char line[128];
        std::snprintf(line, sizeof(line), "# fit,fft2,T,exponent=%.6f,prefactor_log2=%.6f",
                      total.exponent, total.prefactor_log2);
        std::cout << line << '\n';
        std::snprintf(line, sizeof(line), "# fit,fft2,T_p,exponent=%.6f,prefactor_log2=%.6f",
                      depth.exponent, depth.prefactor_log2);
        std::cout << line << '\n';
        const qrev::Crossover cross = qrev::find_crossover(grid, epsilon);
        if (cross.found) {
            std::cout << "# crossover,zigzag_vs_fft2,L_star=" << cross.L_star << '\n';
        } else {
            std::cout << "# crossover,zigzag_vs_fft2,L_star=none\n";
        }
    }
    return 0;
}

struct Check {
    qrev::McRecord record;
    bool passed = true;
};

// Mismatch rate of the simulated constant adder against plain addition.
Check check_const_adders(int width, long long cases, std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ (0xada5u + static_cast<unsigned>(width)));
    long long fails = 0;
    const Int wrap = qrev::pow2(static_cast<unsigned>(width));
    const long long constants = std::max<long long>(1, std::min<long long>(cases, 16));
    const long long per_constant = std::max<long long>(1, cases / constants);
    long long ran = 0;
    for (long long c = 0; c < constants; ++c) {
        const Int B = Int(rng()) % wrap;
        qrev::Circuit circ;
        qrev::Register reg = circ.add_register(width);
        qrev::build_const_adder(circ, reg, B);
        for (long long i = 0; i < per_constant; ++i) {
            const Int x = Int(rng()) % wrap;
            qrev::BasisState in(circ.wire_count());
            qrev::encode_register(in, reg, x.convert_to<std::uint64_t>());
            const qrev::BasisState out = qrev::simulate(circ, in, true);
            if (Int(qrev::decode_register(out, reg)) != (x + B) % wrap) ++fails;
            ++ran;
        }
    }
    Check chk;
    chk.record.test = "adders/const-sum/" + std::to_string(width);
    chk.record.L = width;
    chk.record.trials = ran;
    chk.record.seed = seed;
    chk.record.observed = static_cast<double>(fails) / static_cast<double>(ran);
    chk.record.predicted = 0.0;
    chk.record.band = qrev::wilson95(fails, ran);
    chk.passed = fails == 0;
    return chk;
}

Check check_modular_adders(int width, long long cases, std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ (0x30d17u + static_cast<unsigned>(width)));
    long long fails = 0;
    long long ran = 0;
    const Int wrap = qrev::pow2(static_cast<unsigned>(width));
    const long long constants = std::max<long long>(1, std::min<long long>(cases, 16));
    const long long per_constant = std::max<long long>(1, cases / constants);
    for (long long c = 0; c < constants; ++c) {
        const Int N = 2 + Int(rng()) % (wrap - 2);
        const Int B = Int(rng()) % N;
        qrev::Circuit circ;
        qrev::Register reg = circ.add_register(width);
        const qrev::Wire enable = circ.add_wire();
        qrev::build_modular_const_adder(circ, reg, B, N, qrev::Control{enable, true},
                                        qrev::ComparePolicy::full());
        for (long long i = 0; i < per_constant; ++i) {
            const Int s = Int(rng()) % N;
            qrev::BasisState in(circ.wire_count());
            in.set(enable, true);
            qrev::encode_register(in, reg, s.convert_to<std::uint64_t>());
            const qrev::BasisState out = qrev::simulate(circ, in, true);
            if (Int(qrev::decode_register(out, reg)) != (s + B) % N) ++fails;
            ++ran;
        }
    }
    Check chk;
    chk.record.test = "adders/modular-sum/" + std::to_string(width);
    chk.record.L = width;
    chk.record.trials = ran;
    chk.record.seed = seed;
    chk.record.observed = static_cast<double>(fails) / static_cast<double>(ran);
    chk.record.predicted = 0.0;
    chk.record.band = qrev::wilson95(fails, ran);
    chk.passed = fails == 0;
    return chk;
}

Check check_fft_multiply(long long pairs, std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0xff7u);
    const long long L = 512;
    const qrev::Level1Params p1 = qrev::select_level1(L);
    const qrev::Level2Params p2 = qrev::select_level2(p1.l_tilde);
    long long fails = 0;
    for (long long i = 0; i < pairs; ++i) {
        Int a = 0;
        Int b = 0;
        for (int limb = 0; limb < 8; ++limb) {
            a = (a << 64) + rng();
            b = (b << 64) + rng();
        }
        const Int expect = a * b;
        if (qrev::multiply_1level(a, b, p1).product != expect) ++fails;
        if (qrev::multiply_2level(a, b, p1, p2).product != expect) ++fails;
    }
    Check chk;
    chk.record.test = "fft/multiply/512";
    chk.record.L = L;
    chk.record.trials = 2 * pairs;
    chk.record.seed = seed;
    chk.record.observed = static_cast<double>(fails) / static_cast<double>(2 * pairs);
    chk.record.predicted = 0.0;
    chk.record.band = qrev::wilson95(fails, 2 * pairs);
    chk.passed = fails == 0;
    return chk;
}

Check check_fft_modmul(long long pairs, std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0x30d31u);
    const long long L = 512;
    long long fails = 0;
    for (long long i = 0; i < pairs; ++i) {
        Int N = 0;
        for (int limb = 0; limb < 8; ++limb) N = (N << 64) + rng();
        N |= qrev::pow2(511);
        N |= 1;
        Int A = 2 + Int(rng()) % (N - 3);
        while (qrev::ext_gcd(A, N).g != 1) A = 2 + Int(rng()) % (N - 3);
        const Int p = Int(rng()) % N;
        if (qrev::modmul(p, A, N, L, qrev::MulBackend::two_level).result != p * A % N) ++fails;
    }
    Check chk;
    chk.record.test = "fft/modmul/512";
    chk.record.L = L;
    chk.record.trials = pairs;
    chk.record.seed = seed;
    chk.record.observed = static_cast<double>(fails) / static_cast<double>(pairs);
    chk.record.predicted = 0.0;
    chk.record.band = qrev::wilson95(fails, pairs);
    chk.passed = fails == 0;
    return chk;
}

Check check_compare_window(long long trials, std::uint64_t seed) {
    const double predicted = qrev::trunc_compare_error(64, 8);
    const double observed = qrev::trunc_compare_mc(64, 8, trials, seed);
    const double sigma = std::sqrt(predicted * (1.0 - predicted) / static_cast<double>(trials));
    Check chk;
    chk.record.test = "errors/compare-window";
    chk.record.L = 64;
    chk.record.trials = trials;
    chk.record.seed = seed;
    chk.record.observed = observed;
    chk.record.predicted = predicted;
    chk.record.band =
        qrev::wilson95(static_cast<long long>(std::llround(observed * static_cast<double>(trials))),
                       trials);
    chk.passed = std::abs(observed - predicted) < 3.0 * sigma;
    return chk;
}

Check check_superblock(long long trials, std::uint64_t seed) {
    const double predicted = qrev::superblock_flip_rate(8);
    const double observed = qrev::superblock_carry_mc(8, trials, seed);
    const double sigma = std::sqrt(predicted * (1.0 - predicted) / static_cast<double>(trials));
    Check chk;
    chk.record.test = "errors/superblock-carry";
    chk.record.L = 8;
    chk.record.trials = trials;
    chk.record.seed = seed;
    chk.record.observed = observed;
    chk.record.predicted = predicted;
    chk.record.band =
        qrev::wilson95(static_cast<long long>(std::llround(observed * static_cast<double>(trials))),
                       trials);
    chk.passed = std::abs(observed - predicted) < 3.0 * sigma;
    return chk;
}

Check check_modexp_mismatch(long long trials, std::uint64_t seed, double epsilon) {
    const qrev::ModexpErrorReport rep = qrev::modexp_error_mc(32, epsilon, trials, seed);
    Check chk;
    chk.record.test = "errors/modexp-mismatch";
    chk.record.L = 32;
    chk.record.epsilon = epsilon;
    chk.record.trials = trials;
    chk.record.seed = seed;
    chk.record.observed = rep.observed;
    chk.record.predicted = epsilon;
    chk.record.band = rep.interval;
    chk.passed = rep.observed <= epsilon;
    return chk;
}

int cmd_validate(const std::string& suite, long long trials, std::uint64_t seed, double epsilon) {
    if (trials < 1) throw std::invalid_argument("validate needs a positive trial count");
    std::vector<Check> checks;
    if (suite == "adders" || suite == "all") {
        const long long cases = std::min<long long>(trials, 2000);
        for (const int width : {4, 8, 16}) checks.push_back(check_const_adders(width, cases, seed));
        for (const int width : {8, 16}) checks.push_back(check_modular_adders(width, cases, seed));
    }
    if (suite == "fft" || suite == "all") {
        checks.push_back(check_fft_multiply(std::min<long long>(trials, 100), seed));
        checks.push_back(check_fft_modmul(std::min<long long>(trials, 100), seed));
    }
    if (suite == "errors" || suite == "all") {
        checks.push_back(check_compare_window(trials, seed));
        checks.push_back(check_superblock(trials, seed));
        checks.push_back(check_modexp_mismatch(std::min<long long>(trials, 10000), seed, epsilon));
    }

    bool all_passed = true;
    std::cout << "[";
    for (std::size_t i = 0; i < checks.size(); ++i) {
        if (i != 0) std::cout << ',';
        std::cout << '\n' << qrev::mc_record_json(checks[i].record);
        if (!checks[i].passed) {
            all_passed = false;
            std::cerr << "validation failed: " << checks[i].record.test << '\n';
        }
    }
    std::cout << "\n]\n";
    return all_passed ? 0 : 1;
}

int cmd_demo_factor(long long n, int trials, std::uint64_t seed) {
    const qrev::FactorResult res = qrev::factor_demo(n, trials, seed);
    if (res.found) {
        std::cout << "factor=" << res.factor << " cofactor=" << Int(n) / res.factor
                  << " base=" << res.base << " trials_used=" << res.trials_used << '\n';
        return 0;
    }
    std::cout << "no factor found after " << res.trials_used << " trials\n";
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"reversible arithmetic workbench and resource estimator"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value defaults, one [subcommand] section per command");

    long long bits = 0;
    std::string algorithm = "all";
    double epsilon = 0.01;
    double toffoli_us = 1.0;
    std::string format = "text";
    CLI::App* estimate = app.add_subcommand("estimate", "resource estimates for one size");
    estimate->add_option("--bits", bits, "operand bit length L")->required();
    estimate->add_option("--algorithm", algorithm, "std, paradd, fft2, or all")
        ->check(CLI::IsMember({"std", "paradd", "fft2", "all"}));
    estimate->add_option("--epsilon", epsilon, "target failure probability");
    estimate->add_option("--toffoli-us", toffoli_us, "microseconds per Toffoli");
    estimate->add_option("--format", format, "text, csv, or json")
        ->check(CLI::IsMember({"text", "csv", "json"}));

    int from_log2 = 0;
    int to_log2 = 0;
    int per_octave = 1;
    CLI::App* sweep = app.add_subcommand("sweep", "CSV cost sweep over a size range");
    sweep->add_option("--from-log2", from_log2, "smallest size as a power of two")->required();
    sweep->add_option("--to-log2", to_log2, "largest size as a power of two")->required();
    sweep->add_option("--points-per-octave", per_octave, "grid points per doubling");
    sweep->add_option("--epsilon", epsilon, "target failure probability");
    sweep->add_option("--toffoli-us", toffoli_us, "microseconds per Toffoli");

    std::string suite = "all";
    long long trials = 100000;
    std::uint64_t seed = 1;
    CLI::App* validate = app.add_subcommand("validate", "oracle and Monte Carlo self checks");
    validate->add_option("--suite", suite, "adders, fft, errors, or all")
        ->check(CLI::IsMember({"adders", "fft", "errors", "all"}));
    validate->add_option("--trials", trials, "Monte Carlo sample count");
    validate->add_option("--seed", seed, "random seed");
    validate->add_option("--epsilon", epsilon, "target failure probability");

    long long demo_n = 0;
    int demo_trials = 20;
    CLI::App* demo = app.add_subcommand("demo-factor", "toy period-finding factorization");
    demo->add_option("--n", demo_n, "odd composite to factor")->required();
    demo->add_option("--trials", demo_trials, "random bases to try");
    demo->add_option("--seed", seed, "random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (estimate->parsed()) return cmd_estimate(bits, algorithm, epsilon, toffoli_us, format);
        if (sweep->parsed()) return cmd_sweep(from_log2, to_log2, per_octave, epsilon, toffoli_us);
        if (validate->parsed()) return cmd_validate(suite, trials, seed, epsilon);
        if (demo->parsed()) return cmd_demo_factor(demo_n, demo_trials, seed);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
