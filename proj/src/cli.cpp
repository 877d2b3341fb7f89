#include "race/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "race/arith.hpp"
#include "race/empirical.hpp"
#include "race/variance.hpp"

namespace race::cli {

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        out += c;
    }
    out += "\"";
    return out;
}

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

int64_t inverse_rep(int64_t a, int64_t q) { return inv_mod(a, q); }

// nonsquare classes mod q, one representative per inverse pair {a, a^{-1}}
std::vector<int64_t> nonsquares_up_to_inversion(const ModulusContext& ctx) {
    std::vector<int64_t> out;
    for (int64_t a = 2; a < ctx.q; ++a) {
        if (!ctx.is_reduced(a) || ctx.is_square(a)) continue;
        if (inv_mod(a, ctx.q) < a) continue;
        out.push_back(a);
    }
    return out;
}

struct RaceRow {
    int64_t q = 0, a = 0, ainv = 0;
    double delta = 0.0;
};

// delta(q;a,1) over the given moduli by zeros quadrature, one row per
// inverse pair, filtered by threshold
std::vector<RaceRow> scan_races(const std::vector<int64_t>& moduli,
                                double threshold, double T, ZeroCache& cache) {
    std::vector<RaceRow> rows;
    size_t i = 0;
    for (int64_t q : moduli) {
        std::fprintf(stderr, "top-races: q=%lld (%zu/%zu)\n",
                     static_cast<long long>(q), ++i, moduli.size());
        auto ctx = ModulusContext::make(q);
        QuadConfig cfg;
        cfg.T = T;
        for (int64_t a : nonsquares_up_to_inversion(ctx)) {
            double d = delta_zeros_quadrature(q, a, 1, cache, cfg).value;
            if (d >= threshold)
                rows.push_back({q, a, inverse_rep(a, q), d});
        }
    }
    std::sort(rows.begin(), rows.end(), [](const RaceRow& x, const RaceRow& y) {
        return x.delta > y.delta;
    });
    return rows;
}

CommandResult race_rows_result(const std::vector<RaceRow>& rows) {
    CommandResult r;
    r.columns = {"q", "a", "a_inv", "delta"};
    for (const auto& row : rows)
        r.records.push_back({{"q", row.q},
                             {"a", row.a},
                             {"a_inv", row.ainv},
                             {"delta", row.delta}});
    return r;
}

json density_record(const DensityResult& d) {
    return {{"q", d.q},       {"a", d.a},         {"b", d.b},
            {"method", d.method}, {"value", d.value}, {"lower", d.lower},
            {"upper", d.upper}};
}

// Lambda(n)/n summed over n <= y, n mod q in {a, a^{-1}}
double prime_power_log_sum(int64_t q, int64_t a, double y) {
    int64_t ainv = inv_mod(a, q);
    double total = 0.0;
    for (int64_t p : primes_up_to(static_cast<int64_t>(y))) {
        double logp = std::log(static_cast<double>(p));
        for (int64_t pk = p; pk <= static_cast<int64_t>(y);) {
            int64_t r = pk % q;
            if (r == a || r == ainv) total += logp / pk;
            if (pk > static_cast<int64_t>(y) / p) break;
            pk *= p;
        }
    }
    return total;
}

std::vector<int64_t> first_prime_powers(int64_t q, int64_t a, int count) {
    int64_t ainv = inv_mod(a, q);
    std::vector<int64_t> out;
    for (int64_t n = 2; static_cast<int>(out.size()) < count; ++n) {
        int64_t r = n % q;
        if ((r == a || r == ainv) && von_mangoldt(n) > 0.0) out.push_back(n);
    }
    return out;
}

CommandResult table_top10(ZeroCache& cache) {
    auto rows = scan_races({3, 4, 8, 12, 24}, 0.0, 2500.0, cache);
    rows.resize(10);
    return race_rows_result(rows);
}

CommandResult table_163(ZeroCache& /*cache*/) {
    auto ctx = ModulusContext::make(163);
    std::vector<RaceRow> rows;
    for (int64_t a : nonsquares_up_to_inversion(ctx))
        rows.push_back(
            {163, a, inverse_rep(a, 163), delta_erf_bounds(163, a, 1).value});
    std::sort(rows.begin(), rows.end(), [](const RaceRow& x, const RaceRow& y) {
        return x.delta < y.delta;
    });
    return race_rows_result(rows);
}

CommandResult table_101() {
    constexpr int64_t q = 101;
    constexpr double y = 1e6;
    auto ctx = ModulusContext::make(q);
    struct Row {
        int64_t a, ainv;
        std::vector<int64_t> pp;
        double rhs;
    };
    std::vector<Row> rows;
    for (int64_t a : nonsquares_up_to_inversion(ctx))
        rows.push_back({a, inverse_rep(a, q), first_prime_powers(q, a, 4),
                        prime_power_log_sum(q, a, y)});
    std::sort(rows.begin(), rows.end(),
              [](const Row& x, const Row& y_) { return x.rhs > y_.rhs; });
    CommandResult r;
    r.columns = {"q",   "a",   "a_inv", "pp1", "pp2",
                 "pp3", "pp4", "rhs_mtilde"};
    for (const auto& row : rows)
        r.records.push_back({{"q", q},
                             {"a", row.a},
                             {"a_inv", row.ainv},
                             {"pp1", row.pp[0]},
                             {"pp2", row.pp[1]},
                             {"pp3", row.pp[2]},
                             {"pp4", row.pp[3]},
                             {"rhs_mtilde", row.rhs}});
    return r;
}

CommandResult table_420() {
    constexpr int64_t q = 420;
    auto ctx = ModulusContext::make(q);
    struct Row {
        int64_t a, ainv, qg;
        double K, total;
    };
    std::vector<Row> rows;
    for (int64_t a : nonsquares_up_to_inversion(ctx)) {
        auto d = delta_discriminant(q, a, 1);
        rows.push_back({a, inverse_rep(a, q), q / std::gcd(a - 1, q), d.K_term,
                        d.total});
    }
    // larger Delta predicts smaller density; the published order is ascending
    // in the density, so descending in Delta
    std::sort(rows.begin(), rows.end(),
              [](const Row& x, const Row& y) { return x.total > y.total; });
    CommandResult r;
    r.columns = {"q", "a", "a_inv", "q_over_gcd", "K_term", "Delta"};
    for (const auto& row : rows)
        r.records.push_back({{"q", q},
                             {"a", row.a},
                             {"a_inv", row.ainv},
                             {"q_over_gcd", row.qg},
                             {"K_term", row.K},
                             {"Delta", row.total}});
    return r;
}

CommandResult table_smallest_erf() {
    CommandResult r;
    r.columns = {"q", "a", "a_inv", "delta", "error_bound"};
    for (int64_t q : {244, 997}) {
        std::fprintf(stderr, "table 7: scanning q=%lld\n",
                     static_cast<long long>(q));
        auto ctx = ModulusContext::make(q);
        struct Row {
            int64_t a, ainv;
            double delta, err;
        };
        std::vector<Row> rows;
        for (int64_t a : nonsquares_up_to_inversion(ctx)) {
            auto d = delta_erf_bounds(q, a, 1);
            rows.push_back(
                {a, inverse_rep(a, q), d.value, 0.5 * d.width()});
        }
        std::sort(rows.begin(), rows.end(),
                  [](const Row& x, const Row& y) { return x.delta < y.delta; });
        rows.resize(20);
        for (const auto& row : rows)
            r.records.push_back({{"q", q},
                                 {"a", row.a},
                                 {"a_inv", row.ainv},
                                 {"delta", row.delta},
                                 {"error_bound", row.err}});
    }
    return r;
}

CommandResult table_9(ZeroCache& cache, bool allow_long) {
    CommandResult r = cmd_top_races(168, 0.0, 100.0, cache, allow_long);
    if (r.records.size() > 120) r.records.resize(120);
    return r;
}

}  // namespace

std::string to_csv(const CommandResult& result) {
    std::string out;
    auto is_float = [&](const std::string& col) {
        return !result.records.empty() &&
               result.records.front().at(col).is_number_float();
    };
    bool first = true;
    for (const auto& col : result.columns) {
        if (!first) out += ",";
        first = false;
        out += csv_escape(col);
        if (is_float(col)) out += "," + csv_escape(col + "_full");
    }
    out += "\r\n";
    for (const auto& rec : result.records) {
        first = true;
        for (const auto& col : result.columns) {
            if (!first) out += ",";
            first = false;
            const auto& v = rec.at(col);
            if (v.is_number_float()) {
                double d = v.get<double>();
                out += fixed6(d) + "," + json(d).dump();
            } else if (v.is_string()) {
                out += csv_escape(v.get<std::string>());
            } else {
                out += v.dump();
            }
        }
        out += "\r\n";
    }
    return out;
}

std::string to_json_text(const CommandResult& result) {
    json arr = json::array();
    for (const auto& rec : result.records) arr.push_back(rec);
    return arr.dump(2) + "\n";
}

CommandResult cmd_density(int64_t q, int64_t a, int64_t b,
                          const std::string& method, int K, double T,
                          ZeroCache& cache) {
    DensityResult d;
    QuadConfig cfg;
    cfg.T = T;
    if (method == "auto") {
        d = delta_auto(q, a, b, cache, cfg);
    } else if (method == "erf") {
        d = delta_erf_bounds(q, a, b);
    } else if (method == "series") {
        d = delta_series(q, a, b, K);
    } else if (method == "zeros") {
        d = delta_zeros_quadrature(q, a, b, cache, cfg);
    } else if (method == "order2") {
        d = delta_order2_arithmetic(q, a, b);
    } else if (method == "nr-erf") {
        d = delta_NR(q, NRMethod::erf);
    } else if (method == "nr-zeros") {
        d = delta_NR(q, NRMethod::zeros, &cache, T);
    } else {
        throw std::invalid_argument("unknown density method: " + method);
    }
    CommandResult r;
    r.columns = {"q", "a", "b", "method", "value", "lower", "upper"};
    r.records.push_back(density_record(d));
    return r;
}

CommandResult cmd_variance(int64_t q, int64_t a, int64_t b,
                           const std::string& method, double y, double T) {
    VarianceMethod m;
    if (method == "lvalues") m = VarianceMethod::lvalues;
    else if (method == "arithmetic") m = VarianceMethod::arithmetic;
    else if (method == "zeros") m = VarianceMethod::zeros;
    else throw std::invalid_argument("unknown variance method: " + method);
    double param = (m == VarianceMethod::zeros) ? T : y;
    auto rep = variance_V(q, a, b, m, param);
    CommandResult r;
    r.columns = {"q",      "a",           "b",      "method",
                 "V",      "error_bound", "comp_scriptL", "comp_K",
                 "comp_iota", "comp_Mstar"};
    r.records.push_back({{"q", rep.q},
                         {"a", a},
                         {"b", b},
                         {"method", method},
                         {"V", rep.V},
                         {"error_bound", rep.error_bound},
                         {"comp_scriptL", rep.comp_scriptL},
                         {"comp_K", rep.comp_K},
                         {"comp_iota", rep.comp_iota},
                         {"comp_Mstar", rep.comp_Mstar}});
    return r;
}

CommandResult cmd_table(int table, ZeroCache& cache, bool allow_long,
                        double empirical_X) {
    switch (table) {
        case 1: return table_top10(cache);
        case 3: return table_163(cache);
        case 5: return table_101();
        case 6: return table_420();
        case 7: return table_smallest_erf();
        case 8: return cmd_empirical_mirror(11, empirical_X, 400);
        case 9: return table_9(cache, allow_long);
        default:
            throw std::invalid_argument(
                "table must be one of 1, 3, 5, 6, 7, 8, 9");
    }
}

CommandResult cmd_top_races(int64_t q_max, double threshold, double T,
                            ZeroCache& cache, bool allow_long) {
    if (q_max > 48 && !allow_long)
        throw std::invalid_argument(
            "top-races beyond q_max = 48 is a long scan; pass --allow-long");
    std::vector<int64_t> moduli;
    for (int64_t q = 3; q <= q_max; ++q) {
        if (q % 4 == 2) continue;
        if (ModulusContext::make(q).phi >= 80) continue;
        moduli.push_back(q);
    }
    return race_rows_result(scan_races(moduli, threshold, T, cache));
}

CommandResult cmd_zeros(int64_t q, int64_t label, double T, ZeroCache& cache) {
    auto g = CharacterGroup::get(q);
    CommandResult r;
    r.columns = {"q",     "label", "conductor", "zeros",
                 "first", "height", "central"};
    for (const auto& chi : g->characters()) {
        if (chi.is_principal()) continue;
        if (label != 0 && chi.label() != label) continue;
        auto star = CharacterGroup::primitive_lift(chi);
        std::fprintf(stderr, "zeros: chi_%lld mod %lld (conductor %lld)\n",
                     static_cast<long long>(chi.label()),
                     static_cast<long long>(q),
                     static_cast<long long>(star.modulus()));
        auto zl = cache.get(star, T);
        r.records.push_back(
            {{"q", q},
             {"label", chi.label()},
             {"conductor", zl.conductor},
             {"zeros", static_cast<int64_t>(zl.ordinates.size())},
             {"first", zl.ordinates.empty() ? 0.0 : zl.ordinates.front()},
             {"height", zl.height},
             {"central", zl.central}});
    }
    if (r.records.empty())
        throw std::invalid_argument("no nonprincipal character matches");
    return r;
}

CommandResult cmd_empirical_mirror(int64_t q, double X, int npoints) {
    auto ctx = ModulusContext::make(q);
    SievePi sieve(q, static_cast<int64_t>(X));
    // group the nonsquare/square pairs (a, b) by r = a b^{-1} up to inversion
    struct Group {
        double sum = 0.0;
        int n = 0;
    };
    std::map<int64_t, Group> groups;
    for (int64_t a = 2; a < q; ++a) {
        if (!ctx.is_reduced(a) || ctx.is_square(a)) continue;
        for (int64_t b = 1; b < q; ++b) {
            if (!ctx.is_reduced(b) || !ctx.is_square(b)) continue;
            int64_t r = mul_mod(a, inv_mod(b, q), q);
            int64_t key = std::min(r, inv_mod(r, q));
            auto& grp = groups[key];
            grp.sum += mirror_variance_sample(sieve, a, b, npoints);
            grp.n += 1;
        }
    }
    CommandResult r;
    r.columns = {"q", "r_class", "pairs", "observed", "predicted"};
    for (const auto& [key, grp] : groups) {
        int64_t partner = inv_mod(key, q);
        std::string label = std::to_string(key);
        if (partner != key) label += "," + std::to_string(partner);
        r.records.push_back({{"q", q},
                             {"r_class", label},
                             {"pairs", grp.n},
                             {"observed", grp.sum / grp.n},
                             {"predicted", variance_plus(q, key, 1)}});
    }
    return r;
}

CommandResult cmd_empirical_logdensity(int64_t q, int64_t a, int64_t b,
                                       double X, int npoints) {
    SievePi sieve(q, static_cast<int64_t>(X));
    auto d = empirical_logdensity_detail(sieve, a, b, npoints);
    CommandResult r;
    r.columns = {"q", "a", "b", "X", "npoints", "win", "lose", "tie"};
    r.records.push_back({{"q", q},
                         {"a", a},
                         {"b", b},
                         {"X", X},
                         {"npoints", npoints},
                         {"win", d.win},
                         {"lose", d.lose},
                         {"tie", d.tie}});
    return r;
}

CommandResult cmd_plot(int64_t q_min, int64_t q_max, bool allow_long) {
    if (q_min < 13)
        throw std::invalid_argument(
            "plot normalization needs prime q >= 13");
    std::vector<int64_t> primes;
    for (int64_t p : primes_up_to(q_max))
        if (p >= q_min) primes.push_back(p);
    if (primes.size() > 50 && !allow_long)
        throw std::invalid_argument(
            "plot over more than 50 primes is a long scan; pass --allow-long");
    CommandResult r;
    r.columns = {"q", "a", "delta", "x", "y"};
    size_t i = 0;
    for (int64_t q : primes) {
        std::fprintf(stderr, "plot: q=%lld (%zu/%zu)\n",
                     static_cast<long long>(q), ++i, primes.size());
        auto ctx = ModulusContext::make(q);
        for (int64_t a : nonsquares_up_to_inversion(ctx)) {
            double d = delta_erf_bounds(q, a, 1).value;
            auto p = normalized_plot_coords(q, a, d);
            r.records.push_back(
                {{"q", q}, {"a", a}, {"delta", d}, {"x", p.x}, {"y", p.y}});
        }
    }
    return r;
}

int run(int argc, const char* const* argv) {
    CLI::App app{"Chebyshev-bias prime race computations"};
    app.require_subcommand(1);

    std::string format = "csv", output, zeros_dir;
    bool allow_long = false;
    app.add_option("--format", format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--output", output, "output path (default stdout)");
    app.add_option("--zeros-dir", zeros_dir,
                   "zero-file directory (default $RACE_ZEROS_DIR or ./zeros)");
    app.add_flag("--allow-long", allow_long, "permit long scans");

    int64_t q = 0, a = 0, b = 1, label = 0, q_max = 24, q_min = 13;
    int K = 1, npoints = 400, table = 1;
    double T = 2500.0, top_T = 200.0, y = 0.0, X = 1e7, threshold = 0.9;
    std::string method = "auto", vmethod = "lvalues";

    auto* density = app.add_subcommand("density", "delta(q;a,b)");
    density->add_option("--q", q)->required();
    density->add_option("--a", a);
    density->add_option("--b", b);
    density->add_option("--method", method)
        ->check(CLI::IsMember({"auto", "erf", "series", "zeros", "order2",
                               "nr-erf", "nr-zeros"}));
    density->add_option("--K", K)->check(CLI::Range(0, 1));
    density->add_option("--T", T);

    auto* variance = app.add_subcommand("variance", "V(q;a,b)");
    variance->add_option("--q", q)->required();
    variance->add_option("--a", a)->required();
    variance->add_option("--b", b);
    variance->add_option("--method", vmethod)
        ->check(CLI::IsMember({"lvalues", "arithmetic", "zeros"}));
    variance->add_option("--y", y);
    variance->add_option("--T", T);

    auto* tab = app.add_subcommand("table", "regenerate a published table");
    tab->add_option("--table", table)->required();
    tab->add_option("--X", X);

    auto* top = app.add_subcommand("top-races", "most biased races");
    top->add_option("--q-max", q_max);
    top->add_option("--threshold", threshold);
    top->add_option("--T", top_T);

    auto* zeros = app.add_subcommand("zeros", "zero finding");
    auto* find = zeros->add_subcommand("find", "locate zeros to a height");
    find->add_option("--q", q)->required();
    find->add_option("--label", label);
    find->add_option("--height", T)->required();

    auto* emp = app.add_subcommand("empirical", "prime-count experiments");
    auto* mirror = emp->add_subcommand("mirror", "mirror variances");
    mirror->add_option("--q", q)->required();
    mirror->add_option("--X", X);
    mirror->add_option("--npoints", npoints);
    auto* logd = emp->add_subcommand("logdensity", "empirical log-density");
    logd->add_option("--q", q)->required();
    logd->add_option("--a", a)->required();
    logd->add_option("--b", b);
    logd->add_option("--X", X);
    logd->add_option("--npoints", npoints);

    auto* plot = app.add_subcommand("plot", "normalized scatter-plot data");
    plot->add_option("--q-min", q_min);
    plot->add_option("--q-max", q_max);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        ZeroCache cache(zeros_dir);
        CommandResult result;
        if (*density) {
            result = cmd_density(q, a, b, method, K, T, cache);
        } else if (*variance) {
            result = cmd_variance(q, a, b, vmethod, y, T);
        } else if (*tab) {
            result = cmd_table(table, cache, allow_long, X);
        } else if (*top) {
            result = cmd_top_races(q_max, threshold, top_T, cache, allow_long);
        } else if (*zeros) {
            if (!*find) throw std::invalid_argument("zeros needs `find`");
            result = cmd_zeros(q, label, T, cache);
        } else if (*emp) {
            if (*mirror) result = cmd_empirical_mirror(q, X, npoints);
            else if (*logd) result = cmd_empirical_logdensity(q, a, b, X,
                                                              npoints);
            else throw std::invalid_argument(
                "empirical needs `mirror` or `logdensity`");
        } else if (*plot) {
            result = cmd_plot(q_min, q_max, allow_long);
        }
        std::string text =
            (format == "json") ? to_json_text(result) : to_csv(result);
        if (output.empty()) {
            std::cout << text;
        } else {
            std::ofstream out(output, std::ios::binary);
            if (!out) throw std::runtime_error("cannot open " + output);
            out << text;
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace race::cli
