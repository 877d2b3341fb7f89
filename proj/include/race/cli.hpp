#pragma once

/**
 * @file cli.hpp
 * @brief Command-line surface: density/variance computations, table
 * regeneration, top-race scans, zero finding, empirical experiments.
 *
 * Every command returns a CommandResult: an ordered column list plus one JSON
 * object per row.  The same records serialize to RFC-4180 CSV (densities
 * rounded to 6 decimals with full-precision columns alongside) or to a JSON
 * array that round-trips through parsing.  run() wires these to argv and maps
 * failures to exit codes: 0 success, 1 compute/precondition, 2 usage.
 */

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "race/density.hpp"

namespace race::cli {

using json = nlohmann::json;

struct CommandResult {
    std::vector<std::string> columns;  // column order for CSV output
    std::vector<json> records;         // one object per row
};

// CSV per RFC 4180: CRLF line endings, header row first.  Floating-point
// fields are written rounded to 6 decimals, each followed by a
// "<name>_full" column carrying the shortest round-trip representation.
std::string to_csv(const CommandResult& result);

// JSON array of the records; json::parse(to_json_text(r)) reproduces them.
std::string to_json_text(const CommandResult& result);

// delta(q;a,b) by the requested method: "auto", "erf", "series" (order K),
// "zeros" (height T), "order2", or the N vs R race via "nr-erf"/"nr-zeros"
// (a and b ignored).  Throws std::invalid_argument/std::domain_error on
// precondition failures.
CommandResult cmd_density(int64_t q, int64_t a, int64_t b,
                          const std::string& method, int K, double T,
                          ZeroCache& cache);

// V(q;a,b) with its named components; method "lvalues", "arithmetic"
// (truncation y, y <= 0 for the default q^2), or "zeros" (height T).
CommandResult cmd_variance(int64_t q, int64_t a, int64_t b,
                           const std::string& method, double y, double T);

// Regenerate a published table by number: 1 (top 10 races), 3 (densities mod
// 163), 5 (prime-power influence mod 101; the density column is omitted
// because a central zero puts those densities outside the supported model),
// 6 (discriminant ranking mod 420), 7 (20 smallest densities mod 244 and
// 997), 8 (mirror variances mod 11), 9 (top 120 races; long, requires
// allow_long).
CommandResult cmd_table(int table, ZeroCache& cache, bool allow_long,
                        double empirical_X = 1e7);

// All races delta(q;a,1) >= threshold among moduli 3 <= q <= q_max with
// q != 2 (mod 4) and phi(q) < 80, one row per inverse pair {a, a^{-1}},
// sorted descending.  Scans beyond q_max = 48 require allow_long.
CommandResult cmd_top_races(int64_t q_max, double threshold, double T,
                            ZeroCache& cache, bool allow_long);

// Zero lists for every character mod q (or a single Conrey label) to height
// T, computed through the cache (which writes the files).
CommandResult cmd_zeros(int64_t q, int64_t label, double T, ZeroCache& cache);

// Observed versus predicted mirror variances for E(x;q,a) + E(x;q,b),
// grouped by the class of a b^{-1} up to inversion.
CommandResult cmd_empirical_mirror(int64_t q, double X, int npoints);

// Empirical logarithmic density of pi(x;q,a) > pi(x;q,b) on the dyadic grid.
CommandResult cmd_empirical_logdensity(int64_t q, int64_t a, int64_t b,
                                       double X, int npoints);

// Normalized scatter-plot coordinates for the minimal density
// min_a delta(q;a,1) of each prime q in [q_min, q_max] (erf method).  Ranges
// covering more than 50 primes require allow_long.
CommandResult cmd_plot(int64_t q_min, int64_t q_max, bool allow_long);

// Full argv entry point used by main(); parses flags, dispatches, writes
// CSV/JSON to the requested output, reports progress on stderr.
int run(int argc, const char* const* argv);

}  // namespace race::cli
