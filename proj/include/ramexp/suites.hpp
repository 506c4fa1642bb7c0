#pragma once

// Named verification suites behind `ramexp verify`. Each suite runs at its
// default desk-scale grid, produces CSV documents and a pass/fail verdict.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "asympt.hpp"
#include "ramanujan.hpp"
#include "report_io.hpp"

namespace ramexp {

struct SuiteDocument {
    std::string name;  // file stem, e.g. "phi_average"
    std::string csv;
};

struct SuiteOutcome {
    std::string suite;
    bool passed = true;
    std::vector<SuiteDocument> documents;
    std::vector<std::string> messages;
};

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"lemma1", "phi", "mertens", "dk", "weighted", "ingham"};
    return names;
}

inline const std::vector<u64>& default_desk_grid() {
    static const std::vector<u64> grid{10'000, 100'000, 1'000'000};
    return grid;
}

// Gate thresholds.
inline constexpr double kOrthogonalityGrowthSlack = 1.10;
inline constexpr double kPhiGrowthSlack = 1.50;
inline constexpr double kMertensMaxRatio = 1e-3;
inline constexpr double kDkMaxSpread = 2.0;
inline constexpr double kWeightedHalfMaxSpread = 1.25;
inline constexpr double kWeightedOneMaxSpread = 2.0;
inline constexpr double kInghamLow = 0.7;
inline constexpr double kInghamHigh = 1.6;

namespace detail {
inline std::string check_csv(const AsymptoticCheck& c) {
    std::ostringstream os;
    write_check_csv(os, c);
    return os.str();
}

inline void note(SuiteOutcome& out, bool ok, const std::string& what) {
    out.passed = out.passed && ok;
    out.messages.push_back(std::string(ok ? "PASS " : "FAIL ") + what);
}

/// Largest ratio of a value to the running max of the earlier values.
inline double max_growth(const std::vector<double>& v) {
    double running = -1, worst = 0;
    for (double x : v) {
        if (running > 0) worst = std::max(worst, x / running);
        running = std::max(running, x);
    }
    return worst;
}
}  // namespace detail

/// Max over r, s <= max_rs and h in hs of the normalized orthogonality deviation,
/// for each N in grid.
inline std::vector<double> orthogonality_max_deviation(u64 max_rs, const std::vector<u64>& hs, const std::vector<u64>& grid,
                                                std::ostream* csv = nullptr) {
    const RamanujanTables tables(max_rs);
    const auto rows = ramanujan_rows(max_rs, tables);
    if (csv) *csv << "r,s,h,N,correlation_sum,diagonal_term,normalized_deviation\n";
    std::vector<double> out;
    for (u64 N : grid) {
        double mx = 0;
        for (u64 r = 1; r <= max_rs; ++r)
            for (u64 s = 1; s <= max_rs; ++s)
                for (u64 h : hs) {
                    const double dev = orthogonality_deviation(rows[r], rows[s], N, h);
                    mx = std::max(mx, dev);
                    if (csv) {
                        const i64 diag = r == s ? static_cast<i64>(N) * rows[r](h) : 0;
                        *csv << r << ',' << s << ',' << h << ',' << N << ',' << correlation_sum(rows[r], rows[s], N, h)
                             << ',' << diag << ',' << format_number(dev) << '\n';
                    }
                }
        out.push_back(mx);
    }
    return out;
}

inline SuiteOutcome run_suite(const std::string& name) {
    const auto& grid = default_desk_grid();
    const u64 top = grid.back();
    SuiteOutcome out{name, true, {}, {}};
    if (name == "lemma1") {
        std::ostringstream csv;
        const auto mx = orthogonality_max_deviation(12, {0, 1, 2}, grid, &csv);
        out.documents.push_back({"lemma1", csv.str()});
        const double g = detail::max_growth(mx);
        detail::note(out, g <= kOrthogonalityGrowthSlack,
                     "lemma1: max normalized deviation growth " + format_number(g) + " <= " +
                         format_number(kOrthogonalityGrowthSlack));
    } else if (name == "phi") {
        const auto c = check_phi_average(build_table(FnKind::phi, 0, top), grid);
        out.documents.push_back({c.label, detail::check_csv(c)});
        const double g = detail::max_growth(c.normalized_deviations);
        detail::note(out, g <= kPhiGrowthSlack,
                     "phi: normalized deviation growth " + format_number(g) + " <= " + format_number(kPhiGrowthSlack) +
                         " (two-sided spread " + format_number(c.spread()) + ")");
    } else if (name == "mertens") {
        const auto c = check_mertens(build_table(FnKind::mertens, 0, top), grid);
        out.documents.push_back({c.label, detail::check_csv(c)});
        const double last = c.normalized_deviations.back();
        detail::note(out, last < kMertensMaxRatio,
                     "mertens: |M(x)|/x = " + format_number(last) + " < " + format_number(kMertensMaxRatio));
        detail::note(out, last < c.normalized_deviations.front(), "mertens: |M(x)|/x decays across the grid");
    } else if (name == "dk") {
        for (unsigned k : {2u, 4u}) {
            const auto c = check_dk_average(k, build_table(FnKind::divisor_k, k, top), grid);
            out.documents.push_back({c.label, detail::check_csv(c)});
            detail::note(out, c.spread() <= kDkMaxSpread,
                         "d" + std::to_string(k) + ": spread " + format_number(c.spread()) + " <= " +
                             format_number(kDkMaxSpread));
        }
    } else if (name == "weighted") {
        const auto d = build_table(FnKind::divisor_k, 2, top);
        for (double delta : {0.5, 1.0}) {
            const auto c = check_weighted_divisor(d, grid, delta);
            out.documents.push_back({c.label, detail::check_csv(c)});
            const double limit = delta < 1 ? kWeightedHalfMaxSpread : kWeightedOneMaxSpread;
            const bool ok = delta < 1 ? c.spread() < limit : c.spread() <= limit;
            detail::note(out, ok, "weighted delta=" + format_number(delta) + ": spread " + format_number(c.spread()) +
                                      (delta < 1 ? " < " : " <= ") + format_number(limit));
        }
    } else if (name == "ingham") {
        const auto c = check_ingham(build_table(FnKind::divisor_k, 2, top + 1), grid, 1);
        out.documents.push_back({c.label, detail::check_csv(c)});
        const auto& ratio = c.normalized_deviations;
        detail::note(out, ratio.back() >= kInghamLow && ratio.back() <= kInghamHigh,
                     "ingham: ratio at N=" + std::to_string(grid.back()) + " = " + format_number(ratio.back()) +
                         " in [" + format_number(kInghamLow) + ", " + format_number(kInghamHigh) + "]");
        bool monotone = true;
        for (std::size_t i = 1; i < ratio.size(); ++i)
            monotone = monotone && std::abs(ratio[i] - 1) < std::abs(ratio[i - 1] - 1);
        detail::note(out, monotone, "ingham: ratio moves monotonically toward 1");
    } else {
        throw std::invalid_argument("unknown suite: " + name);
    }
    return out;
}

}  // namespace ramexp
