#pragma once

// CSV and JSON emission for experiment reports and asymptotic checks, and
// the JSON format for custom coefficient pairs. Numbers are printed with 15
// significant digits.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "asympt.hpp"
#include "parseval.hpp"

namespace ramexp {

inline constexpr const char* kLibraryVersion = "1.0.0";
inline constexpr const char* kReportSchemaVersion = "1";

inline std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    return buf;
}

namespace detail {
/// Rounds to 15 significant digits so the JSON writer prints at most 15.
inline nlohmann::json json_number(double x) {
    if (!std::isfinite(x)) return nullptr;
    return std::stod(format_number(x));
}
}  // namespace detail

inline const char* to_string(PairKind p) {
    switch (p) {
        case PairKind::sigma: return "sigma";
        case PairKind::jordan: return "jordan";
        case PairKind::custom: return "custom-file";
    }
    return "unknown";
}

/// Columns: N,h,s,t,actual,main,signed_error,bound_new,bound_old,R,tail
inline void write_reports_csv(std::ostream& out, const std::vector<ConvolutionReport>& reports) {
    out << "N,h,s,t,actual,main,signed_error,bound_new,bound_old,R,tail\n";
    for (const auto& r : reports) {
        out << r.N << ',' << r.h << ',' << format_number(r.s) << ',' << format_number(r.t) << ','
            << format_number(r.actual) << ',' << format_number(r.main) << ',' << format_number(r.signed_error) << ','
            << format_number(r.bound_new) << ',' << format_number(r.bound_old) << ',' << r.R << ','
            << format_number(r.tail) << '\n';
    }
}

inline nlohmann::json experiment_json(const ExperimentConfig& cfg, const ExperimentResult& res) {
    using nlohmann::json;
    using detail::json_number;
    json header;
    header["pair"] = to_string(cfg.pair);
    header["series_f"] = res.label_f;
    header["series_g"] = res.label_g;
    header["s"] = json_number(cfg.s);
    header["t"] = json_number(cfg.t);
    header["h"] = cfg.h;
    header["delta"] = json_number(res.delta);
    header["decay_C_f"] = json_number(res.decay_C_f);
    header["decay_C_g"] = json_number(res.decay_C_g);
    header["grid"] = cfg.grid;
    header["tolerances"] = {{"tail_target", json_number(res.tail_target)},
                            {"growth_slack", json_number(kScaleGrowthSlack)},
                            {"zero_error_threshold", json_number(kZeroErrorThreshold)}};
    header["main_term"] = {{"value", json_number(res.main.value)},
                           {"R", res.main.R},
                           {"tail", json_number(res.main.tail)},
                           {"cap_reached", res.main.cap_reached}};
    header["scale_new"] = json_number(res.scale_new);
    header["scale_old"] = json_number(res.scale_old);
    header["growth_ok"] = res.growth_ok;
    if (!cfg.custom_file.empty()) header["custom_file"] = cfg.custom_file;
    if (res.cross_check) {
        const auto& cc = *res.cross_check;
        header["cross_check"] = {{"kind", cc.kind},
                                 {"value", json_number(cc.value)},
                                 {"difference", json_number(cc.difference)},
                                 {"tolerance", json_number(cc.tolerance)},
                                 {"ok", cc.ok}};
    }
    header["library_version"] = kLibraryVersion;

    json rows = json::array();
    for (const auto& r : res.reports) {
        rows.push_back({{"N", r.N},
                        {"h", r.h},
                        {"s", json_number(r.s)},
                        {"t", json_number(r.t)},
                        {"actual", json_number(r.actual)},
                        {"main", json_number(r.main)},
                        {"signed_error", json_number(r.signed_error)},
                        {"relative_error", json_number(r.relative_error())},
                        {"bound_new", json_number(r.bound_new)},
                        {"bound_old", json_number(r.bound_old)},
                        {"R", r.R},
                        {"tail", json_number(r.tail)},
                        {"cap_reached", r.cap_reached}});
    }
    return {{"schema_version", kReportSchemaVersion}, {"experiment", header}, {"reports", rows}, {"passed", res.passed()}};
}

/// Columns: x,partial,model,normalized_deviation
inline void write_check_csv(std::ostream& out, const AsymptoticCheck& c) {
    out << "x,partial,model,normalized_deviation\n";
    for (std::size_t i = 0; i < c.grid.size(); ++i)
        out << c.grid[i] << ',' << format_number(c.partial_sums[i]) << ',' << format_number(c.model_values[i]) << ','
            << format_number(c.normalized_deviations[i]) << '\n';
}

/// Custom pair file:
///   {"f": {"label": "...", "delta": 0.5, "coefficients": [f^(1), f^(2), ...]},
///    "g": {...}}
/// Coefficients beyond the list are zero.
inline SeriesPair parse_custom_pair(const nlohmann::json& doc) {
    auto one = [&](const char* key) {
        if (!doc.contains(key)) throw std::invalid_argument(std::string("custom pair: missing \"") + key + "\"");
        const auto& s = doc.at(key);
        if (!s.contains("delta") || !s.at("delta").is_number())
            throw std::invalid_argument(std::string("custom pair: \"") + key + ".delta\" must be a number");
        if (!s.contains("coefficients") || !s.at("coefficients").is_array())
            throw std::invalid_argument(std::string("custom pair: \"") + key + ".coefficients\" must be an array");
        auto coeffs = s.at("coefficients").get<std::vector<double>>();
        if (coeffs.size() > kMaxCustomSupport)
            throw std::invalid_argument(std::string("custom pair: \"") + key + ".coefficients\" longer than " +
                                        std::to_string(kMaxCustomSupport));
        return finite_series(std::move(coeffs), s.at("delta").get<double>(), s.value("label", std::string(key)));
    };
    return {one("f"), one("g")};
}

inline SeriesPair load_custom_pair(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open custom pair file " + path);
    return parse_custom_pair(nlohmann::json::parse(in));
}

}  // namespace ramexp
