// ramexp: command-line front end.
//
//   ramexp crn R N
//   ramexp parseval --pair sigma --s 1 --t 1 --h 2 --grid 1e4,1e5,1e6
//   ramexp verify lemma1|phi|mertens|dk|weighted|ingham|all
//
// Exit codes: 0 success, 1 check failure, 2 usage error.

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ramexp/parseval.hpp"
#include "ramexp/ramanujan.hpp"
#include "ramexp/report_io.hpp"
#include "ramexp/suites.hpp"

namespace {

using namespace ramexp;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

constexpr u64 kDefaultMaxN = 10'000'000;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parses "1e4,1e5,1e6" into strictly increasing integers >= 2.
std::vector<u64> parse_grid(const std::string& text) {
    std::vector<u64> grid;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        const auto b = tok.find_first_not_of(" \t");
        const auto e = tok.find_last_not_of(" \t");
        if (b == std::string::npos) throw UsageError("grid: empty entry in \"" + text + "\"");
        tok = tok.substr(b, e - b + 1);
        errno = 0;
        char* end = nullptr;
        const double v = std::strtod(tok.c_str(), &end);
        if (errno != 0 || end != tok.c_str() + tok.size()) throw UsageError("grid: \"" + tok + "\" is not a number");
        if (v != std::floor(v)) throw UsageError("grid: \"" + tok + "\" is not an integer");
        if (v < 2 || v > 9.007199254740992e15) throw UsageError("grid: \"" + tok + "\" out of range (need 2 <= N < 2^53)");
        const auto n = static_cast<u64>(v);
        if (!grid.empty() && n <= grid.back()) throw UsageError("grid: values must be strictly increasing");
        grid.push_back(n);
    }
    if (grid.empty()) throw UsageError("grid: no values given");
    return grid;
}

PairKind parse_pair(const std::string& s) {
    if (s == "sigma") return PairKind::sigma;
    if (s == "jordan") return PairKind::jordan;
    if (s == "custom-file") return PairKind::custom;
    throw UsageError("pair: expected sigma, jordan or custom-file, got \"" + s + "\"");
}

/// 1-based line of the first occurrence of "key" in a JSON text, 0 if absent.
std::size_t line_of_key(const std::string& text, const std::string& key) {
    const auto pos = text.find('"' + key + '"');
    if (pos == std::string::npos) return 0;
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

struct ParsevalArgs {
    std::string config;
    std::string pair = "sigma";
    double s = 1.0;
    double t = 1.0;
    u64 h = 0;
    std::string grid = "1e4,1e5,1e6";
    double tail_target = 0.0;
    std::string output;
    std::string format = "csv";
    unsigned threads = 1;
    bool allow_large = false;
    std::string coeffs;
};

/// Overlays values from a JSON config file; CLI flags given explicitly win.
void apply_config_file(ParsevalArgs& a, const CLI::App& cmd) {
    std::ifstream in(a.config);
    if (!in) throw UsageError("config: cannot open " + a.config);
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw UsageError(a.config + ": " + e.what());
    }
    if (!doc.is_object()) throw UsageError(a.config + ":1: config must be a JSON object");
    auto fail = [&](const std::string& key, const std::string& msg) {
        throw UsageError(a.config + ":" + std::to_string(line_of_key(text, key)) + ": \"" + key + "\" " + msg);
    };
    auto given = [&](const char* flag) { return cmd.count(flag) > 0; };
    for (const auto& [key, val] : doc.items()) {
        try {
            if (key == "pair") {
                if (!given("--pair")) a.pair = val.get<std::string>();
            } else if (key == "s") {
                if (!given("--s")) a.s = val.get<double>();
            } else if (key == "t") {
                if (!given("--t")) a.t = val.get<double>();
            } else if (key == "h") {
                if (!val.is_number_integer() || val.get<long long>() < 0) fail(key, "must be a nonnegative integer");
                if (!given("--h")) a.h = val.get<u64>();
            } else if (key == "grid") {
                if (given("--grid")) continue;
                if (val.is_string()) {
                    a.grid = val.get<std::string>();
                } else if (val.is_array()) {
                    std::string g;
                    for (const auto& x : val) {
                        if (!x.is_number()) fail(key, "entries must be numbers");
                        g += (g.empty() ? "" : ",") + format_number(x.get<double>());
                    }
                    a.grid = g;
                } else {
                    fail(key, "must be a string or an array of numbers");
                }
            } else if (key == "tail_target") {
                if (!given("--tail-target")) a.tail_target = val.get<double>();
            } else if (key == "output") {
                if (!given("--output")) a.output = val.get<std::string>();
            } else if (key == "format") {
                if (!given("--format")) a.format = val.get<std::string>();
            } else if (key == "threads") {
                if (!val.is_number_integer() || val.get<long long>() < 1) fail(key, "must be a positive integer");
                if (!given("--threads")) a.threads = val.get<unsigned>();
            } else if (key == "allow_large") {
                if (!given("--allow-large")) a.allow_large = val.get<bool>();
            } else if (key == "coeffs") {
                if (!given("--coeffs")) a.coeffs = val.get<std::string>();
            } else {
                fail(key, "is not a recognized key");
            }
        } catch (const nlohmann::json::type_error&) {
            fail(key, "has the wrong type");
        }
    }
}

ExperimentConfig make_config(const ParsevalArgs& a) {
    ExperimentConfig cfg;
    cfg.pair = parse_pair(a.pair);
    cfg.s = a.s;
    cfg.t = a.t;
    cfg.h = a.h;
    cfg.grid = parse_grid(a.grid);
    cfg.tail_target = a.tail_target;
    cfg.output = a.output;
    cfg.format = a.format == "json" ? OutputFormat::json : OutputFormat::csv;
    if (a.format != "json" && a.format != "csv") throw UsageError("format: expected csv or json");
    if (a.threads < 1) throw UsageError("threads: must be >= 1");
    cfg.threads = a.threads;
    if (cfg.pair != PairKind::custom && (!(cfg.s > 0) || !(cfg.t > 0))) throw UsageError("s and t must be positive");
    if (!(cfg.tail_target >= 0)) throw UsageError("tail-target must be positive");
    cfg.max_N = a.allow_large ? kMaxExperimentN : kDefaultMaxN;
    if (cfg.grid.back() > cfg.max_N)
        throw UsageError("grid: N = " + std::to_string(cfg.grid.back()) + " exceeds " + std::to_string(cfg.max_N) +
                         (a.allow_large ? "" : " (pass --allow-large to raise the limit to 1e8)"));
    if (cfg.pair == PairKind::custom) {
        if (a.coeffs.empty()) throw UsageError("pair custom-file needs --coeffs FILE");
        cfg.custom_file = a.coeffs;
        try {
            cfg.custom_pair = load_custom_pair(a.coeffs);
        } catch (const nlohmann::json::exception& e) {
            throw UsageError(a.coeffs + ": " + e.what());
        } catch (const std::invalid_argument& e) {
            throw UsageError(a.coeffs + ": " + e.what());
        }
    }
    return cfg;
}

int run_parseval(const ParsevalArgs& args, const CLI::App& cmd) {
    ParsevalArgs a = args;
    if (!a.config.empty()) apply_config_file(a, cmd);
    const ExperimentConfig cfg = make_config(a);
    const ExperimentResult res = run_experiment(cfg);

    std::ofstream file;
    if (!cfg.output.empty()) {
        file.open(cfg.output);
        if (!file) throw std::runtime_error("cannot open output file " + cfg.output);
    }
    std::ostream& out = cfg.output.empty() ? std::cout : file;
    if (cfg.format == OutputFormat::json)
        out << experiment_json(cfg, res).dump(2) << '\n';
    else
        write_reports_csv(out, res.reports);
    if (!out) throw std::runtime_error("write failed");

    std::cerr << "main term " << format_number(res.main.value) << " (R=" << res.main.R
              << ", tail <= " << format_number(res.main.tail) << (res.main.cap_reached ? ", CAP REACHED" : "")
              << ")\n";
    for (const auto& r : res.reports)
        std::cerr << "N=" << r.N << " relative_error=" << format_number(r.relative_error()) << '\n';
    if (res.cross_check)
        std::cerr << res.cross_check->kind << " " << format_number(res.cross_check->value) << " difference "
                  << format_number(res.cross_check->difference) << " tolerance "
                  << format_number(res.cross_check->tolerance) << (res.cross_check->ok ? " ok" : " MISMATCH") << '\n';
    std::cerr << "normalized error growth " << (res.growth_ok ? "ok" : "EXCEEDS 10%") << '\n';
    return res.passed() ? kExitOk : kExitCheckFailed;
}

int run_crn(u64 r, u64 n) {
    if (r < 1) throw UsageError("crn: r must be >= 1");
    if (r > kMaxTableLimit / 2) throw UsageError("crn: r too large");
    const RamanujanTables tables(r);
    const i64 a = ramanujan_sum_divisor(r, n, tables);
    const i64 b = ramanujan_sum_holder(r, n, tables);
    if (a != b) {
        std::cerr << "crn: formula mismatch for r=" << r << " n=" << n << ": divisor form " << a << ", Hoelder form " << b
                  << '\n';
        return kExitCheckFailed;
    }
    std::cout << a << '\n';
    return kExitOk;
}

int run_verify(const std::string& suite, const std::string& out_dir) {
    std::vector<std::string> names = suite == "all" ? suite_names() : std::vector<std::string>{suite};
    if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
    bool all_ok = true;
    for (const auto& name : names) {
        const SuiteOutcome o = run_suite(name);
        for (const auto& doc : o.documents) {
            if (out_dir.empty()) {
                std::cout << "# " << doc.name << '\n' << doc.csv;
            } else {
                std::ofstream f(std::filesystem::path(out_dir) / (doc.name + ".csv"));
                f << doc.csv;
                if (!f) throw std::runtime_error("cannot write " + doc.name + ".csv");
            }
        }
        for (const auto& m : o.messages) std::cerr << m << '\n';
        all_ok = all_ok && o.passed;
    }
    return all_ok ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ramanujan sums, Ramanujan expansions and Parseval-type convolution checks"};
    app.require_subcommand(1);

    u64 crn_r = 1, crn_n = 0;
    auto* crn = app.add_subcommand("crn", "Print the Ramanujan sum c_r(n), computed by two formulas");
    crn->add_option("r", crn_r, "modulus r >= 1")->required();
    crn->add_option("n", crn_n, "argument n >= 0")->required();

    ParsevalArgs pa;
    auto* par = app.add_subcommand("parseval", "Compare sum f(n)g(n+h) with its predicted main term over an N grid");
    par->set_help_flag("--help", "Print this help message and exit");
    par->add_option("--config", pa.config, "JSON config file; keys match the long flags (underscored)");
    par->add_option("--pair", pa.pair, "sigma | jordan | custom-file")->check(CLI::IsMember({"sigma", "jordan", "custom-file"}));
    par->add_option("--s", pa.s, "parameter s of f");
    par->add_option("--t", pa.t, "parameter t of g");
    par->add_option("--h", pa.h, "shift h >= 0");
    par->add_option("--grid", pa.grid, "comma-separated N values, scientific notation allowed");
    par->add_option("--tail-target", pa.tail_target, "main-term series tail target (default: automatic)");
    par->add_option("--output", pa.output, "output file (default: stdout)");
    par->add_option("--format", pa.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    par->add_option("--threads", pa.threads, "worker threads for the brute-force sums");
    par->add_flag("--allow-large", pa.allow_large, "allow grid values up to 1e8 (default limit 1e7)");
    par->add_option("--coeffs", pa.coeffs, "coefficient file for --pair custom-file");

    std::string suite;
    std::string out_dir;
    auto* ver = app.add_subcommand("verify", "Run a verification suite at its default grid");
    std::vector<std::string> allowed = suite_names();
    allowed.push_back("all");
    ver->add_option("suite", suite, "lemma1 | phi | mertens | dk | weighted | ingham | all")
        ->required()
        ->check(CLI::IsMember(allowed));
    ver->add_option("--output-dir", out_dir, "write one CSV per check into this directory (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*crn) return run_crn(crn_r, crn_n);
        if (*par) return run_parseval(pa, *par);
        if (*ver) return run_verify(suite, out_dir);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitCheckFailed;
    }
    return kExitUsage;
}
