#include "cli.hpp"

#include "mfm/errors.hpp"
#include "mfm/export.hpp"
#include "mfm/flat_rate.hpp"
#include "mfm/genfunc.hpp"
#include "mfm/model.hpp"
#include "mfm/quadrature.hpp"
#include "mfm/solver.hpp"
#include "mfm/zeros.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

namespace mfm::cli {

namespace {

struct Options {
    std::optional<std::string> r0;
    std::optional<std::string> tau;
    std::optional<std::size_t> n;
    std::string curve_file;
    std::string psi = "0";
    std::string psi_grid;
    std::size_t slice = 10;
    unsigned precision = kDefaultPrecisionBits;
    std::string out_dir;
    std::string format;

    // critical
    std::vector<double> bracket{0.05, 1.0};
    std::size_t scan_points = 16;
    // table1
    std::vector<double> r0_list;
    std::vector<double> tenor_list;
    std::vector<double> tau_list;
    // integrand
    std::string x_grid = "-5:25:0.05";
    // logn
    double fd_step = 1e-3;
    // genfunc
    std::string limit = "exact";
    // quadrature
    double kappa = 5;
    std::size_t points = 2048;
    std::string rule = "trapezoid";
    bool adaptive = false;
    std::size_t paths = 0;
    std::uint64_t seed = 1;
};

struct Output {
    std::string name;
    std::string body;
};

class Emitter {
public:
    Emitter(const Options& opts, std::ostream& out) : opts_(opts), out_(out) {}

    // Writes into --out when given, otherwise the first file goes to stdout.
    void emit(const std::vector<Output>& files) {
        if (opts_.out_dir.empty()) {
            if (!files.empty()) out_ << files.front().body;
            return;
        }
        std::filesystem::create_directories(opts_.out_dir);
        for (const auto& f : files) {
            const auto path = std::filesystem::path(opts_.out_dir) / f.name;
            std::ofstream file(path, std::ios::binary);
            require(static_cast<bool>(file), ErrorKind::InvalidInput,
                    "cannot write " + path.string());
            file << f.body;
            out_ << "wrote " << path.string() << '\n';
        }
    }

    std::ostream& note() { return out_; }

private:
    const Options& opts_;
    std::ostream& out_;
};

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

Real parse_arg(const std::string& text, const char* flag) {
    try {
        std::size_t used = 0;
        (void)std::stod(text, &used);
        if (used == text.size()) return parse_real(text);
    } catch (const std::exception&) {
    }
    throw Error(ErrorKind::InvalidInput, std::string("bad number for ") + flag + ": '" + text + "'");
}

TenorModel build_model(const Options& o) {
    const bool flat_given = o.r0 || o.tau || o.n;
    require(!(flat_given && !o.curve_file.empty()), ErrorKind::InvalidInput,
            "give either --curve-file or --r0/--tau/--n, not both");
    PrecisionScope scope(std::max(o.precision, kMinPrecisionBits));
    const Real psi = parse_arg(o.psi, "--psi");
    if (!o.curve_file.empty()) {
        return read_curve_csv(std::filesystem::path(o.curve_file), psi, o.precision);
    }
    require(o.n.value_or(20) >= 2, ErrorKind::InvalidInput, "--n must be at least 2");
    const auto base = flat_curve(parse_arg(o.r0.value_or("0.05"), "--r0"), o.n.value_or(20),
                                 parse_arg(o.tau.value_or("0.25"), "--tau"), o.precision);
    return base.with_psi(psi);
}

std::vector<double> psi_values(const Options& o) {
    if (!o.psi_grid.empty()) return parse_grid(o.psi_grid);
    return {static_cast<double>(parse_arg(o.psi, "--psi"))};
}

std::size_t slice_of(const Options& o, const TenorModel& m) {
    require(o.slice < m.steps(), ErrorKind::Domain, "--i out of range for this curve");
    return o.slice;
}

GridSpec grid_of(const Options& o) {
    GridSpec g;
    g.kappa = o.kappa;
    g.points = o.points;
    g.adaptive_kappa = o.adaptive;
    if (o.rule == "trapezoid") {
        g.rule = QuadratureRule::Trapezoid;
    } else if (o.rule == "gauss-hermite") {
        g.rule = QuadratureRule::GaussHermite;
    } else {
        throw Error(ErrorKind::InvalidInput, "--rule must be trapezoid or gauss-hermite");
    }
    g.validate();
    return g;
}

void cmd_solve(const Options& o, Emitter& em) {
    const auto model = build_model(o);
    PrecisionScope scope(model.precision_bits());
    const auto sol = solve(model);
    const Real err = std::max(max_sum_rule_error(sol), max_libor_identity_error(sol));
    const Real tol = precision_tolerance(model.precision_bits(), 8);
    if (o.format == "json") {
        em.emit({{"solution.json", dump(solution_json(sol))}, {"libor.csv", libor_csv(sol)}});
    } else {
        em.emit({{"libor.csv", libor_csv(sol)}, {"solution.json", dump(solution_json(sol))}});
    }
    const bool pass = err <= tol;
    std::ostringstream line;
    line << "sum-rule check: max relative error " << to_decimal(err, 3) << " (tolerance "
         << to_decimal(tol, 3) << ") " << (pass ? "PASS" : "FAIL") << '\n';
    if (o.out_dir.empty()) {
        // Keep stdout machine-readable; the check line goes after the data as a comment.
        em.note() << "# " << line.str();
    } else {
        em.note() << line.str();
    }
    require(pass, ErrorKind::NumericFailure, "sum-rule check failed");
}

void cmd_critical(const Options& o, Emitter& em) {
    const auto model = build_model(o);
    require(o.bracket.size() == 2, ErrorKind::InvalidInput, "--bracket takes two values");
    const auto report =
        critical_volatility(model, slice_of(o, model), o.bracket[0], o.bracket[1], o.scan_points);
    if (o.format == "csv") {
        std::ostringstream csv;
        csv << "i,psi_cr,z_star,formula_psi_cr,bracket_lo,bracket_hi,tolerance\n"
            << report.slice << ',' << format_double(report.psi_cr) << ','
            << format_double(report.z_star) << ','
            << (report.formula_psi_cr ? format_double(*report.formula_psi_cr) : "") << ','
            << format_double(report.bracket_lo) << ',' << format_double(report.bracket_hi) << ','
            << format_double(report.tolerance) << '\n';
        em.emit({{"critical.csv", csv.str()}});
    } else {
        em.emit({{"critical.json", dump(critical_json(report))}});
    }
}

void cmd_locus(const Options& o, Emitter& em) {
    const auto model = build_model(o);
    const auto grid = psi_values(o);
    const auto locus = root_locus(model, slice_of(o, model), grid);
    em.emit({{"locus.csv", locus_csv(locus)}});
}

void cmd_table1(const Options& o, Emitter& em) {
    std::vector<Table1Row> rows;
    if (o.r0_list.empty() && o.tenor_list.empty() && o.tau_list.empty()) {
        rows = table1_default();
    } else {
        auto pick = [](const std::vector<double>& given, std::vector<double> fallback) {
            return given.empty() ? fallback : given;
        };
        const auto r0 = pick(o.r0_list, {0.01, 0.02, 0.03, 0.04, 0.05});
        const auto tn = pick(o.tenor_list, {5, 10, 20, 30});
        const auto tau = pick(o.tau_list, {0.25, 0.5});
        rows = table1(r0, tn, tau);
    }
    if (o.format == "markdown") {
        em.emit({{"table1.md", table1_markdown(rows)}, {"table1.csv", table1_csv(rows)}});
    } else {
        em.emit({{"table1.csv", table1_csv(rows)}, {"table1.md", table1_markdown(rows)}});
    }
}

void cmd_integrand(const Options& o, Emitter& em) {
    const auto model = build_model(o);
    const auto sol = solve(model);
    const auto x = parse_grid(o.x_grid);
    const auto profile = integrand_profile(sol, slice_of(o, model), x);
    em.emit({{"profile.csv", profile_csv(profile)}});
    if (!o.out_dir.empty()) {
        em.note() << "local maxima at x =";
        for (const double m : profile.maxima) em.note() << ' ' << format_double(m, 6);
        em.note() << '\n';
    }
}

void cmd_logn(const Options& o, Emitter& em) {
    const auto model = build_model(o);
    const std::size_t i = slice_of(o, model);
    require(o.fd_step > 0, ErrorKind::InvalidInput, "--fd-step must be positive");
    const auto grid = psi_values(o);
    PrecisionScope scope(model.precision_bits());
    auto log_n = [&](double psi) {
        const auto sol = solve(model.with_psi(Real(psi)));
        return static_cast<double>(log(sol.expectations[i]));
    };
    std::vector<LogNPoint> points(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double psi = grid[k];
        auto& p = points[k];
        p.psi = psi;
        p.log_n = log_n(psi);
        const auto m = model.with_psi(Real(psi));
        const auto inf = infinite_vol_limit(m, i);
        p.log_n_inf = static_cast<double>(log(eval(inf, exp(inf.psi_t))));
        const double lo = std::max(0.0, psi - o.fd_step);
        const double hi = psi + o.fd_step;
        p.derivative = (log_n(hi) - log_n(lo)) / (hi - lo);
    }
    em.emit({{"logn.csv", logn_csv(points)}});
}

void cmd_genfunc(const Options& o, Emitter& em) {
    const auto model = build_model(o);
    const std::size_t i = slice_of(o, model);
    GenFunction gf;
    if (o.limit == "exact") {
        gf = from_solution(solve(model), i);
    } else if (o.limit == "zero") {
        gf = zero_vol_limit(model, i);
    } else if (o.limit == "infinite") {
        gf = infinite_vol_limit(model, i);
    } else {
        throw Error(ErrorKind::InvalidInput, "--limit must be exact, zero or infinite");
    }
    em.emit({{"genfunc.csv", genfunc_csv(gf)}});
}

void cmd_martingale(const Options& o, Emitter& em) {
    const auto model = build_model(o);
    const auto sol = solve(model);
    const auto residuals = martingale_residuals(sol, grid_of(o));
    em.emit({{"residuals.json", dump(residual_json(residuals))}});
}

void cmd_expectation(const Options& o, Emitter& em) {
    const auto model = build_model(o);
    const std::size_t i = slice_of(o, model);
    const auto sol = solve(model);
    nlohmann::json j;
    j["i"] = i;
    j["psi"] = o.psi;
    j["analytic"] = to_decimal(sol.expectations[i], 17);
    const auto grid = grid_of(o);
    j["grid"] = {{"value", n_by_grid(sol, i, grid)},
                 {"kappa", effective_kappa(sol, i, grid)},
                 {"points", grid.points},
                 {"rule", o.rule}};
    if (o.paths > 0) {
        const auto mc = n_by_mc(sol, i, o.paths, o.seed);
        j["monte_carlo"] = {{"mean", mc.mean},
                            {"standard_error", mc.standard_error},
                            {"paths", mc.paths},
                            {"seed", o.seed}};
    }
    em.emit({{"expectation.json", dump(j)}});
}

}  // namespace

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NumericFailure:
        case ErrorKind::Divergence:
            return kExitNumeric;
        default:
            return kExitConfig;
    }
}

std::vector<double> parse_grid(std::string_view spec) {
    std::vector<std::string> parts;
    std::string cur;
    for (const char c : spec) {
        if (c == ':') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    require(parts.size() == 3, ErrorKind::InvalidInput, "grid must be start:stop:step");
    double v[3];
    for (int k = 0; k < 3; ++k) {
        std::size_t used = 0;
        try {
            v[k] = std::stod(parts[k], &used);
        } catch (const std::exception&) {
            used = 0;
        }
        require(used == parts[k].size() && used > 0, ErrorKind::InvalidInput,
                "bad number in grid: '" + parts[k] + "'");
    }
    const double start = v[0];
    const double stop = v[1];
    const double step = v[2];
    require(step > 0 && stop >= start, ErrorKind::InvalidInput,
            "grid needs step > 0 and stop >= start");
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 0.5)) + 1;
    require(count <= 10000000, ErrorKind::InvalidInput, "grid too large");
    std::vector<double> out(count);
    for (std::size_t k = 0; k < count; ++k) out[k] = start + step * static_cast<double>(k);
    return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Log-normal Markov-functional model: exact solution, generating-function zeros "
                 "and critical volatility"};
    app.set_config("--config", "", "key=value configuration file");
    app.fallthrough();
    app.require_subcommand(1);

    app.add_option("--r0", o.r0, "flat short rate (default 0.05)");
    app.add_option("--tau", o.tau, "accrual period in years (default 0.25)");
    app.add_option("--n", o.n, "number of periods (default 20)");
    app.add_option("--curve-file", o.curve_file, "curve CSV with header t,P");
    app.add_option("--psi", o.psi, "Libor volatility")->capture_default_str();
    app.add_option("--psi-grid", o.psi_grid, "volatility sweep start:stop:step");
    app.add_option("--i", o.slice, "time slice")->capture_default_str();
    app.add_option("--precision", o.precision, "working precision in bits")->capture_default_str();
    app.add_option("--out", o.out_dir, "output directory (stdout when omitted)");
    app.add_option("--format", o.format, "output format: csv, json or markdown");
    app.add_option("--kappa", o.kappa, "grid half-width in standard deviations")
        ->capture_default_str();
    app.add_option("--points", o.points, "quadrature nodes")->capture_default_str();
    app.add_option("--rule", o.rule, "trapezoid or gauss-hermite")->capture_default_str();
    app.add_flag("--adaptive", o.adaptive, "widen kappa by (n-i) psi sqrt(t_i)");

    auto* solve_cmd = app.add_subcommand("solve", "solve the model, write L~ and coefficients");
    auto* critical_cmd = app.add_subcommand("critical", "locate the critical volatility");
    critical_cmd->add_option("--bracket", o.bracket, "volatility bracket lo hi")
        ->expected(2)
        ->capture_default_str();
    critical_cmd->add_option("--scan-points", o.scan_points, "detection grid size")
        ->capture_default_str();
    auto* locus_cmd = app.add_subcommand("locus", "zeros of f^(i) along a volatility grid");
    auto* table_cmd = app.add_subcommand("table1", "maximal volatility table");
    table_cmd->add_option("--r0-list", o.r0_list, "short rates");
    table_cmd->add_option("--tenor-list", o.tenor_list, "total tenors t_n");
    table_cmd->add_option("--tau-list", o.tau_list, "accrual periods");
    auto* integrand_cmd = app.add_subcommand("integrand", "integrand of N_i on an x grid");
    integrand_cmd->add_option("--x-grid", o.x_grid, "start:stop:step")->capture_default_str();
    auto* logn_cmd = app.add_subcommand("logn", "log N_i and its large-volatility approximation");
    logn_cmd->add_option("--fd-step", o.fd_step, "finite-difference step in psi")
        ->capture_default_str();
    auto* genfunc_cmd = app.add_subcommand("genfunc", "coefficients of f^(i)");
    genfunc_cmd->add_option("--limit", o.limit, "exact, zero or infinite")->capture_default_str();
    auto* martingale_cmd = app.add_subcommand("martingale", "martingale residuals by quadrature");
    auto* expectation_cmd =
        app.add_subcommand("expectation", "N_i by grid quadrature and Monte Carlo");
    expectation_cmd->add_option("--paths", o.paths, "Monte Carlo paths (0 = skip)");
    expectation_cmd->add_option("--seed", o.seed, "Monte Carlo seed")->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    const std::vector<std::pair<CLI::App*, std::function<void(const Options&, Emitter&)>>> table{
        {solve_cmd, cmd_solve},         {critical_cmd, cmd_critical},
        {locus_cmd, cmd_locus},         {table_cmd, cmd_table1},
        {integrand_cmd, cmd_integrand}, {logn_cmd, cmd_logn},
        {genfunc_cmd, cmd_genfunc},     {martingale_cmd, cmd_martingale},
        {expectation_cmd, cmd_expectation},
    };
    try {
        Emitter em(o, out);
        for (const auto& [cmd, fn] : table) {
            if (cmd->parsed()) fn(o, em);
        }
        return kExitOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumeric;
    }
}

}  // namespace mfm::cli
