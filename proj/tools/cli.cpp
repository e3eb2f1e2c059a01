#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "qmeas/distribution.hpp"
#include "qmeas/errors.hpp"
#include "qmeas/interaction.hpp"
#include "qmeas/io.hpp"
#include "qmeas/moments.hpp"
#include "qmeas/verify.hpp"

namespace qmeas::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::DegenerateInteraction:
        case ErrorKind::NegativeDeterminant:
            return kExitBadInteraction;
        case ErrorKind::GridTooNarrow:
        case ErrorKind::ResolutionExceeded:
        case ErrorKind::MismatchedGrids:
            return kExitGrid;
        case ErrorKind::Io:
            return kExitIo;
        default:
            return kExitUsage;
    }
}

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

json number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

json matrix_json(const Matrix2& m) { return json::array({{m(0, 0), m(0, 1)}, {m(1, 0), m(1, 1)}}); }

std::string matrix_text(const Matrix2& m) {
    return fmt::format("[[{:g}, {:g}], [{:g}, {:g}]]", m(0, 0), m(0, 1), m(1, 0), m(1, 1));
}

/// Expands `--config <file>` into flags placed right after the subcommand,
/// so flags given on the command line (parsed later) take precedence.
std::vector<std::string> expand_config(std::vector<std::string> args) {
    for (std::size_t k = 1; k < args.size(); ++k) {
        std::string path;
        std::size_t consumed = 0;
        if (args[k] == "--config" && k + 1 < args.size()) {
            path = args[k + 1];
            consumed = 2;
        } else if (args[k].rfind("--config=", 0) == 0) {
            path = args[k].substr(9);
            consumed = 1;
        } else {
            continue;
        }
        std::ifstream in(path);
        if (!in) throw Error(ErrorKind::Io, fmt::format("cannot open config file {}", path));
        std::vector<std::string> flags;
        std::string line;
        while (std::getline(in, line)) {
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const auto eq = line.find('=');
            auto trim = [](std::string s) {
                const auto b = s.find_first_not_of(" \t\r");
                const auto e = s.find_last_not_of(" \t\r");
                return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
            };
            if (trim(line).empty()) continue;
            if (eq == std::string::npos) {
                throw UsageError(fmt::format("config line '{}' is not key=value", trim(line)));
            }
            flags.push_back("--" + trim(line.substr(0, eq)));
            flags.push_back(trim(line.substr(eq + 1)));
        }
        args.erase(args.begin() + static_cast<std::ptrdiff_t>(k),
                   args.begin() + static_cast<std::ptrdiff_t>(k + consumed));
        // Insert after the subcommand token (args[1]) when there is one.
        const std::size_t at = args.size() > 1 ? 2 : 1;
        args.insert(args.begin() + static_cast<std::ptrdiff_t>(at), flags.begin(), flags.end());
        break;
    }
    return args;
}

struct StateFlags {
    double mean_q = 0.0, mean_p = 0.0, mean_Q = 0.0, mean_P = 0.0;
    double sigma_q = 1.0, sigma_Q = 1.0;
    std::optional<double> sigma_p, sigma_P;
};

struct ParamFlags {
    std::optional<double> a, b, c, d;
    double delta = 1.0;
};

void add_param_flags(CLI::App* cmd, ParamFlags& p, bool with_delta) {
    cmd->add_option("--a", p.a, "coefficient a (Q' = a Q + b q)");
    cmd->add_option("--b", p.b, "coefficient b");
    cmd->add_option("--c", p.c, "coefficient c (q' = c Q + d q)");
    cmd->add_option("--d", p.d, "coefficient d");
    if (with_delta) cmd->add_option("--delta", p.delta, "determinant ad - bc, used when c and d are omitted");
}

InteractionParams resolve_params(const ParamFlags& p) {
    if (!p.a || !p.b) throw UsageError("--a and --b are required");
    if (p.c && p.d) return InteractionParams::make(*p.a, *p.b, *p.c, *p.d);
    if (p.c || p.d) throw UsageError("give both --c and --d, or neither (then --delta applies)");
    return params_from_gains(*p.a, *p.b, p.delta);
}

void check_grid(std::size_t points, double span) {
    if (points < 16 || (points & (points - 1)) != 0) {
        throw Error(ErrorKind::ResolutionExceeded,
                    fmt::format("--grid-points must be a power of two >= 16, got {}", points));
    }
    if (!(span > 0.0)) throw Error(ErrorKind::GridTooNarrow, "--span must be positive");
}

void ensure_directory(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw Error(ErrorKind::Io, fmt::format("cannot create directory {}", dir.string()));
    }
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f || !(f << text) || !f.flush()) {
        throw Error(ErrorKind::Io, fmt::format("cannot write {}", path.string()));
    }
}

int cmd_classify(const ParamFlags& pf, const std::string& format, std::ostream& out) {
    if (!pf.a || !pf.b || !pf.c || !pf.d) throw UsageError("classify needs --a --b --c --d");
    const auto p = InteractionParams::make(*pf.a, *pf.b, *pf.c, *pf.d);
    const auto cls = classify(p);
    if (format == "json") {
        json j;
        j["class"] = std::string(to_string(cls.tag));
        j["a"] = p.a();
        j["b"] = p.b();
        j["c"] = p.c();
        j["d"] = p.d();
        j["delta"] = p.delta();
        j["scale"] = {{"Lambda", cls.scale.big_lambda}, {"lambda", cls.scale.small_lambda}, {"mu", cls.scale.mu}};
        j["reduced_position_matrix"] = matrix_json(cls.reduced_position_matrix);
        j["reduced_momentum_matrix"] = matrix_json(cls.reduced_momentum_matrix);
        out << j.dump(2) << '\n';
        return kExitOk;
    }
    out << fmt::format("class: {}\n", to_string(cls.tag));
    out << fmt::format("coefficients: a={:g} b={:g} c={:g} d={:g}\n", p.a(), p.b(), p.c(), p.d());
    out << fmt::format("delta: {:g}\n", p.delta());
    out << fmt::format("scale: Lambda={:g} lambda={:g} mu={:g}\n", cls.scale.big_lambda, cls.scale.small_lambda,
                       cls.scale.mu);
    out << "reduced position matrix: " << matrix_text(cls.reduced_position_matrix) << '\n';
    out << "reduced momentum matrix: " << matrix_text(cls.reduced_momentum_matrix) << '\n';
    return kExitOk;
}

struct TrajectoryFlags {
    double w_min = kDefaultWMin;
    double w_max = kDefaultWMax;
    std::size_t n = kDefaultTrajectoryPoints;
    std::optional<double> w;
    bool fig1 = false;
    std::string out = "-";
    std::string format = "csv";
};

std::string render_trajectory(const std::vector<io::TrajectoryRow>& rows, const std::string& format) {
    std::ostringstream s;
    if (format == "json") {
        json arr = json::array();
        for (const auto& r : rows) {
            arr.push_back({{"w", r.w},
                           {"eps_tilde", r.eps_tilde},
                           {"eta_tilde", r.eta_tilde},
                           {"hur_lhs", r.hur_lhs},
                           {"our_lhs", r.our_lhs},
                           {"circle_lhs", r.circle_lhs}});
        }
        s << arr.dump(2) << '\n';
    } else {
        io::write_trajectory_csv(s, rows);
    }
    return s.str();
}

int cmd_trajectory(const ParamFlags& pf, const TrajectoryFlags& t, std::ostream& out) {
    std::vector<double> grid;
    if (t.w) {
        if (!(*t.w > 0.0)) throw UsageError("--w must be positive");
        grid = {*t.w};
    } else {
        if (!(t.w_min > 0.0) || !(t.w_min < t.w_max)) throw UsageError("need 0 < --w-min < --w-max");
        if (t.n < 2) throw UsageError("--n must be at least 2");
        grid = log_spaced(t.w_min, t.w_max, t.n);
    }
    const std::string ext = t.format == "json" ? "json" : "csv";

    if (t.fig1) {
        if (t.out == "-") throw UsageError("--fig1 writes one file per gain; give a directory with --out");
        const fs::path dir(t.out);
        ensure_directory(dir);
        for (const double a : sweep_gains()) {
            const auto rows = io::trajectory_rows(params_from_gains(a, 1.0 - a, pf.delta), grid);
            const auto path = dir / fmt::format("trajectory_a{:g}.{}", a, ext);
            write_text_file(path, render_trajectory(rows, t.format));
            out << path.string() << '\n';
        }
        return kExitOk;
    }
    const auto rows = io::trajectory_rows(resolve_params(pf), grid);
    const auto text = render_trajectory(rows, t.format);
    if (t.out == "-") {
        out << text;
    } else {
        write_text_file(t.out, text);
    }
    return kExitOk;
}

struct SimulateFlags {
    std::size_t grid_points = kDefaultGridPoints;
    double span = kDefaultSpanSigmas;
    std::string out;
};

int cmd_simulate(const ParamFlags& pf, const StateFlags& sf, double hbar, const SimulateFlags& sim,
                 std::ostream& out) {
    check_grid(sim.grid_points, sim.span);
    if (!(hbar > 0.0)) throw UsageError("--hbar must be positive");
    const auto params = resolve_params(pf);
    const auto obj = ObjectStateSpec::make(sf.mean_q, sf.mean_p, sf.sigma_q,
                                           sf.sigma_p.value_or(hbar / (2.0 * sf.sigma_q)), hbar);
    const auto probe = ProbeStateSpec::displaced(sf.mean_Q, sf.mean_P, sf.sigma_Q,
                                                 sf.sigma_P.value_or(hbar / (2.0 * sf.sigma_Q)), hbar);

    const auto in = gaussian_inputs(obj, probe, sim.grid_points, sim.span);
    const auto result = general_output_distributions(params, in.f, in.F, in.g, in.G);
    const auto report = make_report(params, obj, probe, hbar);
    const auto dist = distribution_error_disturbance(params, in.F, in.G);

    const fs::path dir(sim.out);
    ensure_directory(dir);
    const std::pair<const char*, const GriddedDistribution*> files[] = {
        {"f", &in.f}, {"F", &in.F}, {"g", &in.g}, {"G", &in.G}, {"F_out", &result.F_out}, {"g_out", &result.g_out}};
    for (const auto& [name, dens] : files) {
        io::save_distribution_csv(dir / fmt::format("{}.csv", name), *dens);
    }

    const double a = params.a(), b = params.b(), ap = params.a_p(), bp = params.b_p();
    json j;
    j["params"] = {{"a", a}, {"b", b}, {"c", params.c()}, {"d", params.d()}, {"delta", params.delta()}};
    j["hbar"] = hbar;
    j["epsilon"] = number(report.epsilon);
    j["eta"] = number(report.eta);
    j["epsilon_star"] = number(report.epsilon_star);
    j["eta_star"] = number(report.eta_star);
    j["star_product"] = number(report.star_product);
    j["limit_resolved"] = report.limit_resolved;
    j["epsilon_tilde"] = number(report.epsilon_tilde);
    j["eta_tilde"] = number(report.eta_tilde);
    j["w"] = number(report.w);
    j["hur_lhs"] = number(report.hur_lhs);
    j["our_lhs"] = number(report.our_lhs);
    j["circle_lhs"] = number(report.circle_lhs);
    j["bounds"] = {{"hur_satisfied", report.bounds.hur_satisfied()},
                   {"our_satisfied", report.bounds.our_satisfied()},
                   {"circle_satisfied", report.bounds.circle_satisfied()}};
    j["variances"] = {
        {"F_out", moments(result.F_out).variance},
        {"F_out_law", b * b * obj.sigma_q * obj.sigma_q + a * a * probe.sigma_Q * probe.sigma_Q},
        {"g_out", moments(result.g_out).variance},
        {"g_out_law", ap * ap * obj.sigma_p * obj.sigma_p + bp * bp * probe.sigma_P * probe.sigma_P}};
    j["distribution_epsilon_star"] = number(dist.epsilon_star);
    j["distribution_eta_star"] = number(dist.eta_star);
    write_text_file(dir / "report.json", j.dump(2) + "\n");
    out << fmt::format("wrote {} files to {}\n", std::size(files) + 1, dir.string());
    return kExitOk;
}

int cmd_verify(std::uint64_t seed, const std::string& level, bool fault, const std::string& path,
               std::ostream& out) {
    VerifyOptions opt;
    opt.seed = seed;
    opt.level = level == "quick" ? VerifyLevel::Quick : VerifyLevel::Full;
    if (fault) opt.sign = FourierSign::Positive;
    const auto report = run_verification(opt);
    const auto text = to_json(report) + "\n";
    if (path.empty() || path == "-") {
        out << text;
    } else {
        write_text_file(path, text);
        for (const auto& r : report.results) {
            if (!r.passed) out << fmt::format("FAIL {}/{} residual {:.3e}\n", r.suite, r.name, r.residual);
        }
        out << fmt::format("{} invariants, {} failed\n", report.results.size(), report.failures());
    }
    return report.passed() ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Generalized linear measurement interactions: error, disturbance and output distributions"};
    app.name("qmeas");
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    ParamFlags params;
    StateFlags state;
    double hbar = kDefaultHbar;
    std::string format;
    std::string config_unused;

    auto* classify_cmd = app.add_subcommand("classify", "standard form, determinant and scale triple");
    add_param_flags(classify_cmd, params, false);
    classify_cmd->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));

    TrajectoryFlags traj;
    auto* traj_cmd = app.add_subcommand("trajectory", "normalized error/disturbance over the balance w");
    add_param_flags(traj_cmd, params, true);
    traj_cmd->add_option("--w-min", traj.w_min, "smallest w");
    traj_cmd->add_option("--w-max", traj.w_max, "largest w");
    traj_cmd->add_option("--n", traj.n, "number of log-spaced points");
    traj_cmd->add_option("--w", traj.w, "single w instead of a grid");
    traj_cmd->add_flag("--fig1", traj.fig1, "write the a + b = 1 sweep, one file per a");
    traj_cmd->add_option("--out", traj.out, "output file, or directory with --fig1 (default stdout)");
    traj_cmd->add_option("--format", traj.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    SimulateFlags sim;
    auto* sim_cmd = app.add_subcommand("simulate", "output distributions for Gaussian object and probe");
    add_param_flags(sim_cmd, params, true);
    sim_cmd->add_option("--hbar", hbar, "reduced Planck constant");
    sim_cmd->add_option("--sigma-q", state.sigma_q, "object position width");
    sim_cmd->add_option("--sigma-p", state.sigma_p, "object momentum width (default hbar / 2 sigma_q)");
    sim_cmd->add_option("--sigma-Q", state.sigma_Q, "probe position width");
    sim_cmd->add_option("--sigma-P", state.sigma_P, "probe momentum width (default hbar / 2 sigma_Q)");
    sim_cmd->add_option("--mean-q", state.mean_q, "object position mean");
    sim_cmd->add_option("--mean-p", state.mean_p, "object momentum mean");
    sim_cmd->add_option("--mean-Q", state.mean_Q, "probe position mean");
    sim_cmd->add_option("--mean-P", state.mean_P, "probe momentum mean");
    sim_cmd->add_option("--grid-points", sim.grid_points, "samples per input density (power of two)");
    sim_cmd->add_option("--span", sim.span, "half-width of each input grid in standard deviations");
    sim_cmd->add_option("--out", sim.out, "output directory")->required();
    sim_cmd->add_option("--format", format, "csv (the only bundle format)")->check(CLI::IsMember({"csv"}));

    std::uint64_t seed = kDefaultSeed;
    std::string level = "full";
    bool fault = false;
    std::string verify_out;
    auto* verify_cmd = app.add_subcommand("verify", "run every invariant suite and print a JSON report");
    verify_cmd->add_option("--seed", seed, "seed for the randomized sweeps");
    verify_cmd->add_option("--level", level, "quick or full")->check(CLI::IsMember({"quick", "full"}));
    verify_cmd->add_option("--out", verify_out, "write the JSON report here instead of stdout");
    verify_cmd->add_flag("--inject-fourier-fault", fault, "flip the oracle's transform sign")->group("");

    for (auto* cmd : {classify_cmd, traj_cmd, sim_cmd, verify_cmd}) {
        cmd->add_option("--config", config_unused, "key=value file; command-line flags override it");
    }

    try {
        const auto args = expand_config(std::vector<std::string>(argv, argv + argc));
        std::vector<const char*> ptrs;
        for (const auto& s : args) ptrs.push_back(s.c_str());
        try {
            app.parse(static_cast<int>(ptrs.size()), ptrs.data());
        } catch (const CLI::ParseError& e) {
            const int code = app.exit(e, out, err);
            return code == 0 ? kExitOk : kExitUsage;
        }

        if (*classify_cmd) return cmd_classify(params, format.empty() ? "text" : format, out);
        if (*traj_cmd) return cmd_trajectory(params, traj, out);
        if (*sim_cmd) return cmd_simulate(params, state, hbar, sim, out);
        if (*verify_cmd) return cmd_verify(seed, level, fault, verify_out, out);
        return kExitUsage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    }
}

}  // namespace qmeas::cli
