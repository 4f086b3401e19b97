#include "ctrlgrad/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "ctrlgrad/cs_harness.hpp"
#include "ctrlgrad/descent.hpp"
#include "ctrlgrad/errors.hpp"
#include "ctrlgrad/flow.hpp"
#include "ctrlgrad/io.hpp"
#include "ctrlgrad/prox.hpp"
#include "ctrlgrad/selftest.hpp"

namespace ctrlgrad::cli {

namespace {

using io::json;
namespace fs = std::filesystem;

class UsageError : public Error {
public:
    using Error::Error;
};

// FNV-1a 64 of the file bytes, hex encoded.
std::string file_digest(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::istreambuf_iterator<char> it(in), end; it != end; ++it) {
        h ^= static_cast<unsigned char>(*it);
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// Writes to `out` for "-", otherwise atomically to the file.
void emit(const std::string& target, std::ostream& out, const std::function<void(std::ostream&)>& writer)
{
    if (target == "-") {
        writer(out);
        return;
    }
    std::ostringstream buf;
    writer(buf);
    io::write_text_atomic(target, buf.str());
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag)
{
    if (flag) {
        return *flag;
    }
    if (const char* env = std::getenv("CTRLGRAD_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw UsageError(std::string("CTRLGRAD_SEED is not an unsigned integer: ") + env);
        }
    }
    return 0;
}

Vector vector_or_zeros(const std::string& text, std::size_t dim, const char* flag)
{
    if (text.empty()) {
        return Vector(dim);
    }
    Vector v = io::parse_vector(text);
    if (v.size() != dim) {
        throw UsageError(std::string(flag) + " has " + std::to_string(v.size()) + " entries, expected " +
                         std::to_string(dim));
    }
    return v;
}

Matrix parse_gain(const std::string& text, const ControlSystem& sys)
{
    if (text.empty() || text == "auto") {
        return design_feedback(sys);
    }
    json doc;
    const auto first = text.find_first_not_of(" \t");
    if (first != std::string::npos && text[first] == '[') {
        try {
            doc = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ParseError("", std::string("--gain: ") + e.what());
        }
    } else {
        doc = io::read_json_file(text);
    }
    return io::matrix_from_json(doc, sys.control_dim(), sys.state_dim(), "");
}

Coupling parse_coupling(const std::string& s)
{
    return s == "direct" ? Coupling::direct : Coupling::euler;
}

std::string coupling_name(Coupling c)
{
    return c == Coupling::direct ? "direct" : "euler";
}

CsPolicy parse_cs_policy(const std::string& s)
{
    if (s == "zero") {
        return CsPolicy::zero;
    }
    if (s == "constant") {
        return CsPolicy::constant;
    }
    if (s == "state-fb") {
        return CsPolicy::state_feedback;
    }
    return CsPolicy::gradient_feedback;
}

SignalSpec parse_signal(const std::string& s)
{
    if (s == "gaussian") {
        return {};
    }
    if (s.rfind("spike:", 0) == 0) {
        try {
            return SignalSpec{SignalSpec::Kind::spike, static_cast<std::size_t>(std::stoull(s.substr(6)))};
        } catch (const std::exception&) {
        }
    }
    throw UsageError("--signal must be 'gaussian' or 'spike:<k>', got '" + s + "'");
}

std::string signal_name(const SignalSpec& s)
{
    return s.kind == SignalSpec::Kind::gaussian ? "gaussian" : "spike:" + std::to_string(s.spikes);
}

double elapsed_seconds(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void write_manifest(const fs::path& path, const std::string& subcommand, json parameters, json extra,
                    const json& inputs, const std::vector<std::string>& outputs, double wall_clock)
{
    json m;
    m["tool_version"] = kToolVersion;
    m["subcommand"] = subcommand;
    m["parameters"] = std::move(parameters);
    m["inputs"] = inputs;
    m["outputs"] = outputs;
    m["wall_clock_seconds"] = wall_clock;
    for (auto& [k, v] : extra.items()) {
        m[k] = v;
    }
    io::write_text_atomic(path, m.dump(2) + "\n");
}

// ---------------------------------------------------------------------------

struct ControllabilityArgs {
    std::string system;
    double tol = 0.0;
};

int cmd_controllability(const ControllabilityArgs& a, std::ostream& out)
{
    const ControlSystem sys = io::load_system(a.system);
    const ControllabilityReport rep = is_controllable(sys, a.tol);
    json kalman = json::array();
    for (std::size_t r = 0; r < rep.kalman.rows(); ++r) {
        kalman.push_back(io::vector_to_json(rep.kalman.row(r)));
    }
    json doc{{"n", sys.state_dim()},
             {"m", sys.control_dim()},
             {"rank", rep.rank},
             {"controllable", rep.controllable},
             {"tol_used", rep.tol_used},
             {"newton_controllable", newton_controllable(sys.input())},
             {"kalman", kalman}};
    out << doc.dump(2) << '\n';
    return ok;
}

struct FlowArgs {
    std::string system;
    std::string x0;
    std::string target;
    std::string u;
    double t0 = 0.0;
    double t1 = 1.0;
    int steps = 1000;
    int quad_nodes = 2000;
    std::string out = "-";
};

int cmd_flow(const FlowArgs& a, std::ostream& out)
{
    const auto start = std::chrono::steady_clock::now();
    const ControlSystem sys = io::load_system(a.system);
    const std::size_t n = sys.state_dim();
    const Vector x0 = vector_or_zeros(a.x0, n, "--x0");
    if (!(a.t1 > a.t0)) {
        throw UsageError("--t1 must exceed --t0");
    }

    ControlSignal sig;
    std::optional<Vector> target;
    if (!a.target.empty()) {
        if (!a.u.empty()) {
            throw UsageError("--target and --u are mutually exclusive");
        }
        target = vector_or_zeros(a.target, n, "--target");
        SteeringOptions opts;
        opts.quad_nodes = a.quad_nodes;
        sig = steering_control(sys, x0, *target, a.t1 - a.t0, a.t0, opts);
    } else if (!a.u.empty()) {
        sig = ControlSignal(signal::Constant{vector_or_zeros(a.u, sys.control_dim(), "--u")});
    }

    const Trajectory traj = integrate(sys, sig, x0, a.t0, a.t1, a.steps);
    emit(a.out, out, [&](std::ostream& os) { io::write_trajectory_csv(sys, traj, os); });

    if (a.out != "-") {
        json summary{{"final_state", io::vector_to_json(traj.states.back())},
                     {"final_f", eval(sys.problem(), traj.states.back())}};
        if (target) {
            summary["terminal_error"] = norm2(traj.states.back() - *target);
        }
        json params{{"system", a.system}, {"x0", io::vector_to_json(x0)},  {"t0", a.t0},
                    {"t1", a.t1},         {"steps", a.steps},              {"quad_nodes", a.quad_nodes},
                    {"target", target ? io::vector_to_json(*target) : json()}, {"u", a.u},
                    {"out", a.out}};
        write_manifest(a.out + ".manifest.json", "flow", params, json{{"summary", summary}},
                       json{{a.system, file_digest(a.system)}}, {a.out}, elapsed_seconds(start));
        out << summary.dump(2) << '\n';
    }
    return ok;
}

struct DescendArgs {
    std::string system;
    std::string policy = "zero";
    std::string gain = "auto";
    std::string x0;
    std::string u;
    double gamma = 0.0;
    std::string coupling = "euler";
    int iters = 1000;
    double stop_tol = 0.0;
    std::string out = "-";
};

int cmd_descend(const DescendArgs& a, std::ostream& out)
{
    const auto start = std::chrono::steady_clock::now();
    const ControlSystem sys = io::load_system(a.system);
    const std::size_t n = sys.state_dim();
    const std::size_t m = sys.control_dim();

    DescentConfig cfg;
    cfg.gamma = a.gamma > 0.0 ? a.gamma : default_step(sys.problem());
    cfg.max_iters = a.iters;
    cfg.stop_tol = a.stop_tol;
    cfg.coupling = parse_coupling(a.coupling);

    Matrix gain(m, n);
    ControlPolicy pol = policy::Zero{};
    if (a.policy == "constant") {
        pol = policy::Constant{vector_or_zeros(a.u, m, "--u")};
    } else if (a.policy == "state-fb") {
        gain = parse_gain(a.gain, sys);
        pol = policy::StateFeedback{gain};
    } else if (a.policy == "grad-fb") {
        gain = parse_gain(a.gain, sys);
        pol = policy::GradientFeedback{gain};
    }

    std::optional<Vector> ref;
    try {
        ref = solve_critical(sys.problem());
    } catch (const NoCriticalPointError&) {
    }

    const Vector x0 = vector_or_zeros(a.x0, n, "--x0");
    const RunRecord rec = run_descent(sys, pol, x0, cfg, ref);
    const double tau = spectral_norm(sys.a() - sys.input() * gain);
    const double dist0 = ref ? norm2(x0 - *ref) : 0.0;
    const RateBound bound = rate_bound_curve(tau, cfg.gamma, dist0, rec.iterations);
    const double nan = std::numeric_limits<double>::quiet_NaN();

    emit(a.out, out, [&](std::ostream& os) {
        os << "iter,f_value,grad_norm,dist_to_ref,control_norm,bound_value\n";
        for (std::size_t k = 0; k < rec.history.size(); ++k) {
            const auto& h = rec.history[k];
            os << k << ',' << io::format_double(h.f_value) << ',' << io::format_double(h.grad_norm) << ','
               << io::format_double(h.dist_to_ref.value_or(nan)) << ',' << io::format_double(h.control_norm) << ','
               << io::format_double(ref ? bound.values[k] : nan) << '\n';
        }
    });

    if (a.out != "-") {
        const FeedbackKind kind = a.policy == "grad-fb" ? FeedbackKind::gradient : FeedbackKind::state;
        const RateCertificate cert = rate_certificate(sys, gain, cfg.gamma, kind, cfg.coupling);
        json summary{{"iterations", rec.iterations},
                     {"converged", rec.converged},
                     {"final_grad_norm", rec.history.back().grad_norm},
                     {"gamma", cfg.gamma},
                     {"tau", cert.tau},
                     {"contraction", cert.contraction},
                     {"preserves_argmin", cert.preserves_argmin},
                     {"bound_degenerate_base", bound.degenerate_base}};
        json params{{"system", a.system}, {"policy", a.policy},   {"gain", a.gain},
                    {"x0", io::vector_to_json(x0)}, {"u", a.u},  {"gamma", cfg.gamma},
                    {"coupling", a.coupling}, {"iters", a.iters}, {"stop_tol", a.stop_tol},
                    {"out", a.out}};
        write_manifest(a.out + ".manifest.json", "descend", params, json{{"summary", summary}},
                       json{{a.system, file_digest(a.system)}}, {a.out}, elapsed_seconds(start));
        out << summary.dump(2) << '\n';
    }
    return ok;
}

struct ProxArgs {
    std::string system;
    std::string z;
    std::string u;
    double gamma = 1.0;
};

int cmd_prox(const ProxArgs& a, std::ostream& out)
{
    const ControlSystem sys = io::load_system(a.system);
    ProxQuery q{sys.problem(), sys.input(), vector_or_zeros(a.u, sys.control_dim(), "--u"), a.gamma,
                vector_or_zeros(a.z, sys.state_dim(), "--z")};
    const ProxResolventComparison cmp = prox_resolvent_equivalence(q);
    json doc{{"prox", io::vector_to_json(cmp.prox)},
             {"resolvent", io::vector_to_json(cmp.resolvent)},
             {"max_abs_diff", cmp.max_abs_diff},
             {"foc_residual", norm2(prox_objective_gradient(q, cmp.prox))}};
    out << doc.dump(2) << '\n';
    return ok;
}

struct CsArgs {
    std::size_t n = 128;
    std::string ratios = "2,1,0.5";
    std::size_t d = 2;
    std::string policy = "grad-fb";
    std::string coupling = "euler";
    double constant = 0.0;
    int iters = 5000;
    std::optional<std::uint64_t> seed;
    std::string signal = "gaussian";
    std::string outdir;
    std::string from_manifest;
    bool no_rank = false;
};

int cmd_cs(CsArgs a, std::ostream& out)
{
    const auto start = std::chrono::steady_clock::now();
    json inputs = json::object();
    if (!a.from_manifest.empty()) {
        const json manifest = io::read_json_file(a.from_manifest);
        inputs[a.from_manifest] = file_digest(a.from_manifest);
        try {
            const json& p = manifest.at("parameters");
            a.n = p.at("n").get<std::size_t>();
            a.ratios = p.at("ratios").dump();
            a.d = p.at("d").get<std::size_t>();
            a.policy = p.at("policy").get<std::string>();
            a.coupling = p.at("coupling").get<std::string>();
            a.constant = p.at("constant").get<double>();
            a.iters = p.at("iters").get<int>();
            a.seed = p.at("seed").get<std::uint64_t>();
            a.signal = p.at("signal").get<std::string>();
            a.no_rank = !p.at("report_rank").get<bool>();
            if (a.outdir.empty()) {
                a.outdir = p.at("outdir").get<std::string>();
            }
        } catch (const json::exception& e) {
            throw ParseError("/parameters", std::string("manifest: ") + e.what());
        }
    }
    if (a.outdir.empty()) {
        throw UsageError("cs: --outdir is required");
    }

    ExperimentConfig cfg;
    cfg.regimes.n = a.n;
    const Vector ratios = io::parse_vector(a.ratios);
    cfg.regimes.ratios.assign(ratios.begin(), ratios.end());
    cfg.d = a.d;
    cfg.policy = parse_cs_policy(a.policy);
    cfg.coupling = parse_coupling(a.coupling);
    cfg.constant_value = a.constant;
    cfg.iters = a.iters;
    cfg.seed = resolve_seed(a.seed);
    cfg.signal = parse_signal(a.signal);
    cfg.report_rank = !a.no_rank;

    std::error_code ec;
    fs::create_directories(a.outdir, ec);
    if (ec) {
        throw IoError("cannot create " + a.outdir + ": " + ec.message());
    }

    const std::vector<RegimeResult> results = run_regime_experiment(cfg);
    std::vector<std::string> outputs;
    json regimes = json::array();
    for (std::size_t i = 0; i < results.size(); ++i) {
        const RegimeResult& r = results[i];
        const std::string name = "regime_" + std::to_string(i) + "_m" + std::to_string(r.m) + ".csv";
        std::ostringstream csv;
        write_regime_csv(r, csv);
        io::write_text_atomic(fs::path(a.outdir) / name, csv.str());
        outputs.push_back(name);

        const double signal_norm = norm2(r.problem.signal);
        regimes.push_back(json{{"ratio", r.ratio},
                               {"m", r.m},
                               {"csv", name},
                               {"seeds", {{"problem", r.problem_seed}, {"input", r.input_seed}, {"init", r.init_seed}}},
                               {"lipschitz_exact", r.lipschitz.exact},
                               {"lipschitz_sqrt_m_rule", r.lipschitz.sqrt_m_rule},
                               {"gamma", r.gamma},
                               {"kalman_rank", cfg.report_rank ? json(r.kalman_rank) : json()},
                               {"controllable", cfg.report_rank ? json(r.controllable) : json()},
                               {"final_rel_error_gd", *r.plain.history.back().dist_to_ref / signal_norm},
                               {"final_rel_error_cgd", *r.controlled.history.back().dist_to_ref / signal_norm}});
    }

    json ratio_list = json::array();
    for (double x : cfg.regimes.ratios) {
        ratio_list.push_back(x);
    }
    json params{{"n", cfg.regimes.n},      {"ratios", ratio_list},     {"d", cfg.d},
                {"policy", a.policy},       {"coupling", coupling_name(cfg.coupling)},
                {"constant", a.constant},   {"iters", cfg.iters},       {"seed", cfg.seed},
                {"signal", signal_name(cfg.signal)}, {"report_rank", cfg.report_rank},
                {"outdir", a.outdir}};
    write_manifest(fs::path(a.outdir) / "manifest.json", "cs", params, json{{"regimes", regimes}}, inputs, outputs,
                   elapsed_seconds(start));
    out << json{{"outdir", a.outdir}, {"outputs", outputs}, {"regimes", regimes}}.dump(2) << '\n';
    return ok;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Controlled gradient flows, descent and prox for quadratic problems", "ctrlgrad"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    const std::vector<std::string> policies{"zero", "constant", "state-fb", "grad-fb"};
    const std::vector<std::string> couplings{"direct", "euler"};

    ControllabilityArgs ca;
    auto* c_cmd = app.add_subcommand("controllability", "Kalman rank test of a control system");
    c_cmd->add_option("--system", ca.system, "Control system JSON")->required();
    c_cmd->add_option("--tol", ca.tol, "Relative rank tolerance (default n·eps·1e3)")->check(CLI::NonNegativeNumber);

    FlowArgs fa;
    auto* f_cmd = app.add_subcommand("flow", "Integrate the controlled gradient flow (optionally steering to a target)");
    f_cmd->add_option("--system", fa.system, "Control system JSON")->required();
    f_cmd->add_option("--x0", fa.x0, "Initial state (comma list or JSON array; default 0)");
    f_cmd->add_option("--target", fa.target, "Target state: enables minimum-energy steering");
    f_cmd->add_option("--u", fa.u, "Constant control");
    f_cmd->add_option("--t0", fa.t0, "Start time");
    f_cmd->add_option("--t1", fa.t1, "End time");
    f_cmd->add_option("--steps", fa.steps, "RK4 steps")->check(CLI::PositiveNumber);
    f_cmd->add_option("--quad-nodes", fa.quad_nodes, "Gramian quadrature subintervals")->check(CLI::PositiveNumber);
    f_cmd->add_option("--out", fa.out, "CSV output path or - for stdout");

    DescendArgs da;
    auto* d_cmd = app.add_subcommand("descend", "Run controlled gradient descent");
    d_cmd->add_option("--system", da.system, "Control system JSON")->required();
    d_cmd->add_option("--policy", da.policy, "Control policy")->check(CLI::IsMember(policies));
    d_cmd->add_option("--gain", da.gain, "auto (B⁺A), inline JSON matrix or JSON file");
    d_cmd->add_option("--gamma", da.gamma, "Step size (default 1/(2‖A‖))")->check(CLI::NonNegativeNumber);
    d_cmd->add_option("--coupling", da.coupling, "Control coupling")->check(CLI::IsMember(couplings));
    d_cmd->add_option("--iters", da.iters, "Maximum iterations")->check(CLI::PositiveNumber);
    d_cmd->add_option("--stop-tol", da.stop_tol, "Stop when the gradient norm drops below this")
        ->check(CLI::NonNegativeNumber);
    d_cmd->add_option("--x0", da.x0, "Initial state (default 0)");
    d_cmd->add_option("--u", da.u, "Control for --policy constant");
    d_cmd->add_option("--out", da.out, "CSV output path or - for stdout");

    ProxArgs pa;
    auto* p_cmd = app.add_subcommand("prox", "Controlled prox and resolvent step, with their difference");
    p_cmd->add_option("--system", pa.system, "Control system JSON")->required();
    p_cmd->add_option("--z", pa.z, "Prox center (default 0)");
    p_cmd->add_option("--u", pa.u, "Control (default 0)");
    p_cmd->add_option("--gamma", pa.gamma, "Prox parameter")->check(CLI::PositiveNumber);

    CsArgs sa;
    auto* s_cmd = app.add_subcommand("cs", "Compressed-sensing benchmark across sampling regimes");
    s_cmd->add_option("--n", sa.n, "Signal length")->check(CLI::PositiveNumber);
    s_cmd->add_option("--ratios", sa.ratios, "Comma list of m/n ratios");
    s_cmd->add_option("--d", sa.d, "Number of control channels");
    s_cmd->add_option("--policy", sa.policy, "Controlled-run policy")->check(CLI::IsMember(policies));
    s_cmd->add_option("--coupling", sa.coupling, "Control coupling")->check(CLI::IsMember(couplings));
    s_cmd->add_option("--constant", sa.constant, "Entry value for --policy constant");
    s_cmd->add_option("--iters", sa.iters, "Iterations per run")->check(CLI::PositiveNumber);
    s_cmd->add_option("--seed", sa.seed, "64-bit seed (fallback: CTRLGRAD_SEED, then 0)");
    s_cmd->add_option("--signal", sa.signal, "gaussian or spike:<k>");
    s_cmd->add_option("--outdir", sa.outdir, "Output directory");
    s_cmd->add_option("--from-manifest", sa.from_manifest, "Re-run with the parameters of a manifest.json");
    s_cmd->add_flag("--no-rank", sa.no_rank, "Skip the Kalman rank report");

    auto* t_cmd = app.add_subcommand("selftest", "Run the embedded invariant suite");

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& s : args) {
        argv.push_back(s.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : usage;
    }

    try {
        if (*c_cmd) {
            return cmd_controllability(ca, out);
        }
        if (*f_cmd) {
            return cmd_flow(fa, out);
        }
        if (*d_cmd) {
            return cmd_descend(da, out);
        }
        if (*p_cmd) {
            return cmd_prox(pa, out);
        }
        if (*s_cmd) {
            return cmd_cs(sa, out);
        }
        if (*t_cmd) {
            return run_selftest(out) ? ok : numerical;
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return usage;
    } catch (const DimensionError& e) {
        err << "usage error: " << e.what() << '\n';
        return usage;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return io_failure;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << '\n';
        return io_failure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return numerical;
    }
    return usage;
}

} // namespace ctrlgrad::cli
