#include "dym/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "dym/csv.hpp"
#include "dym/dynamics.hpp"
#include "dym/families.hpp"
#include "dym/periodic.hpp"
#include "dym/verify.hpp"

#ifndef DYM_VERSION
#define DYM_VERSION "dev"
#endif

namespace dym {

using json = nlohmann::json;

namespace {

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

std::pair<double, double> parse_range(const std::string& text, const char* flag)
{
    const auto pos = text.find(':');
    if (pos == std::string::npos) throw UsageError(std::string(flag) + " expects A:B");
    const double a = parse_double(text.substr(0, pos)), b = parse_double(text.substr(pos + 1));
    if (!(b > a)) throw UsageError(std::string(flag) + " needs A < B");
    return {a, b};
}

json range_json(std::pair<double, double> r) { return json::array({r.first, r.second}); }

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

std::ofstream open_out(const std::string& path)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot write '" + path + "'");
    return f;
}

void write_manifest(const std::string& out, const json& m)
{
    auto f = open_out(out + ".manifest.json");
    f << m.dump(2) << '\n';
}

// --lambda / --n, shared by all subcommands
struct LambdaFlags {
    double lambda = 1;
    long n = 0;
    CLI::Option* n_opt = nullptr;

    void add(CLI::App* app)
    {
        auto* l = app->add_option("--lambda", lambda, "coupling lambda >= 1");
        n_opt = app->add_option("--n", n, "odd representation label, lambda = (n+1)/2");
        n_opt->excludes(l);
    }
    double resolve() const
    {
        const double v = n_opt->count() ? lambda_from_n(n) : lambda;
        if (!(v >= 1)) throw UsageError("lambda must be >= 1");
        return v;
    }
};

// ---- simulate ----------------------------------------------------------------

struct SimFlags {
    LambdaFlags lam;
    std::string system = "cartesian", metric = "const:1", span = "0:10", xi0 = "0,0", z0, Y0 = "0", out;
    double rho0 = 1, U0 = 0, rtol = 1e-10, atol = 1e-12, dt = 1e-3;
    long max_steps = 500'000;
    int branch_sign = 1;
    bool project = false, reconstruct = false;
    CLI::Option* z0_opt = nullptr;
};

template <class Vec>
struct TwoSided {
    Trajectory<Vec> fw, bw;
    bool has_fw = false, has_bw = false;

    double lo() const { return has_bw ? bw.s_end() : 0.0; }
    double hi() const { return has_fw ? fw.s_end() : 0.0; }
    Vec at(double s) const { return s >= 0 ? (has_fw ? fw(s) : bw(s)) : bw(s); }
    bool complete() const
    {
        return (!has_fw || fw.termination == Termination::reached_end) &&
               (!has_bw || bw.termination == Termination::reached_end);
    }
    json termination() const
    {
        json t = json::object();
        json singular = json::array();
        if (has_fw) {
            t["forward"] = to_string(fw.termination);
            t["forward_s_end"] = fw.s_end();
            if (fw.termination != Termination::reached_end) singular.push_back(fw.s_end());
        }
        if (has_bw) {
            t["backward"] = to_string(bw.termination);
            t["backward_s_end"] = bw.s_end();
            if (bw.termination != Termination::reached_end) singular.push_back(bw.s_end());
        }
        t["singular_s"] = singular;
        return t;
    }
};

template <class Vec, class Run>
TwoSided<Vec> run_two_sided(Run&& run, std::pair<double, double> span)
{
    if (span.first > 0 || span.second < 0) throw UsageError("--span must contain s = 0 (initial data live there)");
    TwoSided<Vec> t;
    if (span.second > 0) {
        t.fw = run(span.second);
        t.has_fw = true;
    }
    if (span.first < 0) {
        t.bw = run(span.first);
        t.has_bw = true;
    }
    return t;
}

std::vector<double> sample_grid(double lo, double hi, double dt)
{
    const auto k0 = static_cast<long>(std::ceil(lo / dt - 1e-9)), k1 = static_cast<long>(std::floor(hi / dt + 1e-9));
    std::vector<double> s;
    for (long k = k0; k <= k1; ++k) s.push_back(double(k) * dt);
    return s;
}

std::vector<double> field_cells(const FieldSample& f)
{
    return {f.z.real(), f.z.imag(), f.xi.c.real(), f.xi.c.imag(), f.xi.h.real(), f.xi.h.imag()};
}

const std::vector<std::string> field_header{"z_re", "z_im", "xi_c_re", "xi_c_im", "xi_h_re", "xi_h_im"};

int cmd_simulate(const SimFlags& f, std::ostream& out)
{
    const double lambda = f.lam.resolve();
    const auto span = parse_range(f.span, "--span");
    if (!(f.dt > 0)) throw UsageError("--dt must be positive");
    if (f.out.empty()) throw UsageError("--out is required");
    if (f.branch_sign != 1 && f.branch_sign != -1) throw UsageError("--branch-sign must be +1 or -1");

    IntegratorConfig cfg;
    cfg.rtol = f.rtol;
    cfg.atol = f.atol;
    cfg.max_step = f.dt;
    cfg.max_steps = f.max_steps;

    const Quaternion xi0 = parse_quaternion(f.xi0);
    json params = {{"system", f.system},  {"lambda", lambda}, {"metric", f.metric},
                   {"span", range_json(span)}, {"dt", f.dt}, {"xi0", {complex_json(xi0.c), complex_json(xi0.h)}},
                   {"branch_sign", f.branch_sign}, {"reconstruct", f.reconstruct},
                   {"project_constraint", f.project}};

    // initial data
    CartesianPoint p0;
    std::optional<Canonicalized> canon;
    if (f.z0_opt->count()) {
        const Complex z0 = parse_complex(f.z0);
        Complex Y0 = parse_complex(f.Y0);
        params["z0"] = complex_json(z0);
        params["Y0_given"] = complex_json(Y0);
        const double cv = constraint_value(z0, Y0, xi0);
        if (std::abs(cv) > 1e-10) {
            if (!f.project)
                throw UsageError("initial data violate the constraint (|Im(conj z0 Y0) + |xi0|^2/4| = " +
                                 format_double(std::abs(cv)) + "); pass --project-constraint to re-solve Y0");
            Y0 = project_constraint(z0, Y0, xi0);
        }
        params["Y0"] = complex_json(Y0);
        p0 = {z0, Y0, xi0};
        if (f.system != "cartesian") canon = canonicalize_initial_data(z0, Y0, xi0);
    } else {
        if (!(f.rho0 > 0)) throw UsageError("--rho0 must be positive");
        params["rho0"] = f.rho0;
        params["U0"] = f.U0;
        p0 = to_point(InitialData{f.rho0, f.U0, xi0});
    }

    json manifest = {{"command", "simulate"}, {"version", DYM_VERSION}, {"parameters", params},
                     {"tolerances", {{"rtol", f.rtol}, {"atol", f.atol}, {"max_step", f.dt}, {"max_steps", f.max_steps}}},
                     {"seed", nullptr}};
    auto csv_file = open_out(f.out);
    bool complete = false;
    std::size_t rows = 0;

    if (f.system == "cartesian") {
        if (f.metric == "rho-const" || f.metric == "w-const")
            throw UsageError("metric closures rho-const / w-const need a polar system");
        const MetricProfile metric = MetricProfile::parse(f.metric);
        const Vec8 y0 = pack(p0);
        auto tr = run_two_sided<Vec8>([&](double end) { return integrate_cartesian(y0, metric, lambda, 0, end, cfg); },
                                      span);
        CsvWriter w(csv_file, {"s", "z_re", "z_im", "Y_re", "Y_im", "xi_c_re", "xi_c_im", "xi_h_re", "xi_h_im",
                               "constraint", "r"});
        double max_c = 0;
        for (double s : sample_grid(tr.lo(), tr.hi(), f.dt)) {
            const Vec8 v = tr.at(s);
            const double c = constraint_value(unpack(v));
            max_c = std::max(max_c, std::abs(c));
            w.row({s, v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], c, metric(s)});
            ++rows;
        }
        manifest["termination"] = tr.termination();
        manifest["summary"] = {{"rows", rows}, {"max_abs_constraint", max_c}, {"s_range", {tr.lo(), tr.hi()}}};
        complete = tr.complete();
    } else if (f.system == "polar0" || f.system == "polarpos") {
        const InitialData d = canon ? canon->data : InitialData{p0.z.real(), p0.Y.real(), p0.xi};
        if (canon)
            manifest["canonical_transform"] = {{"rotation", canon->transform.rotation},
                                               {"swapped", canon->transform.swapped}};
        const PolarInit pi0 = polar_init(d);
        const bool want0 = f.system == "polar0";
        if (want0 != (pi0.branch == Branch::delta0))
            throw UsageError(std::string("initial data lie on the ") + to_string(pi0.branch) + " branch, not " +
                             (want0 ? "delta0" : "deltapos"));
        manifest["polar_init"] = {{"branch", to_string(pi0.branch)}, {"rho0", pi0.rho0}, {"H0", pi0.H0},
                                  {"R0", pi0.R0}, {"P0", pi0.P0}, {"W0", pi0.W0}, {"delta0", pi0.delta0},
                                  {"near_degenerate", pi0.near_degenerate}};
        std::vector<std::string> header{"s", "rho", "H"};
        double w_final = NAN;
        if (want0) {
            RadiusDelta0 radius;
            if (f.metric == "rho-const") radius = rho_const_radius_delta0(lambda, pi0.rho0, f.branch_sign);
            else if (f.metric == "w-const") radius = w_const_radius_delta0(lambda, pi0.W0);
            else radius = metric_radius_delta0(MetricProfile::parse(f.metric));
            auto tr = run_two_sided<Vec6>(
                [&](double end) { return integrate_polar_delta0(pi0, radius, lambda, 0, end, cfg); }, span);
            header.insert(header.end(), {"R", "W", "int_rho_cos_W", "int_rho_sin_W", "r"});
            if (f.reconstruct) header.insert(header.end(), field_header.begin(), field_header.end());
            CsvWriter w(csv_file, header);
            for (double s : sample_grid(tr.lo(), tr.hi(), f.dt)) {
                const Vec6 v = tr.at(s);
                double r = NAN;
                try {
                    r = radius(s, v);
                } catch (const SingularState&) {
                }
                std::vector<double> row{s, v[0], v[1], v[2], v[3], v[4], v[5], r};
                if (f.reconstruct) {
                    const auto cells = field_cells(reconstruct_delta0(pi0, s, v, lambda, r));
                    row.insert(row.end(), cells.begin(), cells.end());
                }
                w.row(row);
                w_final = v[3];
                ++rows;
            }
            manifest["termination"] = tr.termination();
            manifest["summary"] = {{"rows", rows}, {"s_range", {tr.lo(), tr.hi()}}, {"W_last", w_final}};
            complete = tr.complete();
        } else {
            RadiusDeltapos radius;
            if (f.metric == "rho-const") radius = rho_const_radius_deltapos(lambda, pi0.rho0, pi0.delta0, f.branch_sign);
            else if (f.metric == "w-const") radius = w_const_radius_deltapos(lambda, pi0.W0, pi0.delta0);
            else radius = metric_radius_deltapos(MetricProfile::parse(f.metric));
            auto tr = run_two_sided<Vec7>(
                [&](double end) { return integrate_polar_deltapos(pi0, radius, lambda, 0, end, cfg); }, span);
            header.insert(header.end(),
                          {"P", "W", "int_rho_tanh_cos_W", "int_rho_coth_cos_W", "int_rho_cothP_cos_W", "r"});
            if (f.reconstruct) header.insert(header.end(), field_header.begin(), field_header.end());
            CsvWriter w(csv_file, header);
            for (double s : sample_grid(tr.lo(), tr.hi(), f.dt)) {
                const Vec7 v = tr.at(s);
                double r = NAN;
                try {
                    r = radius(s, v);
                } catch (const SingularState&) {
                }
                std::vector<double> row{s, v[0], v[1], v[2], v[3], v[4], v[5], v[6], r};
                if (f.reconstruct) {
                    const auto cells = field_cells(reconstruct_deltapos(pi0, s, v, lambda, r));
                    row.insert(row.end(), cells.begin(), cells.end());
                }
                w.row(row);
                w_final = v[3];
                ++rows;
            }
            manifest["termination"] = tr.termination();
            manifest["summary"] = {{"rows", rows}, {"s_range", {tr.lo(), tr.hi()}}, {"W_last", w_final}};
            complete = tr.complete();
        }
    } else {
        throw UsageError("unknown --system '" + f.system + "'");
    }
    write_manifest(f.out, manifest);
    out << "wrote " << rows << " rows to " << f.out << (complete ? "" : " (terminated early)") << '\n';
    return complete ? exit_ok : exit_math;
}

// ---- family ------------------------------------------------------------------------

struct FamFlags {
    LambdaFlags lam;
    std::string family, span = "-2:2", c0 = "1", out;
    double xi0sq = 0, W0 = 0, rho0 = 0, U0 = 0, delta0 = 1, P0 = 1, argc0 = 0, dt = 1e-3;
    std::int64_t p = 1, q = 4;
    CLI::Option *xi0sq_opt = nullptr, *rho0_opt = nullptr, *U0_opt = nullptr, *c0_opt = nullptr;
};

int cmd_family(const FamFlags& f, std::ostream& out)
{
    const double lambda = f.lam.resolve();
    const auto span = parse_range(f.span, "--span");
    if (!(f.dt > 0)) throw UsageError("--dt must be positive");
    if (f.out.empty()) throw UsageError("--out is required");
    if (f.xi0sq_opt->count() && f.c0_opt->count()) throw UsageError("give either --c0 or --xi0sq");
    if (f.xi0sq_opt->count() && !(f.xi0sq > 0)) throw UsageError("--xi0sq must be positive");
    // |xi0|^2 = 2 |c0|^2 on the delta0 branch
    const Complex c0 = f.xi0sq_opt->count() ? Complex(std::sqrt(f.xi0sq / 2), 0) : parse_complex(f.c0);
    auto need = [&](CLI::Option* o, const char* name) {
        if (!o->count()) throw UsageError("family " + f.family + " needs " + name);
    };

    const Eigen::VectorXd s = uniform_grid(span.first, span.second, f.dt);
    json params = {{"family", f.family}, {"lambda", lambda}, {"span", range_json(span)}, {"dt", f.dt}};
    SampledSolution sol;
    try {
        if (f.family == "rho1-delta0") {
            params.update({{"c0", complex_json(c0)}, {"W0", f.W0}});
            sol = family_rho1_delta0(lambda, c0, f.W0, s);
        } else if (f.family == "winfty") {
            need(f.rho0_opt, "--rho0");
            params.update({{"c0", complex_json(c0)}, {"rho0", f.rho0}});
            sol = family_winfty(lambda, f.rho0, c0, s);
        } else if (f.family == "s1xs2") {
            params["c0"] = complex_json(c0);
            sol = family_s1xs2(lambda, c0, s);
        } else if (f.family == "rational-fp") {
            if (f.p < 1 || f.q < 1) throw UsageError("rational-fp needs p, q >= 1");
            params.update({{"p", f.p}, {"q", f.q}, {"delta0", f.delta0}, {"argc0", f.argc0}});
            sol = family_rational_fp(lambda, f.p, f.q, f.delta0, f.argc0, s);
        } else if (f.family == "rho1-deltapos") {
            params.update({{"P0", f.P0}, {"W0", f.W0}, {"delta0", f.delta0}, {"argc0", f.argc0}});
            sol = family_rho1_deltapos(lambda, f.P0, f.W0, f.delta0, f.argc0, s);
        } else if (f.family == "w0pi-delta0") {
            need(f.rho0_opt, "--rho0");
            need(f.U0_opt, "--U0");
            params.update({{"c0", complex_json(c0)}, {"rho0", f.rho0}, {"U0", f.U0}});
            sol = family_w0pi_delta0(lambda, f.rho0, f.U0, c0, s);
        } else if (f.family == "w0pi-deltapos") {
            need(f.rho0_opt, "--rho0");
            need(f.U0_opt, "--U0");
            params.update({{"rho0", f.rho0}, {"U0", f.U0}, {"delta0", f.delta0}, {"P0", f.P0}, {"argc0", f.argc0}});
            sol = family_w0pi_deltapos(lambda, f.rho0, f.U0, f.delta0, f.P0, f.argc0, s);
        } else {
            throw UsageError("unknown --family '" + f.family + "'");
        }
    } catch (const UsageError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw UsageError("family " + f.family + " precondition violated: " + e.what());
    }

    auto csv_file = open_out(f.out);
    std::vector<std::string> header{"s"};
    header.insert(header.end(), field_header.begin(), field_header.end());
    header.push_back("r");
    for (const auto& [name, col] : sol.extra) header.push_back(name);
    CsvWriter w(csv_file, header);
    for (Eigen::Index i = 0; i < sol.size(); ++i) {
        std::vector<double> row{sol.s[i]};
        const auto cells = field_cells(sol.at(i));
        row.insert(row.end(), cells.begin(), cells.end());
        row.push_back(sol.r[i]);
        for (const auto& [name, col] : sol.extra) row.push_back(col[i]);
        w.row(row);
    }
    json scalars = json::object();
    for (const auto& [k, v] : sol.scalars) scalars[k] = v;
    json manifest = {{"command", "family"}, {"version", DYM_VERSION}, {"parameters", params},
                     {"scalars", scalars},  {"notes", sol.notes},    {"seed", nullptr},
                     {"summary", {{"rows", sol.size()}}}};
    if (sol.scalars.count("stationarity"))
        manifest["stationarity_check"] = sol.scalars.at("stationarity") <= 1e-12 ? "PASS" : "FAIL";
    write_manifest(f.out, manifest);
    out << "wrote " << sol.size() << " rows to " << f.out << '\n';
    return exit_ok;
}

// ---- find-periodic -------------------------------------------------------------------

struct FindFlags {
    LambdaFlags lam;
    std::string branch = "delta0", rho_range = "0.02:0.3", P_range = "0.1:3", grid = "24,8", c0 = "1", out, csv;
    std::int64_t qmax = 64;
    int max_candidates = 4;
    std::uint64_t seed = 0;
    double delta0 = 1, argc0 = 0;
};

int cmd_find_periodic(const FindFlags& f, std::ostream& out)
{
    ScanOptions opt;
    opt.branch = parse_periodic_branch(f.branch);
    opt.lambda = f.lam.resolve();
    std::tie(opt.rho_lo, opt.rho_hi) = parse_range(f.rho_range, "--rho-range");
    std::tie(opt.P_lo, opt.P_hi) = parse_range(f.P_range, "--P-range");
    const auto g = parse_double_list(f.grid, ',');
    if (g.empty() || g.size() > 2) throw UsageError("--grid expects N or N,M");
    opt.rho_grid = int(g[0]);
    if (g.size() == 2) opt.P_grid = int(g[1]);
    if (opt.rho_grid < 2 || opt.P_grid < 2) throw UsageError("--grid needs at least 2 points per axis");
    opt.qmax = f.qmax;
    opt.max_candidates = f.max_candidates;
    opt.delta0 = f.delta0;
    opt.argc0 = f.argc0;
    opt.c0 = parse_complex(f.c0);
    if (opt.max_candidates < 1) throw UsageError("--max-candidates must be >= 1");

    PeriodicReport rep;
    try {
        rep = find_periodic(opt);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const bool pos = opt.branch != PeriodicBranch::delta0;
    json cands = json::array();
    for (const auto& c : rep.candidates) {
        json j = {{"rho0", c.rho0}, {"p", c.p}, {"q", c.q}, {"f", c.f}, {"T", c.T},
                  {"minimal_period", c.period}, {"closure", c.closure}, {"converged", c.converged}};
        if (pos) j.update({{"P0", c.P0}, {"p2", c.p2}, {"q2", c.q2}, {"f2", c.f2}});
        cands.push_back(j);
    }
    json params = {{"branch", to_string(opt.branch)}, {"lambda", opt.lambda},
                   {"rho_range", {opt.rho_lo, opt.rho_hi}}, {"rho_grid", opt.rho_grid},
                   {"qmax", opt.qmax}, {"max_candidates", opt.max_candidates}};
    if (pos) params.update({{"P_range", {opt.P_lo, opt.P_hi}}, {"P_grid", opt.P_grid}, {"delta0", opt.delta0},
                            {"argc0", opt.argc0}});
    else params["c0"] = complex_json(opt.c0);
    json report = {{"command", "find-periodic"}, {"version", DYM_VERSION}, {"parameters", params},
                   {"seed", f.seed}, {"scan_points", rep.grid.size()}, {"candidates", cands},
                   {"notes", rep.notes}};
    if (!f.csv.empty()) {
        auto c = open_out(f.csv);
        CsvWriter w(c, {"rho0", "P0", "f", "f2", "T"});
        for (const auto& p : rep.grid) w.row({p.rho0, p.P0, p.f, p.f2, p.T});
    }
    if (f.out.empty()) {
        out << report.dump(2) << '\n';
    } else {
        auto o = open_out(f.out);
        o << report.dump(2) << '\n';
    }
    return exit_ok;
}

// ---- verify ----------------------------------------------------------------------------

struct VerifyFlags {
    LambdaFlags lam;
    std::string in, fields, out;
    double tol = 1e-6;
};

Eigen::VectorXd column(const CsvTable& t, const std::string& name)
{
    if (!t.has(name)) throw UsageError("CSV has no column '" + name + "'");
    const auto& c = t.column(name);
    return Eigen::Map<const Eigen::VectorXd>(c.data(), Eigen::Index(c.size()));
}

Eigen::VectorXcd complex_column(const CsvTable& t, const std::string& base)
{
    const Eigen::VectorXd re = column(t, base + "_re"), im = column(t, base + "_im");
    Eigen::VectorXcd v(re.size());
    for (Eigen::Index i = 0; i < re.size(); ++i) v[i] = Complex(re[i], im[i]);
    return v;
}

FieldGrid grid_from_fields_csv(const CsvTable& t)
{
    FieldGrid g;
    g.s = column(t, "s");
    g.v = column(t, "v");
    g.w = column(t, "w");
    g.alpha = column(t, "alpha");
    g.r = column(t, "r");
    g.psi1 = complex_column(t, "psi1");
    g.psi2 = complex_column(t, "psi2");
    const Eigen::Index n = g.s.size();
    if (n < 2) throw UsageError("CSV needs at least two rows");
    g.h = (g.s[n - 1] - g.s[0]) / double(n - 1);
    for (Eigen::Index i = 1; i < n; ++i)
        if (std::abs(g.s[i] - g.s[i - 1] - g.h) > 1e-9 * std::max(g.h, std::abs(g.s[i])))
            throw UsageError("CSV row " + std::to_string(i + 2) + ": s grid is not uniform");
    for (Eigen::Index i = 0; i < n; ++i)
        if (!(g.r[i] > 0) || !(g.alpha[i] > 0))
            throw UsageError("CSV row " + std::to_string(i + 2) + ": r and alpha must be positive");
    return g;
}

int cmd_verify(const VerifyFlags& f, std::ostream& out)
{
    const double lambda = f.lam.resolve();
    if (f.in.empty() == f.fields.empty()) throw UsageError("give exactly one of --in or --fields");
    FieldGrid g;
    try {
        if (!f.in.empty()) {
            const CsvTable t = read_csv(f.in);
            g = fields_from_solution(column(t, "s"), complex_column(t, "z"), complex_column(t, "xi_c"),
                                     complex_column(t, "xi_h"), column(t, "r"));
        } else {
            g = grid_from_fields_csv(read_csv(f.fields));
        }
    } catch (const UsageError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (g.size() < 9) throw UsageError("verify needs at least 9 rows");

    const Residuals res = residual_full(g, lambda);
    const Eigen::VectorXd e = energy_density(g);
    const Current cur = current_components(g, lambda);
    double emin = INFINITY, emax = -INFINITY, esum = 0;
    long ne = 0;
    for (Eigen::Index i = 0; i < e.size(); ++i) {
        if (!std::isfinite(e[i])) continue;
        emin = std::min(emin, e[i]);
        emax = std::max(emax, e[i]);
        esum += e[i];
        ++ne;
    }
    json r = json::object();
    for (std::size_t k = 0; k < res.value.size(); ++k) r[Residuals::names[k]] = res.value[k];
    const bool pass = res.max() <= f.tol;
    json report = {{"command", "verify"},
                   {"version", DYM_VERSION},
                   {"parameters", {{"lambda", lambda}, {"tol", f.tol}, {"input", f.in.empty() ? f.fields : f.in}}},
                   {"rows", g.size()},
                   {"h", g.h},
                   {"residuals", r},
                   {"max_residual", res.max()},
                   {"pass", pass},
                   {"energy_density", {{"min", emin}, {"max", emax}, {"mean", ne ? esum / double(ne) : NAN}}},
                   {"coupled", cur.coupled}};
    if (f.out.empty()) {
        out << report.dump(2) << '\n';
    } else {
        auto o = open_out(f.out);
        o << report.dump(2) << '\n';
    }
    return pass ? exit_ok : exit_math;
}

}  // namespace

Complex parse_complex(std::string_view text)
{
    std::string t;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) t += ch;
    if (t.empty()) throw UsageError("empty complex number");
    if (t.back() != 'i') return {parse_double(t), 0};
    t.pop_back();
    // split at the last sign that is not an exponent sign
    std::size_t cut = std::string::npos;
    for (std::size_t k = t.size(); k-- > 1;) {
        if ((t[k] == '+' || t[k] == '-') && t[k - 1] != 'e' && t[k - 1] != 'E') {
            cut = k;
            break;
        }
    }
    auto imag_part = [](std::string s) {
        if (s.empty() || s == "+") return 1.0;
        if (s == "-") return -1.0;
        return parse_double(s);
    };
    try {
        if (cut == std::string::npos) return {0, imag_part(t)};
        return {parse_double(t.substr(0, cut)), imag_part(t.substr(cut))};
    } catch (const std::invalid_argument&) {
        throw UsageError("not a complex number: '" + std::string(text) + "'");
    }
}

Quaternion parse_quaternion(std::string_view text)
{
    const auto pos = text.find(',');
    if (pos == std::string_view::npos) throw UsageError("expected \"c,h\" for a spinor value");
    return {parse_complex(text.substr(0, pos)), parse_complex(text.substr(pos + 1))};
}

double lambda_from_n(long n)
{
    if (n < 1 || n % 2 == 0) throw UsageError("--n must be an odd integer >= 1");
    return double(n + 1) / 2;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Numerical lab for the spherically symmetric SU(2) Dirac-Yang-Mills system", "dym"};
    app.require_subcommand(1);
    app.set_version_flag("--version", DYM_VERSION);

    SimFlags sim;
    auto* sc = app.add_subcommand("simulate", "integrate the ODE system and write a trajectory CSV");
    sim.lam.add(sc);
    sc->add_option("--system", sim.system, "cartesian | polar0 | polarpos")
        ->check(CLI::IsMember({"cartesian", "polar0", "polarpos"}));
    sc->add_option("--rho0", sim.rho0, "canonical z0 = rho0");
    sc->add_option("--U0", sim.U0, "Re Y0");
    sc->add_option("--xi0", sim.xi0, "spinor c0,h0 as \"a+bi,c+di\"");
    sim.z0_opt = sc->add_option("--z0", sim.z0, "raw z0 (instead of --rho0/--U0)");
    sc->add_option("--Y0", sim.Y0, "raw Y0, with --z0")->needs(sim.z0_opt);
    sc->add_flag("--project-constraint", sim.project, "re-solve Y0 along i z0 so the constraint holds");
    sc->add_option("--metric", sim.metric, "const:V | form:sin:a,b,w | form:sech:a,k,p | file:PATH | rho-const | w-const");
    sc->add_option("--branch-sign", sim.branch_sign, "root choice of the rho-const closure (+1/-1)");
    sc->add_option("--span", sim.span, "A:B containing 0");
    sc->add_option("--rtol", sim.rtol);
    sc->add_option("--atol", sim.atol);
    sc->add_option("--dt", sim.dt, "output spacing and largest step");
    sc->add_option("--max-steps", sim.max_steps, "step budget per direction");
    sc->add_option("--out", sim.out, "CSV path; manifest goes to PATH.manifest.json");
    sc->add_flag("--reconstruct", sim.reconstruct, "append z and xi columns (polar systems)");

    FamFlags fam;
    auto* fc = app.add_subcommand("family", "sample a closed-form solution family");
    fam.lam.add(fc);
    fc->add_option("--family", fam.family)
        ->required()
        ->check(CLI::IsMember(
            {"rho1-delta0", "winfty", "s1xs2", "rational-fp", "rho1-deltapos", "w0pi-delta0", "w0pi-deltapos"}));
    fam.c0_opt = fc->add_option("--c0", fam.c0, "c0 (delta0 families)");
    fam.xi0sq_opt = fc->add_option("--xi0sq", fam.xi0sq, "|xi0|^2, with real c0");
    fc->add_option("--W0", fam.W0);
    fam.rho0_opt = fc->add_option("--rho0", fam.rho0);
    fam.U0_opt = fc->add_option("--U0", fam.U0);
    fc->add_option("--delta0", fam.delta0);
    fc->add_option("--P0", fam.P0);
    fc->add_option("--argc0", fam.argc0);
    fc->add_option("--p", fam.p);
    fc->add_option("--q", fam.q);
    fc->add_option("--span", fam.span, "A:B");
    fc->add_option("--dt", fam.dt);
    fc->add_option("--out", fam.out);

    FindFlags fp;
    auto* pc = app.add_subcommand("find-periodic", "search for periodic solutions on a constant-rho branch");
    fp.lam.add(pc);
    pc->add_option("--branch", fp.branch, "delta0 | deltapos-drift | deltapos-bounded")
        ->check(CLI::IsMember({"delta0", "deltapos-drift", "deltapos-bounded"}));
    pc->add_option("--rho-range", fp.rho_range, "A:B");
    pc->add_option("--P-range", fp.P_range, "A:B");
    pc->add_option("--grid", fp.grid, "N or N,M");
    pc->add_option("--qmax", fp.qmax);
    pc->add_option("--max-candidates", fp.max_candidates);
    pc->add_option("--seed", fp.seed, "recorded only; the scan is deterministic");
    pc->add_option("--c0", fp.c0);
    pc->add_option("--delta0", fp.delta0);
    pc->add_option("--argc0", fp.argc0);
    pc->add_option("--out", fp.out, "JSON report path (default stdout)");
    pc->add_option("--csv", fp.csv, "scan grid CSV");

    VerifyFlags vf;
    auto* vc = app.add_subcommand("verify", "field-equation residuals, energy density and current");
    vf.lam.add(vc);
    vc->add_option("--in", vf.in, "simulate/family CSV with z, xi and r columns");
    vc->add_option("--fields", vf.fields, "CSV with s, v, w, psi1_re, psi1_im, psi2_re, psi2_im, alpha, r");
    vc->add_option("--tol", vf.tol);
    vc->add_option("--out", vf.out, "JSON report path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*sc) return cmd_simulate(sim, out);
        if (*fc) return cmd_family(fam, out);
        if (*pc) return cmd_find_periodic(fp, out);
        if (*vc) return cmd_verify(vf, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_math;
    }
    return exit_usage;
}

}  // namespace dym
