#include <cstdint>
#include <filesystem>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "circdyn/circdyn.hpp"
#include "circdyn/io.hpp"

#ifndef CIRCDYN_VERSION
#define CIRCDYN_VERSION "unknown"
#endif

namespace {

using namespace circdyn;
using io::Json;

constexpr int kExitOk = 0;
constexpr int kExitVerification = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitResource = 3;

struct Global {
    std::uint64_t seed = 0;
    std::string out_dir = "out";
    std::size_t max_breakpoints = kDefaultMaxBreakpoints;
};

/// Records inputs, parameters and outputs of one invocation and writes manifest.json.
class Run {
public:
    Run(const Global& g, std::string command) : global_(g), command_(std::move(command))
    {
        std::filesystem::create_directories(global_.out_dir);
    }

    void input(const std::string& name, const std::string& path) { inputs_[name] = path; }

    template <class T>
    void param(const std::string& name, const T& value)
    {
        params_[name] = value;
    }

    void param(const std::string& name, const Rational& value) { params_[name] = to_string(value); }

    void write_json(const std::string& name, const Json& j)
    {
        io::write_json(path(name), j);
        outputs_.push_back(name);
    }

    void write_text(const std::string& name, const std::string& text)
    {
        io::write_text(path(name), text);
        outputs_.push_back(name);
    }

    int finish(int status)
    {
        Json m{{"tool", "circdyn"},
               {"version", CIRCDYN_VERSION},
               {"command", command_},
               {"seed", global_.seed},
               {"max_breakpoints", global_.max_breakpoints},
               {"inputs", inputs_},
               {"parameters", params_},
               {"outputs", outputs_},
               {"exit_code", status}};
        io::write_json(path("manifest.json"), m);
        return status;
    }

    const Global& global() const { return global_; }

private:
    std::string path(const std::string& name) const { return (std::filesystem::path(global_.out_dir) / name).string(); }

    const Global& global_;
    std::string command_;
    Json inputs_ = Json::object();
    Json params_ = Json::object();
    std::vector<std::string> outputs_;
};

Rational rational_arg(const std::string& text, const std::string& flag)
{
    try {
        return parse_rational(text);
    } catch (const InvalidInput& e) {
        throw InvalidInput(flag + ": " + e.what());
    }
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

PLCircleMap load_map(Run& run, const std::string& name, const std::string& path)
{
    run.input(name, path);
    PLCircleMap f = io::map_from(io::read_json(path));
    if (f.breakpoints().size() > run.global().max_breakpoints)
        throw ResourceExhausted(path + ": " + std::to_string(f.breakpoints().size()) + " breakpoints exceed --max-breakpoints");
    return f;
}

std::string verdict_csv(const ShredVerdict& v)
{
    std::ostringstream out;
    out << "item,pass,slack,witness\n";
    for (const auto& it : v.items)
        out << it.item << ',' << (it.pass ? 1 : 0) << ',' << to_string(it.slack) << ',' << csv_field(it.witness) << '\n';
    return out.str();
}

void print_verdict(const ShredVerdict& v)
{
    std::cout << "item  pass  slack\n";
    for (const auto& it : v.items) {
        std::cout << it.item << std::string(it.item.size() < 6 ? 6 - it.item.size() : 1, ' ') << (it.pass ? "yes   " : "NO    ")
                  << to_string(it.slack);
        if (!it.pass) std::cout << "  " << it.witness;
        std::cout << '\n';
    }
}

std::string join(const std::vector<long>& v, const char* sep = " ")
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + std::to_string(v[i]);
    return s;
}

// Writes the perturbed map, the report and the verdict table; returns the exit status.
int report_shredding(Run& run, const PLCircleMap& f, const ShredResult& res)
{
    run.write_json("shredded_map.json", io::to_json(res.g));
    run.write_json("trapping_report.json", io::to_json(res.report));
    run.write_text("verdict.csv", verdict_csv(*res.report.verdict));
    Rational dist = c0_distance(f, res.g);
    std::cout << "cells: " << res.report.cell_count << ", subcells per cell: " << res.report.sub_count << '\n'
              << "tau: " << join(res.report.tau) << '\n'
              << "periodic orbits of tau: " << res.report.orbits.size() << '\n'
              << "trapping regions: " << res.report.regions.size() << '\n'
              << "delta: " << to_string(res.report.delta) << '\n'
              << "c0_distance(f, g) = " << to_string(dist) << (dist < res.report.eps ? " < " : " >= ")
              << to_string(res.report.eps) << '\n';
    print_verdict(*res.report.verdict);
    return res.report.verdict->all_pass() && dist < res.report.eps ? kExitOk : kExitVerification;
}

// Shredding.

struct ShredArgs {
    std::string map_file, eps, delta;
    long cells = 0, subcells = 0;
    std::vector<long> tau;
};

ShredConfig shred_config(Run& run, const ShredArgs& a)
{
    ShredConfig cfg;
    cfg.cell_count = a.cells;
    cfg.subdivision_count = a.subcells;
    run.param("cells", a.cells);
    run.param("subcells", a.subcells);
    if (!a.delta.empty()) {
        cfg.delta = rational_arg(a.delta, "--delta");
        run.param("delta", *cfg.delta);
    }
    if (!a.tau.empty()) {
        cfg.tau = a.tau;
        run.param("tau", a.tau);
    }
    return cfg;
}

int cmd_shred(const Global& g, const ShredArgs& a)
{
    Run run(g, "shred");
    PLCircleMap f = load_map(run, "map", a.map_file);
    Rational eps = rational_arg(a.eps, "--eps");
    run.param("eps", eps);
    ShredResult res = shred(f, eps, shred_config(run, a));
    return run.finish(report_shredding(run, f, res));
}

int cmd_verify(const Global& g, const std::string& map_file, const std::string& report_file)
{
    Run run(g, "verify");
    PLCircleMap gmap = load_map(run, "map", map_file);
    run.input("report", report_file);
    TrappingReport rep = io::report_from(io::read_json(report_file));
    ShredVerdict v = verify_shredding(gmap, rep);
    run.write_text("verdict.csv", verdict_csv(v));
    std::cout << "trapping regions: " << rep.regions.size() << '\n';
    print_verdict(v);
    if (rep.verdict && io::to_json(*rep.verdict) != io::to_json(v))
        std::cout << "note: the verdict stored in the report differs from the recomputed one\n";
    return run.finish(v.all_pass() ? kExitOk : kExitVerification);
}

// Classifier protocol flags; defaults come from WProtocol.

struct ProtocolArgs {
    WProtocol defaults;
    long grid = defaults.grid_size;
    std::vector<long> horizons = defaults.horizons;
    std::string tol = to_string(defaults.tol);
    std::string gap_threshold = to_string(defaults.gap_threshold);
    long max_period = defaults.max_period;
    int spec_ell = defaults.ell;
    int spec_level = defaults.level;
    std::vector<std::string> spec_files;
    std::vector<std::string> observable_files;
    std::size_t max_pieces = defaults.max_pieces;
    std::size_t max_work = defaults.max_work;
    std::size_t max_bits = defaults.max_bits;
};

void add_protocol_flags(CLI::App* cmd, ProtocolArgs& p)
{
    cmd->add_option("--grid", p.grid, "grid points (2j+1)/(2N)")->capture_default_str();
    cmd->add_option("--horizons", p.horizons, "Birkhoff and Cesaro horizons")->delimiter(',')->capture_default_str();
    cmd->add_option("--tol", p.tol, "tolerance")->capture_default_str();
    cmd->add_option("--gap-threshold", p.gap_threshold, "Birkhoff gap counted as non-convergence")->capture_default_str();
    cmd->add_option("--max-period", p.max_period, "largest period searched")->capture_default_str();
    cmd->add_option("--spec-ell", p.spec_ell, "alphabet of Cesaro cylinder specs")->capture_default_str();
    cmd->add_option("--spec-level", p.spec_level, "level of Cesaro cylinder specs")->capture_default_str();
    cmd->add_option("--declared", p.spec_files, "declared invariant spec files (replace the defaults)");
    cmd->add_option("--observable", p.observable_files, "observable files (replace the tent battery)");
    cmd->add_option("--max-pieces", p.max_pieces, "part cap for exact Cesaro push-forwards")->capture_default_str();
    cmd->add_option("--max-work", p.max_work, "total parts processed over Cesaro steps")->capture_default_str();
    cmd->add_option("--max-bits", p.max_bits, "denominator size cap in bits")->capture_default_str();
}

WProtocol build_protocol(Run& run, const ProtocolArgs& a)
{
    WProtocol p;
    p.grid_size = a.grid;
    p.horizons = a.horizons;
    p.tol = rational_arg(a.tol, "--tol");
    p.gap_threshold = rational_arg(a.gap_threshold, "--gap-threshold");
    p.max_period = a.max_period;
    p.ell = a.spec_ell;
    p.level = a.spec_level;
    p.max_pieces = a.max_pieces;
    p.max_work = a.max_work;
    p.max_bits = a.max_bits;
    for (std::size_t i = 0; i < a.spec_files.size(); ++i) {
        run.input("declared_" + std::to_string(i), a.spec_files[i]);
        p.declared.push_back({std::filesystem::path(a.spec_files[i]).stem().string(), io::spec_from(io::read_json(a.spec_files[i]))});
    }
    for (std::size_t i = 0; i < a.observable_files.size(); ++i) {
        run.input("observable_" + std::to_string(i), a.observable_files[i]);
        p.observables.push_back(io::observable_from(io::read_json(a.observable_files[i])));
    }
    run.param("grid", p.grid_size);
    run.param("horizons", p.horizons);
    run.param("tol", p.tol);
    run.param("gap_threshold", p.gap_threshold);
    run.param("max_period", p.max_period);
    run.param("spec_ell", p.ell);
    run.param("spec_level", p.level);
    run.param("max_pieces", p.max_pieces);
    run.param("max_work", p.max_work);
    run.param("max_bits", p.max_bits);
    p.validate();
    return p;
}

void report_diagnostics(Run& run, const WDiagnostics& d)
{
    run.write_json("diagnostics.json", io::to_json(d));
    if (!d.grid.empty()) run.write_text("gaps.csv", gaps_csv(d));
    for (const auto& [name, v] : d.labels()) {
        std::cout << name << std::string(11 - name.size(), ' ') << verdict_name(v->status);
        for (const auto& [k, val] : v->evidence) std::cout << "  " << k << '=' << val;
        std::cout << '\n';
    }
}

int cmd_classify(const Global& g, const std::string& map_file, const std::string& report_file, const ProtocolArgs& pa)
{
    Run run(g, "classify");
    ClassifyInput in;
    in.map = load_map(run, "map", map_file);
    if (!report_file.empty()) {
        run.input("report", report_file);
        in.trapping = io::report_from(io::read_json(report_file));
    }
    WProtocol p = build_protocol(run, pa);
    report_diagnostics(run, classify(in, p));
    return run.finish(kExitOk);
}

// Wicked perturbation.

struct WickedArgs {
    std::string homeo_file, target_file, eps, extension = "markov";
    int ell = 2;
    long n = 0;
    std::size_t max_cells = kDefaultMaxCells;
    bool classify = false;
    ProtocolArgs protocol;
};

int cmd_wicked(const Global& g, const WickedArgs& a)
{
    Run run(g, "wicked");
    PLCircleMap h = load_map(run, "homeo", a.homeo_file);
    run.input("target", a.target_file);
    CylinderSpec target = io::spec_from(io::read_json(a.target_file));
    Rational eps = rational_arg(a.eps, "--eps");
    if (a.extension != "markov" && a.extension != "product") throw InvalidInput("--extension must be markov or product");
    SpecExtension ext = a.extension == "markov" ? SpecExtension::Markov : SpecExtension::Product;
    run.param("ell", a.ell);
    run.param("eps", eps);
    run.param("n", a.n);
    run.param("extension", a.extension);
    run.param("max_cells", a.max_cells);
    WickedResult res = wicked_perturb(h, a.ell, target, eps, a.n, ext, a.max_cells);
    const int p = target.level();

    std::ostringstream per_k, traj;
    per_k << "k,in_window,spec_distance,spec_distance_approx\n";
    traj << "m,spec_distance,spec_distance_approx,mean_window_distance,window_bound\n";
    bool window_exact = true;
    std::vector<Rational> sum(target.size(), Rational(0));
    Rational dist_sum = 0;
    for (long k = 0; k < a.n; ++k) {
        CylinderSpec c = res.conjugator.cylinder(k, p);
        Rational d = spec_distance(c, target);
        bool in_window = k >= res.n0;
        if (in_window && d != 0) window_exact = false;
        per_k << k << ',' << (in_window ? 1 : 0) << ',' << to_string(d) << ',' << to_double(d) << '\n';
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += c[i];
        dist_sum += d;
        long m = k + 1;
        std::vector<Rational> avg;
        for (const auto& s : sum) avg.push_back(s / Rational(m));
        Rational dm = spec_distance(CylinderSpec(a.ell, p, std::move(avg)), target);
        // Only k < n0 can differ from the target, each by at most 1.
        Rational window_bound = rmin(Rational(1), rational(res.n0, m));
        traj << m << ',' << to_string(dm) << ',' << to_double(dm) << ',' << to_string(dist_sum / Rational(m)) << ','
             << to_string(window_bound) << '\n';
    }
    run.write_text("spec_distance.csv", per_k.str());
    run.write_text("cesaro.csv", traj.str());

    std::cout << "n0: " << res.n0 << ", depth: " << res.depth << '\n'
              << "window k in [" << res.n0 << ", " << a.n - 1 << "]: " << (window_exact ? "exact match" : "MISMATCH") << '\n';
    bool close = true;
    if (res.family) {
        run.write_json("family.json", io::to_json(*res.family));
        run.write_json("inverse.json", io::to_json(*res.inverse));
        if (res.h_prime) run.write_json("h_prime.json", io::to_json(*res.h_prime));
        else std::cout << "h' collapses some cells; written as its monotone inverse g only\n";
        close = *res.distance < eps;
        std::cout << "c0_distance(h, h') = " << to_string(*res.distance) << (close ? " < " : " >= ") << to_string(eps) << '\n';
    } else {
        std::cout << "ell^depth exceeds --max-cells; h' kept symbolic (window values are still exact)\n";
    }
    if (a.classify) {
        ClassifyInput in;
        in.conjugator = res.conjugator;
        report_diagnostics(run, classify(in, build_protocol(run, a.protocol)));
    }
    return run.finish(window_exact && close ? kExitOk : kExitVerification);
}

// Measures.

int cmd_pushforward(const Global& g, const std::string& map_file, const std::string& measure_file, long iters, std::size_t cdf_points)
{
    Run run(g, "pushforward");
    PLCircleMap f = load_map(run, "map", map_file);
    run.input("measure", measure_file);
    CircleMeasure mu0 = io::measure_from(io::read_json(measure_file));
    if (iters < 0) throw InvalidInput("--iters must be >= 0");
    run.param("iters", iters);
    run.param("cdf_points", cdf_points);
    CircleMeasure mu = mu0;
    for (long k = 0; k < iters; ++k) mu = pushforward(f, mu, g.max_breakpoints);
    run.write_json("measure.json", io::to_json(mu));
    run.write_text("cdf.csv", cdf_csv(mu, cdf_points));
    std::cout << "atoms: " << mu.atoms().size() << ", density pieces: " << mu.pieces().size() << '\n'
              << "equal to input: " << (mu == mu0 ? "yes" : "no") << '\n';
    return run.finish(kExitOk);
}

int cmd_cesaro(const Global& g, const std::string& map_file, const std::string& measure_file, std::vector<long> horizons,
               std::size_t cdf_points)
{
    Run run(g, "cesaro");
    PLCircleMap f = load_map(run, "map", map_file);
    run.input("measure", measure_file);
    CircleMeasure mu0 = io::measure_from(io::read_json(measure_file));
    std::sort(horizons.begin(), horizons.end());
    horizons.erase(std::unique(horizons.begin(), horizons.end()), horizons.end());
    run.param("horizons", horizons);
    run.param("cdf_points", cdf_points);
    auto ms = cesaro_at(f, mu0, horizons, g.max_breakpoints);
    std::ostringstream traj;
    traj << "n,w1_to_initial,w1_to_lebesgue,w1_to_initial_approx,w1_to_lebesgue_approx,parts\n";
    for (std::size_t i = 0; i < ms.size(); ++i) {
        Rational a = w1_distance(ms[i], mu0), b = w1_distance(ms[i], CircleMeasure::lebesgue());
        traj << horizons[i] << ',' << to_string(a) << ',' << to_string(b) << ',' << to_double(a) << ',' << to_double(b) << ','
             << ms[i].complexity() << '\n';
        std::cout << "n=" << horizons[i] << "  W1 to Lebesgue " << to_string(b) << '\n';
    }
    run.write_text("cesaro.csv", traj.str());
    run.write_json("cesaro.json", io::to_json(ms.back()));
    run.write_text("cdf.csv", cdf_csv(ms.back(), cdf_points));
    return run.finish(kExitOk);
}

// Orbits.

int cmd_birkhoff(const Global& g, const std::string& map_file, const std::string& x_text, std::vector<long> horizons,
                 const std::string& observable_file, const std::string& report_file)
{
    Run run(g, "birkhoff");
    PLCircleMap f = load_map(run, "map", map_file);
    CirclePoint x = CirclePoint::wrap(rational_arg(x_text, "--x"));
    run.param("x", x.value());
    run.param("horizons", horizons);
    std::vector<Observable> obs;
    if (observable_file.empty()) {
        obs = WProtocol::default_battery();
    } else {
        run.input("observable", observable_file);
        obs.push_back(io::observable_from(io::read_json(observable_file)));
    }
    std::optional<TrappingReport> rep;
    if (!report_file.empty()) {
        run.input("report", report_file);
        rep = io::report_from(io::read_json(report_file));
    }
    std::ostringstream csv;
    csv << "observable,n,average,average_approx";
    if (rep) csv << ",lower,upper,contained";
    csv << '\n';
    bool all_inside = true;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        for (long n : horizons) {
            if (n < 1) throw InvalidInput("horizons must be >= 1");
            if (rep) {
                BirkhoffBracket b = birkhoff_gap_bound(f, *rep, obs[i], x, n);
                all_inside = all_inside && b.contained;
                csv << i << ',' << n << ',' << to_string(b.average) << ',' << to_double(b.average) << ',' << to_string(b.lower)
                    << ',' << to_string(b.upper) << ',' << (b.contained ? 1 : 0) << '\n';
                std::cout << "phi" << i << " n=" << n << "  " << to_double(b.average) << "  in [" << to_double(b.lower) << ", "
                          << to_double(b.upper) << "]: " << (b.contained ? "yes" : "NO") << '\n';
            } else {
                Rational avg = birkhoff_average(f, x, obs[i], n);
                csv << i << ',' << n << ',' << to_string(avg) << ',' << to_double(avg) << '\n';
                std::cout << "phi" << i << " n=" << n << "  " << to_string(avg) << '\n';
            }
        }
    }
    run.write_text("birkhoff.csv", csv.str());
    return run.finish(all_inside ? kExitOk : kExitVerification);
}

int cmd_rotation(const Global& g, const std::string& map_file, long max_period)
{
    Run run(g, "rotation");
    PLCircleMap h = load_map(run, "map", map_file);
    run.param("max_period", max_period);
    RotationNumber rn = rotation_number(h, max_period, g.max_breakpoints);
    Json j{{"type", "rotation_number"}, {"exact", rn.exact}};
    if (rn.exact) {
        j["value"] = to_string(rn.value);
        j["period"] = rn.period;
        std::cout << to_string(rn.value) << '\n';
    } else {
        j["lower"] = to_string(rn.lower);
        j["upper"] = to_string(rn.upper);
        std::cout << "no periodic orbit up to period " << max_period << "; rotation number in [" << to_string(rn.lower) << ", "
                  << to_string(rn.upper) << "]\n";
    }
    run.write_json("rotation.json", j);
    return run.finish(kExitOk);
}

// Demos.

PLCircleMap figure_three_map()
{
    return PLCircleMap({0, rational(1, 10), rational(3, 10), rational(1, 2), rational(7, 10), rational(9, 10), 1},
                       {rational(3, 10), rational(1, 10), rational(1, 10), rational(1, 2), rational(1, 2), rational(1, 2),
                        rational(3, 10)});
}

/// Degree-one PL map with `pieces` pieces on the 1/1000 grid, drawn from the seed.
PLCircleMap random_pl_map(std::uint64_t seed, long pieces)
{
    if (pieces < 1 || pieces > 999) throw InvalidInput("--random-map takes 1 to 999 pieces");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long> pick(1, 999), val(0, 999);
    std::set<long> cuts;
    while (static_cast<long>(cuts.size()) < pieces - 1) cuts.insert(pick(rng));
    std::vector<Rational> bp{0}, lift;
    for (long c : cuts) bp.push_back(rational(c, 1000));
    bp.push_back(1);
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) lift.push_back(rational(val(rng), 1000));
    lift.push_back(lift.front() + 1);
    return PLCircleMap(bp, lift);
}

int cmd_demo(const Global& g, bool figure3, long random_pieces, const std::string& eps_text)
{
    Run run(g, "demo");
    PLCircleMap f = PLCircleMap::identity();
    Rational eps;
    ShredConfig cfg;
    if (figure3 && random_pieces > 0) throw InvalidInput("demo: choose one of --figure3 and --random-map");
    if (random_pieces > 0) {
        f = random_pl_map(g.seed, random_pieces);
        eps = rational_arg(eps_text, "--eps");
        run.param("random_map", random_pieces);
    } else {
        // Two fixed cells of tau, five cells, four subcells each.
        f = figure_three_map();
        eps = rational(7, 10);
        cfg.cell_count = 5;
        cfg.subdivision_count = 4;
        run.param("figure3", true);
        run.param("cells", cfg.cell_count);
        run.param("subcells", cfg.subdivision_count);
    }
    run.param("eps", eps);
    run.write_json("input_map.json", io::to_json(f));
    ShredResult res = shred(f, eps, cfg);
    return run.finish(report_shredding(run, f, res));
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Exact piecewise-linear circle dynamics"};
    app.require_subcommand(1);
    app.fallthrough();
    Global g;
    app.add_option("--seed", g.seed, "seed for every random choice")->capture_default_str();
    app.add_option("--out-dir", g.out_dir, "directory for outputs and manifest.json")->capture_default_str();
    app.add_option("--max-breakpoints", g.max_breakpoints, "cap on breakpoints and measure parts")->capture_default_str();
    app.set_version_flag("--version", CIRCDYN_VERSION);

    ShredArgs sa;
    auto* shred_cmd = app.add_subcommand("shred", "perturb a map into a shredded map and verify it");
    shred_cmd->add_option("map", sa.map_file, "PL map file")->required();
    shred_cmd->add_option("--eps", sa.eps, "perturbation scale")->required();
    shred_cmd->add_option("--cells", sa.cells, "number of cells |I| (0: smallest feasible)");
    shred_cmd->add_option("--subcells", sa.subcells, "subcells per cell |J| (0: floor(1/eps)+1)");
    shred_cmd->add_option("--delta", sa.delta, "collar width");
    shred_cmd->add_option("--tau", sa.tau, "cell index map, comma separated")->delimiter(',');

    std::string verify_map, verify_report;
    auto* verify_cmd = app.add_subcommand("verify", "re-verify a trapping report against a map");
    verify_cmd->add_option("map", verify_map, "shredded map file")->required();
    verify_cmd->add_option("report", verify_report, "trapping report file")->required();

    WickedArgs wa;
    auto* wicked_cmd = app.add_subcommand("wicked", "perturb a homeomorphism so E_ell push-forwards follow a target spec");
    wicked_cmd->add_option("homeo", wa.homeo_file, "PL homeomorphism file")->required();
    wicked_cmd->add_option("--target", wa.target_file, "invariant cylinder spec file")->required();
    wicked_cmd->add_option("--eps", wa.eps, "perturbation scale")->required();
    wicked_cmd->add_option("--n", wa.n, "last push-forward index plus one")->required();
    wicked_cmd->add_option("--ell", wa.ell, "expansion factor")->capture_default_str();
    wicked_cmd->add_option("--extension", wa.extension, "deeper-level extension of the target: markov or product")->capture_default_str();
    wicked_cmd->add_option("--max-cells", wa.max_cells, "materialize the family when ell^depth is at most this")->capture_default_str();
    wicked_cmd->add_flag("--classify", wa.classify, "also classify the conjugate of E_ell");
    add_protocol_flags(wicked_cmd, wa.protocol);

    std::string pf_map, pf_measure;
    long pf_iters = 1;
    std::size_t pf_points = 1000;
    auto* pf_cmd = app.add_subcommand("pushforward", "exact push-forward of a measure");
    pf_cmd->add_option("map", pf_map, "PL map file")->required();
    pf_cmd->add_option("measure", pf_measure, "measure file")->required();
    pf_cmd->add_option("--iters", pf_iters, "number of push-forwards")->capture_default_str();
    pf_cmd->add_option("--cdf-points", pf_points, "CDF sample count")->capture_default_str();

    std::string ces_map, ces_measure;
    std::vector<long> ces_horizons{10};
    std::size_t ces_points = 1000;
    auto* ces_cmd = app.add_subcommand("cesaro", "exact Cesaro averages of push-forwards");
    ces_cmd->add_option("map", ces_map, "PL map file")->required();
    ces_cmd->add_option("measure", ces_measure, "initial measure file")->required();
    ces_cmd->add_option("--horizons", ces_horizons, "horizons, comma separated")->delimiter(',')->capture_default_str();
    ces_cmd->add_option("--cdf-points", ces_points, "CDF sample count for the last horizon")->capture_default_str();

    std::string bk_map, bk_x, bk_obs, bk_report;
    std::vector<long> bk_horizons{100, 1000, 10000};
    auto* bk_cmd = app.add_subcommand("birkhoff", "exact finite Birkhoff averages");
    bk_cmd->add_option("map", bk_map, "PL map file")->required();
    bk_cmd->add_option("--x", bk_x, "starting point")->required();
    bk_cmd->add_option("--horizons", bk_horizons, "horizons, comma separated")->delimiter(',')->capture_default_str();
    bk_cmd->add_option("--observable", bk_obs, "observable file (default: the tent battery)");
    bk_cmd->add_option("--report", bk_report, "trapping report; checks the cycle-set bracket");

    std::string rot_map;
    long rot_period = WProtocol{}.max_period;
    auto* rot_cmd = app.add_subcommand("rotation", "rotation number of a PL homeomorphism");
    rot_cmd->add_option("map", rot_map, "PL homeomorphism file")->required();
    rot_cmd->add_option("--max-period", rot_period, "largest period searched")->capture_default_str();

    std::string cl_map, cl_report;
    ProtocolArgs cl_protocol;
    auto* cl_cmd = app.add_subcommand("classify", "evidence for the five labels");
    cl_cmd->add_option("map", cl_map, "PL map file")->required();
    cl_cmd->add_option("--report", cl_report, "trapping report of a shredded map");
    add_protocol_flags(cl_cmd, cl_protocol);

    bool demo_fig3 = false;
    long demo_random = 0;
    std::string demo_eps = "1/5";
    auto* demo_cmd = app.add_subcommand("demo", "built-in shredding examples");
    demo_cmd->add_flag("--figure3", demo_fig3, "five cells, four subcells, tau with two fixed cells (default)");
    demo_cmd->add_option("--random-map", demo_random, "shred a random map with this many pieces, drawn from --seed");
    demo_cmd->add_option("--eps", demo_eps, "scale for --random-map")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    try {
        if (shred_cmd->parsed()) return cmd_shred(g, sa);
        if (verify_cmd->parsed()) return cmd_verify(g, verify_map, verify_report);
        if (wicked_cmd->parsed()) return cmd_wicked(g, wa);
        if (pf_cmd->parsed()) return cmd_pushforward(g, pf_map, pf_measure, pf_iters, pf_points);
        if (ces_cmd->parsed()) return cmd_cesaro(g, ces_map, ces_measure, ces_horizons, ces_points);
        if (bk_cmd->parsed()) return cmd_birkhoff(g, bk_map, bk_x, bk_horizons, bk_obs, bk_report);
        if (rot_cmd->parsed()) return cmd_rotation(g, rot_map, rot_period);
        if (cl_cmd->parsed()) return cmd_classify(g, cl_map, cl_report, cl_protocol);
        if (demo_cmd->parsed()) return cmd_demo(g, demo_fig3, demo_random, demo_eps);
    } catch (const ShredInfeasible& e) {
        std::cerr << "error: " << e.what() << " (smallest feasible cell count " << e.minimal_cells() << ")\n";
        return kExitInvalid;
    } catch (const InvalidInput& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const ResourceExhausted& e) {
        std::cerr << "resource cap: " << e.what() << '\n';
        return kExitResource;
    } catch (const VerificationFailure& e) {
        std::cerr << "verification failure: " << e.what() << '\n';
        return kExitVerification;
    } catch (const Json::exception& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kExitInvalid;
    }
    return kExitInvalid;
}
