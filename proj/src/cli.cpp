#include "fraclab/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"

#include "fraclab/errors.hpp"
#include "fraclab/isometry.hpp"
#include "fraclab/parallel.hpp"
#include "fraclab/registry.hpp"
#include "fraclab/variation.hpp"

namespace fraclab::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

[[noreturn]] void bad(const std::string& msg) { fail(ErrorKind::invalid_config, msg); }

// ---------------------------------------------------------------- config validation

const std::set<std::string> top_keys = {
    "experiment", "description", "path",     "partition", "function",  "p",        "phi",
    "eval_times", "t",           "tolerance", "min_levels", "require_convergence", "seed",
    "output_dir", "jobs",        "a",        "xs",        "operator",  "method",   "holder_alpha",
    "k_max",      "atoms",       "fixtures"};
const std::set<std::string> path_keys = {"kind", "H",  "N",  "T",   "seed",  "p",    "depth",
                                         "b",    "alpha", "wave", "nu", "rho", "value", "file"};
const std::set<std::string> function_keys = {"name", "params"};
const std::set<std::string> experiments = {"generate-path", "variation", "ito-check", "frac-deriv",
                                           "remainder",     "isometry",  "reproduce-all"};

int line_of_offset(const std::string& text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

int line_of_key(const std::string& text, const std::string& key) {
    const std::string quoted = "\"" + key + "\"";
    std::size_t pos = 0;
    while ((pos = text.find(quoted, pos)) != std::string::npos) {
        std::size_t q = pos + quoted.size();
        while (q < text.size() && std::isspace(static_cast<unsigned char>(text[q]))) ++q;
        if (q < text.size() && text[q] == ':') return line_of_offset(text, pos);
        pos += quoted.size();
    }
    return 0;
}

struct Where {
    const std::string& text;
    const std::string& source;
    std::string at(const std::string& key) const {
        const int line = text.empty() ? 0 : line_of_key(text, key);
        return line > 0 ? source + ":" + std::to_string(line) + ": " : source + ": ";
    }
};

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& context, const Where& w) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key())) bad(w.at(it.key()) + "unknown key '" + it.key() + "' in " + context);
}

void validate(const json& cfg, const Where& w) {
    if (!cfg.is_object()) bad(w.source + ": config must be a JSON object");
    check_keys(cfg, top_keys, "config", w);
    if (!cfg.contains("experiment") || !cfg["experiment"].is_string())
        bad(w.source + ": missing string key 'experiment'");
    const std::string kind = cfg["experiment"];
    if (!experiments.count(kind)) bad(w.at("experiment") + "unknown experiment '" + kind + "'");
    if (cfg.contains("path")) {
        if (!cfg["path"].is_object()) bad(w.at("path") + "'path' must be an object");
        check_keys(cfg["path"], path_keys, "path", w);
    }
    if (cfg.contains("function")) {
        if (!cfg["function"].is_object()) bad(w.at("function") + "'function' must be an object");
        check_keys(cfg["function"], function_keys, "function", w);
    }
}

// ---------------------------------------------------------------- small accessors

double num(const json& j, const char* key) {
    if (!j.contains(key)) bad(std::string("missing key '") + key + "'");
    if (!j[key].is_number()) bad(std::string("'") + key + "' must be a number");
    return j[key].get<double>();
}

double num_or(const json& j, const char* key, double fallback) { return j.contains(key) ? num(j, key) : fallback; }

int int_or(const json& j, const char* key, int fallback) {
    const double v = num_or(j, key, fallback);
    if (v != std::floor(v)) bad(std::string("'") + key + "' must be an integer");
    return static_cast<int>(v);
}

std::string str_or(const json& j, const char* key, const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_string()) bad(std::string("'") + key + "' must be a string");
    return j[key].get<std::string>();
}

std::vector<double> num_list(const json& j, const char* key) {
    std::vector<double> out;
    if (!j.contains(key)) return out;
    const json& v = j[key];
    if (v.is_array()) {
        for (const json& x : v) {
            if (!x.is_number()) bad(std::string("'") + key + "' must hold numbers");
            out.push_back(x.get<double>());
        }
        return out;
    }
    if (v.is_object()) {
        const double from = num(v, "from"), to = num(v, "to");
        const int count = int_or(v, "count", 0);
        if (count < 2) bad(std::string("'") + key + ".count' must be at least 2");
        for (int i = 0; i < count; ++i) out.push_back(from + (to - from) * i / (count - 1));
        return out;
    }
    bad(std::string("'") + key + "' must be an array or {from, to, count}");
}

// ---------------------------------------------------------------- CSV

void write_csv(const fs::path& file, const std::string& header, const std::vector<std::vector<double>>& rows) {
    std::ofstream os(file, std::ios::binary);
    if (!os) fail(ErrorKind::invalid_input, "cannot write " + file.string());
    os << header << '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) os << ',';
            os << format_double(r[i]);
        }
        os << '\n';
    }
}

// ---------------------------------------------------------------- paths and levels

struct PathInfo {
    std::string kind;
    json spec;
    double p = 0.0;
    int depth = 0;
    double H = std::numeric_limits<double>::quiet_NaN();
    double horizon = 1.0;
    std::optional<SampledPath> sampled;
};

SampledPath read_path_csv(const std::string& file) {
    std::ifstream is(file);
    if (!is) bad("cannot read path file '" + file + "'");
    std::string line;
    std::getline(is, line);
    std::vector<double> t, v;
    int n = 1;
    while (std::getline(is, line)) {
        ++n;
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) bad(file + ":" + std::to_string(n) + ": expected t,value");
        double a = 0, b = 0;
        const char* s = line.data();
        auto r1 = std::from_chars(s, s + comma, a);
        auto r2 = std::from_chars(s + comma + 1, s + line.size(), b);
        if (r1.ec != std::errc() || r2.ec != std::errc()) bad(file + ":" + std::to_string(n) + ": malformed number");
        t.push_back(a);
        v.push_back(b);
    }
    return SampledPath(std::move(t), std::move(v));
}

PathInfo make_path(const json& cfg) {
    if (!cfg.contains("path")) bad("missing 'path'");
    const json& ps = cfg["path"];
    PathInfo info;
    info.spec = ps;
    info.kind = str_or(ps, "kind", "");
    info.horizon = num_or(ps, "T", 1.0);
    const std::uint64_t seed = static_cast<std::uint64_t>(num_or(ps, "seed", num_or(cfg, "seed", 0)));
    if (info.kind == "fbm") {
        GaussianPathSpec g;
        g.H = num(ps, "H");
        g.N = static_cast<std::size_t>(int_or(ps, "N", 65536));
        g.T = info.horizon;
        g.seed = seed;
        info.H = g.H;
        info.sampled = fbm_path(g);
    } else if (info.kind == "cantor-distance") {
        info.p = num(ps, "p");
        info.depth = int_or(ps, "depth", 20);
        const AnalyticPath a = AnalyticPath::cantor_distance(info.p, info.depth, info.horizon);
        info.sampled = sample(a, uniform_grid(info.horizon, static_cast<std::size_t>(int_or(ps, "N", 65536))));
    } else if (info.kind == "cantor-bump") {
        info.p = num(ps, "p");
        info.depth = int_or(ps, "depth", 8);
        if (info.horizon != 1.0) bad("cantor-bump paths live on [0, 1]");
    } else if (info.kind == "takagi") {
        const std::string wave = str_or(ps, "wave", "triangle");
        if (wave != "triangle" && wave != "sinusoid") bad("takagi wave must be 'triangle' or 'sinusoid'");
        const AnalyticPath a = AnalyticPath::takagi(int_or(ps, "b", 2), num(ps, "alpha"),
                                                    wave == "triangle" ? Wave::triangle : Wave::sinusoid,
                                                    int_or(ps, "depth", 30), num_or(ps, "nu", 1.0),
                                                    num_or(ps, "rho", 0.0), info.horizon);
        info.sampled = sample(a, uniform_grid(info.horizon, static_cast<std::size_t>(int_or(ps, "N", 65536))));
    } else if (info.kind == "constant") {
        const double c = num_or(ps, "value", 0.0);
        std::vector<double> t = uniform_grid(info.horizon, static_cast<std::size_t>(int_or(ps, "N", 1024)));
        std::vector<double> v(t.size(), c);
        info.sampled = SampledPath(std::move(t), std::move(v));
    } else if (info.kind == "csv") {
        info.sampled = read_path_csv(str_or(ps, "file", ""));
        info.horizon = info.sampled->horizon();
    } else {
        bad("unknown path kind '" + info.kind + "'");
    }
    return info;
}

const SampledPath& sampled(PathInfo& info) {
    if (!info.sampled) {
        if (info.kind == "cantor-bump") info.sampled = cantor_bump_exact_samples(info.p, info.depth);
        else bad("path has no sampled form");
    }
    return *info.sampled;
}

struct Levels {
    enum class Kind { path, cantor_grid, bump_lattice };
    Kind kind = Kind::path;
    PartitionSequence seq;
    std::vector<int> ns;
    std::vector<int> labels() const { return kind == Kind::path ? seq.labels() : ns; }
};

std::pair<int, int> parse_range(const std::string& s) {
    const auto dots = s.find("..");
    int lo = 0, hi = 0;
    try {
        lo = std::stoi(s.substr(0, dots));
        hi = dots == std::string::npos ? lo : std::stoi(s.substr(dots + 2));
    } catch (const std::exception&) {
        bad("malformed level range '" + s + "'");
    }
    if (lo < 0 || hi < lo) bad("level range '" + s + "' must satisfy 0 <= nmin <= nmax");
    return {lo, hi};
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    return out;
}

double parse_double(const std::string& s) {
    double v = 0;
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) bad("malformed number '" + s + "'");
    return v;
}

Levels make_levels(const json& cfg, const RunOptions& opt, PathInfo& path) {
    std::string spec = opt.partition ? *opt.partition : str_or(cfg, "partition", "");
    if (spec.empty()) bad("missing 'partition'");
    const auto parts = split(spec, ':');
    Levels L;
    auto range = [&](const std::string& s) {
        auto [a, b] = parse_range(s);
        if (a > b || a < 0) bad("empty level range in '" + spec + "'");
        for (int n = a; n <= b; ++n) L.ns.push_back(n);
    };
    if (parts[0] == "badic") {
        if (parts.size() != 3) bad("expected badic:<b>:<nmin>..<nmax>, got '" + spec + "'");
        auto [a, b] = parse_range(parts[2]);
        L.seq = badic_sequence(sampled(path).horizon(), std::stoi(parts[1]), a, b);
    } else if (parts[0] == "grid") {
        if (parts.size() < 2 || parts.size() > 3) bad("expected grid:[increment|lattice:]<d1>,<d2>,..., got '" + spec + "'");
        CrossingMode mode = CrossingMode::increment;
        std::string list = parts.back();
        if (parts.size() == 3) {
            if (parts[1] == "increment") mode = CrossingMode::increment;
            else if (parts[1] == "lattice") mode = CrossingMode::grid;
            else bad("unknown grid mode '" + parts[1] + "'");
        }
        std::vector<double> deltas;
        for (const auto& d : split(list, ',')) deltas.push_back(parse_double(d));
        L.seq = grid_sequence(sampled(path), deltas, mode);
    } else if (parts[0] == "cantor-grid") {
        if (path.kind != "cantor-distance") bad("cantor-grid partitions need a cantor-distance path");
        if (parts.size() != 2) bad("expected cantor-grid:<nmin>..<nmax>");
        L.kind = Levels::Kind::cantor_grid;
        range(parts[1]);
    } else if (parts[0] == "bump-lattice") {
        if (path.kind != "cantor-bump") bad("bump-lattice partitions need a cantor-bump path");
        if (parts.size() != 2) bad("expected bump-lattice:<nmin>..<nmax>");
        L.kind = Levels::Kind::bump_lattice;
        range(parts[1]);
    } else {
        bad("unknown partition kind '" + parts[0] + "'");
    }
    return L;
}

PhiSpec make_phi(const std::string& s) {
    if (s == "log-modulated") return PhiSpec::log_modulated();
    if (s.rfind("power:", 0) == 0) return PhiSpec::power(parse_double(s.substr(6)));
    bad("unknown gauge '" + s + "' (power:<p> or log-modulated)");
}

struct FunctionSpec {
    std::string name;
    json params;
};

FunctionSpec function_spec(const json& cfg) {
    if (!cfg.contains("function")) bad("missing 'function'");
    const json& f = cfg["function"];
    FunctionSpec s;
    s.name = str_or(f, "name", "");
    if (s.name.empty()) bad("function needs a 'name'");
    s.params = f.contains("params") ? f["params"] : json::object();
    return s;
}

json verdict_json(const CompensatedResult& r) {
    return json{{"levels", r.levels},   {"lhs", r.lhs},
                {"threshold", r.threshold}, {"last_residual", r.residuals.empty() ? 0.0 : r.residuals.back()},
                {"converged", r.converged}, {"verdict", r.converged ? "converged" : "not-converged"}};
}

double horizon_of(PathInfo& path, const Levels& L) {
    return L.kind == Levels::Kind::path ? sampled(path).horizon() : 1.0;
}

// ---------------------------------------------------------------- experiments

struct Context {
    const json& cfg;
    const RunOptions& opt;
    fs::path out;
    RunResult result;

    void csv(const std::string& name, const std::string& header, const std::vector<std::vector<double>>& rows) {
        write_csv(out / name, header, rows);
        result.outputs.push_back(name);
    }
    bool required() const { return cfg.value("require_convergence", false); }
};

void generate_path(Context& c) {
    PathInfo path = make_path(c.cfg);
    const SampledPath& s = sampled(path);
    std::vector<std::vector<double>> rows;
    rows.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) rows.push_back({s.times()[i], s.values()[i]});
    c.csv("path.csv", "t,value", rows);
    c.result.verdict = json{{"points", s.size()}};
}

void variation(Context& c) {
    PathInfo path = make_path(c.cfg);
    Levels L = make_levels(c.cfg, c.opt, path);
    const double T = horizon_of(path, L);
    std::vector<double> ev = num_list(c.cfg, "eval_times");
    if (ev.empty()) ev.push_back(T);
    std::vector<std::vector<double>> sums;
    std::vector<int> labels = L.labels();
    if (L.kind == Levels::Kind::path) {
        VariationTable tab;
        if (c.cfg.contains("phi")) {
            tab = phi_variation_table(sampled(path), L.seq, make_phi(str_or(c.cfg, "phi", "")), ev, c.opt.jobs);
        } else {
            tab = variation_table(sampled(path), L.seq, num(c.cfg, "p"), ev, c.opt.jobs);
        }
        sums = tab.partial_sums;
    } else if (L.kind == Levels::Kind::cantor_grid) {
        if (c.cfg.contains("phi")) bad("cantor-grid levels support power gauges only");
        sums.resize(L.ns.size());
        parallel_for(L.ns.size(), c.opt.jobs,
                     [&](std::size_t i) { sums[i] = cantor_grid_partial_sums(path.p, L.ns[i], ev); });
    } else {
        if (ev.size() != 1 || ev[0] != 1.0) bad("bump-lattice levels are aggregated; eval_times must be [1]");
        const double p = num_or(c.cfg, "p", path.p);
        for (int n : L.ns) {
            const LatticeStepCounts k = bump_lebesgue_step_counts(path.p, n);
            CompensatedSum s;
            const double w = std::pow(k.delta, p);
            for (std::size_t i = 0; i < k.up.size(); ++i) s += (k.up[i] + k.down[i]) * w;
            sums.push_back({s.value()});
        }
    }
    std::vector<std::vector<double>> rows;
    for (std::size_t l = 0; l < sums.size(); ++l) {
        double gap = 0.0;
        if (l + 1 < sums.size())
            for (std::size_t e = 0; e < ev.size(); ++e) gap = std::max(gap, std::abs(sums[l + 1][e] - sums[l][e]));
        for (std::size_t e = 0; e < ev.size(); ++e) rows.push_back({double(labels[l]), ev[e], sums[l][e], gap});
    }
    c.csv("variation.csv", "level,t,partial_sum,cauchy_gap", rows);
    c.result.verdict = json{{"levels", labels}, {"finest", sums.empty() ? std::vector<double>{} : sums.back()}};
}

VerdictRule rule_of(const json& cfg) {
    VerdictRule r;
    r.tolerance = num_or(cfg, "tolerance", r.tolerance);
    r.min_levels = int_or(cfg, "min_levels", r.min_levels);
    return r;
}

// Compensated sums along the special level families.
std::vector<double> special_sums(const SmoothFn& f, const Levels& L, PathInfo& path, const FracOrder& P, double t,
                                 double s_t, int jobs) {
    std::vector<double> sums(L.ns.size());
    parallel_for(L.ns.size(), jobs, [&](std::size_t i) {
        if (L.kind == Levels::Kind::cantor_grid) {
            CompensatedAccumulator acc(f, P.m, t, s_t);
            for_each_cantor_grid_step(path.p, L.ns[i], [&](const Step& st) { acc(st); });
            sums[i] = acc.value();
        } else {
            sums[i] = lattice_compensated_sum(f, bump_lebesgue_step_counts(path.p, L.ns[i]), P.m);
        }
    });
    return sums;
}

double special_value(PathInfo& path, const Levels& L, double t) {
    if (L.kind == Levels::Kind::cantor_grid) return AnalyticPath::cantor_distance(path.p, 36)(t);
    return AnalyticPath::cantor_bump(path.p, L.ns.back())(t);
}

void write_compensated(Context& c, const CompensatedResult& r) {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < r.sums.size(); ++i)
        rows.push_back({double(r.levels[i]), r.sums[i], r.residuals[i], i < r.gaps.size() ? r.gaps[i] : 0.0});
    c.csv("ito_check.csv", "level,Ln,residual,gap", rows);
    c.result.verdict = verdict_json(r);
    if (c.required() && !r.converged) c.result.status = 2;
}

void ito(Context& c) {
    PathInfo path = make_path(c.cfg);
    Levels L = make_levels(c.cfg, c.opt, path);
    const FracOrder P(num(c.cfg, "p"));
    const FunctionSpec fs_ = function_spec(c.cfg);
    const double T = horizon_of(path, L);
    const double t = num_or(c.cfg, "t", T);
    const VerdictRule rule = rule_of(c.cfg);
    if (L.kind == Levels::Kind::path) {
        if (is_time_dependent(fs_.name)) {
            const TimeBundle f = time_function_registry(fs_.name, fs_.params, P.m);
            write_compensated(c, ito_check_time(f, sampled(path), L.seq, P, t, rule, c.opt.jobs));
        } else {
            const SmoothFn f = function_registry(fs_.name, fs_.params, P.m + 1);
            write_compensated(c, ito_check(f, sampled(path), L.seq, P, t, rule, c.opt.jobs));
        }
        return;
    }
    if (L.kind == Levels::Kind::bump_lattice && t != 1.0) bad("bump-lattice levels are aggregated; t must be 1");
    const SmoothFn f = function_registry(fs_.name, fs_.params, P.m + 1);
    const double s_t = special_value(path, L, t);
    std::vector<double> sums = special_sums(f, L, path, P, t, s_t, c.opt.jobs);
    const double ft = f(s_t);
    write_compensated(c, make_compensated_result(L.ns, std::move(sums), ft - f(0.0), ft, rule));
}

void remainder(Context& c) {
    PathInfo path = make_path(c.cfg);
    Levels L = make_levels(c.cfg, c.opt, path);
    const FracOrder P(num(c.cfg, "p"));
    if (!P.fractional()) bad("remainder needs a fractional p");
    const FunctionSpec fs_ = function_spec(c.cfg);
    const SmoothFn f = function_registry(fs_.name, fs_.params, P.m + 1);
    const auto G = circle_kernel(f, P);
    const double tol = num_or(c.cfg, "tolerance", 2e-2);
    std::vector<int> labels = L.labels();
    std::vector<double> Ln(labels.size()), R(labels.size());
    double lhs = 0.0;
    std::vector<std::vector<double>> atom_rows;
    if (L.kind == Levels::Kind::bump_lattice) {
        const std::string atoms = str_or(c.cfg, "atoms", "closed-form");
        Ln = special_sums(f, L, path, P, 1.0, 0.0, c.opt.jobs);
        if (atoms == "closed-form") {
            const int k_max = int_or(c.cfg, "k_max", 1 << std::min(L.ns.back(), 20));
            const auto table = nonzero_atom_weights(P.p, k_max);
            AtomMeasure mu;
            mu.time_resolved = false;
            for (const auto& aw : table) {
                mu.atoms.push_back(Atom{1.0, aw.angle, aw.weight});
                atom_rows.push_back({aw.angle, aw.weight});
            }
            std::fill(R.begin(), R.end(), remainder_integral(mu, G, 1.0));
        } else if (atoms == "empirical") {
            for (std::size_t i = 0; i < L.ns.size(); ++i) {
                const AtomMeasure mu = lattice_quotient_measure(bump_lebesgue_step_counts(path.p, L.ns[i]), P.p);
                R[i] = remainder_integral(mu, G, 1.0);
                if (i + 1 == L.ns.size())
                    for (const Atom& a : mu.atoms) atom_rows.push_back({a.x, a.w});
            }
        } else {
            bad("'atoms' must be 'closed-form' or 'empirical'");
        }
        lhs = f(0.0) - f(0.0);
    } else if (L.kind == Levels::Kind::path) {
        const SampledPath& s = sampled(path);
        const double t = num_or(c.cfg, "t", s.horizon());
        parallel_for(L.seq.size(), c.opt.jobs, [&](std::size_t i) {
            Ln[i] = compensated_sum(f, s, L.seq[i], P, t);
            R[i] = remainder_integral(quotient_measure(s, L.seq[i], P.p), G, t);
        });
        const AtomMeasure mu = quotient_measure(s, L.seq[L.seq.size() - 1], P.p);
        for (const Atom& a : mu.atoms)
            if (a.t <= t) atom_rows.push_back({a.x, a.w});
        lhs = f(s(t)) - f(s(0.0));
    } else {
        bad("remainder supports path partitions and bump-lattice levels");
    }
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < labels.size(); ++i) rows.push_back({double(labels[i]), Ln[i], R[i], lhs - Ln[i] - R[i]});
    c.csv("remainder.csv", "level,Ln,remainder,residual", rows);
    c.csv("atoms.csv", "angle,weight", atom_rows);
    const double last = lhs - Ln.back() - R.back();
    const bool ok = std::abs(last) < tol;
    c.result.verdict = json{{"lhs", lhs},
                            {"finest_Ln", Ln.back()},
                            {"finest_remainder", R.back()},
                            {"last_residual", last},
                            {"tolerance", tol},
                            {"converged", ok},
                            {"verdict", ok ? "converged" : "not-converged"}};
    if (c.required() && !ok) c.result.status = 2;
}

void frac_deriv(Context& c) {
    const FracOrder P(num(c.cfg, "p"));
    const FunctionSpec fs_ = function_spec(c.cfg);
    const double a = num_or(c.cfg, "a", 0.0);
    const std::string op = str_or(c.cfg, "operator", "caputo");
    std::vector<double> xs = num_list(c.cfg, "xs");
    std::vector<std::vector<double>> rows;
    if (op == "local") {
        const SmoothFn f = function_registry(fs_.name, fs_.params, P.m + 1);
        const LocalDerivative d = local_frac_derivative(f, a, P, LocalMode::caputo, xs);
        for (std::size_t i = 0; i < d.steps.size(); ++i) rows.push_back({d.steps[i], d.values[i]});
        c.result.verdict = json{{"limit", d.limit}, {"converged", d.converged},
                                {"verdict", d.converged ? "converged" : "no-limit"}};
        if (c.required() && !d.converged) c.result.status = 2;
    } else if (op == "taylor") {
        const SmoothFn f = function_registry(fs_.name, fs_.params, P.m + 1);
        const TaylorCheck tc = frac_taylor_check(f, a, P, xs);
        for (std::size_t i = 0; i < tc.xs.size(); ++i) rows.push_back({tc.xs[i], tc.remainders[i]});
        c.result.verdict = json{{"coefficient", tc.coefficient},
                                {"coefficient_converged", tc.coefficient_converged},
                                {"slope", std::isfinite(tc.slope) ? json(tc.slope) : json("inf")}};
    } else {
        if (xs.empty()) bad("'xs' is required");
        std::function<double(double)> eval;
        if (op == "caputo") {
            const std::string m = str_or(c.cfg, "method", "automatic");
            CaputoMethod method = CaputoMethod::automatic;
            if (m == "quadrature") method = CaputoMethod::quadrature;
            else if (m == "differentiated") method = CaputoMethod::differentiated;
            else if (m != "automatic") bad("unknown method '" + m + "'");
            const SmoothFn f = function_registry(fs_.name, fs_.params, P.m + 1);
            eval = [f, a, P, method](double x) { return caputo(f, a, P, x, method); };
        } else if (op == "rl-integral") {
            const SmoothFn f = function_registry(fs_.name, fs_.params, 1);
            eval = [f, a, P](double x) { return rl_integral(f, a, P.p, x); };
        } else if (op == "caputo-power") {
            if (fs_.name != "abs-power") bad("caputo-power needs the abs-power function");
            const double k = num_or(fs_.params, "k", 0.0), q = num(fs_.params, "p");
            eval = [a, k, q, P](double x) { return caputo_power(a, k, q, P, x); };
        } else {
            bad("unknown operator '" + op + "'");
        }
        for (double x : xs) rows.push_back({x, eval(x)});
        c.result.verdict = json{{"points", xs.size()}};
    }
    c.csv("frac_deriv.csv", "x,value", rows);
}

void isometry(Context& c) {
    PathInfo path = make_path(c.cfg);
    Levels L = make_levels(c.cfg, c.opt, path);
    if (L.kind != Levels::Kind::path) bad("isometry needs path partitions");
    const SampledPath& s = sampled(path);
    const FunctionSpec fs_ = function_spec(c.cfg);
    IsometrySpec spec;
    spec.phi = c.cfg.contains("phi") ? make_phi(str_or(c.cfg, "phi", "")) : PhiSpec::power(num(c.cfg, "p"));
    spec.p_phi = p_phi_estimate(spec.phi).value;
    if (c.cfg.contains("holder_alpha") && c.cfg["holder_alpha"].is_number()) {
        spec.holder_alpha = c.cfg["holder_alpha"].get<double>();
        spec.holder_source = "user";
    } else if (std::isfinite(path.H)) {
        spec.holder_alpha = path.H - 0.01;
        spec.holder_source = "fbm-hurst-margin";
    } else {
        spec.holder_alpha = holder_exponent_estimate(s);
        spec.holder_source = "regression";
    }
    spec.functional = FunctionalBundle::cylinder(function_registry(fs_.name, fs_.params, 2), 1);
    const double tol = num_or(c.cfg, "tolerance", 0.1);
    const IsometryReport r = isometry_check(spec, s, L.seq, num_or(c.cfg, "t", s.horizon()), tol, c.opt.jobs);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < r.levels.size(); ++i) rows.push_back({double(r.levels[i]), r.lhs[i], r.rhs[i], r.rel_error[i]});
    c.csv("isometry.csv", "level,lhs,rhs,rel_error", rows);
    c.result.verdict = json{{"holder_alpha", r.gate.alpha},   {"holder_source", r.holder_source},
                            {"gate_threshold", r.gate.threshold}, {"p_phi", spec.p_phi},
                            {"last_rel_error", r.rel_error.back()}, {"converged", r.converged},
                            {"verdict", r.converged ? "converged" : "not-converged"}};
    if (c.required() && !r.converged) c.result.status = 2;
}

void write_manifest(const fs::path& out, const json& cfg, const RunResult& r, double seconds, int jobs) {
    json m = {{"schema_version", 1},
              {"experiment", cfg["experiment"]},
              {"config_hash", config_hash(cfg)},
              {"library_version", library_version},
              {"wall_time_seconds", seconds},
              {"jobs", jobs},
              {"outputs", r.outputs},
              {"status", r.status == 0 ? "ok" : "not-converged"},
              {"verdict", r.verdict}};
    std::ofstream os(out / "manifest.json", std::ios::binary);
    os << m.dump(2) << '\n';
}

RunResult reproduce_all(const json& cfg, const RunOptions& opt, const fs::path& out) {
    const fs::path dir = opt.fixtures ? *opt.fixtures : str_or(cfg, "fixtures", "fixtures");
    if (!fs::is_directory(dir)) bad("fixture directory '" + dir.string() + "' not found");
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    RunResult all;
    all.output_dir = out.string();
    json summary = json::array();
    for (const fs::path& f : files) {
        json sub = load_config(f.string());
        if (sub["experiment"] == "reproduce-all") continue;
        RunOptions o = opt;
        o.partition.reset();
        o.output_dir = (out / f.stem()).string();
        int status = 1;
        std::string message;
        try {
            RunResult r = run(sub, o);
            status = r.status;
            for (const auto& name : r.outputs) all.outputs.push_back((f.stem() / fs::path(name)).string());
        } catch (const std::exception& e) {
            message = e.what();
        }
        summary.push_back(json{{"fixture", f.filename().string()}, {"status", status}, {"error", message}});
        if (status == 1) all.status = 1;
        else if (status == 2 && all.status == 0) all.status = 2;
    }
    all.verdict = json{{"fixtures", summary}};
    return all;
}

}  // namespace

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

std::string config_hash(const json& config) {
    json c = config;
    c.erase("output_dir");
    c.erase("jobs");
    const std::string s = c.dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string("fnv1a64:") + buf;
}

json parse_config(const std::string& text, const std::string& source) {
    json cfg;
    try {
        cfg = json::parse(text);
    } catch (const json::parse_error& e) {
        bad(source + ":" + std::to_string(line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1)) +
            ": malformed JSON (" + e.what() + ")");
    }
    validate(cfg, Where{text, source});
    return cfg;
}

json load_config(const std::string& file) {
    std::ifstream is(file, std::ios::binary);
    if (!is) bad("cannot read config '" + file + "'");
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str(), file);
}

RunResult run(const json& config, const RunOptions& options) {
    static const std::string empty;
    validate(config, Where{empty, "<config>"});
    const auto start = std::chrono::steady_clock::now();
    const fs::path out = options.output_dir ? *options.output_dir : str_or(config, "output_dir", "out");
    fs::create_directories(out);
    RunOptions opt = options;
    if (config.contains("jobs") && opt.jobs == 1) opt.jobs = int_or(config, "jobs", 1);
    const std::string kind = config["experiment"];
    RunResult result;
    if (kind == "reproduce-all") {
        result = reproduce_all(config, opt, out);
    } else {
        Context c{config, opt, out, {}};
        c.result.output_dir = out.string();
        try {
            if (kind == "generate-path") generate_path(c);
            else if (kind == "variation") variation(c);
            else if (kind == "ito-check") ito(c);
            else if (kind == "remainder") remainder(c);
            else if (kind == "frac-deriv") frac_deriv(c);
            else if (kind == "isometry") isometry(c);
        } catch (const nlohmann::json::exception& e) {
            bad(std::string("config value of the wrong type (") + e.what() + ")");
        }
        result = std::move(c.result);
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(out, config, result, seconds, opt.jobs);
    return result;
}

int main_entry(int argc, char** argv) {
    CLI::App app{"Experiments on pathwise fractional calculus along partition sequences"};
    app.require_subcommand(1);
    RunOptions opt;
    std::string config_file, partition, output, fixtures;
    std::optional<double> p, t, tolerance;
    std::optional<std::uint64_t> seed;
    bool require = false;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* c = sub->add_option("-c,--config", config_file, "JSON experiment config");
        if (needs_config) c->required();
        sub->add_option("-o,--output", output, "output directory (overrides output_dir)");
        sub->add_option("-j,--jobs", opt.jobs, "worker threads for levels")->check(CLI::PositiveNumber);
    };
    std::vector<CLI::App*> subs;
    for (const char* name : {"generate-path", "variation", "ito-check", "frac-deriv", "remainder", "isometry"}) {
        CLI::App* sub = app.add_subcommand(name, std::string("run a ") + name + " experiment");
        add_common(sub, true);
        sub->add_option("--partition", partition, "badic:<b>:<nmin>..<nmax> | grid:[increment|lattice:]<d1>,... | "
                                                  "cantor-grid:<n>..<m> | bump-lattice:<n>..<m>");
        sub->add_option("--p", p, "order p");
        sub->add_option("--t", t, "evaluation time");
        sub->add_option("--tolerance", tolerance, "verdict tolerance");
        sub->add_option("--seed", seed, "seed for random paths");
        sub->add_flag("--require-convergence", require, "exit 2 when the verdict is not-converged");
        subs.push_back(sub);
    }
    CLI::App* runsub = app.add_subcommand("run", "run the experiment named in the config");
    add_common(runsub, true);
    subs.push_back(runsub);
    CLI::App* rep = app.add_subcommand("reproduce-all", "run every fixtures/*.json config");
    add_common(rep, false);
    rep->add_option("--fixtures", fixtures, "fixture directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    try {
        CLI::App* sub = app.get_subcommands().front();
        const std::string name = sub->get_name();
        json cfg = config_file.empty() ? json{{"experiment", "reproduce-all"}} : load_config(config_file);
        if (name != "run") {
            if (cfg.contains("experiment") && cfg["experiment"] != name)
                bad(config_file + ": experiment is '" + cfg["experiment"].get<std::string>() + "' but the subcommand is '" +
                    name + "'");
            cfg["experiment"] = name;
        }
        if (p) cfg["p"] = *p;
        if (t) cfg["t"] = *t;
        if (tolerance) cfg["tolerance"] = *tolerance;
        if (seed) {
            cfg["seed"] = *seed;
            if (cfg.contains("path") && cfg["path"].is_object()) cfg["path"]["seed"] = *seed;
        }
        if (require) cfg["require_convergence"] = true;
        if (!partition.empty()) opt.partition = partition;
        if (!output.empty()) opt.output_dir = output;
        if (!fixtures.empty()) opt.fixtures = fixtures;
        const RunResult r = run(cfg, opt);
        std::cout << r.verdict.dump() << '\n';
        return r.status;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace fraclab::cli
