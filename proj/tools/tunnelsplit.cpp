// tunnelsplit — config-driven scenario runner for the scattering splitter.
//
// Subcommands: params | decompose | times | larmor | hartman
// Flags:       --config PATH, --out PATH, --format {csv,json}, --threads N
// Env:         TUNNELSPLIT_THREADS as fallback for --threads.
// Exit codes:  0 ok, 2 usage/config error, 3 numeric failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tunnelsplit/tunnelsplit.hpp"

using nlohmann::json;
using namespace tunnelsplit;

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/*! Scenario description: defaults cover the canonical rectangular case. */
struct RunConfig {
    // units
    Units units;
    // barrier
    std::string barrier_kind = "rectangular";  // rectangular | cos2 | sampled
    double V0 = 1.0, a = 10.0, d = 1.0;
    std::string samples_path;
    // packet
    double k0 = 1.0, l0 = 8.0;
    // grids
    std::size_t n_k = 96, n_x = 2048;
    double padding = 15.0;
    // scans
    double k_min = 0.2, k_max = 3.0;
    std::size_t scan_n = 100;
    double d_min = 6.0, d_max = 12.0;
    std::size_t scan_n_d = 25;
    // decompose inputs
    double dec_k = 1.0;
    std::optional<double> dec_t;
    // tolerances
    double tol_ode = 1e-10, tol_quad = 1e-8, eps_k = 1e-8, eps_t = 1e-10;
    // larmor
    std::vector<double> omega_list{1e-3, 5e-4};
    // output
    std::string format = "csv";
    int precision = 17;
    std::string out_path;

    void validate() const {
        if (!(tol_ode > 0.0 && tol_quad > 0.0 && eps_k > 0.0 && eps_t > 0.0))
            throw ConfigError("config: all tolerances must be > 0");
        if (n_k < 64) throw ConfigError("config: grid.n_k must be >= 64");
        if (n_x < 256) throw ConfigError("config: grid.n_x must be >= 256");
        if (format != "csv" && format != "json")
            throw ConfigError("config: output.format must be csv or json");
        if (precision < 1 || precision > 17)
            throw ConfigError("config: output.precision must be in [1, 17]");
    }
};

std::vector<double> parse_double_list(const std::string& s, const char* what) {
    std::vector<double> out;
    std::string item;
    std::stringstream ss(s);
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos]))) ++pos;
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError(std::string("config: bad number '") + item + "' in " + what);
        }
    }
    if (out.empty()) throw ConfigError(std::string("config: empty list for ") + what);
    return out;
}

/*! key = value file with '#' comments; unknown keys are errors (typo guard). */
RunConfig load_config(const std::string& path) {
    RunConfig c;
    if (path.empty()) return c;
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return (b == std::string::npos) ? std::string() : s.substr(b, e - b + 1);
        };
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config:" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        auto num = [&](double lo = -1e300) {
            try {
                std::size_t pos = 0;
                const double v = std::stod(val, &pos);
                if (pos != val.size()) throw std::invalid_argument(val);
                if (!(v >= lo)) throw std::out_of_range(val);
                return v;
            } catch (const std::exception&) {
                throw ConfigError("config:" + std::to_string(lineno) + ": bad value for " + key);
            }
        };
        auto idx = [&]() { return static_cast<std::size_t>(num(0.0) + 0.5); };

        if (key == "units.hbar") c.units.hbar = num(1e-300);
        else if (key == "units.mass") c.units.mass = num(1e-300);
        else if (key == "barrier.kind") c.barrier_kind = val;
        else if (key == "barrier.V0") c.V0 = num(0.0);
        else if (key == "barrier.a") c.a = num(1e-300);
        else if (key == "barrier.d") c.d = num(1e-300);
        else if (key == "barrier.samples") c.samples_path = val;
        else if (key == "packet.k0") c.k0 = num(1e-300);
        else if (key == "packet.l0") c.l0 = num(1e-300);
        else if (key == "grid.n_k") c.n_k = idx();
        else if (key == "grid.n_x") c.n_x = idx();
        else if (key == "grid.padding") c.padding = num(0.0);
        else if (key == "scan.k_min") c.k_min = num(1e-300);
        else if (key == "scan.k_max") c.k_max = num(1e-300);
        else if (key == "scan.n") c.scan_n = idx();
        else if (key == "scan.d_min") c.d_min = num(1e-300);
        else if (key == "scan.d_max") c.d_max = num(1e-300);
        else if (key == "scan.n_d") c.scan_n_d = idx();
        else if (key == "decompose.k") c.dec_k = num(1e-300);
        else if (key == "decompose.t") c.dec_t = num();
        else if (key == "tol.ode") c.tol_ode = num(1e-300);
        else if (key == "tol.quadrature") c.tol_quad = num(1e-300);
        else if (key == "tol.eps_k") c.eps_k = num(1e-300);
        else if (key == "tol.eps_t") c.eps_t = num(1e-300);
        else if (key == "larmor.omega_list") c.omega_list = parse_double_list(val, key.c_str());
        else if (key == "output.format") c.format = val;
        else if (key == "output.precision") c.precision = static_cast<int>(idx());
        else if (key == "output.path") c.out_path = val;
        else
            throw ConfigError("config:" + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    return c;
}

Barrier make_barrier(const RunConfig& c) {
    if (c.barrier_kind == "rectangular") return Barrier::rectangular(c.V0, c.a, c.d);
    if (c.barrier_kind == "cos2") return Barrier::cos2(c.V0, c.a, c.d);
    if (c.barrier_kind == "sampled") {
        std::ifstream in(c.samples_path);
        if (!in)
            throw ConfigError("config: cannot open samples file '" + c.samples_path + "'");
        std::vector<double> v;
        double x;
        while (in >> x) v.push_back(x);
        return Barrier::sampled(c.a, c.d, std::move(v));
    }
    throw ConfigError("config: unknown barrier.kind '" + c.barrier_kind + "'");
}

OdeSettings ode_settings(const RunConfig& c) {
    OdeSettings s;
    s.rel_tol = c.tol_ode;
    s.abs_tol = 1e-2 * c.tol_ode;
    return s;
}

/*! Numeric table with fixed column set, rendered as CSV or JSON. */
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

std::string render_csv(const Table& t, int precision) {
    std::string out;
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
        out += t.columns[c];
        out += (c + 1 < t.columns.size()) ? "," : "";
    }
    out += '\n';
    char buf[40];
    for (const auto& row : t.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            // precision counts significant digits; %e takes digits after the point
            std::snprintf(buf, sizeof buf, "%.*e", precision - 1, row[c]);
            out += buf;
            out += (c + 1 < row.size()) ? "," : "";
        }
        out += '\n';
    }
    return out;
}

std::string render_json(const Table& t) {
    json j;
    j["columns"] = t.columns;
    j["rows"] = t.rows;
    return j.dump(2) + "\n";
}

void write_output(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::fputs(text.c_str(), stdout);
        return;
    }
    std::ofstream out(path, std::ios::binary);  // binary: LF endings everywhere
    if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
    out << text;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    if (n < 2 || !(hi > lo))
        throw ConfigError("config: scan range needs n >= 2 and max > min");
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

// ---------------------------------------------------------------- commands

int cmd_params(const RunConfig& c, unsigned threads) {
    const Barrier bar = make_barrier(c);
    const auto ks = linspace(c.k_min, c.k_max, c.scan_n);
    Table t;
    t.columns = {"k", "E", "T", "R", "J", "F"};
    t.rows.assign(ks.size(), {});
    const auto ode = ode_settings(c);
    parallel_for(ks.size(), threads, [&](std::size_t i) {
        const auto s = solve_stationary(bar, ks[i], c.units, ode);
        t.rows[i] = {ks[i], energy_of(ks[i], c.units),
                     s.params.T, s.params.R, s.params.J, s.params.F};
    });
    write_output(c.format == "csv" ? render_csv(t, c.precision) : render_json(t), c.out_path);
    return 0;
}

int cmd_decompose(const RunConfig& c, unsigned threads) {
    const Barrier bar = make_barrier(c);
    Table t;
    t.columns = {"x", "re_psi_full", "im_psi_full", "re_psi_tr", "im_psi_tr",
                 "re_psi_ref", "im_psi_ref", "flux_tr", "flux_ref"};
    if (!c.dec_t) {
        // stationary mode at fixed k
        const auto s = solve_stationary(bar, c.dec_k, c.units, ode_settings(c));
        const auto x = default_xgrid(bar, c.padding, c.n_x);
        const auto dec = decompose_on_grid(s, x);
        t.rows.reserve(x.size());
        for (std::size_t i = 0; i < x.size(); ++i)
            t.rows.push_back({x[i], dec.psi_full[i].real(), dec.psi_full[i].imag(),
                              dec.psi_tr[i].real(), dec.psi_tr[i].imag(),
                              dec.psi_ref[i].real(), dec.psi_ref[i].imag(),
                              dec.flux_tr[i], dec.flux_ref[i]});
    } else {
        // packet snapshot at fixed t
        GaussianSpec spec{c.k0, c.l0};
        Packet pk(bar, spec, c.units, c.n_k, c.eps_k, ode_settings(c), threads);
        const auto x = default_xgrid(bar, c.padding, c.n_x);
        const auto full = pk.evolve(Kind::full, *c.dec_t, x, true);
        const auto tr = pk.evolve(Kind::tr, *c.dec_t, x, true);
        const auto ref = pk.evolve(Kind::ref, *c.dec_t, x, true);
        const double hm = c.units.hbar / c.units.mass;
        t.rows.reserve(x.size());
        for (std::size_t i = 0; i < x.size(); ++i)
            t.rows.push_back(
                {x[i], full.psi[i].real(), full.psi[i].imag(), tr.psi[i].real(),
                 tr.psi[i].imag(), ref.psi[i].real(), ref.psi[i].imag(),
                 hm * std::imag(std::conj(tr.psi[i]) * tr.dpsi[i]),
                 hm * std::imag(std::conj(ref.psi[i]) * ref.dpsi[i])});
    }
    write_output(c.format == "csv" ? render_csv(t, c.precision) : render_json(t), c.out_path);
    return 0;
}

int cmd_times(const RunConfig& c, unsigned threads) {
    const Barrier bar = make_barrier(c);
    const auto ks = linspace(c.k_min, c.k_max, c.scan_n);
    Table t;
    t.columns = {"k", "tau_dwell_tr", "tau_dwell_ref", "tau_0", "tau_z",
                 "tau_smith", "tau_bohm", "tau_phase"};
    t.rows.assign(ks.size(), {});
    const auto ode = ode_settings(c);
    parallel_for(ks.size(), threads, [&](std::size_t i) {
        const auto ct = compute_times(bar, ks[i], c.units, ode, c.tol_quad);
        t.rows[i] = {ct.k, ct.tau_dwell_tr, ct.tau_dwell_ref, ct.tau_0,
                     ct.tau_z, ct.tau_smith, ct.tau_bohm, ct.tau_phase};
    });
    write_output(c.format == "csv" ? render_csv(t, c.precision) : render_json(t), c.out_path);

    // packet-level summary: both the time-integral and spectral routes
    GaussianSpec spec{c.k0, c.l0};
    Packet pk(bar, spec, c.units, c.n_k, c.eps_k, ode, threads);
    json summary;
    summary["T_avg"] = pk.T_avg();
    summary["R_avg"] = pk.R_avg();
    summary["tau_larmor_tr_spectral"] = pk.larmor_time_spectral(Kind::tr);
    summary["tau_larmor_ref_spectral"] = pk.larmor_time_spectral(Kind::ref);
    summary["tau_larmor_tr_timeintegral"] = pk.larmor_time_timeintegral(Kind::tr, c.eps_t);
    summary["tau_larmor_ref_timeintegral"] = pk.larmor_time_timeintegral(Kind::ref, c.eps_t);
    const std::string text = summary.dump(2) + "\n";
    if (c.out_path.empty())
        std::fputs(text.c_str(), stderr);
    else
        write_output(text, c.out_path + ".summary.json");
    return 0;
}

int cmd_hartman(const RunConfig& c, unsigned threads) {
    const RunConfig base = c;
    const auto ds = linspace(c.d_min, c.d_max, c.scan_n_d);
    Table t;
    t.columns = {"d", "tau_dwell_tr", "tau_dwell_ref", "tau_smith", "tau_bohm",
                 "tau_phase"};
    t.rows.assign(ds.size(), {});
    const auto ode = ode_settings(c);
    parallel_for(ds.size(), threads, [&](std::size_t i) {
        RunConfig ci = base;
        ci.d = ds[i];
        const Barrier bar = make_barrier(ci);
        const auto ct = compute_times(bar, c.k0, c.units, ode, c.tol_quad);
        t.rows[i] = {ds[i], ct.tau_dwell_tr, ct.tau_dwell_ref, ct.tau_smith,
                     ct.tau_bohm, ct.tau_phase};
    });
    write_output(c.format == "csv" ? render_csv(t, c.precision) : render_json(t), c.out_path);
    return 0;
}

json angles_to_json(const SpinAngles& a) {
    return json{{"Sx", a.Sx},       {"Sy", a.Sy},   {"Sz", a.Sz},
                {"theta", a.theta}, {"phi", a.phi}, {"N", a.N}};
}

/*! General two-point omega->0 extrapolation for an O(omega^2) error term. */
double extrapolate2(double w1, double f1, double w2, double f2) {
    const double den = w1 * w1 - w2 * w2;
    if (std::abs(den) < 1e-300) return f2;
    return (w1 * w1 * f2 - w2 * w2 * f1) / den;
}

int cmd_larmor(const RunConfig& c, unsigned threads) {
    const Barrier bar = make_barrier(c);
    GaussianSpec spec{c.k0, c.l0};
    const auto ode = ode_settings(c);

    Packet scalar(bar, spec, c.units, c.n_k, c.eps_k, ode, threads);
    const double sp_tr = scalar.larmor_time_spectral(Kind::tr);
    const double sp_ref = scalar.larmor_time_spectral(Kind::ref);

    json series = json::array();
    std::vector<std::pair<double, double>> prec_tr, prec_ref;
    for (double w : c.omega_list) {
        if (!(w > 0.0)) throw ConfigError("config: larmor.omega_list entries must be > 0");
        SpinorPacket sp(bar, spec, w, c.units, c.n_k, c.eps_k, ode, threads);
        const double dtr = sp.accumulated_phase(Kind::tr) / w;
        const double dref = sp.accumulated_phase(Kind::ref) / w;
        prec_tr.emplace_back(w, dtr);
        prec_ref.emplace_back(w, dref);
        json rec;
        rec["omega"] = w;
        rec["birth_tr"] = angles_to_json(sp.birth_angles(Kind::tr));
        rec["birth_ref"] = angles_to_json(sp.birth_angles(Kind::ref));
        rec["final_tr"] = angles_to_json(sp.final_angles(Kind::tr));
        rec["final_ref"] = angles_to_json(sp.final_angles(Kind::ref));
        rec["dphi_tr_over_omega"] = dtr;
        rec["dphi_ref_over_omega"] = dref;
        series.push_back(std::move(rec));
    }

    // omega -> 0 extrapolation from the two smallest field strengths
    auto smallest_two = [](std::vector<std::pair<double, double>> v) {
        std::sort(v.begin(), v.end());
        if (v.size() == 1) return std::pair{v[0], v[0]};
        return std::pair{v[1], v[0]};  // (larger w, smaller w)
    };
    const auto [t1, t0] = smallest_two(prec_tr);
    const auto [r1, r0] = smallest_two(prec_ref);
    const double prec_tr0 = (prec_tr.size() > 1)
                                ? extrapolate2(t1.first, t1.second, t0.first, t0.second)
                                : t0.second;
    const double prec_ref0 = (prec_ref.size() > 1)
                                 ? extrapolate2(r1.first, r1.second, r0.first, r0.second)
                                 : r0.second;

    const double ti_tr = scalar.larmor_time_timeintegral(Kind::tr, c.eps_t);
    const double ti_ref = scalar.larmor_time_timeintegral(Kind::ref, c.eps_t);

    auto within = [](double x, double ref) { return std::abs(x - ref) <= 0.01 * std::abs(ref); };
    json report;
    report["omega_series"] = std::move(series);
    report["tau_larmor_tr_spectral"] = sp_tr;
    report["tau_larmor_ref_spectral"] = sp_ref;
    report["tau_larmor_tr_timeintegral"] = ti_tr;
    report["tau_larmor_ref_timeintegral"] = ti_ref;
    report["tau_larmor_tr_precession"] = prec_tr0;
    report["tau_larmor_ref_precession"] = prec_ref0;
    report["pass_tr_timeintegral_vs_spectral"] = within(ti_tr, sp_tr);
    report["pass_ref_timeintegral_vs_spectral"] = within(ti_ref, sp_ref);
    report["pass_tr_precession_vs_spectral"] = within(prec_tr0, sp_tr);
    report["pass_ref_precession_vs_spectral"] = within(prec_ref0, sp_ref);

    write_output(report.dump(2) + "\n", c.out_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tunnelsplit: transmission/reflection decomposition of 1D "
                 "scattering and the associated tunneling times"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out_path, format;
    int threads = 0;
    app.add_option("--config", config_path, "key = value config file");
    app.add_option("--out", out_path, "output file (default: stdout)");
    app.add_option("--format", format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--threads", threads, "worker threads (env TUNNELSPLIT_THREADS)")
        ->check(CLI::NonNegativeNumber);

    auto* sub_params = app.add_subcommand("params", "tunneling parameter scan (k,E,T,R,J,F)");
    auto* sub_dec = app.add_subcommand("decompose", "sub-process wave functions on a grid");
    double dec_k = 0.0, dec_t = 0.0;
    auto* opt_k = sub_dec->add_option("--k", dec_k, "stationary mode at this wavenumber");
    auto* opt_t = sub_dec->add_option("--t", dec_t, "packet snapshot at this time");
    auto* sub_times = app.add_subcommand("times", "characteristic time scan + packet summary");
    auto* sub_larmor = app.add_subcommand("larmor", "spin-precession study (JSON report)");
    auto* sub_hartman = app.add_subcommand("hartman", "width scan of the time scales");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        RunConfig cfg = load_config(config_path);
        if (!out_path.empty()) cfg.out_path = out_path;
        if (!format.empty()) cfg.format = format;
        if (*opt_k && *opt_t)
            throw ConfigError("decompose: --k and --t are mutually exclusive");
        if (*opt_k) {
            cfg.dec_k = dec_k;
            cfg.dec_t.reset();
        }
        if (*opt_t) cfg.dec_t = dec_t;
        cfg.validate();
        const unsigned nthreads = resolve_threads(threads > 0 ? static_cast<unsigned>(threads) : 0);

        if (*sub_params) return cmd_params(cfg, nthreads);
        if (*sub_dec) return cmd_decompose(cfg, nthreads);
        if (*sub_times) return cmd_times(cfg, nthreads);
        if (*sub_larmor) return cmd_larmor(cfg, nthreads);
        if (*sub_hartman) return cmd_hartman(cfg, nthreads);
        std::fprintf(stderr, "error: no subcommand\n");
        return 2;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return 3;
    }
}
