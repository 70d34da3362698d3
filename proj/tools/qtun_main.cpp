// Command-line front end: deterministic CSV/JSON output for the transmitted
// density evolution, pole tables, delay reports, parameter scans, the
// critical opacity, and a numerical self-test.

#include <CLI11.hpp>

#include <chrono>
#include <complex>
#include <ctime>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qtun/analysis.hpp"
#include "qtun/barrier.hpp"
#include "qtun/dynamics.hpp"
#include "qtun/faddeeva.hpp"
#include "qtun/io.hpp"
#include "qtun/resonances.hpp"
#include "qtun/units.hpp"

using json = nlohmann::ordered_json;

namespace {

struct RunConfig {
    qtun::BarrierSpec spec;      // defaults are the Fig. 1 parameters
    double x0 = 5.0;             // nm
    double tmin = 0.05;          // fs
    double tmax = 60.0;          // fs
    int nt = 1200;
    std::string grid = "linear";
    int npoles = 60;
    double tol = 1e-10;
    bool raw = false;            // densities not divided by |T_k|^2
    std::string format = "csv";
    std::string out;             // empty -> stdout
    bool deterministic = false;
    // dimensionless direct mode for `delay`
    std::optional<double> alpha;
    std::optional<double> u;
};

void add_common_options(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--V0", cfg.spec.V0, "barrier height [eV]")->capture_default_str();
    cmd->add_option("--L", cfg.spec.L, "barrier width [nm]")->capture_default_str();
    cmd->add_option("--E", cfg.spec.E, "incidence energy [eV]")->capture_default_str();
    cmd->add_option("--mass-ratio", cfg.spec.mass_ratio, "m/m_e")->capture_default_str();
    cmd->add_option("--x0", cfg.x0, "observation point [nm]")->capture_default_str();
    cmd->add_option("--tmin", cfg.tmin, "window start [fs]")->capture_default_str();
    cmd->add_option("--tmax", cfg.tmax, "window end [fs]")->capture_default_str();
    cmd->add_option("--nt", cfg.nt, "time grid points")->capture_default_str();
    cmd->add_option("--grid", cfg.grid, "time grid type")
        ->check(CLI::IsMember({"linear", "log", "hybrid"}))->capture_default_str();
    cmd->add_option("--npoles", cfg.npoles, "resonance poles in the sum")->capture_default_str();
    cmd->add_option("--tol", cfg.tol, "resonant-sum relative tolerance")->capture_default_str();
    auto* raw = cmd->add_flag("--raw", cfg.raw, "densities without the |T_k|^2 normalization");
    cmd->add_flag("--normalize", "densities divided by |T_k|^2 (default)")->excludes(raw);
    cmd->add_option("--format", cfg.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    cmd->add_option("--out", cfg.out, "output path (default stdout)");
    cmd->add_flag("--deterministic", cfg.deterministic,
                  "omit the timestamp header so identical runs are byte-identical");
    cmd->set_config("--config", "", "plain-text key=value config file");
}

std::vector<std::string> config_header(const RunConfig& cfg) {
    std::vector<std::string> h;
    h.push_back("qtun run configuration (resolved)");
    if (!cfg.deterministic) {
        const std::time_t now = std::time(nullptr);
        char buf[64];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        h.push_back(std::string("timestamp = ") + buf);
    }
    h.push_back("V0_eV = " + qtun::fmt17(cfg.spec.V0));
    h.push_back("L_nm = " + qtun::fmt17(cfg.spec.L));
    h.push_back("E_eV = " + qtun::fmt17(cfg.spec.E));
    h.push_back("mass_ratio = " + qtun::fmt17(cfg.spec.mass_ratio));
    h.push_back("x0_nm = " + qtun::fmt17(cfg.x0));
    h.push_back("tmin_fs = " + qtun::fmt17(cfg.tmin));
    h.push_back("tmax_fs = " + qtun::fmt17(cfg.tmax));
    h.push_back("nt = " + std::to_string(cfg.nt));
    h.push_back("grid = " + cfg.grid);
    h.push_back("npoles = " + std::to_string(cfg.npoles));
    h.push_back("tol = " + qtun::fmt17(cfg.tol));
    h.push_back(std::string("normalize = ") + (cfg.raw ? "0" : "1"));
    return h;
}

json config_json(const RunConfig& cfg) {
    json j;
    j["V0_eV"] = cfg.spec.V0;
    j["L_nm"] = cfg.spec.L;
    j["E_eV"] = cfg.spec.E;
    j["mass_ratio"] = cfg.spec.mass_ratio;
    j["npoles"] = cfg.npoles;
    j["tol"] = cfg.tol;
    return j;
}

class Output {
  public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw std::runtime_error("cannot open output file: " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

  private:
    std::ofstream file_;
};

std::vector<double> make_grid(const RunConfig& cfg) {
    if (cfg.grid == "log") return qtun::log_grid(cfg.tmin, cfg.tmax, cfg.nt);
    if (cfg.grid == "hybrid") return qtun::hybrid_grid(cfg.tmin, cfg.tmax, cfg.nt);
    return qtun::linear_grid(cfg.tmin, cfg.tmax, cfg.nt);
}

int cmd_evolve(const RunConfig& cfg) {
    const std::vector<qtun::ResonantMode> modes = qtun::resonant_modes(cfg.spec, cfg.npoles);
    const std::vector<double> grid = make_grid(cfg);
    const qtun::TimeSeries ts =
        qtun::time_series(cfg.spec, modes, cfg.x0, grid, cfg.tol, !cfg.raw);
    Output out(cfg.out);
    if (cfg.format == "json") {
        json j;
        j["schema"] = 1;
        j["config"] = config_json(cfg);
        j["x0_nm"] = cfg.x0;
        json rows = json::array();
        for (std::size_t i = 0; i < ts.rows.size(); ++i) {
            const qtun::WaveParts& w = ts.rows[i];
            rows.push_back({{"t_fs", ts.t[i]},
                            {"dens_total", w.dens_total},
                            {"dens_q", w.dens_q},
                            {"dens_r", w.dens_r},
                            {"interference", w.interference},
                            {"dens_free", ts.free_density[i]},
                            {"converged", w.converged}});
        }
        j["rows"] = rows;
        out.stream() << j.dump(2) << "\n";
    } else {
        qtun::write_time_series_csv(out.stream(), ts, config_header(cfg));
    }
    return 0;
}

int cmd_poles(const RunConfig& cfg) {
    const std::vector<qtun::ResonantMode> modes = qtun::resonant_modes(cfg.spec, cfg.npoles);
    json j;
    j["schema"] = 1;
    j["config"] = config_json(cfg);
    json arr = json::array();
    for (const qtun::ResonantMode& m : modes) {
        arr.push_back({{"n", m.pole.n},
                       {"re_k", m.pole.k.real()},
                       {"im_k", m.pole.k.imag()},
                       {"eps_eV", m.pole.eps()},
                       {"gamma_eV", m.pole.gamma_width()},
                       {"re_u0", m.u0.real()},
                       {"im_u0", m.u0.imag()},
                       {"re_uL", m.uL.real()},
                       {"im_uL", m.uL.imag()}});
    }
    j["poles"] = arr;
    Output out(cfg.out);
    out.stream() << j.dump(2) << "\n";
    return 0;
}

int cmd_delay(const RunConfig& cfg) {
    json j;
    j["schema"] = 1;
    const double ac = qtun::critical_opacity();
    if (cfg.alpha || cfg.u) {
        if (!cfg.alpha || !cfg.u)
            throw CLI::ValidationError("--alpha and --u must be given together");
        j["mode"] = "dimensionless";
        j["alpha"] = *cfg.alpha;
        j["u"] = *cfg.u;
        j["t_phi_over_t0"] = qtun::delay_time_dimensionless(*cfg.alpha, *cfg.u);
        j["alpha_c"] = ac;
        j["opaque_vs_critical"] = *cfg.alpha > ac ? "alpha>alpha_c" : "alpha<=alpha_c";
    } else {
        const qtun::DelayReport r = qtun::delay_report(cfg.spec);
        const qtun::DerivedScales s = qtun::derive_scales(cfg.spec);
        j["mode"] = "barrier";
        j["config"] = config_json(cfg);
        j["t_phi_fs"] = r.t_phi;
        j["t_phi_over_t0"] = r.t_phi_dimensionless;
        j["tau_H_fs"] = r.tau_H;
        j["hartman_asymptote_fs"] = r.hartman_asymptote;
        j["sign_class"] = r.sign_class == qtun::DelaySign::positive_delay ? "positive-delay"
                         : r.sign_class == qtun::DelaySign::negative_delay ? "negative-delay"
                                                                           : "transition";
        j["alpha"] = s.alpha;
        j["alpha_c"] = ac;
        j["opaque_vs_critical"] = s.alpha > ac ? "alpha>alpha_c" : "alpha<=alpha_c";
    }
    Output out(cfg.out);
    out.stream() << j.dump(2) << "\n";
    return 0;
}

int cmd_scan(const RunConfig& cfg, const std::string& axis_name, double amin, double amax,
             int an, const std::string& observable_name) {
    qtun::ScanAxis axis;
    if (axis_name == "L") axis = qtun::ScanAxis::L;
    else if (axis_name == "V0") axis = qtun::ScanAxis::V0;
    else if (axis_name == "E") axis = qtun::ScanAxis::E;
    else axis = qtun::ScanAxis::x0;
    qtun::Observable obs;
    if (observable_name == "t_phi") obs = qtun::Observable::t_phi;
    else if (observable_name == "tau_H") obs = qtun::Observable::tau_H;
    else if (observable_name == "delta_t") obs = qtun::Observable::delta_t;
    else if (observable_name == "delta_H") obs = qtun::Observable::delta_H;
    else if (observable_name == "t_p") obs = qtun::Observable::t_p;
    else obs = qtun::Observable::classification;

    qtun::ScanOptions opt;
    opt.x0 = cfg.x0;
    opt.tol = cfg.tol;
    opt.npoles = cfg.npoles;
    opt.npts = cfg.nt;
    const std::vector<double> grid = qtun::linear_grid(amin, amax, an);
    const std::vector<qtun::ScanRow> rows = qtun::scan(cfg.spec, axis, grid, obs, opt);
    std::vector<std::string> header = config_header(cfg);
    header.push_back("axis = " + axis_name);
    header.push_back("observable = " + observable_name);
    Output out(cfg.out);
    if (cfg.format == "json") {
        json j;
        j["schema"] = 1;
        j["config"] = config_json(cfg);
        j["axis"] = axis_name;
        j["observable"] = observable_name;
        json arr = json::array();
        for (const qtun::ScanRow& r : rows)
            arr.push_back({{axis_name, r.axis_value},
                           {"value", r.value},
                           {"label", r.label},
                           {"status", r.status}});
        j["rows"] = arr;
        out.stream() << j.dump(2) << "\n";
    } else {
        qtun::write_scan_csv(out.stream(), rows, axis_name, observable_name, header);
    }
    for (const qtun::ScanRow& r : rows)
        if (r.status != "ok") return 1;
    return 0;
}

int cmd_critical_opacity(bool verbose) {
    const double ac = qtun::critical_opacity();
    const double residual = std::cosh(2.0 * ac) - 2.0 / ac * std::sinh(2.0 * ac) - 1.0;
    std::cout << "alpha_c = " << qtun::fmt17(ac) << "\n";
    std::cout << "residual = " << qtun::fmt17(residual) << "\n";
    if (verbose) {
        auto lhs = [](double a) { return std::cosh(2.0 * a) - 2.0 / a * std::sinh(2.0 * a); };
        std::cout << "bracket: lhs(0.5) - 1 = " << qtun::fmt17(lhs(0.5) - 1.0)
                  << ", lhs(6) - 1 = " << qtun::fmt17(lhs(6.0) - 1.0) << "\n";
    }
    return 0;
}

struct FrozenW {
    double re_z, im_z, re_w, im_w;
};

// Reference values computed with a 40-digit independent evaluation of
// exp(-z^2) erfc(-iz); see tests/oracle for the full grid oracle.
constexpr FrozenW kFrozenW[] = {
    {0.0, 0.0, 1.0000000000000000, 0.0},
    {1.0, 0.0, 0.36787944117144232, 0.60715770584139373},
    {0.0, 1.0, 0.42758357615580700, 0.0},
    {0.5, 0.5, 0.53315670791217491, 0.23048823138445841},
    {-0.7, 0.3, 0.52019196897301512, -0.37768781961854664},
    {2.0, 0.0, 0.018315638888734180, 0.34002621706606620},
    {3.0, 4.0, 0.090933904194765342, 0.065592330527914278},
    {-5.0, 1.5, 0.032695600409316643, -0.10479961476880205},
    {6.5, 0.01, 0.00013858318517607457, 0.087864203243743553},
    {0.1, 8.0, 0.069974636708941339, 0.00086152301810834740},
    {12.5, 0.0, 1.3851193699226017e-68, 0.045281008466144417},
    {0.0, 15.0, 0.037529606388505766, 0.0},
    {-20.0, 2.0, 0.0028033131249322087, -0.027963489374117211},
    {25.0, 25.0, 0.011288299760601505, 0.011279272748929403},
    {1.5, -0.5, -0.17748955379745403, 0.60771285142520972},
    {-3.0, -2.0, -0.081339079928627360, -0.12108616246299845},
};

int cmd_selftest(const RunConfig& cfg, const std::string& dump_w_path) {
    int failures = 0;
    auto report = [&failures](const std::string& name, bool ok, const std::string& detail) {
        std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
        if (!ok) ++failures;
    };

    // Faddeeva spot values
    double worst = 0.0;
    for (const FrozenW& f : kFrozenW) {
        const std::complex<double> w = qtun::faddeeva_w({f.re_z, f.im_z});
        const std::complex<double> ref(f.re_w, f.im_w);
        worst = std::max(worst, std::abs(w - ref) / std::abs(ref));
    }
    report("faddeeva-spot-values", worst < 1e-12,
           "max relative error " + qtun::fmt17(worst) + " over " +
               std::to_string(std::size(kFrozenW)) + " frozen points");

    // unitarity grid
    const qtun::DerivedScales s = qtun::derive_scales(cfg.spec);
    double worst_uni = 0.0;
    for (int i = 1; i <= 100; ++i) {
        const double k = 2.0 * s.k0 * i / 100.0;
        const qtun::TransmissionData td = qtun::transmission(cfg.spec, k);
        worst_uni = std::max(worst_uni,
                             std::abs(std::norm(td.T) + std::norm(td.R) - 1.0));
    }
    report("unitarity-grid", worst_uni < 1e-12, "max ||T|^2+|R|^2-1| = " + qtun::fmt17(worst_uni));

    // density decomposition identity
    const std::vector<qtun::ResonantMode> modes = qtun::resonant_modes(cfg.spec, cfg.npoles);
    double worst_id = 0.0;
    for (double t : {1.0, 5.4, 20.0, 100.0}) {
        const qtun::WaveParts w = qtun::evaluate(cfg.spec, modes, 50.0, t, cfg.tol, true);
        worst_id = std::max(worst_id,
                            std::abs(w.dens_total - (w.dens_q + w.dens_r + w.interference)));
    }
    report("density-decomposition", worst_id < 1e-12, "max identity residual " + qtun::fmt17(worst_id));

    // initial-condition reconstruction
    const double T2 = qtun::transmission(cfg.spec, s.k).magnitude2;
    double worst_ic = 0.0;
    for (int j = 0; j <= 20; ++j) {
        const double x = cfg.spec.L + j;
        const qtun::WaveParts w = qtun::evaluate(cfg.spec, modes, x, 1e-4, cfg.tol, false);
        worst_ic = std::max(worst_ic, w.dens_total / T2);
    }
    report("initial-condition", worst_ic < 1e-4,
           "max |psi(x,1e-4 fs)|^2/|T_k|^2 = " + qtun::fmt17(worst_ic));

    if (!dump_w_path.empty()) {
        std::ofstream f(dump_w_path, std::ios::binary);
        f << "# (z, w(z)) grid for external cross-checking\n";
        f << "re_z,im_z,re_w,im_w\n";
        for (int ix = -12; ix <= 12; ++ix)
            for (int iy = -6; iy <= 12; ++iy) {
                const std::complex<double> z(ix * 0.8, iy * 0.8);
                const std::complex<double> w = qtun::faddeeva_w(z);
                f << qtun::fmt17(z.real()) << ',' << qtun::fmt17(z.imag()) << ','
                  << qtun::fmt17(w.real()) << ',' << qtun::fmt17(w.imag()) << "\n";
            }
        std::cout << "wrote w(z) grid to " << dump_w_path << "\n";
    }
    std::cout << (failures == 0 ? "selftest OK" : "selftest FAILED") << "\n";
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"time-dependent tunneling through a rectangular barrier: "
                 "exact transmitted densities, resonance poles, delay times"};
    app.require_subcommand(1);

    RunConfig cfg;

    auto* evolve = app.add_subcommand("evolve", "transmitted density time series at x0");
    add_common_options(evolve, cfg);

    auto* poles = app.add_subcommand("poles", "resonance pole/mode table (JSON)");
    add_common_options(poles, cfg);

    auto* delay = app.add_subcommand("delay", "delay-time report (JSON)");
    add_common_options(delay, cfg);
    double alpha_direct = 0.0, u_direct = 0.0;
    auto* aopt = delay->add_option("--alpha", alpha_direct, "dimensionless mode: opacity");
    auto* uopt = delay->add_option("--u", u_direct, "dimensionless mode: V0/E");

    auto* scanc = app.add_subcommand("scan", "sweep one axis and tabulate an observable");
    add_common_options(scanc, cfg);
    std::string axis = "L", observable = "t_phi";
    double amin = 0.5, amax = 18.0;
    int an = 36;
    scanc->add_option("--axis", axis, "scan axis")
        ->check(CLI::IsMember({"L", "V0", "E", "x0"}))->capture_default_str();
    scanc->add_option("--amin", amin, "axis start")->capture_default_str();
    scanc->add_option("--amax", amax, "axis end")->capture_default_str();
    scanc->add_option("--an", an, "axis points")->capture_default_str();
    scanc->add_option("--observable", observable, "observable")
        ->check(CLI::IsMember({"t_phi", "tau_H", "delta_t", "delta_H", "t_p", "classification"}))
        ->capture_default_str();

    auto* crit = app.add_subcommand("critical-opacity", "print the critical opacity");
    bool verbose = false;
    crit->add_flag("-v,--verbose", verbose, "also print the bracket endpoints");

    auto* selftest = app.add_subcommand("selftest", "run the built-in numerical checks");
    add_common_options(selftest, cfg);
    std::string dump_w_path;
    selftest->add_option("--dump-w", dump_w_path, "write a (z, w(z)) CSV grid to this path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*aopt) cfg.alpha = alpha_direct;
        if (*uopt) cfg.u = u_direct;
        if (evolve->parsed()) return cmd_evolve(cfg);
        if (poles->parsed()) return cmd_poles(cfg);
        if (delay->parsed()) return cmd_delay(cfg);
        if (scanc->parsed()) return cmd_scan(cfg, axis, amin, amax, an, observable);
        if (crit->parsed()) return cmd_critical_opacity(verbose);
        if (selftest->parsed()) return cmd_selftest(cfg, dump_w_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
