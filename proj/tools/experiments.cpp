#include "experiments.hpp"

#include "drivenbath/gle.hpp"
#include "drivenbath/parallel.hpp"
#include "drivenbath/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace drivenbath::cli {

namespace fs = std::filesystem;

const char* experiment_name(ExperimentKind kind) {
    switch (kind) {
    case ExperimentKind::kernels: return "kernels";
    case ExperimentKind::fdr_check: return "fdr-check";
    case ExperimentKind::driven_fdr_check: return "driven-fdr-check";
    case ExperimentKind::gle_run: return "gle-run";
    case ExperimentKind::oracle_compare: return "oracle-compare";
    case ExperimentKind::nyquist: return "nyquist";
    case ExperimentKind::copper_estimate: return "copper-estimate";
    }
    return "?";
}

ExperimentKind experiment_from_name(const std::string& name) {
    for (const ExperimentKind k :
         {ExperimentKind::kernels, ExperimentKind::fdr_check,
          ExperimentKind::driven_fdr_check, ExperimentKind::gle_run,
          ExperimentKind::oracle_compare, ExperimentKind::nyquist,
          ExperimentKind::copper_estimate})
        if (name == experiment_name(k)) return k;
    throw ConfigError("unknown experiment kind '" + name + "'");
}

// ---------------------------------------------------------------------------
// config file parsing

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

/// Raw `[section] key = value` store tracking which entries were consumed.
class RawConfig {
public:
    static RawConfig from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file '" + path + "'");
        RawConfig raw;
        std::string line, section;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw ConfigError("config line " + std::to_string(line_no) +
                                      ": malformed section header '" + line + "'");
                section = trim(line.substr(1, line.size() - 2));
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": expected 'key = value', got '" + line + "'");
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (key.empty() || value.empty())
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": empty key or value in '" + line + "'");
            const std::string full = section + "." + key;
            if (raw.entries_.count(full))
                throw ConfigError("config: duplicate key '" + full + "'");
            raw.entries_[full] = value;
        }
        return raw;
    }

    std::optional<std::string> take(const std::string& section, const std::string& key) {
        const auto it = entries_.find(section + "." + key);
        if (it == entries_.end()) return std::nullopt;
        std::string value = it->second;
        entries_.erase(it);
        return value;
    }

    void reject_leftovers() const {
        if (entries_.empty()) return;
        std::string msg = "config: unknown keys:";
        for (const auto& [key, value] : entries_) msg += " '" + key + "'";
        throw ConfigError(msg);
    }

private:
    std::map<std::string, std::string> entries_;
};

double parse_double(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: " + key + " is not a number (got '" + text + "')");
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(text, &used);
        if (used != text.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: " + key + " is not a non-negative integer (got '" +
                          text + "')");
    }
}

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError("config: " + message);
}

void apply_overrides_unchecked(Config& config, const Overrides& overrides) {
    if (overrides.seed) config.seed = *overrides.seed;
    if (overrides.out_dir) config.out_dir = *overrides.out_dir;
    if (overrides.threads) config.threads = *overrides.threads;
}

} // namespace

Config parse_config(ExperimentKind kind, const std::string& config_path,
                    const Overrides& overrides) {
    Config c;
    c.kind = kind;
    if (config_path.empty()) {
        apply_overrides_unchecked(c, overrides);
        validate_config(c);
        return c;
    }

    RawConfig raw = RawConfig::from_file(config_path);

    if (const auto v = raw.take("experiment", "kind")) {
        if (experiment_from_name(*v) != kind)
            throw ConfigError("config: experiment.kind = '" + *v +
                              "' does not match the requested subcommand '" +
                              experiment_name(kind) + "'");
    }

    if (const auto v = raw.take("bath", "source")) c.bath_source = *v;
    if (const auto v = raw.take("bath", "omega_debye_rad_s"))
        c.omega_debye = parse_double("bath.omega_debye_rad_s", *v);
    if (const auto v = raw.take("bath", "prefactor_s3"))
        c.debye_prefactor = parse_double("bath.prefactor_s3", *v);
    if (const auto v = raw.take("bath", "nu_rad_s")) c.nu = parse_double("bath.nu_rad_s", *v);
    if (const auto v = raw.take("bath", "qbar_C")) c.qbar = parse_double("bath.qbar_C", *v);
    if (const auto v = raw.take("bath", "mbar_kg")) c.mbar = parse_double("bath.mbar_kg", *v);
    if (const auto v = raw.take("bath", "modes"))
        c.bath_modes = static_cast<std::size_t>(parse_u64("bath.modes", *v));
    if (const auto v = raw.take("bath", "modes_csv")) c.modes_csv = *v;

    if (const auto v = raw.take("thermal", "temperature_K"))
        c.temperature = parse_double("thermal.temperature_K", *v);
    if (const auto v = raw.take("thermal", "regime")) {
        if (*v == "classical") c.regime = SamplingRegime::classical;
        else if (*v == "quantum") c.regime = SamplingRegime::quantum_wigner;
        else throw ConfigError("config: thermal.regime must be 'classical' or 'quantum'");
    }

    if (const auto v = raw.take("field", "amplitude_V_per_m"))
        c.field_amplitude = parse_double("field.amplitude_V_per_m", *v);
    if (const auto v = raw.take("field", "omega_rad_s"))
        c.field_omega = parse_double("field.omega_rad_s", *v);

    if (const auto v = raw.take("grid", "t_max_s"))
        c.t_max = parse_double("grid.t_max_s", *v);
    if (const auto v = raw.take("grid", "dt_s")) c.dt = parse_double("grid.dt_s", *v);
    if (const auto v = raw.take("grid", "points"))
        c.grid_points = static_cast<std::size_t>(parse_u64("grid.points", *v));

    if (const auto v = raw.take("ensemble", "realizations"))
        c.realizations = static_cast<std::size_t>(parse_u64("ensemble.realizations", *v));

    if (const auto v = raw.take("particle", "mass_kg"))
        c.particle_mass = parse_double("particle.mass_kg", *v);
    if (const auto v = raw.take("particle", "charge_C"))
        c.particle_charge = parse_double("particle.charge_C", *v);
    if (const auto v = raw.take("particle", "drive_charge_C"))
        c.drive_charge = parse_double("particle.drive_charge_C", *v);
    if (const auto v = raw.take("particle", "potential")) c.potential = *v;
    if (const auto v = raw.take("particle", "omega0_rad_s"))
        c.omega0 = parse_double("particle.omega0_rad_s", *v);
    if (const auto v = raw.take("particle", "x0_m")) c.x0 = parse_double("particle.x0_m", *v);
    if (const auto v = raw.take("particle", "v0_m_s"))
        c.v0 = parse_double("particle.v0_m_s", *v);

    if (const auto v = raw.take("circuit", "carrier_charge_C"))
        c.carrier_charge = parse_double("circuit.carrier_charge_C", *v);
    if (const auto v = raw.take("circuit", "carrier_density_per_m3"))
        c.carrier_density = parse_double("circuit.carrier_density_per_m3", *v);
    if (const auto v = raw.take("circuit", "cross_section_m2"))
        c.cross_section = parse_double("circuit.cross_section_m2", *v);
    if (const auto v = raw.take("circuit", "carrier_mass_kg"))
        c.carrier_mass = parse_double("circuit.carrier_mass_kg", *v);

    if (const auto v = raw.take("spectrum", "bandwidth_Hz"))
        c.bandwidth = parse_double("spectrum.bandwidth_Hz", *v);
    if (const auto v = raw.take("spectrum", "tau_max_s"))
        c.tau_max = parse_double("spectrum.tau_max_s", *v);
    if (const auto v = raw.take("spectrum", "tau_points"))
        c.tau_points = static_cast<std::size_t>(parse_u64("spectrum.tau_points", *v));

    if (const auto v = raw.take("check", "max_sigma"))
        c.max_sigma = parse_double("check.max_sigma", *v);
    if (const auto v = raw.take("check", "max_rel_deviation"))
        c.max_rel_deviation = parse_double("check.max_rel_deviation", *v);

    if (const auto v = raw.take("run", "seed")) c.seed = parse_u64("run.seed", *v);
    if (const auto v = raw.take("run", "out")) c.out_dir = *v;
    if (const auto v = raw.take("run", "threads"))
        c.threads = static_cast<unsigned>(parse_u64("run.threads", *v));

    raw.reject_leftovers();
    apply_overrides_unchecked(c, overrides);
    validate_config(c);
    return c;
}

void validate_config(const Config& c) {
    require(c.bath_source == "debye" || c.bath_source == "modes-csv",
            "bath.source must be 'debye' or 'modes-csv'");
    if (c.bath_source == "modes-csv")
        require(!c.modes_csv.empty(), "bath.modes_csv is required when source = modes-csv");
    require(!(c.omega_debye && c.debye_prefactor),
            "bath.omega_debye_rad_s and bath.prefactor_s3 are mutually exclusive");
    if (c.omega_debye) require(*c.omega_debye > 0, "bath.omega_debye_rad_s must be > 0");
    if (c.debye_prefactor) require(*c.debye_prefactor > 0, "bath.prefactor_s3 must be > 0");
    require(c.nu >= 0, "bath.nu_rad_s must be >= 0");
    require(c.mbar > 0, "bath.mbar_kg must be > 0");
    require(c.bath_modes >= 1, "bath.modes must be >= 1");
    require(c.temperature >= 0, "thermal.temperature_K must be >= 0");
    require(c.field_amplitude >= 0, "field.amplitude_V_per_m must be >= 0");
    require(c.field_omega > 0, "field.omega_rad_s must be > 0");
    if (c.t_max) require(*c.t_max >= 0, "grid.t_max_s must be >= 0");
    if (c.dt) require(*c.dt > 0, "grid.dt_s must be > 0");
    if (c.grid_points) require(*c.grid_points >= 2, "grid.points must be >= 2");
    require(c.realizations >= 2, "ensemble.realizations must be >= 2");
    require(c.particle_mass > 0, "particle.mass_kg must be > 0");
    require(c.potential == "free" || c.potential == "harmonic",
            "particle.potential must be 'free' or 'harmonic'");
    require(c.omega0 >= 0, "particle.omega0_rad_s must be >= 0");
    require(c.bandwidth > 0, "spectrum.bandwidth_Hz must be > 0");
    if (c.tau_max) require(*c.tau_max >= 0, "spectrum.tau_max_s must be >= 0");
    require(c.tau_points >= 1, "spectrum.tau_points must be >= 1");
    require(c.max_sigma > 0, "check.max_sigma must be > 0");
    require(c.max_rel_deviation > 0, "check.max_rel_deviation must be > 0");
    require(c.threads >= 1, "run.threads must be >= 1");

    const bool stochastic = c.kind == ExperimentKind::fdr_check ||
                            c.kind == ExperimentKind::driven_fdr_check ||
                            c.kind == ExperimentKind::gle_run ||
                            c.kind == ExperimentKind::oracle_compare;
    if (stochastic)
        require(c.seed.has_value(),
                "run.seed is mandatory for stochastic experiments (set it in the file "
                "or pass --seed)");
    if (c.kind == ExperimentKind::driven_fdr_check)
        require(c.field_amplitude > 0,
                "field.amplitude_V_per_m must be > 0 for driven-fdr-check");
    if (c.regime == SamplingRegime::quantum_wigner)
        require(c.temperature >= 0, "thermal.temperature_K must be >= 0");
    else if (c.kind == ExperimentKind::fdr_check || c.kind == ExperimentKind::driven_fdr_check)
        require(c.temperature > 0,
                "thermal.temperature_K must be > 0 for classical correlation checks");
}

// ---------------------------------------------------------------------------
// canonical echo

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

std::string config_echo(const Config& c) {
    std::ostringstream out;
    out << "[experiment]\nkind = " << experiment_name(c.kind) << "\n";
    out << "[bath]\nsource = " << c.bath_source << "\n";
    if (c.omega_debye) out << "omega_debye_rad_s = " << fmt(*c.omega_debye) << "\n";
    if (c.debye_prefactor) out << "prefactor_s3 = " << fmt(*c.debye_prefactor) << "\n";
    if (!c.omega_debye && !c.debye_prefactor)
        out << "prefactor_s3 = " << fmt(6.72e-41) << "\n"; // default material
    out << "nu_rad_s = " << fmt(c.nu) << "\nqbar_C = " << fmt(c.qbar)
        << "\nmbar_kg = " << fmt(c.mbar) << "\nmodes = " << c.bath_modes << "\n";
    if (!c.modes_csv.empty()) out << "modes_csv = " << c.modes_csv << "\n";
    out << "[thermal]\ntemperature_K = " << fmt(c.temperature) << "\nregime = "
        << (c.regime == SamplingRegime::classical ? "classical" : "quantum") << "\n";
    out << "[field]\namplitude_V_per_m = " << fmt(c.field_amplitude)
        << "\nomega_rad_s = " << fmt(c.field_omega) << "\n";
    out << "[grid]\n";
    if (c.t_max) out << "t_max_s = " << fmt(*c.t_max) << "\n";
    if (c.dt) out << "dt_s = " << fmt(*c.dt) << "\n";
    if (c.grid_points) out << "points = " << *c.grid_points << "\n";
    out << "[ensemble]\nrealizations = " << c.realizations << "\n";
    out << "[particle]\nmass_kg = " << fmt(c.particle_mass)
        << "\ncharge_C = " << fmt(c.particle_charge) << "\n";
    if (c.drive_charge) out << "drive_charge_C = " << fmt(*c.drive_charge) << "\n";
    out << "potential = " << c.potential << "\nomega0_rad_s = " << fmt(c.omega0)
        << "\nx0_m = " << fmt(c.x0) << "\nv0_m_s = " << fmt(c.v0) << "\n";
    out << "[circuit]\ncarrier_charge_C = " << fmt(c.carrier_charge)
        << "\ncarrier_density_per_m3 = " << fmt(c.carrier_density)
        << "\ncross_section_m2 = " << fmt(c.cross_section)
        << "\ncarrier_mass_kg = " << fmt(c.carrier_mass) << "\n";
    out << "[spectrum]\nbandwidth_Hz = " << fmt(c.bandwidth) << "\n";
    if (c.tau_max) out << "tau_max_s = " << fmt(*c.tau_max) << "\n";
    out << "tau_points = " << c.tau_points << "\n";
    out << "[check]\nmax_sigma = " << fmt(c.max_sigma)
        << "\nmax_rel_deviation = " << fmt(c.max_rel_deviation) << "\n";
    out << "[run]\n";
    if (c.seed) out << "seed = " << *c.seed << "\n";
    out << "out = " << c.out_dir << "\nthreads = " << c.threads << "\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// run machinery

namespace {

std::uint64_t fnv1a64(const char* data, std::size_t size, std::uint64_t h) {
    for (std::size_t i = 0; i < size; ++i) {
        h ^= static_cast<unsigned char>(data[i]);
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace

std::string file_checksum(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("file_checksum: cannot open " + path);
    std::uint64_t h = 14695981039346656037ULL;
    char buf[65536];
    while (in) {
        in.read(buf, sizeof(buf));
        h = fnv1a64(buf, static_cast<std::size_t>(in.gcount()), h);
    }
    char hex[24];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

namespace {

struct RunContext {
    const Config& config;
    fs::path out_dir;
    RunManifest manifest;
    std::vector<std::string> outputs; // file names relative to out_dir

    explicit RunContext(const Config& c) : config(c), out_dir(c.out_dir) {
        manifest.experiment = experiment_name(c.kind);
        manifest.version = kVersion;
        manifest.status = "n/a";
        manifest.echo = config_echo(c);
        fs::create_directories(out_dir);
    }

    std::string path(const std::string& name) {
        outputs.push_back(name);
        return (out_dir / name).string();
    }

    void note(const std::string& key, double value) {
        manifest.notes.emplace_back(key, fmt(value));
    }
    void note(const std::string& key, const std::string& value) {
        manifest.notes.emplace_back(key, value);
    }

    void remove_partial_outputs() {
        std::error_code ec;
        for (const auto& name : outputs) fs::remove(out_dir / name, ec);
    }

    void finalize(double duration_s) {
        manifest.duration_s = duration_s;
        for (const auto& name : outputs)
            manifest.checksums.emplace_back(name, file_checksum((out_dir / name).string()));
        std::ofstream out(out_dir / "manifest.txt");
        if (!out) throw std::runtime_error("cannot write manifest in " + out_dir.string());
        out << "[manifest]\nexperiment = " << manifest.experiment
            << "\nversion = " << manifest.version << "\nstatus = " << manifest.status
            << "\nduration_s = " << fmt(manifest.duration_s) << "\n";
        for (const auto& [k, v] : manifest.notes) out << k << " = " << v << "\n";
        out << "[config]\n" << manifest.echo;
        out << "[checksums]\n";
        for (const auto& [k, v] : manifest.checksums) out << k << " = fnv1a:" << v << "\n";
    }
};

BathSpec make_bath(const Config& c) {
    if (c.bath_source == "modes-csv") return read_bath_csv(c.modes_csv);
    DebyeSpec spec = c.omega_debye
                         ? DebyeSpec::from_cutoff(*c.omega_debye, c.nu, c.qbar, c.mbar)
                         : DebyeSpec::from_prefactor(c.debye_prefactor.value_or(6.72e-41),
                                                     c.nu, c.qbar, c.mbar);
    return build_debye_bath(spec, c.bath_modes);
}

ThermalContext make_thermal(const Config& c) {
    return ThermalContext::kelvin(c.temperature);
}

std::vector<double> uniform_grid(double t_max, std::size_t points) {
    std::vector<double> grid(points);
    const double dt = points > 1 ? t_max / static_cast<double>(points - 1) : 0.0;
    for (std::size_t i = 0; i < points; ++i) grid[i] = static_cast<double>(i) * dt;
    return grid;
}

/// Ensemble of noise paths with counter-derived seeds, generated in fixed
/// blocks so the result is identical for every thread count.
std::vector<NoisePath> generate_paths(const BathSpec& bath, const ThermalContext& ctx,
                                      const Config& c, std::span<const double> grid,
                                      bool driven, const FieldProtocol& field) {
    std::vector<NoisePath> paths(c.realizations);
    parallel_blocks(c.realizations, 256, c.threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t r = lo; r < hi; ++r) {
            const auto init = sample_thermal_state(bath, ctx, c.regime,
                                                   stream_seed(*c.seed, r));
            NoisePath path = xi_path(bath, init, grid);
            if (driven) path = eta_path(path, bath, field, grid);
            paths[r] = std::move(path);
        }
    });
    return paths;
}

void write_text(RunContext& ctx, const std::string& name, const std::string& body) {
    std::ofstream out(ctx.path(name));
    if (!out) throw std::runtime_error("cannot write " + name);
    out << body;
}

// --------------------------- individual experiments ------------------------

void run_kernels(RunContext& ctx) {
    const Config& c = ctx.config;
    const BathSpec bath = make_bath(c);
    const double omega_max = bath.max_frequency();
    const double t_max = c.t_max.value_or(10.0 * 2.0 * M_PI / omega_max);
    const double dt = c.dt.value_or(M_PI / (10.0 * omega_max));
    const KernelTable table = kernel_table(bath, t_max, dt);

    write_bath_csv(bath, ctx.path("bath.csv"));
    std::ofstream out(ctx.path("kernels.csv"));
    out << "t_s,K_kg_s2,M_C\n";
    char buf[120];
    for (std::size_t i = 0; i < table.time.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", table.time[i],
                      table.memory[i], table.delay[i]);
        out << buf;
    }
    ctx.note("kernel_points", static_cast<double>(table.time.size()));
}

void run_fdr_check(RunContext& ctx) {
    const Config& c = ctx.config;
    const BathSpec bath = make_bath(c);
    const ThermalContext thermal = make_thermal(c);
    const double omega_max = bath.max_frequency();
    const std::size_t points = c.grid_points.value_or(32);
    const double t_max = c.t_max.value_or(10.0 * 2.0 * M_PI / omega_max);
    const std::vector<double> grid = uniform_grid(t_max, points);

    const auto paths = generate_paths(bath, thermal, c, grid, false, FieldProtocol::off());
    std::vector<std::size_t> lags(points);
    for (std::size_t i = 0; i < points; ++i) lags[i] = i;
    const CorrelationEstimate est =
        estimate_correlation(paths, lags, AveragingMode::ensemble, 0);

    const double two_kt = 2.0 * ThermalContext::k_boltzmann * c.temperature;
    double max_sigma = 0.0;
    std::ostringstream res;
    res << "lag_s,estimate,target,stderr,residual_sigma\n";
    for (std::size_t i = 0; i < est.lag.size(); ++i) {
        const double target = c.regime == SamplingRegime::classical
                                  ? two_kt * memory_kernel(bath, est.lag[i])
                                  : analytic_sym_correlation(bath, thermal, est.lag[i], 0.0);
        const double sigma = est.standard_error[i] > 0.0
                                 ? std::fabs(est.mean[i] - target) / est.standard_error[i]
                                 : (est.mean[i] == target ? 0.0 : INFINITY);
        max_sigma = std::max(max_sigma, sigma);
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.6g\n", est.lag[i],
                      est.mean[i], target, est.standard_error[i], sigma);
        res << buf;
    }
    write_correlation_csv(est, ctx.path("correlation.csv"));
    write_text(ctx, "fdr_residuals.csv", res.str());
    ctx.note("max_residual_sigma", max_sigma);
    ctx.note("sigma_bound", c.max_sigma);
    ctx.manifest.status = max_sigma <= c.max_sigma ? "pass" : "fail";
}

void run_driven_fdr_check(RunContext& ctx) {
    const Config& c = ctx.config;
    const BathSpec bath = make_bath(c);
    const ThermalContext thermal = make_thermal(c);
    const FieldProtocol field(c.field_amplitude, c.field_omega);
    const std::size_t points = c.grid_points.value_or(8);
    const double t_max = c.t_max.value_or(2.0 * 2.0 * M_PI / c.field_omega);
    const std::vector<double> grid = uniform_grid(t_max, points);

    const auto paths = generate_paths(bath, thermal, c, grid, true, field);
    std::vector<std::size_t> indices(points);
    for (std::size_t i = 0; i < points; ++i) indices[i] = i;
    const TwoTimeCorrelation corr = estimate_two_time(paths, indices, indices);
    const MeanPathEstimate mean = estimate_mean_path(paths);

    double max_sigma_corr = 0.0;
    std::ostringstream cc;
    cc << "t_s,t_prime_s,estimate,target,stderr,residual_sigma\n";
    for (std::size_t i = 0; i < points; ++i) {
        for (std::size_t j = 0; j < points; ++j) {
            const std::size_t k = i * points + j;
            const double target =
                analytic_eta_correlation(bath, thermal, field, grid[i], grid[j]);
            const double se = corr.standard_error[k];
            const double sigma = se > 0.0 ? std::fabs(corr.mean[k] - target) / se
                                          : (corr.mean[k] == target ? 0.0 : INFINITY);
            max_sigma_corr = std::max(max_sigma_corr, sigma);
            char buf[200];
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.6g\n",
                          grid[i], grid[j], corr.mean[k], target, se, sigma);
            cc << buf;
        }
    }

    double max_sigma_mean = 0.0;
    std::ostringstream mm;
    mm << "t_s,estimate,target,stderr,residual_sigma\n";
    for (std::size_t i = 0; i < points; ++i) {
        const double target = -drive_shift(bath, field, grid[i]);
        const double se = mean.standard_error[i];
        const double sigma = se > 0.0 ? std::fabs(mean.mean[i] - target) / se
                                      : (mean.mean[i] == target ? 0.0 : INFINITY);
        max_sigma_mean = std::max(max_sigma_mean, sigma);
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.6g\n", grid[i],
                      mean.mean[i], target, se, sigma);
        mm << buf;
    }

    write_text(ctx, "eta_correlation.csv", cc.str());
    write_text(ctx, "eta_mean.csv", mm.str());
    ctx.note("max_residual_sigma_correlation", max_sigma_corr);
    ctx.note("max_residual_sigma_mean", max_sigma_mean);
    ctx.note("sigma_bound", c.max_sigma);
    ctx.manifest.status =
        (max_sigma_corr <= c.max_sigma && max_sigma_mean <= c.max_sigma) ? "pass" : "fail";
}

Potential make_potential(const Config& c) {
    if (c.potential == "harmonic") return Potential::harmonic(c.omega0);
    return Potential::free_particle();
}

std::vector<double> integration_grid(const Config& c, const BathSpec& bath) {
    const double omega_max = bath.max_frequency();
    const double omega_min = bath.min_frequency();
    const double t_max = c.t_max.value_or(50.0 / omega_min);
    const double dt = c.dt.value_or(2.0 * M_PI / (100.0 * omega_max));
    const auto n = static_cast<std::size_t>(std::ceil(t_max / dt)) + 1;
    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i) grid[i] = static_cast<double>(i) * dt;
    return grid;
}

void run_gle(RunContext& ctx) {
    const Config& c = ctx.config;
    const BathSpec bath = make_bath(c);
    const ThermalContext thermal = make_thermal(c);
    const FieldProtocol field =
        c.field_amplitude > 0.0 ? FieldProtocol(c.field_amplitude, c.field_omega)
                                : FieldProtocol::off();
    const Potential potential = make_potential(c);
    const std::vector<double> grid = integration_grid(c, bath);

    const auto init = sample_thermal_state(bath, thermal, c.regime, stream_seed(*c.seed, 0));
    const auto xi = xi_path(bath, init, grid);
    const auto eta = eta_path(xi, bath, field, grid);
    const ParticleParams particle(c.particle_mass, c.particle_charge,
                                  c.drive_charge.value_or(c.particle_charge));
    const Trajectory traj =
        integrate_gle(particle, potential, bath, eta, field, grid, c.x0, c.v0);
    write_trajectory_csv(traj, ctx.path("trajectory.csv"));
    ctx.note("steps", static_cast<double>(grid.size()));
}

void run_oracle_compare(RunContext& ctx) {
    const Config& c = ctx.config;
    const BathSpec bath = make_bath(c);
    const ThermalContext thermal = make_thermal(c);
    const FieldProtocol field =
        c.field_amplitude > 0.0 ? FieldProtocol(c.field_amplitude, c.field_omega)
                                : FieldProtocol::off();
    const Potential potential = make_potential(c);
    const std::vector<double> grid = integration_grid(c, bath);

    const auto init = sample_thermal_state(bath, thermal, c.regime, stream_seed(*c.seed, 0));
    const auto xi = xi_path(bath, init, grid);
    const auto eta = eta_path(xi, bath, field, grid);

    // the reduced description is exactly equivalent with the renormalized
    // drive charge q + delta_q, counterterm on, and x(0) = 0
    const ParticleParams bare(c.particle_mass, c.particle_charge);
    const ParticleParams renorm(c.particle_mass, c.particle_charge,
                                c.particle_charge + delta_q(bath));
    const Trajectory gle =
        integrate_gle(renorm, potential, bath, eta, field, grid, 0.0, c.v0);
    const Trajectory micro = integrate_microscopic(bare, potential, bath, init, field,
                                                   grid, 0.0, c.v0);

    double max_abs = 0.0, max_dev = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        max_abs = std::max(max_abs, std::fabs(micro.position[i]));
        max_dev = std::max(max_dev, std::fabs(micro.position[i] - gle.position[i]));
    }
    const double rel = max_abs > 0.0 ? max_dev / max_abs : 0.0;

    write_trajectory_csv(gle, ctx.path("trajectory_gle.csv"));
    write_trajectory_csv(micro, ctx.path("trajectory_microscopic.csv"));
    ctx.note("max_rel_deviation", rel);
    ctx.note("deviation_bound", c.max_rel_deviation);
    ctx.manifest.status = rel <= c.max_rel_deviation ? "pass" : "fail";
}

void run_nyquist(RunContext& ctx) {
    const Config& c = ctx.config;
    const BathSpec bath = make_bath(c);
    const ThermalContext thermal = make_thermal(c);
    const FieldProtocol field =
        c.field_amplitude > 0.0 ? FieldProtocol(c.field_amplitude, c.field_omega)
                                : FieldProtocol::off();
    const CircuitParams circuit(c.carrier_charge, c.carrier_density, c.cross_section,
                                c.carrier_mass);
    const double tau_max = c.tau_max.value_or(2.0 * 2.0 * M_PI / c.field_omega);
    const std::vector<double> taus = uniform_grid(tau_max, c.tau_points);
    const SpectrumResult spectrum =
        noise_spectrum(bath, thermal, circuit, field, c.bandwidth, taus);
    write_spectrum_csv(spectrum, ctx.path("spectrum.csv"));

    if (c.field_amplitude > 0.0 && bath.debye_origin()) {
        // compare the quadrature driven term at tau = 0 with the closed form
        const SpectrumResult at0 = noise_spectrum(bath, thermal, circuit, field,
                                                  c.bandwidth, std::vector<double>{0.0});
        const DebyeSpec& spec = *bath.debye_origin();
        const MaterialPreset material{"config", spec.prefactor, spec.coupling,
                                      spec.charge_mean};
        const VoltsSquared closed = driven_bath_spectrum_closed(
            material, circuit, c.bandwidth, c.field_omega, 0.0, c.field_amplitude);
        if (closed.value != 0.0)
            ctx.note("driven_quadrature_to_closed_factor", at0.driven[0] / closed.value);
    }
}

void run_copper(RunContext& ctx) {
    const CopperReport report = copper_estimate();
    std::ostringstream body;
    print_report(report, body);
    write_text(ctx, "copper_report.txt", body.str());
    ctx.note("closed_form_tau0_V2", report.closed_form_tau0.value);
    ctx.note("window_closed_form_tau0_V2", report.window_closed_form_tau0.value);
    ctx.note("quadrature_tau0_V2", report.quadrature_tau0.value);
    ctx.note("quadrature_to_closed_factor", report.quadrature_to_closed_ratio);
    ctx.note("averaged_V2", report.averaged.value);
    ctx.note("rms_V", report.rms_volts);
    ctx.note("ratio_vs_reference_s", report.ratio_vs_reference_s);
    ctx.note("ratio_vs_reference_rms", report.ratio_vs_reference_rms);
}

} // namespace

RunManifest run_experiment(const Config& config) {
    RunContext ctx(config);
    const auto start = std::chrono::steady_clock::now();
    try {
        switch (config.kind) {
        case ExperimentKind::kernels: run_kernels(ctx); break;
        case ExperimentKind::fdr_check: run_fdr_check(ctx); break;
        case ExperimentKind::driven_fdr_check: run_driven_fdr_check(ctx); break;
        case ExperimentKind::gle_run: run_gle(ctx); break;
        case ExperimentKind::oracle_compare: run_oracle_compare(ctx); break;
        case ExperimentKind::nyquist: run_nyquist(ctx); break;
        case ExperimentKind::copper_estimate: run_copper(ctx); break;
        }
    } catch (...) {
        ctx.remove_partial_outputs();
        throw;
    }
    const auto stop = std::chrono::steady_clock::now();
    ctx.finalize(std::chrono::duration<double>(stop - start).count());
    return ctx.manifest;
}

} // namespace drivenbath::cli
