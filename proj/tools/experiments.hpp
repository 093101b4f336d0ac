#pragma once

#include "drivenbath/circuit.hpp"
#include "drivenbath/noise.hpp"

#include <cstdint>
#include <stdexcept>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace drivenbath::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Bad configuration file or flag combination (CLI exit code 1).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ExperimentKind {
    kernels,
    fdr_check,
    driven_fdr_check,
    gle_run,
    oracle_compare,
    nyquist,
    copper_estimate
};

const char* experiment_name(ExperimentKind kind);
ExperimentKind experiment_from_name(const std::string& name);

/// Resolved configuration for one run; parse_config fills defaults and
/// validates ranges, so every field is ready to use.
struct Config {
    ExperimentKind kind = ExperimentKind::copper_estimate;

    // [bath]
    std::string bath_source = "debye"; // "debye" | "modes-csv"
    std::optional<double> omega_debye; // rad/s; exclusive with debye_prefactor
    std::optional<double> debye_prefactor; // s^3
    double nu = 4e13;                  // rad/s
    double qbar = 1.602176634e-19;     // C
    double mbar = kCopperIonMass;      // kg
    std::size_t bath_modes = 64;
    std::string modes_csv;

    // [thermal]
    double temperature = 300.0; // K
    SamplingRegime regime = SamplingRegime::classical;

    // [field]
    double field_amplitude = 0.0; // V/m
    double field_omega = 1e12;    // rad/s

    // [grid]
    std::optional<double> t_max;            // s
    std::optional<double> dt;               // s
    std::optional<std::size_t> grid_points;

    // [ensemble]
    std::size_t realizations = 10000;

    // [particle]
    double particle_mass = 2e-25;            // kg
    double particle_charge = 1.602176634e-19; // C
    std::optional<double> drive_charge;      // C, defaults to charge
    std::string potential = "free";          // "free" | "harmonic"
    double omega0 = 0.0;                     // rad/s
    double x0 = 0.0;                         // m
    double v0 = 0.0;                         // m/s

    // [circuit]
    double carrier_charge = 1.602176634e-19; // C
    double carrier_density = 8.5e28;         // 1/m^3
    double cross_section = 1e-12;            // m^2
    double carrier_mass = 9.1093837015e-31;  // kg

    // [spectrum]
    double bandwidth = 1e12;      // Hz
    std::optional<double> tau_max; // s
    std::size_t tau_points = 33;

    // [check]
    double max_sigma = 4.0;
    double max_rel_deviation = 1e-6;

    // [run]
    std::optional<std::uint64_t> seed;
    std::string out_dir = "out";
    unsigned threads = 1;
};

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<unsigned> threads;
};

/// Parse `key = value` sections from the file (empty path = all defaults),
/// fold in the flag overrides, then validate for the given experiment.
/// Unknown keys are a hard error listing every offender; range violations
/// name the key and the bound.
Config parse_config(ExperimentKind kind, const std::string& config_path,
                    const Overrides& overrides = {});

/// Range and requirement checks; throws ConfigError naming the offending key.
void validate_config(const Config& config);

/// Canonical echo of a resolved config (defaults filled), used in the manifest.
std::string config_echo(const Config& config);

struct RunManifest {
    std::string experiment;
    std::string version;
    double duration_s = 0.0;
    std::string status; // "pass", "fail" (threshold check missed), "n/a"
    std::vector<std::pair<std::string, std::string>> notes;
    std::vector<std::pair<std::string, std::string>> checksums; // file -> fnv1a64
    std::string echo;
};

/// Execute the experiment: writes its CSV outputs and manifest.txt under
/// config.out_dir and returns the manifest. Outputs are a pure function of
/// (config, seed, version); rethrows module errors after removing partial
/// outputs. status == "fail" means a check experiment exceeded its threshold.
RunManifest run_experiment(const Config& config);

/// FNV-1a 64 over a file's bytes, hex-encoded (manifest checksum).
std::string file_checksum(const std::string& path);

} // namespace drivenbath::cli
