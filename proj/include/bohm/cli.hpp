#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bohm/dynamics.hpp"
#include "bohm/model.hpp"

namespace bohm::cli
{

//! Malformed config text; the message carries the line number or key.
class ParseError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

//! Well-formed but invalid value; the message names the offending key.
class ValidationError : public std::invalid_argument
{
  public:
    ValidationError(std::string key, std::string const& what)
        : std::invalid_argument(key + ": " + what), key_(std::move(key))
    {
    }
    std::string const& key() const { return key_; }

  private:
    std::string key_;
};

struct RunConfig
{
    PhysicalParams params;
    double sigma_narrow = 0.05;
    double sigma_wide = 1.0;
    double center_cm = 0;
    double center_rel = 0;
    double wavenumber_cm = 0;
    double wavenumber_rel = 0;
    Correlation correlation = Correlation::SumNarrow;
    IntegratorConfig integrator;
    std::size_t samples = 100000;
    std::uint64_t seed = 42;
    std::vector<double> times;  // empty: {0, t_final/2, t_final}
    std::vector<double> widths{0.4, 0.2, 0.1, 0.05};
    std::size_t trajectories = 16;
    unsigned threads = 1;
    int continuity_points = 101;
    double continuity_h = 0;  // 0: sigma_min(t)/50
    double continuity_tau = 1e-3;
    int continuity_levels = 3;
    std::filesystem::path out;  // empty: <subcommand>.csv

    TwoParticleState state() const;
    std::vector<double> resolved_times() const;
};

using KeyValues = std::map<std::string, std::string>;

//! Every key accepted in config files, in documentation order.
std::vector<std::string> const& known_keys();

//! Parse "key = value" lines; '#' starts a comment. Throws ParseError.
KeyValues parse_key_values(std::istream& in, std::string const& source_name);

/*!
 * Resolve a RunConfig from defaults, an optional config file, and flag
 * overrides (applied last). Unknown keys are ParseErrors; bad values are
 * ValidationErrors.
 */
RunConfig parse_config(std::optional<std::filesystem::path> const& file,
                       KeyValues const& overrides);

RunConfig parse_config(KeyValues const& values);

void validate(RunConfig const& config);

//! All resolved settings as "key = value" lines, re-parseable by parse_config.
std::string describe(RunConfig const& config);

inline constexpr int exit_ok = 0;
inline constexpr int exit_validation = 2;
inline constexpr int exit_numerical = 3;

std::vector<std::string> const& subcommands();
std::string usage();

/*!
 * Run one experiment, write its CSV to config.out (plus a ".meta" sidecar with
 * the resolved configuration), and print a one-line summary to `summary`.
 * Returns one of the exit codes above.
 */
int run_subcommand(std::string const& name,
                   RunConfig const& config,
                   std::ostream& summary,
                   std::ostream& errors);

//! Format with 17 significant digits, the CSV number format.
std::string format_number(double value);

}  // namespace bohm::cli
