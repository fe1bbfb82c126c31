#include <algorithm>
#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <functional>
#include <sstream>

#include "bohm/cli.hpp"

namespace bohm::cli
{
namespace
{
std::string trim(std::string_view s)
{
    auto const first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    auto const last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

double to_double(std::string const& key, std::string const& text)
{
    double value = 0;
    auto const* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value))
        throw ValidationError(key, fmt::format("'{}' is not a finite number", text));
    return value;
}

std::uint64_t to_unsigned(std::string const& key, std::string const& text)
{
    std::uint64_t value = 0;
    auto const* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end)
        throw ValidationError(key, fmt::format("'{}' is not a non-negative integer", text));
    return value;
}

std::vector<double> to_list(std::string const& key, std::string const& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
    {
        std::string const value = trim(item);
        if (!value.empty())
            out.push_back(to_double(key, value));
    }
    return out;
}

std::string join(std::vector<double> const& values)
{
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i)
    {
        if (i > 0)
            out += ",";
        out += format_number(values[i]);
    }
    return out;
}

struct KeySpec
{
    std::string name;
    std::function<void(RunConfig&, std::string const&)> set;
    std::function<std::string(RunConfig const&)> get;
};

#define BOHM_DOUBLE_KEY(NAME, MEMBER)                                                 \
    KeySpec                                                                            \
    {                                                                                  \
        NAME, [](RunConfig& c, std::string const& v) { c.MEMBER = to_double(NAME, v); }, \
            [](RunConfig const& c) { return format_number(c.MEMBER); }                 \
    }

std::vector<KeySpec> const& key_specs()
{
    static std::vector<KeySpec> const specs = {
        BOHM_DOUBLE_KEY("hbar", params.hbar),
        BOHM_DOUBLE_KEY("mass", params.mass),
        BOHM_DOUBLE_KEY("sigma_narrow", sigma_narrow),
        BOHM_DOUBLE_KEY("sigma_wide", sigma_wide),
        BOHM_DOUBLE_KEY("center_cm", center_cm),
        BOHM_DOUBLE_KEY("center_rel", center_rel),
        BOHM_DOUBLE_KEY("wavenumber_cm", wavenumber_cm),
        BOHM_DOUBLE_KEY("wavenumber_rel", wavenumber_rel),
        {"correlation",
         [](RunConfig& c, std::string const& v) {
             if (v == "sum")
                 c.correlation = Correlation::SumNarrow;
             else if (v == "difference")
                 c.correlation = Correlation::DifferenceNarrow;
             else
                 throw ValidationError("correlation",
                                       fmt::format("'{}' is not 'sum' or 'difference'", v));
         },
         [](RunConfig const& c) {
             return std::string(c.correlation == Correlation::SumNarrow ? "sum"
                                                                        : "difference");
         }},
        {"method",
         [](RunConfig& c, std::string const& v) {
             if (v == "rk4")
                 c.integrator.method = IntegratorMethod::RK4Fixed;
             else if (v == "rk45")
                 c.integrator.method = IntegratorMethod::RK45Adaptive;
             else
                 throw ValidationError("method", fmt::format("'{}' is not 'rk4' or 'rk45'", v));
         },
         [](RunConfig const& c) {
             return std::string(c.integrator.method == IntegratorMethod::RK4Fixed ? "rk4"
                                                                                  : "rk45");
         }},
        BOHM_DOUBLE_KEY("dt", integrator.dt),
        BOHM_DOUBLE_KEY("tolerance", integrator.tolerance),
        BOHM_DOUBLE_KEY("t_final", integrator.t_final),
        {"record_stride",
         [](RunConfig& c, std::string const& v) {
             c.integrator.record_stride = to_unsigned("record_stride", v);
         },
         [](RunConfig const& c) { return std::to_string(c.integrator.record_stride); }},
        {"samples",
         [](RunConfig& c, std::string const& v) { c.samples = to_unsigned("samples", v); },
         [](RunConfig const& c) { return std::to_string(c.samples); }},
        {"seed",
         [](RunConfig& c, std::string const& v) { c.seed = to_unsigned("seed", v); },
         [](RunConfig const& c) { return std::to_string(c.seed); }},
        {"times",
         [](RunConfig& c, std::string const& v) { c.times = to_list("times", v); },
         [](RunConfig const& c) { return join(c.resolved_times()); }},
        {"widths",
         [](RunConfig& c, std::string const& v) { c.widths = to_list("widths", v); },
         [](RunConfig const& c) { return join(c.widths); }},
        {"trajectories",
         [](RunConfig& c, std::string const& v) {
             c.trajectories = to_unsigned("trajectories", v);
         },
         [](RunConfig const& c) { return std::to_string(c.trajectories); }},
        {"threads",
         [](RunConfig& c, std::string const& v) {
             auto const n = to_unsigned("threads", v);
             if (n < 1 || n > 4096)
                 throw ValidationError("threads", "must be in [1, 4096]");
             c.threads = static_cast<unsigned>(n);
         },
         [](RunConfig const& c) { return std::to_string(c.threads); }},
        {"continuity_points",
         [](RunConfig& c, std::string const& v) {
             auto const n = to_unsigned("continuity_points", v);
             if (n > 100000)
                 throw ValidationError("continuity_points", "is too large");
             c.continuity_points = static_cast<int>(n);
         },
         [](RunConfig const& c) { return std::to_string(c.continuity_points); }},
        BOHM_DOUBLE_KEY("continuity_h", continuity_h),
        BOHM_DOUBLE_KEY("continuity_tau", continuity_tau),
        {"continuity_levels",
         [](RunConfig& c, std::string const& v) {
             auto const n = to_unsigned("continuity_levels", v);
             if (n > 20)
                 throw ValidationError("continuity_levels", "is too large");
             c.continuity_levels = static_cast<int>(n);
         },
         [](RunConfig const& c) { return std::to_string(c.continuity_levels); }},
        {"out",
         [](RunConfig& c, std::string const& v) { c.out = v; },
         [](RunConfig const& c) { return c.out.string(); }},
    };
    return specs;
}

#undef BOHM_DOUBLE_KEY

KeySpec const* find_key(std::string const& name)
{
    for (auto const& spec : key_specs())
    {
        if (spec.name == name)
            return &spec;
    }
    return nullptr;
}

void apply_values(RunConfig& config, KeyValues const& values)
{
    for (auto const& [key, value] : values)
    {
        KeySpec const* spec = find_key(key);
        if (!spec)
            throw ParseError(fmt::format("unknown configuration key '{}'", key));
        spec->set(config, value);
    }
}
}  // namespace

//---------------------------------------------------------------------------//

TwoParticleState RunConfig::state() const
{
    GaussianMode cm{.sigma0 = correlation == Correlation::SumNarrow ? sigma_narrow : sigma_wide,
                    .center0 = center_cm,
                    .wavenumber = wavenumber_cm,
                    .coord_mass = 2 * params.mass};
    GaussianMode rel{.sigma0 = correlation == Correlation::SumNarrow ? sigma_wide : sigma_narrow,
                     .center0 = center_rel,
                     .wavenumber = wavenumber_rel,
                     .coord_mass = 0.5 * params.mass};
    return TwoParticleState(params, cm, rel, correlation);
}

std::vector<double> RunConfig::resolved_times() const
{
    if (!times.empty())
        return times;
    return {0.0, 0.5 * integrator.t_final, integrator.t_final};
}

std::vector<std::string> const& known_keys()
{
    static std::vector<std::string> const keys = [] {
        std::vector<std::string> out;
        for (auto const& spec : key_specs())
            out.push_back(spec.name);
        return out;
    }();
    return keys;
}

KeyValues parse_key_values(std::istream& in, std::string const& source_name)
{
    KeyValues values;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line))
    {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::string const content = trim(line);
        if (content.empty())
            continue;
        auto const eq = content.find('=');
        if (eq == std::string::npos)
        {
            throw ParseError(fmt::format("{}:{}: expected 'key = value', got '{}'",
                                         source_name, line_no, content));
        }
        std::string const key = trim(std::string_view(content).substr(0, eq));
        std::string const value = trim(std::string_view(content).substr(eq + 1));
        if (key.empty())
            throw ParseError(fmt::format("{}:{}: missing key", source_name, line_no));
        if (!find_key(key))
        {
            throw ParseError(fmt::format("{}:{}: unknown configuration key '{}'",
                                         source_name, line_no, key));
        }
        if (!values.emplace(key, value).second)
        {
            throw ParseError(
                fmt::format("{}:{}: duplicate key '{}'", source_name, line_no, key));
        }
    }
    return values;
}

RunConfig parse_config(std::optional<std::filesystem::path> const& file,
                       KeyValues const& overrides)
{
    RunConfig config;
    if (file)
    {
        std::ifstream in(*file);
        if (!in)
            throw ParseError(fmt::format("cannot open config file '{}'", file->string()));
        apply_values(config, parse_key_values(in, file->string()));
    }
    apply_values(config, overrides);
    validate(config);
    return config;
}

RunConfig parse_config(KeyValues const& values)
{
    return parse_config(std::nullopt, values);
}

void validate(RunConfig const& c)
{
    auto positive = [](char const* key, double v) {
        if (!(v > 0))
            throw ValidationError(key, "must be positive");
    };
    positive("hbar", c.params.hbar);
    positive("mass", c.params.mass);
    positive("sigma_narrow", c.sigma_narrow);
    positive("sigma_wide", c.sigma_wide);
    positive("dt", c.integrator.dt);
    positive("t_final", c.integrator.t_final);
    if (c.integrator.method == IntegratorMethod::RK45Adaptive
        && !(c.integrator.tolerance > 1e-14 && c.integrator.tolerance < 1e-2))
    {
        throw ValidationError("tolerance", "must lie in (1e-14, 1e-2)");
    }
    if (c.samples < 1)
        throw ValidationError("samples", "must be at least 1");
    if (c.trajectories < 1)
        throw ValidationError("trajectories", "must be at least 1");
    for (double t : c.times)
    {
        if (!(t >= 0 && t <= c.integrator.t_final))
            throw ValidationError("times", "entries must lie in [0, t_final]");
    }
    if (c.widths.empty())
        throw ValidationError("widths", "must not be empty");
    for (std::size_t i = 0; i < c.widths.size(); ++i)
    {
        if (!(c.widths[i] > 0))
            throw ValidationError("widths", "entries must be positive");
        if (i > 0 && !(c.widths[i] < c.widths[i - 1]))
            throw ValidationError("widths", "entries must be strictly decreasing");
    }
    if (c.continuity_points < 2)
        throw ValidationError("continuity_points", "must be at least 2");
    if (c.continuity_h < 0)
        throw ValidationError("continuity_h", "must be positive, or 0 for automatic");
    positive("continuity_tau", c.continuity_tau);
    if (c.continuity_levels < 2)
        throw ValidationError("continuity_levels", "must be at least 2");
}

std::string describe(RunConfig const& config)
{
    std::string out;
    for (auto const& spec : key_specs())
        out += fmt::format("{} = {}\n", spec.name, spec.get(config));
    return out;
}

std::string format_number(double value)
{
    return fmt::format("{:.17g}", value);
}

}  // namespace bohm::cli
