#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <limits>
#include <ostream>

#include "bohm/analysis.hpp"
#include "bohm/cli.hpp"
#include "bohm/guidance.hpp"

namespace bohm::cli
{
namespace
{
class IoError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

struct Output
{
    std::string csv;
    std::string summary;
    std::vector<std::string> warnings;
};

void add_row(std::string& csv, std::initializer_list<std::string> fields)
{
    bool first = true;
    for (auto const& f : fields)
    {
        if (!first)
            csv += ',';
        csv += f;
        first = false;
    }
    csv += '\n';
}

std::string num(double v)
{
    return format_number(v);
}

Output run_equivariance(RunConfig const& config)
{
    std::vector<double> const times = config.resolved_times();
    auto const reports = equivariance_check(config.state(), config.samples, config.seed,
                                            config.integrator, times, config.threads);
    Output out;
    out.csv = "t,observable,empirical_std,analytic_std,ks,n\n";
    double max_ks = 0;
    double max_std_err = 0;
    for (auto const& report : reports)
    {
        for (auto const& rec : report.records)
        {
            add_row(out.csv, {num(report.t), to_string(rec.observable), num(rec.empirical_std),
                              num(rec.analytic_std), num(rec.ks), std::to_string(rec.n)});
            max_ks = std::max(max_ks, rec.ks);
            max_std_err = std::max(max_std_err,
                                   std::abs(rec.empirical_std / rec.analytic_std - 1));
        }
    }
    out.summary = fmt::format(
        "equivariance: max KS = {:.6g}, max relative std error = {:.3g} (n={}, {} times)",
        max_ks, max_std_err, config.samples, times.size());
    return out;
}

Output run_ga_constraint(RunConfig const& config)
{
    ConstraintReport const report = ga_constraint_experiment(
        config.state(), config.samples, config.seed, config.integrator, config.threads);
    Output out;
    out.csv = "t,max_abs_narrow,narrow_std_empirical,narrow_std_equilibrium,"
              "wide_std_empirical,wide_std_analytic,n\n";
    for (auto const& rec : report.records)
    {
        add_row(out.csv, {num(rec.t), num(rec.max_abs_narrow), num(rec.narrow_std_empirical),
                          num(rec.narrow_std_equilibrium), num(rec.wide_std_empirical),
                          num(rec.wide_std_analytic), std::to_string(report.n)});
    }
    out.summary = fmt::format(
        "ga-constraint: max |{}| = {:.3g} over all steps; equilibrium width at t_final = {:.6g}",
        report.surface == Combination::Sum ? "y1+y2" : "y1-y2", report.max_abs_narrow,
        report.records.back().narrow_std_equilibrium);
    return out;
}

Output run_sweep(RunConfig const& config)
{
    SweepResult const result = regularization_sweep(
        config.state(), config.widths, config.samples, config.seed, config.integrator,
        config.threads);
    Output out;
    out.csv = "delta_y_i,delta_y_f_analytic,delta_y_f_empirical,R,ks\n";
    double max_ks = 0;
    for (auto const& row : result.rows)
    {
        add_row(out.csv, {num(row.delta_y_i), num(row.delta_y_f), num(row.delta_y_f_empirical),
                          num(row.ratio), num(row.ks_final)});
        max_ks = std::max(max_ks, row.ks_final);
    }
    out.warnings = result.warnings;
    out.summary = fmt::format("sweep: {} widths, max KS = {:.6g}, largest R = {:.6g}",
                              result.rows.size(), max_ks, result.rows.back().ratio);
    return out;
}

Output run_continuity(RunConfig const& config)
{
    TwoParticleState const state = config.state();
    Output out;
    out.csv = "t,level,h,tau,max_norm,l2_norm,ratio_max,ratio_l2,grid_too_coarse\n";
    double worst_ratio_low = std::numeric_limits<double>::infinity();
    double worst_ratio_high = 0;
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    for (double t : config.resolved_times())
    {
        ContinuityGrid grid;
        grid.points = config.continuity_points;
        grid.h = config.continuity_h > 0 ? config.continuity_h : state.sigma_min(t) / 50;
        grid.tau = config.continuity_tau;
        ContinuityResult previous;
        for (int level = 0; level < config.continuity_levels; ++level)
        {
            ContinuityResult const r = continuity_residual(state, grid, t);
            double ratio_max = nan;
            double ratio_l2 = nan;
            if (level > 0)
            {
                ratio_max = previous.max_norm / r.max_norm;
                ratio_l2 = previous.l2_norm / r.l2_norm;
                worst_ratio_low = std::min(worst_ratio_low, ratio_l2);
                worst_ratio_high = std::max(worst_ratio_high, ratio_l2);
            }
            add_row(out.csv, {num(t), std::to_string(level), num(grid.h), num(grid.tau),
                              num(r.max_norm), num(r.l2_norm), num(ratio_max), num(ratio_l2),
                              r.grid_too_coarse ? "1" : "0"});
            if (r.grid_too_coarse)
                out.warnings.push_back(fmt::format("t={}: h={} exceeds sigma_min/4", t, grid.h));
            previous = r;
            grid.h /= 2;
            grid.tau /= 2;
        }
    }
    out.summary = fmt::format("continuity: L2 refinement ratios in [{:.4g}, {:.4g}]",
                              worst_ratio_low, worst_ratio_high);
    return out;
}

Output run_trajectory(RunConfig const& config)
{
    TwoParticleState const state = config.state();
    IntegratorConfig integrator = config.integrator;
    if (integrator.record_stride == 0)
        integrator.record_stride = 100;
    std::vector<Position> const starts
        = sample_equilibrium(state, config.trajectories, config.seed);
    Ensemble const ensemble = propagate_ensemble(
        state, starts, integrator,
        {.parallel_width = config.threads, .keep_trajectories = true}, config.seed);

    Output out;
    out.csv = "trajectory,t,y1,y2\n";
    for (std::size_t i = 0; i < ensemble.trajectories.size(); ++i)
    {
        Trajectory const& traj = ensemble.trajectories[i];
        for (std::size_t k = 0; k < traj.times.size(); ++k)
        {
            add_row(out.csv, {std::to_string(i), num(traj.times[k]), num(traj.positions[k].y1),
                              num(traj.positions[k].y2)});
        }
    }
    out.summary = fmt::format("trajectory: {} trajectories to t = {}", ensemble.n,
                              integrator.t_final);
    return out;
}

void write_file(std::filesystem::path const& path, std::string const& content)
{
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file)
        throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
    file << content;
    if (!file)
        throw IoError(fmt::format("failed writing '{}'", path.string()));
}
}  // namespace

std::vector<std::string> const& subcommands()
{
    static std::vector<std::string> const names
        = {"equivariance", "ga-constraint", "sweep", "continuity", "trajectory"};
    return names;
}

std::string usage()
{
    std::string text
        = "usage: bohm-equilibrium <subcommand> [--config PATH] [--seed U64] [--samples N]\n"
          "         [--t-final F] [--dt F] [--sigma-narrow F] [--sigma-wide F]\n"
          "         [--correlation sum|difference] [--threads N] [--out PATH]\n"
          "subcommands:";
    for (auto const& name : subcommands())
        text += " " + name;
    text += "\n";
    return text;
}

int run_subcommand(std::string const& name,
                   RunConfig const& config,
                   std::ostream& summary,
                   std::ostream& errors)
{
    using Runner = Output (*)(RunConfig const&);
    Runner runner = nullptr;
    if (name == "equivariance")
        runner = run_equivariance;
    else if (name == "ga-constraint")
        runner = run_ga_constraint;
    else if (name == "sweep")
        runner = run_sweep;
    else if (name == "continuity")
        runner = run_continuity;
    else if (name == "trajectory")
        runner = run_trajectory;
    else
    {
        errors << "unknown subcommand '" << name << "'\n" << usage();
        return exit_validation;
    }

    try
    {
        validate(config);
        Output const result = runner(config);
        std::filesystem::path const path
            = config.out.empty() ? std::filesystem::path(name + ".csv") : config.out;
        write_file(path, result.csv);
        std::filesystem::path meta = path;
        meta += ".meta";
        write_file(meta, "# subcommand: " + name + "\n" + describe(config));
        for (auto const& w : result.warnings)
            errors << "warning: " << w << '\n';
        summary << result.summary << '\n';
        return exit_ok;
    }
    catch (NumericalError const& e)
    {
        errors << "numerical failure: " << e.what() << '\n';
        return exit_numerical;
    }
    catch (std::domain_error const& e)
    {
        errors << "numerical failure: " << e.what() << '\n';
        return exit_numerical;
    }
    catch (IoError const& e)
    {
        errors << "error: " << e.what() << '\n';
        return exit_validation;
    }
    catch (std::invalid_argument const& e)
    {
        errors << "invalid configuration: " << e.what() << '\n';
        return exit_validation;
    }
}

}  // namespace bohm::cli
