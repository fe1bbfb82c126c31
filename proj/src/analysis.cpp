#include "bohm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <stdexcept>

#include "bohm/parallel.hpp"

namespace bohm
{

double NormalCdf::operator()(double x) const
{
    return 0.5 * std::erfc(-(x - mean) / (sigma * std::sqrt(2.0)));
}

double ks_statistic(std::span<double const> samples, NormalCdf const& cdf)
{
    if (samples.size() < 2)
        throw std::invalid_argument("KS statistic needs at least 2 samples");
    if (!(cdf.sigma > 0))
        throw std::invalid_argument("reference CDF needs a positive spread");

    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    double const n = static_cast<double>(sorted.size());
    double d = 0;
    for (std::size_t i = 0; i < sorted.size(); ++i)
    {
        double const f = cdf(sorted[i]);
        double const below = static_cast<double>(i) / n;
        double const above = static_cast<double>(i + 1) / n;
        d = std::max({d, above - f, f - below});
    }
    return d;
}

SampleMoments moments(std::span<double const> samples)
{
    if (samples.empty())
        throw std::invalid_argument("moments of an empty sample");
    double const n = static_cast<double>(samples.size());
    double mean = 0;
    for (double x : samples)
        mean += x;
    mean /= n;
    double var = 0;
    for (double x : samples)
        var += (x - mean) * (x - mean);
    return {mean, std::sqrt(var / n)};
}

//---------------------------------------------------------------------------//

double EquivarianceReport::max_ks() const
{
    double result = 0;
    for (auto const& r : records)
        result = std::max(result, r.ks);
    return result;
}

ObservableRecord const& EquivarianceReport::at(Observable obs) const
{
    for (auto const& r : records)
    {
        if (r.observable == obs)
            return r;
    }
    throw std::out_of_range("observable not in report");
}

EquivarianceReport compare_with_analytic(TwoParticleState const& state,
                                         std::span<Position const> positions,
                                         double t)
{
    EquivarianceReport report;
    report.t = t;
    std::vector<double> values(positions.size());
    for (Observable obs : all_observables)
    {
        std::transform(positions.begin(), positions.end(), values.begin(),
                       [obs](Position p) { return observe(obs, p); });
        NormalLaw const law = marginal(state, t, obs);
        SampleMoments const m = moments(values);

        ObservableRecord rec;
        rec.observable = obs;
        rec.empirical_mean = m.mean;
        rec.empirical_std = m.std;
        rec.analytic_mean = law.mean;
        rec.analytic_std = law.sigma;
        rec.ks = ks_statistic(values, {law.mean, law.sigma});
        rec.n = values.size();
        report.records.push_back(rec);
    }
    return report;
}

std::vector<EquivarianceReport> equivariance_check(TwoParticleState const& state,
                                                   std::size_t n,
                                                   std::uint64_t seed,
                                                   IntegratorConfig const& config,
                                                   std::span<double const> times,
                                                   unsigned parallel_width)
{
    validate(config);
    for (double t : times)
    {
        if (!(t >= 0 && t <= config.t_final))
            throw std::invalid_argument(fmt::format(
                "equivariance time {} outside [0, t_final={}]", t, config.t_final));
    }

    std::vector<Position> const initial = sample_equilibrium(state, n, seed);
    std::vector<EquivarianceReport> reports;
    for (double t : times)
    {
        if (t == 0)
        {
            reports.push_back(compare_with_analytic(state, initial, 0.0));
            continue;
        }
        IntegratorConfig leg = config;
        leg.t_final = t;
        Ensemble const ensemble = propagate_ensemble(
            state, initial, leg, {.parallel_width = parallel_width}, seed);
        reports.push_back(compare_with_analytic(state, ensemble.valid_final_positions(), t));
    }
    return reports;
}

//---------------------------------------------------------------------------//

double ConstraintReport::mismatch_ratio() const
{
    if (records.empty())
        return 0;
    ConstraintTimeRecord const& last = records.back();
    if (last.narrow_std_empirical == 0)
        return std::numeric_limits<double>::infinity();
    return last.narrow_std_equilibrium / last.narrow_std_empirical;
}

ConstraintReport ga_constraint_experiment(TwoParticleState const& state,
                                          std::size_t n,
                                          std::uint64_t seed,
                                          IntegratorConfig const& config,
                                          unsigned parallel_width)
{
    validate(config);
    Combination const surface = narrow_combination(state.correlation());
    Combination const wide
        = surface == Combination::Sum ? Combination::Difference : Combination::Sum;
    Observable const narrow_obs
        = surface == Combination::Sum ? Observable::Sum : Observable::Difference;
    Observable const wide_obs
        = surface == Combination::Sum ? Observable::Difference : Observable::Sum;

    std::vector<Position> const starts = sample_constraint_surface(state, n, seed, surface);

    // Step indices at which ensemble statistics are recorded. Adaptive runs do
    // not share a time grid, so they only report the endpoints.
    IntegratorConfig every_step = config;
    every_step.record_stride = 1;
    std::size_t const stride
        = (config.method == IntegratorMethod::RK4Fixed && config.record_stride > 0)
              ? config.record_stride
              : std::numeric_limits<std::size_t>::max();

    std::vector<double> record_times;
    std::vector<std::vector<Position>> snapshots;  // [trajectory][record]
    snapshots.resize(n);
    std::vector<double> max_narrow(n, 0.0);
    std::vector<char> failed(n, 0);

    parallel_for(n, parallel_width, [&](std::size_t i) {
        try
        {
            Trajectory const traj = integrate_trajectory(state, starts[i], every_step);
            std::size_t const last = traj.times.size() - 1;
            for (std::size_t k = 0; k <= last; ++k)
            {
                max_narrow[i] = std::max(max_narrow[i],
                                         std::abs(observe(narrow_obs, traj.positions[k])));
                if (k == 0 || k == last || k % stride == 0)
                    snapshots[i].push_back(traj.positions[k]);
            }
        }
        catch (NumericalError const&)
        {
            failed[i] = 1;
        }
    });

    std::size_t const failures = static_cast<std::size_t>(std::count(failed.begin(), failed.end(), 1));
    if (static_cast<double>(failures) > 1e-3 * static_cast<double>(n))
    {
        throw NumericalError(
            fmt::format("{} of {} constraint-surface trajectories failed", failures, n));
    }

    // Reconstruct the recorded times from a reference trajectory on the grid.
    if (config.method == IntegratorMethod::RK4Fixed)
    {
        Trajectory const ref = integrate_trajectory(state, starts.front(), every_step);
        std::size_t const last = ref.times.size() - 1;
        for (std::size_t k = 0; k <= last; ++k)
        {
            if (k == 0 || k == last || k % stride == 0)
                record_times.push_back(ref.times[k]);
        }
    }
    else
    {
        record_times = {0.0, config.t_final};
    }

    ConstraintReport report;
    report.n = n - failures;
    report.surface = surface;
    for (std::size_t i = 0; i < n; ++i)
    {
        if (!failed[i])
            report.max_abs_narrow = std::max(report.max_abs_narrow, max_narrow[i]);
    }

    std::vector<double> narrow_values;
    std::vector<double> wide_values;
    for (std::size_t k = 0; k < record_times.size(); ++k)
    {
        narrow_values.clear();
        wide_values.clear();
        ConstraintTimeRecord rec;
        rec.t = record_times[k];
        for (std::size_t i = 0; i < n; ++i)
        {
            if (failed[i])
                continue;
            double const a = observe(narrow_obs, snapshots[i][k]);
            rec.max_abs_narrow = std::max(rec.max_abs_narrow, std::abs(a));
            narrow_values.push_back(a);
            wide_values.push_back(observe(wide_obs, snapshots[i][k]));
        }
        rec.narrow_std_empirical = moments(narrow_values).std;
        rec.wide_std_empirical = moments(wide_values).std;
        rec.narrow_std_equilibrium = constraint_width(state, rec.t, surface);
        rec.wide_std_analytic = constraint_width(state, rec.t, wide);
        report.records.push_back(rec);
    }
    return report;
}

//---------------------------------------------------------------------------//

TwoParticleState with_narrow_width(TwoParticleState const& base, double delta_y)
{
    if (!(delta_y > 0) || !std::isfinite(delta_y))
        throw std::invalid_argument("regularization width must be positive");
    GaussianMode cm = base.cm_mode();
    GaussianMode rel = base.rel_mode();
    if (base.correlation() == Correlation::SumNarrow)
        cm.sigma0 = 0.5 * delta_y;  // y1 + y2 = 2Y
    else
        rel.sigma0 = delta_y;
    return TwoParticleState(base.params(), cm, rel, base.correlation());
}

SweepResult regularization_sweep(TwoParticleState const& base,
                                 std::span<double const> widths,
                                 std::size_t n,
                                 std::uint64_t seed,
                                 IntegratorConfig const& config,
                                 unsigned parallel_width)
{
    validate(config);
    if (widths.empty())
        throw std::invalid_argument("sweep needs at least one width");
    for (std::size_t i = 0; i < widths.size(); ++i)
    {
        if (!(widths[i] > 0))
            throw std::invalid_argument("sweep widths must be positive");
        if (i > 0 && !(widths[i] < widths[i - 1]))
            throw std::invalid_argument("sweep widths must be strictly decreasing");
    }

    Combination const narrow = narrow_combination(base.correlation());
    Observable const narrow_obs
        = narrow == Combination::Sum ? Observable::Sum : Observable::Difference;
    PhysicalParams const& params = base.params();
    double const t_final = config.t_final;
    double const times[] = {t_final};

    SweepResult result;
    result.t_final = t_final;
    for (double width : widths)
    {
        TwoParticleState const state = with_narrow_width(base, width);
        GuidanceField const field(state);
        double const rate = narrow == Combination::Sum ? field.cm().max_expansion_rate()
                                                       : field.rel().max_expansion_rate();
        if (config.method == IntegratorMethod::RK4Fixed && config.dt * rate > 0.5)
        {
            result.warnings.push_back(fmt::format(
                "width {}: dt * max expansion rate = {:.3g}; consider RK45Adaptive",
                width, config.dt * rate));
        }

        EquivarianceReport const report
            = equivariance_check(state, n, seed, config, times, parallel_width).front();

        SweepRow row;
        row.delta_y_i = width;
        row.delta_y_f = constraint_width(state, t_final, narrow);
        row.delta_y_f_empirical = report.at(narrow_obs).empirical_std;
        row.ratio = row.delta_y_f / row.delta_y_i;
        row.ks_final = report.max_ks();
        row.ratio_asymptote = params.hbar * t_final / (params.mass * width * width);
        result.rows.push_back(row);
    }
    return result;
}

}  // namespace bohm
