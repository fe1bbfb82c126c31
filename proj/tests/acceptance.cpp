// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <fmt/core.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "bohm/analysis.hpp"
#include "bohm/cli.hpp"
#include "bohm/dynamics.hpp"
#include "bohm/guidance.hpp"

using namespace bohm;

namespace
{
struct Outcome
{
    bool pass = true;
    std::string detail;

    void require(bool ok, std::string const& what)
    {
        if (!ok)
        {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

int failures = 0;

void run(int id, char const* name, std::function<Outcome()> const& body)
{
    auto const start = std::chrono::steady_clock::now();
    Outcome result;
    try
    {
        result = body();
    }
    catch (std::exception const& e)
    {
        result.pass = false;
        result.detail = std::string("exception: ") + e.what();
    }
    double const secs
        = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!result.pass)
        ++failures;
    fmt::print("[{}] criterion {} {} ({:.1f} s): {}\n", result.pass ? "PASS" : "FAIL", id, name,
               secs, result.detail);
    std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

TwoParticleState default_state()
{
    return TwoParticleState::centered({}, 0.05, 1.0);
}

Outcome equivariance()
{
    Outcome out;
    auto const s = default_state();
    IntegratorConfig const config{.dt = 1e-3, .t_final = 2};
    std::vector<double> const times{2.0};
    double worst_ks = 0, worst_std = 0, slowest = 0;
    for (std::uint64_t seed : {42, 43, 44})
    {
        auto const t0 = std::chrono::steady_clock::now();
        auto const reports = equivariance_check(s, 100000, seed, config, times);
        double const secs = seconds_since(t0);
        slowest = std::max(slowest, secs);
        for (ObservableRecord const& r : reports.at(0).records)
        {
            double const rel = std::abs(r.empirical_std - r.analytic_std) / r.analytic_std;
            worst_ks = std::max(worst_ks, r.ks);
            worst_std = std::max(worst_std, rel);
            out.require(r.ks < 0.01, fmt::format("seed {} {} KS {:.4g}", seed,
                                                 to_string(r.observable), r.ks));
            out.require(rel <= 0.02, fmt::format("seed {} {} std off by {:.3g}", seed,
                                                 to_string(r.observable), rel));
        }
        out.require(secs < 60, fmt::format("seed {} took {:.1f} s", seed, secs));
    }
    if (out.pass)
        out.detail = fmt::format("max KS {:.4g}, max std deviation {:.3g}, slowest run {:.1f} s",
                                 worst_ks, worst_std, slowest);
    return out;
}

Outcome constraint_preservation()
{
    Outcome out;
    auto const s = default_state();
    IntegratorConfig const config{.dt = 1e-3, .t_final = 2, .record_stride = 100};
    ConstraintReport const report = ga_constraint_experiment(s, 1000, 42, config);
    double const final_width = report.records.back().narrow_std_empirical;
    double const equilibrium = constraint_width(s, 2, Combination::Sum);
    out.require(report.n == 1000, "ensemble size");
    out.require(report.records.back().t == 2.0, "last record not at t=2");
    out.require(report.max_abs_narrow <= 1e-9,
                fmt::format("max |y1+y2| = {:.3g}", report.max_abs_narrow));
    double widest = 0;
    for (ConstraintTimeRecord const& r : report.records)
        widest = std::max(widest, r.narrow_std_empirical);
    out.require(widest < 1e-9, fmt::format("narrow width reached {:.3g}", widest));
    out.require(equilibrium > 1, fmt::format("constraint_width(2) = {:.6g}", equilibrium));
    if (out.pass)
        out.detail = fmt::format("max |y1+y2| {:.3g}, width at t=2 {:.3g}, equilibrium width {:.6g}",
                                 report.max_abs_narrow, final_width, equilibrium);
    return out;
}

Outcome regularization()
{
    Outcome out;
    std::vector<double> const widths{0.4, 0.2, 0.1, 0.05};
    auto const t0 = std::chrono::steady_clock::now();
    SweepResult const sweep = regularization_sweep(default_state(), widths, 50000, 42,
                                                   {.dt = 1e-3, .t_final = 2});
    double const secs = seconds_since(t0);
    out.require(sweep.rows.size() == widths.size(), "row count");
    std::string table;
    for (std::size_t i = 0; i < sweep.rows.size(); ++i)
    {
        SweepRow const& r = sweep.rows[i];
        out.require(r.ks_final < 0.01, fmt::format("width {} KS {:.4g}", r.delta_y_i, r.ks_final));
        if (i > 0)
            out.require(r.ratio > sweep.rows[i - 1].ratio,
                        fmt::format("R not increasing at width {}", r.delta_y_i));
        if (i + 2 >= sweep.rows.size())
        {
            double const rel = std::abs(r.ratio - r.ratio_asymptote) / r.ratio_asymptote;
            out.require(rel <= 0.05,
                        fmt::format("width {} R {:.6g} vs asymptote {:.6g}", r.delta_y_i, r.ratio,
                                    r.ratio_asymptote));
        }
        double const identity = std::abs(r.ratio * r.delta_y_i - r.delta_y_f) / r.delta_y_f;
        out.require(identity <= 1e-15,
                    fmt::format("width {} R*dy_i differs from dy_f by {:.3g}", r.delta_y_i,
                                identity));
        table += fmt::format("{}R({})={:.5g}", i ? ", " : "", r.delta_y_i, r.ratio);
    }
    out.require(sweep.warnings.empty(), "sweep emitted warnings");
    out.require(secs < 90, fmt::format("took {:.1f} s", secs));
    if (out.pass)
        out.detail = table;
    return out;
}

Outcome continuity()
{
    Outcome out;
    std::string summary;
    for (double narrow : {0.05, 1.0})
    {
        auto const s = TwoParticleState::centered({}, narrow, 1.0);
        for (double t : {0.5, 2.0})
        {
            ContinuityGrid grid{.points = 101, .h = s.sigma_min(t) / 50, .tau = 1e-3};
            ContinuityResult const coarse = continuity_residual(s, grid, t);
            grid.h /= 2;
            grid.tau /= 2;
            ContinuityResult const fine = continuity_residual(s, grid, t);
            double const ratio = coarse.l2_norm / fine.l2_norm;
            out.require(!coarse.grid_too_coarse, "stencil flagged as too coarse");
            out.require(ratio >= 3.5 && ratio <= 4.5,
                        fmt::format("sigma {} t {} ratio {:.4g}", narrow, t, ratio));
            summary += fmt::format("{}sigma {} t {}: {:.4f}", summary.empty() ? "" : ", ", narrow,
                                   t, ratio);
        }
    }
    if (out.pass)
        out.detail = "L2 ratios " + summary;
    return out;
}

Outcome integrator()
{
    Outcome out;
    auto const s = default_state();
    double worst = 0;
    for (Position start : sample_equilibrium(s, 20, 7))
    {
        Trajectory const traj
            = integrate_trajectory(s, start, {.dt = 1e-3, .t_final = 10, .record_stride = 1});
        for (std::size_t i = 0; i < traj.times.size(); ++i)
        {
            Position const want = exact_position(s, start, traj.times[i]);
            Position const got = traj.positions[i];
            double const err = std::hypot(got.y1 - want.y1, got.y2 - want.y2)
                               / std::hypot(want.y1, want.y2);
            worst = std::max(worst, err);
        }
    }
    out.require(worst <= 1e-6, fmt::format("relative error {:.3g}", worst));

    // Convergence on a single mode with sigma0 = 1, where dt = 0.2 and 0.1 are
    // still far above round-off.
    auto const ref = TwoParticleState::centered({.hbar = 1, .mass = 2}, 0.5, 1.0);
    Position const start = to_particles({0.0, 1.0});
    double const exact = exact_position(ref, start, 10.0).y1;
    auto error = [&](double dt) {
        return std::abs(
            integrate_trajectory(ref, start, {.dt = dt, .t_final = 10}).positions.back().y1
            - exact);
    };
    double const ratio = error(0.2) / error(0.1);
    out.require(ratio >= 12 && ratio <= 20, fmt::format("convergence ratio {:.4g}", ratio));
    if (out.pass)
        out.detail = fmt::format("max relative error {:.3g} over t in [0, 10], dt ratio {:.4g}",
                                 worst, ratio);
    return out;
}

Outcome oracle_cross_check()
{
    Outcome out;
    auto const s = default_state();
    std::mt19937_64 rng(2718);
    std::uniform_real_distribution<double> z(-3, 3), time(0, 2);
    auto pair_error = [](VelocityPair a, VelocityPair b) {
        return std::hypot(a.v1 - b.v1, a.v2 - b.v2);
    };
    double worst = 0, coarse_sum = 0, fine_sum = 0;
    double const h_coarse = 5e-4;
    for (int i = 0; i < 1000; ++i)
    {
        double const t = time(rng);
        EvolvedMode const cm = s.evolve_cm(t), rel = s.evolve_rel(t);
        Position const p
            = to_particles({cm.center + z(rng) * cm.sigma, rel.center + z(rng) * rel.sigma});
        VelocityPair const exact = velocity(s, p.y1, p.y2, t);
        double const scale = std::hypot(exact.v1, exact.v2);
        if (scale == 0)
            continue;  // t = 0: the field vanishes identically
        worst = std::max(worst, pair_error(velocity_fd(s, p.y1, p.y2, t, 1e-4), exact) / scale);
        coarse_sum += pair_error(velocity_fd(s, p.y1, p.y2, t, h_coarse), exact) / scale;
        fine_sum += pair_error(velocity_fd(s, p.y1, p.y2, t, h_coarse / 2), exact) / scale;
    }
    double const ratio = coarse_sum / fine_sum;
    out.require(worst <= 1e-6, fmt::format("relative error {:.3g} at h=1e-4", worst));
    out.require(ratio >= 3.5 && ratio <= 4.5, fmt::format("order ratio {:.4g}", ratio));
    if (out.pass)
        out.detail = fmt::format("max relative error {:.3g} at h=1e-4, order ratio {:.4f}", worst,
                                 ratio);
    return out;
}

std::string slurp(std::filesystem::path const& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

Outcome determinism()
{
    Outcome out;
    auto const dir = std::filesystem::temp_directory_path()
                     / ("bohm_acceptance_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    std::vector<std::string> checked;
    for (std::string const name : {"equivariance", "ga-constraint", "sweep", "trajectory"})
    {
        std::string outputs[2];
        for (int k = 0; k < 2; ++k)
        {
            std::string const threads = k == 0 ? "1" : "8";
            auto const path = dir / (name + "_" + threads + ".csv");
            cli::RunConfig const c = cli::parse_config(
                {{"samples", "20000"}, {"dt", "1e-2"}, {"seed", "42"}, {"threads", threads},
                 {"out", path.string()}});
            std::ostringstream summary, errors;
            int const code = cli::run_subcommand(name, c, summary, errors);
            out.require(code == cli::exit_ok, name + " exited " + std::to_string(code));
            outputs[k] = slurp(path);
        }
        out.require(!outputs[0].empty(), name + " wrote nothing");
        out.require(outputs[0] == outputs[1], name + " CSV differs between 1 and 8 threads");
        checked.push_back(name);
    }
    std::filesystem::remove_all(dir);
    if (out.pass)
        out.detail = fmt::format("byte-identical CSV for {} subcommands", checked.size());
    return out;
}
}  // namespace

int main()
{
    run(1, "equivariance", equivariance);
    run(2, "constraint preservation", constraint_preservation);
    run(3, "regularization sweep", regularization);
    run(4, "continuity residual order", continuity);
    run(5, "integrator exactness", integrator);
    run(6, "velocity oracle cross-check", oracle_cross_check);
    run(7, "determinism across thread counts", determinism);
    fmt::print("{} of 7 criteria passed\n", 7 - failures);
    return failures == 0 ? 0 : 1;
}
