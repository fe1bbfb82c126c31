#include "bohm/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bohm/parallel.hpp"
#include "bohm/rng.hpp"

namespace bohm
{
namespace
{
constexpr double min_adaptive_step = 1e-12;

ModePoint axpy(ModePoint x, double a, ModePoint k)
{
    return {x.cm + a * k.cm, x.rel + a * k.rel};
}

ModePoint rk4_step(GuidanceField const& field, ModePoint u, double t, double h)
{
    ModePoint const k1 = field.mode_velocity(u, t);
    ModePoint const k2 = field.mode_velocity(axpy(u, 0.5 * h, k1), t + 0.5 * h);
    ModePoint const k3 = field.mode_velocity(axpy(u, 0.5 * h, k2), t + 0.5 * h);
    ModePoint const k4 = field.mode_velocity(axpy(u, h, k3), t + h);
    return {u.cm + h / 6 * (k1.cm + 2 * k2.cm + 2 * k3.cm + k4.cm),
            u.rel + h / 6 * (k1.rel + 2 * k2.rel + 2 * k3.rel + k4.rel)};
}

// Dormand-Prince 5(4) tableau
namespace dp
{
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// b - b* (difference between 5th and embedded 4th order weights)
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
}  // namespace dp

struct AdaptiveStep
{
    ModePoint next;
    double error_ratio;
};

AdaptiveStep dopri_step(GuidanceField const& field,
                        ModePoint u,
                        double t,
                        double h,
                        double tolerance)
{
    using namespace dp;
    auto f = [&](ModePoint p, double s) { return field.mode_velocity(p, s); };
    auto combine = [&](std::initializer_list<std::pair<double, ModePoint>> terms) {
        ModePoint out = u;
        for (auto const& [w, k] : terms)
            out = axpy(out, h * w, k);
        return out;
    };

    ModePoint const k1 = f(u, t);
    ModePoint const k2 = f(combine({{a21, k1}}), t + c2 * h);
    ModePoint const k3 = f(combine({{a31, k1}, {a32, k2}}), t + c3 * h);
    ModePoint const k4 = f(combine({{a41, k1}, {a42, k2}, {a43, k3}}), t + c4 * h);
    ModePoint const k5 = f(combine({{a51, k1}, {a52, k2}, {a53, k3}, {a54, k4}}), t + c5 * h);
    ModePoint const k6
        = f(combine({{a61, k1}, {a62, k2}, {a63, k3}, {a64, k4}, {a65, k5}}), t + h);
    ModePoint const next
        = combine({{b1, k1}, {b3, k3}, {b4, k4}, {b5, k5}, {b6, k6}});
    ModePoint const k7 = f(next, t + h);

    auto err = [&](double ModePoint::*m) {
        return h
               * (e1 * k1.*m + e3 * k3.*m + e4 * k4.*m + e5 * k5.*m + e6 * k6.*m
                  + e7 * k7.*m);
    };
    auto ratio = [&](double ModePoint::*m) {
        double const scale = tolerance * (1 + std::max(std::abs(u.*m), std::abs(next.*m)));
        return std::abs(err(m)) / scale;
    };
    return {next, std::max(ratio(&ModePoint::cm), ratio(&ModePoint::rel))};
}

// Calls record(step_index, t, point) for every accepted step, including the
// initial point (index 0). Returns the final point.
template<class Recorder>
ModePoint integrate_modes(GuidanceField const& field,
                          ModePoint u,
                          IntegratorConfig const& config,
                          Recorder&& record)
{
    record(std::size_t{0}, 0.0, u, false);
    if (config.method == IntegratorMethod::RK4Fixed)
    {
        auto const steps = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::ceil(config.t_final / config.dt - 1e-9)));
        for (std::size_t i = 0; i < steps; ++i)
        {
            double const t = static_cast<double>(i) * config.dt;
            double const t_next
                = (i + 1 == steps) ? config.t_final : static_cast<double>(i + 1) * config.dt;
            u = rk4_step(field, u, t, t_next - t);
            if (!std::isfinite(u.cm) || !std::isfinite(u.rel))
                throw NumericalError("trajectory left the finite range");
            record(i + 1, t_next, u, i + 1 == steps);
        }
        return u;
    }

    double t = 0;
    double h = std::min(config.dt, config.t_final);
    std::size_t accepted = 0;
    while (t < config.t_final)
    {
        bool const last = t + h >= config.t_final;
        double const step = last ? config.t_final - t : h;
        AdaptiveStep const trial = dopri_step(field, u, t, step, config.tolerance);
        if (!std::isfinite(trial.error_ratio))
            throw NumericalError("adaptive integrator produced a non-finite error estimate");
        double const factor
            = trial.error_ratio == 0
                  ? 5.0
                  : std::clamp(0.9 * std::pow(trial.error_ratio, -0.2), 0.2, 5.0);
        if (trial.error_ratio <= 1)
        {
            t = last ? config.t_final : t + step;
            u = trial.next;
            record(++accepted, t, u, last);
        }
        h = step * factor;
        if (h < min_adaptive_step && t < config.t_final)
            throw NumericalError("adaptive step size underflow below 1e-12");
    }
    return u;
}

void require_finite_start(Position p)
{
    if (!std::isfinite(p.y1) || !std::isfinite(p.y2))
        throw std::invalid_argument("trajectory start must be finite");
}
}  // namespace

void validate(IntegratorConfig const& config)
{
    if (!(config.t_final > 0) || !std::isfinite(config.t_final))
        throw std::invalid_argument("t_final must be positive");
    if (!(config.dt > 0) || !std::isfinite(config.dt))
        throw std::invalid_argument("dt must be positive");
    if (config.method == IntegratorMethod::RK45Adaptive
        && !(config.tolerance > 1e-14 && config.tolerance < 1e-2))
    {
        throw std::invalid_argument("tolerance must lie in (1e-14, 1e-2)");
    }
}

Trajectory integrate_trajectory(TwoParticleState const& state,
                                Position start,
                                IntegratorConfig const& config)
{
    validate(config);
    require_finite_start(start);
    GuidanceField const field(state);
    Trajectory out;
    auto record = [&](std::size_t step, double t, ModePoint u, bool last) {
        bool const keep = step == 0 || last
                          || (config.record_stride > 0 && step % config.record_stride == 0);
        if (keep)
        {
            out.times.push_back(t);
            out.positions.push_back(to_particles(u));
        }
    };
    integrate_modes(field, to_modes(start), config, record);
    return out;
}

Position integrate_to_final(GuidanceField const& field,
                            Position start,
                            IntegratorConfig const& config)
{
    require_finite_start(start);
    auto ignore = [](std::size_t, double, ModePoint, bool) {};
    return to_particles(integrate_modes(field, to_modes(start), config, ignore));
}

Position exact_position(TwoParticleState const& state, Position start, double t)
{
    ModePoint const u0 = to_modes(start);
    return to_particles(
        {state.evolve_cm(t).trajectory(u0.cm), state.evolve_rel(t).trajectory(u0.rel)});
}

//---------------------------------------------------------------------------//
// Sampling
//---------------------------------------------------------------------------//

namespace
{
constexpr std::uint32_t equilibrium_stream = 0;
constexpr std::uint32_t surface_stream = 1;

void require_samples(std::size_t n)
{
    if (n < 1)
        throw std::invalid_argument("sample count must be at least 1");
}
}  // namespace

std::vector<Position> sample_equilibrium(TwoParticleState const& state,
                                         std::size_t n,
                                         std::uint64_t seed)
{
    require_samples(n);
    GaussianMode const& cm = state.cm_mode();
    GaussianMode const& rel = state.rel_mode();
    std::vector<Position> out(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        NormalPair const z = normal_pair(seed, i, equilibrium_stream);
        out[i] = to_particles(
            {cm.center0 + cm.sigma0 * z.first, rel.center0 + rel.sigma0 * z.second});
    }
    return out;
}

std::vector<Position> sample_constraint_surface(TwoParticleState const& state,
                                                std::size_t n,
                                                std::uint64_t seed,
                                                Combination surface)
{
    require_samples(n);
    if (surface != narrow_combination(state.correlation()))
    {
        throw std::invalid_argument(
            "constraint surface does not match the state's narrow combination");
    }
    std::vector<Position> out(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        double const z = normal_pair(seed, i, surface_stream).first;
        ModePoint m;
        if (surface == Combination::Sum)
            m = {0.0, state.rel_mode().center0 + state.rel_mode().sigma0 * z};
        else
            m = {state.cm_mode().center0 + state.cm_mode().sigma0 * z, 0.0};
        out[i] = to_particles(m);
    }
    return out;
}

std::vector<Position> sample_constraint_surface(TwoParticleState const& state,
                                                std::size_t n,
                                                std::uint64_t seed)
{
    return sample_constraint_surface(state, n, seed, narrow_combination(state.correlation()));
}

//---------------------------------------------------------------------------//
// Ensembles
//---------------------------------------------------------------------------//

std::vector<Position> Ensemble::valid_final_positions() const
{
    std::vector<Position> out;
    out.reserve(final_positions.size() - failed.size());
    auto next_failed = failed.begin();
    for (std::size_t i = 0; i < final_positions.size(); ++i)
    {
        if (next_failed != failed.end() && *next_failed == i)
        {
            ++next_failed;
            continue;
        }
        out.push_back(final_positions[i]);
    }
    return out;
}

Ensemble propagate_ensemble(TwoParticleState const& state,
                            std::vector<Position> initial_positions,
                            IntegratorConfig const& config,
                            EnsembleOptions const& options,
                            std::uint64_t seed)
{
    validate(config);
    for (Position const& p : initial_positions)
        require_finite_start(p);

    Ensemble ensemble;
    ensemble.seed = seed;
    ensemble.n = initial_positions.size();
    ensemble.config = config;
    ensemble.state = state;
    ensemble.initial_positions = std::move(initial_positions);
    ensemble.final_positions.resize(ensemble.n);
    if (options.keep_trajectories)
        ensemble.trajectories.resize(ensemble.n);

    std::vector<char> failed(ensemble.n, 0);
    GuidanceField const field(state);
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();

    parallel_for(ensemble.n, options.parallel_width, [&](std::size_t i) {
        try
        {
            if (options.keep_trajectories)
            {
                ensemble.trajectories[i]
                    = integrate_trajectory(state, ensemble.initial_positions[i], config);
                ensemble.final_positions[i] = ensemble.trajectories[i].positions.back();
            }
            else
            {
                ensemble.final_positions[i]
                    = integrate_to_final(field, ensemble.initial_positions[i], config);
            }
        }
        catch (NumericalError const&)
        {
            failed[i] = 1;
            ensemble.final_positions[i] = {nan, nan};
        }
    });

    for (std::size_t i = 0; i < ensemble.n; ++i)
    {
        if (failed[i])
            ensemble.failed.push_back(i);
    }
    if (static_cast<double>(ensemble.failed.size())
        > options.max_failure_fraction * static_cast<double>(ensemble.n))
    {
        throw NumericalError(std::to_string(ensemble.failed.size()) + " of "
                             + std::to_string(ensemble.n)
                             + " trajectories failed to integrate");
    }
    return ensemble;
}

}  // namespace bohm
