#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bohm/dynamics.hpp"
#include "bohm/model.hpp"

namespace bohm
{

//! Normal CDF used as the reference distribution in KS comparisons.
struct NormalCdf
{
    double mean = 0;
    double sigma = 1;

    double operator()(double x) const;
};

//! Kolmogorov-Smirnov distance between the empirical CDF of samples and cdf.
double ks_statistic(std::span<double const> samples, NormalCdf const& cdf);

struct SampleMoments
{
    double mean = 0;
    double std = 0;  // population (1/n) standard deviation
};

SampleMoments moments(std::span<double const> samples);

struct ObservableRecord
{
    Observable observable = Observable::Y1;
    double empirical_mean = 0;
    double empirical_std = 0;
    double analytic_mean = 0;
    double analytic_std = 0;
    double ks = 0;
    std::size_t n = 0;
};

struct EquivarianceReport
{
    double t = 0;
    std::vector<ObservableRecord> records;  // y1, y2, y1+y2, y1-y2

    double max_ks() const;
    ObservableRecord const& at(Observable obs) const;
};

//! Compare positions at time t with the analytic marginals of the state.
EquivarianceReport compare_with_analytic(TwoParticleState const& state,
                                         std::span<Position const> positions,
                                         double t);

/*!
 * Sample the equilibrium density at t=0, propagate to each requested time,
 * and compare all four observables with their analytic normal laws.
 *
 * Each time in `times` must lie in [0, config.t_final]; t=0 compares the raw
 * samples without propagation.
 */
std::vector<EquivarianceReport> equivariance_check(TwoParticleState const& state,
                                                   std::size_t n,
                                                   std::uint64_t seed,
                                                   IntegratorConfig const& config,
                                                   std::span<double const> times,
                                                   unsigned parallel_width = 1);

struct ConstraintTimeRecord
{
    double t = 0;
    double max_abs_narrow = 0;        // max |y1+y2| (or |y1-y2|) over the ensemble
    double narrow_std_empirical = 0;
    double narrow_std_equilibrium = 0;  // constraint_width(t) of the state
    double wide_std_empirical = 0;
    double wide_std_analytic = 0;
};

struct ConstraintReport
{
    std::size_t n = 0;
    Combination surface = Combination::Sum;
    double max_abs_narrow = 0;  // over the ensemble and all recorded times
    std::vector<ConstraintTimeRecord> records;

    //! Equilibrium width over empirical width of the narrow combination at
    //! t_final; infinite when the ensemble stays exactly on the surface.
    double mismatch_ratio() const;
};

/*!
 * Start trajectories exactly on the narrow surface and track how far they
 * leave it. Records are taken at every config.record_stride-th step (every
 * step when the stride is 0) so the max is taken over the whole time grid.
 */
ConstraintReport ga_constraint_experiment(TwoParticleState const& state,
                                          std::size_t n,
                                          std::uint64_t seed,
                                          IntegratorConfig const& config,
                                          unsigned parallel_width = 1);

struct SweepRow
{
    double delta_y_i = 0;
    double delta_y_f = 0;  // analytic narrow width at t_final
    double delta_y_f_empirical = 0;
    double ratio = 0;      // R = delta_y_f / delta_y_i
    double ks_final = 0;   // max KS over the four observables
    //! Large-time limit of R for free spreading: hbar t / (m delta_y_i^2).
    double ratio_asymptote = 0;
};

struct SweepResult
{
    double t_final = 0;
    std::vector<SweepRow> rows;
    std::vector<std::string> warnings;
};

/*!
 * For each initial narrow width (spread of y1+y2 or y1-y2 at t=0), build the
 * state, run the equivariance check at t_final and tabulate the width ratio.
 * Widths must be positive and strictly decreasing.
 */
SweepResult regularization_sweep(TwoParticleState const& base,
                                 std::span<double const> widths,
                                 std::size_t n,
                                 std::uint64_t seed,
                                 IntegratorConfig const& config,
                                 unsigned parallel_width = 1);

//! State with the base's wide mode and the narrow combination width replaced.
TwoParticleState with_narrow_width(TwoParticleState const& base, double delta_y);

}  // namespace bohm
