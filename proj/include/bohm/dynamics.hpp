#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "bohm/guidance.hpp"
#include "bohm/model.hpp"

namespace bohm
{

//! Raised when the integrator or an ensemble cannot produce a valid result.
class NumericalError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

enum class IntegratorMethod
{
    RK4Fixed,
    RK45Adaptive,
};

struct IntegratorConfig
{
    IntegratorMethod method = IntegratorMethod::RK4Fixed;
    double dt = 1e-3;         // RK4Fixed step; initial trial step for RK45Adaptive
    double tolerance = 1e-9;  // RK45Adaptive only
    double t_final = 2.0;
    // Record every record_stride-th step; 0 keeps only the initial and final
    // samples.
    std::size_t record_stride = 0;
};

void validate(IntegratorConfig const& config);

struct Trajectory
{
    std::vector<double> times;
    std::vector<Position> positions;
};

/*!
 * Integrate the guidance ODE from `start` at t=0 to config.t_final.
 *
 * Integration runs in mode coordinates (Y, y), where the two equations
 * decouple; positions are reported in (y1, y2).
 */
Trajectory integrate_trajectory(TwoParticleState const& state,
                                Position start,
                                IntegratorConfig const& config);

//! Same as integrate_trajectory but returns only the final position.
Position integrate_to_final(GuidanceField const& field,
                            Position start,
                            IntegratorConfig const& config);

//! Exact trajectory through `start` at t=0, from the mode scaling law.
Position exact_position(TwoParticleState const& state, Position start, double t);

std::vector<Position> sample_equilibrium(TwoParticleState const& state,
                                         std::size_t n,
                                         std::uint64_t seed);

/*!
 * Sample the singular surface of the narrow combination: y1+y2 = 0 for
 * Combination::Sum, y1-y2 = 0 for Combination::Difference. The wide mode is
 * drawn from its t=0 density; the narrow mode coordinate is pinned at zero.
 */
std::vector<Position> sample_constraint_surface(TwoParticleState const& state,
                                                std::size_t n,
                                                std::uint64_t seed,
                                                Combination surface);

std::vector<Position> sample_constraint_surface(TwoParticleState const& state,
                                                std::size_t n,
                                                std::uint64_t seed);

struct EnsembleOptions
{
    unsigned parallel_width = 1;
    bool keep_trajectories = false;
    // Abort when more than this fraction of trajectories fail.
    double max_failure_fraction = 1e-3;
};

struct Ensemble
{
    std::uint64_t seed = 0;
    std::size_t n = 0;
    std::vector<Position> initial_positions;
    std::vector<Position> final_positions;  // NaN for failed trajectories
    std::vector<std::size_t> failed;        // indices, ascending
    IntegratorConfig config;
    std::optional<TwoParticleState> state;
    std::vector<Trajectory> trajectories;  // only when keep_trajectories

    //! Final positions of trajectories that succeeded.
    std::vector<Position> valid_final_positions() const;
};

Ensemble propagate_ensemble(TwoParticleState const& state,
                            std::vector<Position> initial_positions,
                            IntegratorConfig const& config,
                            EnsembleOptions const& options = {},
                            std::uint64_t seed = 0);

}  // namespace bohm
