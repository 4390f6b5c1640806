#pragma once

#include <string>

#include "sysmorse/critical.hpp"
#include "sysmorse/wp.hpp"

namespace sysmorse {

enum class FlowMetric { euclidean, wp };
enum class FlowDirection { down, up };
enum class TerminalKind { critical, boundary, step_limit };

struct FlowSample {
    double t = 0;
    MarkovPoint point;
    double syst = 0;
    double l_min = 0;
};

struct Trajectory {
    std::vector<FlowSample> samples;
    FlowMetric metric = FlowMetric::euclidean;
    FlowDirection direction = FlowDirection::down;
    TerminalKind terminal = TerminalKind::step_limit;
    int orbit_id = -1; // index into FlowConfig::known_orbits when terminal == critical
};

struct FlowConfig {
    FlowMetric metric = FlowMetric::euclidean;
    FlowDirection direction = FlowDirection::down;
    double step_scale = 0.03; // target coordinate motion per RK4 step
    double dt_max = 0.5;
    int max_steps = 30000;
    int wp_trunc = 10;
    std::vector<MarkovPoint> known_orbits; // normalized representatives
};

// Adaptive RK4 on the (metric-)gradient field of syst with constraint
// retraction after every stage. Stops at critical points, at the boundary
// (l_min below tol::flow_boundary_lmin), or at the step cap. A state passing
// within tol::orbit_match_dist of a known orbit terminates there.
Trajectory integrate(const MarkovPoint& start, const SystParams& params, const FlowConfig& config);

struct DecayFit {
    double rate = 0; // d/dt log l_min
    double intercept = 0;
    double r2 = 0;
    int n = 0;
};

// Least-squares slope of log l_min versus t over the terminal window
// l_min < 0.2; requires a boundary trajectory with at least 20 such samples.
DecayFit boundary_decay_rate(const Trajectory& traj);

// Downward trajectories seeded at +-eps along the negative-eigenvalue
// directions of an index >= 1 critical point; index-2 points get a fan of 36
// directions with symmetry-axis directions snapped exactly.
std::vector<Trajectory> separatrix_search(const CriticalPoint& high, const SystParams& params,
                                          const FlowConfig& config);

void write_trajectory_csv(const Trajectory& traj, const std::string& path);
void write_flow_svg(const std::vector<Trajectory>& trajs, const std::string& path);

} // namespace sysmorse
