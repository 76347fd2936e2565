#pragma once

#include <cstdint>
#include <string>

#include "netorch/canonical.hpp"
#include "netorch/solvers.hpp"

namespace netorch {

// All gains are normalized by the receiver noise power, so downstream
// problems use noise = 1. The reference noise floor baked into that
// normalization (thermal noise over a typical cellular bandwidth plus
// noise figure):
constexpr double kNoiseFloorDbm = -94.0;

struct Geometry {
  double cell_radius = 250.0;        // meters; grid pitch is 2x this
  double min_distance = 35.0;        // meters, UE-to-serving-BS minimum
  double pathloss_exponent = 3.76;
  double pathloss_intercept_db = 35.3;
  double shadowing_std_db = 8.0;     // log-normal; 0 disables shadowing

  bool operator==(const Geometry&) const = default;
};

// A generated multi-cell layout with noise-normalized large-scale gains.
// Cells tile a wrap-around square (torus), so edge cells see the same
// interference as center cells. Non-square cell counts fall back to a
// 1 x L line of cells (still wrapped).
struct Scenario {
  std::size_t num_cells = 0;    // L
  std::size_t num_ues = 0;      // K per cell
  std::size_t num_antennas = 0; // M
  uint64_t seed = 0;
  Geometry geometry;
  Matrix bs_positions;          // L x 2, meters
  Matrix ue_positions;          // (L*K) x 2, meters, row j*K+k
  Matrix large_scale_gain;      // L x (L*K), beta_{l->(j,k)}, linear

  bool operator==(const Scenario&) const = default;

  Json to_json() const;
  static Scenario from_json(const Json& j);
};

// Noise-normalized linear gain of the pathloss model at distance d meters
// (no shadowing): 10^((-intercept - 10*exponent*log10(d) - noise_floor)/10).
double pathloss_gain(double distance, const Geometry& geometry);

// Shortest displacement/distance on the wrap-around rectangle of the
// scenario's cell grid.
double torus_distance(double ax, double ay, double bx, double by,
                      double width, double height);

// Places BSs on the grid, drops each UE uniformly in its serving cell's
// square (rejection-sampled to honor min_distance) and fills
// large_scale_gain. Deterministic in (seed, parameters): positions and
// shadowing draw from per-entity SplitMix64 substreams. Raises
// InvalidGeometry.
Scenario generate_scenario(std::size_t num_cells, std::size_t num_ues,
                           std::size_t num_antennas, uint64_t seed,
                           const Geometry& geometry = Geometry{});

// Recomputes large_scale_gain from the stored positions and geometry
// (shadowing re-drawn from the seed). Exposed so tests can pin positions
// and check gains against the closed form.
void recompute_gains(Scenario& s);

// a_jk = M * beta_{j->(j,k)}, cross gains copied, noise = 1.
PowerProblem scenario_to_power_problem(const Scenario& s, double p_max);

// Single-cell bandwidth problem for cell j: c_k = beta_{j->(j,k)} *
// per_ue_power / n0. Raises IndexOutOfRange for j >= L.
BandwidthProblem scenario_to_bandwidth_problem(const Scenario& s, std::size_t cell,
                                               double total_bw, double per_ue_power,
                                               double n0);

Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& s, const std::string& path);

}  // namespace netorch
