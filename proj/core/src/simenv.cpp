#include "netorch/simenv.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "field_reader.hpp"
#include "netorch/errors.hpp"
#include "netorch/rng.hpp"

namespace netorch {

namespace {

void validate_geometry(const Geometry& g) {
  auto bad = [](const std::string& m) { throw Error(ErrorCode::kInvalidGeometry, m); };
  if (!std::isfinite(g.cell_radius) || g.cell_radius <= 0) bad("cell_radius must be > 0");
  if (!std::isfinite(g.min_distance) || g.min_distance < 0) bad("min_distance must be >= 0");
  // The UE is drawn in the cell's square; a min_distance past the
  // half-side could make rejection sampling spin forever.
  if (g.min_distance >= g.cell_radius) bad("min_distance must be < cell_radius");
  if (!std::isfinite(g.pathloss_exponent) || g.pathloss_exponent <= 0) {
    bad("pathloss_exponent must be > 0");
  }
  if (!std::isfinite(g.pathloss_intercept_db)) bad("pathloss_intercept_db must be finite");
  if (!std::isfinite(g.shadowing_std_db) || g.shadowing_std_db < 0) {
    bad("shadowing_std_db must be >= 0");
  }
}

struct GridShape {
  std::size_t cols = 0, rows = 0;  // cells across x and y
};

GridShape grid_shape(std::size_t num_cells) {
  auto root = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(num_cells))));
  if (root * root == num_cells) return {root, root};
  return {num_cells, 1};  // line fallback keeps every L valid
}

double wrap(double x, double width) {
  x = std::fmod(x, width);
  return x < 0 ? x + width : x;
}

// One standard normal via Box-Muller; consumes two uniforms from the
// stream so each (BS, UE) shadowing pair has its own deterministic draw.
double standard_normal(SplitMix64& rng) {
  const double u1 = rng.uniform_pos();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

double pathloss_gain(double distance, const Geometry& geometry) {
  // Below ~1 m the far-field model is meaningless (and log10 would blow
  // up); interfering UEs can in principle land arbitrarily close to a
  // neighboring BS, so clamp.
  const double d = std::max(distance, 1.0);
  const double gain_db = -geometry.pathloss_intercept_db -
                         10.0 * geometry.pathloss_exponent * std::log10(d) -
                         kNoiseFloorDbm;
  return std::pow(10.0, gain_db / 10.0);
}

double torus_distance(double ax, double ay, double bx, double by,
                      double width, double height) {
  double dx = std::abs(ax - bx);
  double dy = std::abs(ay - by);
  dx = std::min(dx, width - dx);
  dy = std::min(dy, height - dy);
  return std::hypot(dx, dy);
}

Scenario generate_scenario(std::size_t num_cells, std::size_t num_ues,
                           std::size_t num_antennas, uint64_t seed,
                           const Geometry& geometry) {
  if (num_cells < 1 || num_ues < 1 || num_antennas < 1) {
    throw Error(ErrorCode::kInvalidGeometry, "L, K and M must all be >= 1");
  }
  validate_geometry(geometry);

  Scenario s;
  s.num_cells = num_cells;
  s.num_ues = num_ues;
  s.num_antennas = num_antennas;
  s.seed = seed;
  s.geometry = geometry;

  const double pitch = 2.0 * geometry.cell_radius;
  const GridShape grid = grid_shape(num_cells);
  const double width = static_cast<double>(grid.cols) * pitch;
  const double height = static_cast<double>(grid.rows) * pitch;

  s.bs_positions = Matrix(num_cells, 2);
  for (std::size_t j = 0; j < num_cells; ++j) {
    s.bs_positions(j, 0) = (static_cast<double>(j % grid.cols) + 0.5) * pitch;
    s.bs_positions(j, 1) = (static_cast<double>(j / grid.cols) + 0.5) * pitch;
  }

  s.ue_positions = Matrix(num_cells * num_ues, 2);
  for (std::size_t j = 0; j < num_cells; ++j) {
    for (std::size_t k = 0; k < num_ues; ++k) {
      const std::size_t ue = j * num_ues + k;
      SplitMix64 rng = substream(seed, "ue_pos", ue);
      double dx = 0, dy = 0;
      bool placed = false;
      for (int attempt = 0; attempt < 10000; ++attempt) {
        dx = (rng.uniform() - 0.5) * pitch;
        dy = (rng.uniform() - 0.5) * pitch;
        if (std::hypot(dx, dy) >= geometry.min_distance) {
          placed = true;
          break;
        }
      }
      if (!placed) {
        throw Error(ErrorCode::kInvalidGeometry,
                    "could not place a UE outside min_distance");
      }
      s.ue_positions(ue, 0) = wrap(s.bs_positions(j, 0) + dx, width);
      s.ue_positions(ue, 1) = wrap(s.bs_positions(j, 1) + dy, height);
    }
  }

  recompute_gains(s);
  return s;
}

void recompute_gains(Scenario& s) {
  validate_geometry(s.geometry);
  const std::size_t L = s.num_cells;
  const std::size_t total_ues = L * s.num_ues;
  if (s.bs_positions.rows != L || s.bs_positions.cols != 2 ||
      s.ue_positions.rows != total_ues || s.ue_positions.cols != 2) {
    throw Error(ErrorCode::kInvalidGeometry, "position matrices have wrong shape");
  }
  const double pitch = 2.0 * s.geometry.cell_radius;
  const GridShape grid = grid_shape(L);
  const double width = static_cast<double>(grid.cols) * pitch;
  const double height = static_cast<double>(grid.rows) * pitch;

  s.large_scale_gain = Matrix(L, total_ues);
  for (std::size_t l = 0; l < L; ++l) {
    for (std::size_t ue = 0; ue < total_ues; ++ue) {
      const double d = torus_distance(s.bs_positions(l, 0), s.bs_positions(l, 1),
                                      s.ue_positions(ue, 0), s.ue_positions(ue, 1),
                                      width, height);
      double gain = pathloss_gain(d, s.geometry);
      if (s.geometry.shadowing_std_db > 0) {
        SplitMix64 rng = substream(s.seed, "shadowing", l * total_ues + ue);
        const double shadow_db = s.geometry.shadowing_std_db * standard_normal(rng);
        gain *= std::pow(10.0, shadow_db / 10.0);
      }
      s.large_scale_gain(l, ue) = gain;
    }
  }
}

PowerProblem scenario_to_power_problem(const Scenario& s, double p_max) {
  PowerProblem problem;
  problem.num_cells = s.num_cells;
  problem.num_ues = s.num_ues;
  problem.cross_gain = s.large_scale_gain;
  problem.noise = 1.0;
  problem.p_max = p_max;
  problem.signal_gain = Matrix(s.num_cells, s.num_ues);
  for (std::size_t j = 0; j < s.num_cells; ++j) {
    for (std::size_t k = 0; k < s.num_ues; ++k) {
      problem.signal_gain(j, k) = static_cast<double>(s.num_antennas) *
                                  s.large_scale_gain(j, j * s.num_ues + k);
    }
  }
  validate_problem(problem);
  return problem;
}

BandwidthProblem scenario_to_bandwidth_problem(const Scenario& s, std::size_t cell,
                                               double total_bw, double per_ue_power,
                                               double n0) {
  if (cell >= s.num_cells) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "cell " + std::to_string(cell) + " of " + std::to_string(s.num_cells));
  }
  BandwidthProblem problem;
  problem.total_bw = total_bw;
  problem.effective_snr.reserve(s.num_ues);
  for (std::size_t k = 0; k < s.num_ues; ++k) {
    problem.effective_snr.push_back(s.large_scale_gain(cell, cell * s.num_ues + k) *
                                    per_ue_power / n0);
  }
  validate_problem(problem);
  return problem;
}

Json Scenario::to_json() const {
  return Json{
      {"version", 1},
      {"num_cells", num_cells},
      {"num_ues", num_ues},
      {"num_antennas", num_antennas},
      {"seed", seed},
      {"geometry",
       {{"cell_radius", geometry.cell_radius},
        {"min_distance", geometry.min_distance},
        {"pathloss_exponent", geometry.pathloss_exponent},
        {"pathloss_intercept_db", geometry.pathloss_intercept_db},
        {"shadowing_std_db", geometry.shadowing_std_db}}},
      {"bs_positions", bs_positions},
      {"ue_positions", ue_positions},
      {"large_scale_gain", large_scale_gain},
  };
}

Scenario Scenario::from_json(const Json& j) {
  FieldReader top(j, "scenario");
  const Json& version = top.get("version");
  if (!version.is_number_integer() || version.get<int64_t>() != 1) {
    throw Error(ErrorCode::kParseError, "scenario version must be 1");
  }
  Scenario s;
  auto size_field = [&](const char* name) {
    const Json& v = top.get(name);
    if (!v.is_number_unsigned() || v.get<uint64_t>() < 1) {
      throw Error(ErrorCode::kParseError,
                  std::string("scenario.") + name + " must be a positive integer");
    }
    return v.get<std::size_t>();
  };
  s.num_cells = size_field("num_cells");
  s.num_ues = size_field("num_ues");
  s.num_antennas = size_field("num_antennas");
  const Json& seed = top.get("seed");
  if (!seed.is_number_unsigned()) {
    throw Error(ErrorCode::kParseError, "scenario.seed must be a non-negative integer");
  }
  s.seed = seed.get<uint64_t>();

  FieldReader geom(top.get("geometry"), "scenario.geometry");
  s.geometry.cell_radius = require_number(geom.get("cell_radius"), "cell_radius");
  s.geometry.min_distance = require_number(geom.get("min_distance"), "min_distance");
  s.geometry.pathloss_exponent =
      require_number(geom.get("pathloss_exponent"), "pathloss_exponent");
  s.geometry.pathloss_intercept_db =
      require_number(geom.get("pathloss_intercept_db"), "pathloss_intercept_db");
  s.geometry.shadowing_std_db =
      require_number(geom.get("shadowing_std_db"), "shadowing_std_db");
  geom.reject_unknown();

  s.bs_positions = matrix_from_json(top.get("bs_positions"));
  s.ue_positions = matrix_from_json(top.get("ue_positions"));
  s.large_scale_gain = matrix_from_json(top.get("large_scale_gain"));
  top.reject_unknown();

  const std::size_t total_ues = s.num_cells * s.num_ues;
  if (s.bs_positions.rows != s.num_cells || s.bs_positions.cols != 2 ||
      s.ue_positions.rows != total_ues || s.ue_positions.cols != 2 ||
      s.large_scale_gain.rows != s.num_cells || s.large_scale_gain.cols != total_ues) {
    throw Error(ErrorCode::kParseError, "scenario matrices have inconsistent shapes");
  }
  for (double g : s.large_scale_gain.data) {
    if (!(g > 0) || !std::isfinite(g)) {
      throw Error(ErrorCode::kParseError, "scenario gains must be positive and finite");
    }
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open scenario file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::kIoError, "cannot read scenario file '" + path + "'");
  return Scenario::from_json(parse_json(buffer.str(), "scenario file '" + path + "'"));
}

void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open '" + path + "' for writing");
  out << canonical_dump(s.to_json()) << '\n';
  if (!out.flush()) throw Error(ErrorCode::kIoError, "cannot write '" + path + "'");
}

}  // namespace netorch
