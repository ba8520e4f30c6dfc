#pragma once

#include <iosfwd>

#include "aicon/drawer/episode.hpp"

namespace aicon::harness {

// Grid over a coordinate plane of the EE workspace; the third coordinate is
// held at the snapshot's value.
struct FieldOptions {
  std::string axes = "xy";  // two of {x, y, z}
  double min_a = 0.0, max_a = 1.0;
  double min_b = -0.5, max_b = 0.5;
  int n_a = 21, n_b = 21;
};

// Runs an episode up to `tick` and returns the network in that state.
std::unique_ptr<drawer::DrawerNetwork> snapshot_at_tick(
    const drawer::Scenario& scenario, drawer::EpisodeMode mode, uint64_t seed,
    int tick);

// Places the EE estimate at each grid point, refreshes the gate quantities,
// evaluates all paths and writes one row per point: the two grid
// coordinates, the steepest path's behavior label, and the a_ee gradient.
// Returns the number of grid points clipped to the workspace bounds.
int sample_field(drawer::DrawerNetwork& net, const FieldOptions& opts,
                 std::ostream& out);

}  // namespace aicon::harness
