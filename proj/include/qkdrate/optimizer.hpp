#pragma once

#include <vector>

#include "qkdrate/keyrate.hpp"
#include "qkdrate/protocol.hpp"

namespace qkdrate {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Search box over (p_Z, mu_S). q is tied to 1 - p_Z during the search.
struct OptimizationSpec {
  Interval pz_range{0.55, 0.99};
  Interval mu_s_range{0.06, 1.0};
  unsigned grid_resolution = 21;  // points per axis, edges included
  unsigned refine_iterations = 40;
  unsigned threads = 1;
};

// Throws DomainError when the box leaves (0.5, 1) x (mu_D, inf) or the grid
// has fewer than two points per axis.
void validate_spec(const OptimizationSpec& spec, const ProtocolParams& params);

struct OptimizationResult {
  ProtocolParams best_params;
  KeyRateResult result;
  bool feasible = false;  // false when no candidate produced a positive rate
};

// Coarse grid over (p_Z, mu_S) followed by coordinate-wise golden-section
// refinement of the key length per pulse. Refinement steps are accepted only
// when they improve on the incumbent, so the result dominates every grid
// point. Deterministic for a fixed spec.
OptimizationResult optimize(const ProtocolParams& params, const ChannelParams& channel,
                            const SecurityParams& sec, const OptimizationSpec& spec,
                            Mode mode, Baseline baseline);

struct SweepRow {
  double eta = 0.0;
  ProtocolParams params;
  KeyRateResult result;
  bool feasible = false;
  bool degenerate = false;  // channel gave no sifted key; recorded as R = 0
};

// One row per channel transmission, in grid order. Degenerate channels never
// abort the sweep.
std::vector<SweepRow> sweep(const ProtocolParams& params, const SecurityParams& sec,
                            const std::vector<double>& eta_grid, Mode mode,
                            Baseline baseline, bool optimize_each,
                            const OptimizationSpec& spec = {});

// n points from lo to hi inclusive, geometric when log_spacing is set.
std::vector<double> make_grid(double lo, double hi, unsigned n, bool log_spacing);

}  // namespace qkdrate
