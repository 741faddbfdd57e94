#include "qkdrate/optimizer.hpp"

#include <cmath>
#include <limits>

#include "qkdrate/errors.hpp"
#include "qkdrate/parallel.hpp"

namespace qkdrate {
namespace {

constexpr double kInvGolden = 0.6180339887498949;  // (sqrt(5) - 1) / 2
constexpr unsigned kRefineRounds = 4;
constexpr double kWorst = -std::numeric_limits<double>::infinity();

ProtocolParams with_point(ProtocolParams p, double pz, double mu_s) {
  p.p_z = pz;
  p.p_x = 1.0 - pz;
  p.q = 1.0 - pz;
  p.mu_signal = mu_s;
  return p;
}

// Key length per pulse; negative values carry information in the region
// where the clamped rate is flat at zero.
struct Objective {
  const ProtocolParams& base;
  const ChannelParams& channel;
  const SecurityParams& sec;
  Mode mode;
  Baseline baseline;

  double operator()(double pz, double mu_s) const {
    const auto p = with_point(base, pz, mu_s);
    if (!validate_params(p).empty()) return kWorst;
    try {
      const auto r = key_rate(p, channel, sec, mode, baseline);
      return r.key_length / static_cast<double>(p.pulses);
    } catch (const DegenerateChannelError&) {
      return kWorst;
    }
  }
};

double axis_point(const Interval& r, unsigned i, unsigned n) {
  if (i + 1 == n) return r.hi;
  return r.lo + (r.hi - r.lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

// Golden-section maximization of f on [lo, hi]; returns the best abscissa
// seen together with its value.
template <typename F>
std::pair<double, double> golden_max(F&& f, double lo, double hi, unsigned iterations) {
  double x1 = hi - kInvGolden * (hi - lo);
  double x2 = lo + kInvGolden * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  for (unsigned it = 0; it < iterations; ++it) {
    if (f1 >= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvGolden * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvGolden * (hi - lo);
      f2 = f(x2);
    }
  }
  return f1 >= f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

}  // namespace

void validate_spec(const OptimizationSpec& spec, const ProtocolParams& params) {
  const auto& pz = spec.pz_range;
  if (!(pz.lo > 0.5 && pz.hi < 1.0 && pz.lo <= pz.hi)) {
    throw DomainError("optimizer: p_Z range must lie inside (0.5, 1)");
  }
  const auto& mu = spec.mu_s_range;
  if (!(mu.lo > params.mu_decoy && mu.lo <= mu.hi)) {
    throw DomainError("optimizer: mu_S range must lie above mu_D");
  }
  if (spec.grid_resolution < 2) {
    throw DomainError("optimizer: grid_resolution must be at least 2");
  }
}

OptimizationResult optimize(const ProtocolParams& params, const ChannelParams& channel,
                            const SecurityParams& sec, const OptimizationSpec& spec,
                            Mode mode, Baseline baseline) {
  validate_spec(spec, params);
  require_valid(channel);
  const Objective objective{params, channel, sec, mode, baseline};
  const unsigned n = spec.grid_resolution;

  std::vector<double> values(static_cast<std::size_t>(n) * n, kWorst);
  parallel_for(values.size(), spec.threads, [&](std::size_t k) {
    const auto i = static_cast<unsigned>(k / n);
    const auto j = static_cast<unsigned>(k % n);
    values[k] = objective(axis_point(spec.pz_range, i, n), axis_point(spec.mu_s_range, j, n));
  });

  std::size_t best_k = 0;
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (values[k] > values[best_k]) best_k = k;
  }
  double best_pz = axis_point(spec.pz_range, static_cast<unsigned>(best_k / n), n);
  double best_mu = axis_point(spec.mu_s_range, static_cast<unsigned>(best_k % n), n);
  double best = values[best_k];

  if (spec.refine_iterations > 0 && best > kWorst) {
    double step_pz = (spec.pz_range.hi - spec.pz_range.lo) / (n - 1);
    double step_mu = (spec.mu_s_range.hi - spec.mu_s_range.lo) / (n - 1);
    for (unsigned round = 0; round < kRefineRounds; ++round) {
      {
        const double lo = std::max(spec.pz_range.lo, best_pz - step_pz);
        const double hi = std::min(spec.pz_range.hi, best_pz + step_pz);
        const auto [x, v] = golden_max(
            [&](double pz) { return objective(pz, best_mu); }, lo, hi,
            spec.refine_iterations);
        if (v > best) {
          best = v;
          best_pz = x;
        }
      }
      {
        const double lo = std::max(spec.mu_s_range.lo, best_mu - step_mu);
        const double hi = std::min(spec.mu_s_range.hi, best_mu + step_mu);
        const auto [x, v] = golden_max(
            [&](double mu) { return objective(best_pz, mu); }, lo, hi,
            spec.refine_iterations);
        if (v > best) {
          best = v;
          best_mu = x;
        }
      }
      step_pz /= 2.0;
      step_mu /= 2.0;
    }
  }

  OptimizationResult out;
  out.best_params = with_point(params, best_pz, best_mu);
  if (best > kWorst) {
    out.result = key_rate(out.best_params, channel, sec, mode, baseline);
  } else {
    out.result.mode = mode;
    out.result.baseline = baseline;
  }
  out.feasible = out.result.rate > 0.0;
  return out;
}

std::vector<SweepRow> sweep(const ProtocolParams& params, const SecurityParams& sec,
                            const std::vector<double>& eta_grid, Mode mode,
                            Baseline baseline, bool optimize_each,
                            const OptimizationSpec& spec) {
  for (double eta : eta_grid) require_valid(ChannelParams{eta});
  if (optimize_each) validate_spec(spec, params);

  std::vector<SweepRow> rows(eta_grid.size());
  OptimizationSpec inner = spec;
  inner.threads = 1;
  parallel_for(rows.size(), spec.threads, [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.eta = eta_grid[i];
    row.params = params;
    row.result.mode = mode;
    row.result.baseline = baseline;
    const ChannelParams channel{eta_grid[i]};
    try {
      if (optimize_each) {
        auto opt = optimize(params, channel, sec, inner, mode, baseline);
        row.params = opt.best_params;
        row.result = opt.result;
      } else {
        row.result = key_rate(params, channel, sec, mode, baseline);
      }
    } catch (const DegenerateChannelError&) {
      row.degenerate = true;
    }
    row.feasible = row.result.rate > 0.0;
  });
  return rows;
}

std::vector<double> make_grid(double lo, double hi, unsigned n, bool log_spacing) {
  if (n == 0) return {};
  if (n == 1) return {lo};
  if (log_spacing && !(lo > 0.0)) throw DomainError("log grid needs a positive lower edge");
  std::vector<double> grid(n);
  for (unsigned i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n - 1);
    grid[i] = log_spacing ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t;
  }
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

}  // namespace qkdrate
