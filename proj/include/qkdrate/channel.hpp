#pragma once

#include "qkdrate/protocol.hpp"

namespace qkdrate {

// Public statistics of one protocol run. Expectation-valued (real) when
// produced by expected_counts(), integer-valued when produced by the
// Monte-Carlo simulator.
struct ObservedCounts {
  PerIntensity<double> n_z;        // Alice Z, Bob Z-line click
  PerIntensity<double> n_x;        // Alice X, Bob X-line click
  PerIntensity<double> n_x_error;  // subset of n_x with differing bits
  PerIntensity<double> n_cross;    // clicks on both lines, any basis
  double n_sift = 0.0;             // sum of n_z
  double e_bit = 0.0;              // bit error rate of the sifted key
};

// Linear-loss channel model for threshold detectors behind a passive beam
// splitter. The X line sees mean photon number mu*eta*q, the Z line
// mu*eta*(1-q); each of the four detectors fires a dark count with
// probability d.

// P(Bob clicks only on the `basis` line | Alice chose `basis`, label w).
double conditional_click_prob(Basis basis, Intensity w, const ProtocolParams& params,
                              const ChannelParams& channel);

// P(Bob clicks only on the `basis` line with a dark-count-induced bit error
// | Alice chose `basis`, label w). Misalignment is not included.
double conditional_error_prob(Basis basis, Intensity w, const ProtocolParams& params,
                              const ChannelParams& channel);

// P(at least one click on each line | label w).
double cross_click_prob(Intensity w, const ProtocolParams& params,
                        const ChannelParams& channel);

// P(no detector fires | label w).
double no_click_prob(Intensity w, const ProtocolParams& params,
                     const ChannelParams& channel);

// Expected statistics over N pulses. Misalignment enters additively: to
// e_bit directly, and as delta_mis * n_x to the X-basis error counts.
// Throws DegenerateChannelError when no sifted detections are expected.
ObservedCounts expected_counts(const ProtocolParams& params, const ChannelParams& channel);

// Same formulas without the empty-sift check; e_bit falls back to delta_mis.
ObservedCounts expected_counts_unchecked(const ProtocolParams& params,
                                         const ChannelParams& channel);

}  // namespace qkdrate
