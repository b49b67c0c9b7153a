#pragma once

// Monte Carlo experiments comparing finite-N trajectories with the limit
// curve, and their flat-file outputs.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "grfopt/config.hpp"
#include "grfopt/predictor.hpp"
#include "grfopt/sampler.hpp"

namespace grfopt {

/// Number of worker threads: GRFOPT_WORKERS if set and positive, otherwise
/// the available hardware parallelism.
std::size_t worker_count();

/// Runs body(0..count-1) on the worker pool. The first exception thrown by
/// any task is rethrown after all workers have stopped.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

/// Stream id of one trajectory; `role` separates the members of a pair.
std::uint64_t trajectory_stream(std::uint64_t N, std::size_t replication, unsigned role);

LimitCurve run_predict(const ExperimentConfig& config);

struct SimulateRun {
  std::vector<double> epsilons;
  /// Sorted by (N, replication).
  std::vector<TrajectoryRecord> records;
  std::vector<std::size_t> replications;
};

SimulateRun run_simulate(const ExperimentConfig& config);

struct SampleRow {
  std::uint64_t N = 0;
  std::size_t replication = 0;
  std::size_t step = 0;
  double f_value = 0.0;
  double grad_norm_sq = 0.0;
};

struct ConvergenceCell {
  std::uint64_t N = 0;
  std::size_t step = 0;
  std::size_t count = 0;
  double mean_f = 0.0, sd_f = 0.0, se_f = 0.0;
  double mean_g = 0.0, sd_g = 0.0, se_g = 0.0;
  double f_limit = 0.0, g_limit = 0.0;
  double gap_f = 0.0, gap_g = 0.0;
  /// 3 se_f + 2 / sqrt(N)
  double bound_f = 0.0;
};

struct ConvergenceReport {
  std::vector<std::uint64_t> n_list;
  std::size_t steps = 0;  // number of tracked steps T + 1
  /// Sorted by (N, step).
  std::vector<ConvergenceCell> cells;
  /// Log-log slope of the standard deviation against N, per step.
  std::vector<double> slope_f;
  std::vector<double> slope_g;

  const ConvergenceCell& cell(std::uint64_t N, std::size_t step) const;
  bool gaps_within_bound() const;
  bool slopes_within(double lo, double hi) const;
};

ConvergenceReport build_convergence_report(const std::vector<SampleRow>& samples,
                                           const std::vector<double>& f_limit,
                                           const std::vector<double>& g_limit);

struct VerifyRun {
  LimitCurve curve;
  std::vector<SampleRow> samples;
  ConvergenceReport report;
};

VerifyRun run_verify(const ExperimentConfig& config);

struct TwoInitRow {
  std::uint64_t N = 0;
  std::size_t pair = 0;
  std::vector<double> step_gaps;  // |f1(X_k) - f2(X_k)|
  double max_gap = 0.0;
  std::size_t argmax_step = 0;
};

struct TwoInitReport {
  std::vector<std::uint64_t> n_list;
  std::vector<TwoInitRow> rows;  // sorted by (N, pair)
  std::vector<double> median_max_gap;

  bool medians_strictly_decreasing() const;
};

/// Pairs of trajectories with the same lambda; `shared_stream` gives both
/// members the same stream (control run, gap identically zero).
TwoInitReport run_two_init(const ExperimentConfig& config, bool shared_stream = false);

struct HaltingEntry {
  double epsilon_requested = 0.0;
  double epsilon = 0.0;
  HaltingStep tau;
  HaltingStep tau_plus;
  /// Frequency of T_eps == tau_eps per N.
  std::vector<double> frequency;

  bool frequency_non_decreasing() const;
};

struct HaltingReport {
  std::vector<std::uint64_t> n_list;
  std::vector<double> g_limit;
  std::vector<HaltingEntry> entries;
};

/// Moves every epsilon at least 1% (relative) away from each diagonal value
/// of the limiting gradient Gram matrix.
std::vector<double> adjust_epsilons(const LimitCurve& curve, const std::vector<double>& requested);

HaltingReport run_halting(const ExperimentConfig& config);

void write_predict_csv(std::ostream& out, const LimitCurve& curve);
void write_simulate_csv(std::ostream& out, const SimulateRun& run);
/// Raw samples with the limit values alongside; doubles at full precision.
void write_verify_csv(std::ostream& out, const VerifyRun& run);
/// Rebuilds the convergence report from a CSV written by write_verify_csv.
ConvergenceReport read_verify_csv(std::istream& in);
/// Per (N, step) summary preceded by '#' lines documenting the thresholds.
void write_convergence_summary(std::ostream& out, const ConvergenceReport& report);
void write_two_init_csv(std::ostream& out, const TwoInitReport& report);
void write_halting_csv(std::ostream& out, const HaltingReport& report);

/// "inf" for an unreached halting step.
std::string format_halting(const HaltingStep& step);

}  // namespace grfopt
