#include "grfopt/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include "grfopt/errors.hpp"
#include "grfopt/stats.hpp"

namespace grfopt {

std::size_t worker_count() {
  if (const char* env = std::getenv("GRFOPT_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min(worker_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    while (!failed.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::uint64_t trajectory_stream(std::uint64_t N, std::size_t replication, unsigned role) {
  return (N << 24) | ((static_cast<std::uint64_t>(replication) & 0x3FFFFFu) << 2) | (role & 3u);
}

LimitCurve run_predict(const ExperimentConfig& config) {
  return predict(build_kernel(config.kernel), build_algorithm(config.algorithm), config.lambda,
                 config.steps, config.numerics.predictor_options());
}

namespace {

// All trajectories of the configured ladder, indexed (N index, replication).
std::vector<TrajectoryRecord> simulate_ladder(const ExperimentConfig& config, const KernelModel& kernel,
                                              const GsaSpec& gsa, const SamplerOptions& options,
                                              unsigned role) {
  const std::size_t m = config.replications;
  std::vector<TrajectoryRecord> records(config.n_list.size() * m);
  parallel_for(records.size(), [&](std::size_t idx) {
    const std::uint64_t N = config.n_list[idx / m];
    const std::size_t rep = idx % m;
    records[idx] = simulate_info_path(kernel, gsa, config.lambda, N, config.steps,
                                      trajectory_stream(N, rep, role), config.master_seed, options);
  });
  return records;
}

}  // namespace

SimulateRun run_simulate(const ExperimentConfig& config) {
  const KernelModel kernel = build_kernel(config.kernel);
  const GsaSpec gsa = build_algorithm(config.algorithm);
  SimulateRun run;
  run.epsilons = config.epsilons;
  run.records = simulate_ladder(config, kernel, gsa,
                                config.numerics.sampler_options(config.epsilons), 0);
  for (std::size_t i = 0; i < run.records.size(); ++i) {
    run.replications.push_back(i % config.replications);
  }
  return run;
}

const ConvergenceCell& ConvergenceReport::cell(std::uint64_t N, std::size_t step) const {
  for (const auto& c : cells) {
    if (c.N == N && c.step == step) return c;
  }
  throw ArgumentError("no convergence cell for the requested (N, step)");
}

bool ConvergenceReport::gaps_within_bound() const {
  return std::all_of(cells.begin(), cells.end(),
                     [](const ConvergenceCell& c) { return c.gap_f <= c.bound_f; });
}

bool ConvergenceReport::slopes_within(double lo, double hi) const {
  if (slope_f.empty()) return false;
  auto inside = [&](double s) { return s >= lo && s <= hi; };
  return std::all_of(slope_f.begin(), slope_f.end(), inside) &&
         std::all_of(slope_g.begin(), slope_g.end(), inside);
}

ConvergenceReport build_convergence_report(const std::vector<SampleRow>& samples,
                                           const std::vector<double>& f_limit,
                                           const std::vector<double>& g_limit) {
  std::map<std::pair<std::uint64_t, std::size_t>, std::pair<std::vector<double>, std::vector<double>>>
      groups;
  for (const auto& s : samples) {
    if (s.step >= f_limit.size()) throw ArgumentError("sample step beyond the limit curve");
    auto& g = groups[{s.N, s.step}];
    g.first.push_back(s.f_value);
    g.second.push_back(s.grad_norm_sq);
  }
  ConvergenceReport report;
  report.steps = f_limit.size();
  for (const auto& [key, values] : groups) {
    if (report.n_list.empty() || report.n_list.back() != key.first) report.n_list.push_back(key.first);
    const auto sf = stats::summarize(values.first);
    const auto sg = stats::summarize(values.second);
    ConvergenceCell c;
    c.N = key.first;
    c.step = key.second;
    c.count = sf.count;
    c.mean_f = sf.mean;
    c.sd_f = sf.sd;
    c.se_f = sf.se;
    c.mean_g = sg.mean;
    c.sd_g = sg.sd;
    c.se_g = sg.se;
    c.f_limit = f_limit[c.step];
    c.g_limit = g_limit[c.step];
    c.gap_f = std::abs(c.mean_f - c.f_limit);
    c.gap_g = std::abs(c.mean_g - c.g_limit);
    c.bound_f = 3.0 * c.se_f + 2.0 / std::sqrt(static_cast<double>(c.N));
    report.cells.push_back(c);
  }
  if (report.n_list.size() >= 2) {
    std::vector<double> ns(report.n_list.begin(), report.n_list.end());
    for (std::size_t step = 0; step < report.steps; ++step) {
      std::vector<double> sd_f, sd_g;
      for (auto N : report.n_list) {
        const auto& c = report.cell(N, step);
        sd_f.push_back(c.sd_f);
        sd_g.push_back(c.sd_g);
      }
      report.slope_f.push_back(stats::log_log_slope(ns, sd_f));
      report.slope_g.push_back(stats::log_log_slope(ns, sd_g));
    }
  }
  return report;
}

namespace {

std::vector<double> diagonal(const Matrix& m) {
  std::vector<double> out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) out[i] = m(i, i);
  return out;
}

}  // namespace

VerifyRun run_verify(const ExperimentConfig& config) {
  const KernelModel kernel = build_kernel(config.kernel);
  const GsaSpec gsa = build_algorithm(config.algorithm);
  VerifyRun run;
  run.curve = predict(kernel, gsa, config.lambda, config.steps, config.numerics.predictor_options());
  const auto records = simulate_ladder(config, kernel, gsa, config.numerics.sampler_options(), 0);
  for (std::size_t idx = 0; idx < records.size(); ++idx) {
    const auto& rec = records[idx];
    for (std::size_t step = 0; step < rec.size(); ++step) {
      run.samples.push_back(
          {rec.N, idx % config.replications, step, rec.f_values[step], rec.grad_norm_sq(step)});
    }
  }
  run.report = build_convergence_report(run.samples, run.curve.f_limit,
                                        diagonal(run.curve.grad_gram_limit));
  return run;
}

bool TwoInitReport::medians_strictly_decreasing() const {
  for (std::size_t i = 1; i < median_max_gap.size(); ++i) {
    if (!(median_max_gap[i] < median_max_gap[i - 1])) return false;
  }
  return median_max_gap.size() >= 2;
}

TwoInitReport run_two_init(const ExperimentConfig& config, bool shared_stream) {
  const KernelModel kernel = build_kernel(config.kernel);
  const GsaSpec gsa = build_algorithm(config.algorithm);
  const SamplerOptions options = config.numerics.sampler_options();
  const auto first = simulate_ladder(config, kernel, gsa, options, 1);
  const auto second = simulate_ladder(config, kernel, gsa, options, shared_stream ? 1 : 2);

  TwoInitReport report;
  report.n_list = config.n_list;
  const std::size_t m = config.replications;
  for (std::size_t idx = 0; idx < first.size(); ++idx) {
    TwoInitRow row;
    row.N = first[idx].N;
    row.pair = idx % m;
    for (std::size_t k = 0; k < first[idx].size(); ++k) {
      const double gap = std::abs(first[idx].f_values[k] - second[idx].f_values[k]);
      row.step_gaps.push_back(gap);
      if (gap > row.max_gap || k == 0) {
        row.max_gap = gap;
        row.argmax_step = k;
      }
    }
    report.rows.push_back(std::move(row));
  }
  for (std::size_t i = 0; i < config.n_list.size(); ++i) {
    std::vector<double> gaps;
    for (std::size_t r = 0; r < m; ++r) gaps.push_back(report.rows[i * m + r].max_gap);
    report.median_max_gap.push_back(stats::median(gaps));
  }
  return report;
}

bool HaltingEntry::frequency_non_decreasing() const {
  for (std::size_t i = 1; i < frequency.size(); ++i) {
    if (frequency[i] < frequency[i - 1]) return false;
  }
  return true;
}

std::vector<double> adjust_epsilons(const LimitCurve& curve, const std::vector<double>& requested) {
  const auto diag = diagonal(curve.grad_gram_limit);
  std::vector<double> out;
  for (double eps : requested) {
    for (std::size_t pass = 0; pass <= diag.size(); ++pass) {
      bool moved = false;
      for (std::size_t n = 1; n < diag.size(); ++n) {
        const double g = diag[n];
        if (std::abs(eps - g) < 0.01 * std::abs(g)) {
          eps = eps >= g ? g * 1.01 : g * 0.99;
          moved = true;
        }
      }
      if (!moved) break;
    }
    out.push_back(eps);
  }
  return out;
}

HaltingReport run_halting(const ExperimentConfig& config) {
  const KernelModel kernel = build_kernel(config.kernel);
  const GsaSpec gsa = build_algorithm(config.algorithm);
  const LimitCurve curve =
      predict(kernel, gsa, config.lambda, config.steps, config.numerics.predictor_options());
  const auto records = simulate_ladder(config, kernel, gsa, config.numerics.sampler_options(), 0);

  HaltingReport report;
  report.n_list = config.n_list;
  report.g_limit = diagonal(curve.grad_gram_limit);
  const auto adjusted = adjust_epsilons(curve, config.epsilons);
  const std::size_t m = config.replications;
  for (std::size_t e = 0; e < adjusted.size(); ++e) {
    HaltingEntry entry;
    entry.epsilon_requested = config.epsilons[e];
    entry.epsilon = adjusted[e];
    const HaltingTimes tau = halting_times(curve, entry.epsilon);
    entry.tau = tau.tau;
    entry.tau_plus = tau.tau_plus;
    for (std::size_t i = 0; i < config.n_list.size(); ++i) {
      std::size_t hits = 0;
      for (std::size_t r = 0; r < m; ++r) {
        if (empirical_halting_time(records[i * m + r], entry.epsilon) == entry.tau) ++hits;
      }
      entry.frequency.push_back(static_cast<double>(hits) / static_cast<double>(m));
    }
    report.entries.push_back(std::move(entry));
  }
  return report;
}

}  // namespace grfopt
