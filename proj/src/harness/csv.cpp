#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "grfopt/errors.hpp"
#include "grfopt/experiments.hpp"

namespace grfopt {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

std::string format_halting(const HaltingStep& step) {
  return step ? std::to_string(*step) : std::string("inf");
}

void write_predict_csv(std::ostream& out, const LimitCurve& curve) {
  out << "step,f_limit,grad_norm_sq_limit,sigma_w,dim\n";
  for (std::size_t n = 0; n < curve.size(); ++n) {
    out << n << ',' << num(curve.f_limit[n]) << ',' << num(curve.grad_gram_limit(n, n)) << ','
        << num(curve.sigma_w[n]) << ',' << curve.dims[n + 1];
    out << '\n';
  }
}

void write_simulate_csv(std::ostream& out, const SimulateRun& run) {
  out << "replication,N,step,f_value,grad_norm_sq";
  for (double eps : run.epsilons) out << ",halted_" << short_num(eps);
  out << '\n';
  for (std::size_t i = 0; i < run.records.size(); ++i) {
    const auto& rec = run.records[i];
    for (std::size_t n = 0; n < rec.size(); ++n) {
      out << run.replications[i] << ',' << rec.N << ',' << n << ',' << num(rec.f_values[n]) << ','
          << num(rec.grad_norm_sq(n));
      for (const auto& h : rec.halting) out << ',' << ((h && *h <= n) ? 1 : 0);
      out << '\n';
    }
  }
}

void write_verify_csv(std::ostream& out, const VerifyRun& run) {
  out << "N,replication,step,f_value,grad_norm_sq,f_limit,grad_norm_sq_limit\n";
  for (const auto& s : run.samples) {
    out << s.N << ',' << s.replication << ',' << s.step << ',' << num(s.f_value) << ','
        << num(s.grad_norm_sq) << ',' << num(run.curve.f_limit[s.step]) << ','
        << num(run.curve.grad_gram_limit(s.step, s.step)) << '\n';
  }
}

ConvergenceReport read_verify_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) ||
      line != "N,replication,step,f_value,grad_norm_sq,f_limit,grad_norm_sq_limit") {
    throw ArgumentError("not a verify CSV (unexpected header)");
  }
  std::vector<SampleRow> samples;
  std::vector<double> f_limit, g_limit;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != 7) throw ArgumentError("verify CSV row with " + std::to_string(cells.size()) + " fields");
    SampleRow s;
    s.N = std::stoull(cells[0]);
    s.replication = std::stoull(cells[1]);
    s.step = std::stoull(cells[2]);
    s.f_value = std::stod(cells[3]);
    s.grad_norm_sq = std::stod(cells[4]);
    if (s.step >= f_limit.size()) {
      f_limit.resize(s.step + 1);
      g_limit.resize(s.step + 1);
    }
    f_limit[s.step] = std::stod(cells[5]);
    g_limit[s.step] = std::stod(cells[6]);
    samples.push_back(s);
  }
  return build_convergence_report(samples, f_limit, g_limit);
}

void write_convergence_summary(std::ostream& out, const ConvergenceReport& report) {
  out << "# gap bound: |mean f - f_limit| <= 3 * se_f + 2 / sqrt(N)\n"
      << "# spread: log-log slope of sd against N expected in [-0.65, -0.35]\n"
      << "# recomputable from the raw sample CSV\n";
  out << "N,step,count,mean_f,sd_f,se_f,f_limit,gap_f,bound_f,mean_g,sd_g,se_g,g_limit,gap_g\n";
  for (const auto& c : report.cells) {
    out << c.N << ',' << c.step << ',' << c.count << ',' << num(c.mean_f) << ',' << num(c.sd_f)
        << ',' << num(c.se_f) << ',' << num(c.f_limit) << ',' << num(c.gap_f) << ','
        << num(c.bound_f) << ',' << num(c.mean_g) << ',' << num(c.sd_g) << ',' << num(c.se_g)
        << ',' << num(c.g_limit) << ',' << num(c.gap_g) << '\n';
  }
  for (std::size_t step = 0; step < report.slope_f.size(); ++step) {
    out << "# slope step=" << step << " sd_f=" << num(report.slope_f[step])
        << " sd_g=" << num(report.slope_g[step]) << '\n';
  }
}

void write_two_init_csv(std::ostream& out, const TwoInitReport& report) {
  out << "N,pair,max_gap,argmax_step";
  const std::size_t width = report.rows.empty() ? 0 : report.rows.front().step_gaps.size();
  for (std::size_t k = 0; k < width; ++k) out << ",gap_" << k;
  out << '\n';
  for (const auto& row : report.rows) {
    out << row.N << ',' << row.pair << ',' << num(row.max_gap) << ',' << row.argmax_step;
    for (double g : row.step_gaps) out << ',' << num(g);
    out << '\n';
  }
}

void write_halting_csv(std::ostream& out, const HaltingReport& report) {
  out << "epsilon_requested,epsilon,tau,tau_plus,N,frequency\n";
  for (const auto& e : report.entries) {
    for (std::size_t i = 0; i < report.n_list.size(); ++i) {
      out << num(e.epsilon_requested) << ',' << num(e.epsilon) << ',' << format_halting(e.tau)
          << ',' << format_halting(e.tau_plus) << ',' << report.n_list[i] << ','
          << num(e.frequency[i]) << '\n';
    }
  }
}

}  // namespace grfopt
