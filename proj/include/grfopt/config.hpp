#pragma once

// Experiment configuration: a sectioned key = value text file.
//
//   [kernel]       type, atoms, mean_level, coeffs, sigma_A, sigma_eta, R
//   [algorithm]    type, alpha, beta, projection, radius
//   [experiment]   mode, lambda, N_list, steps, replications, epsilon,
//                  master_seed, output
//   [numerics]     freeze_dimension, pseudo_inverse, jitter_start,
//                  jitter_max, quadrature_points
//
// Values are JSON literals (numbers, booleans, lists); anything that does not
// parse as JSON is taken as a bare string. '#' and ';' start comments.
// Unknown sections or keys are rejected.

#include <cstdint>
#include <string>
#include <vector>

#include "grfopt/gaussian.hpp"
#include "grfopt/gsa.hpp"
#include "grfopt/kernel.hpp"
#include "grfopt/predictor.hpp"
#include "grfopt/sampler.hpp"

namespace grfopt {

struct KernelSpec {
  std::string type = "stationary_schoenberg";
  std::vector<SchoenbergMixture::Atom> atoms{{1.0, 1.0}};
  double mean_level = 0.0;
  std::vector<double> coeffs;
  double sigma_a = 1.0;
  double sigma_eta = 0.0;
  double r = 1.0;
};

struct AlgorithmSpec {
  std::string type = "gd";
  double alpha = 0.1;
  double beta = 0.0;
  Projection projection = Projection::none;
  double radius = 1.0;
};

struct NumericsSpec {
  bool freeze_dimension = false;
  bool pseudo_inverse = false;
  double jitter_start = 1e-12;
  double jitter_max = 1e-8;
  int quadrature_points = 400;

  JitterPolicy policy() const;
  PredictorOptions predictor_options() const;
  SamplerOptions sampler_options(std::vector<double> epsilons = {}) const;
};

enum class Mode { predict, simulate, verify, two_init, halting, barrier, check_kernel };

struct ExperimentConfig {
  KernelSpec kernel;
  AlgorithmSpec algorithm;
  NumericsSpec numerics;
  Mode mode = Mode::verify;
  double lambda = 1.0;
  std::vector<std::uint64_t> n_list;
  std::size_t steps = 1;
  std::size_t replications = 2;
  std::vector<double> epsilons;
  std::uint64_t master_seed = 0;
  std::string output;

  /// Invariants that apply to the Monte Carlo modes: N_list non-empty and
  /// strictly increasing, M >= 2, every N > steps + 2. Always: steps >= 1.
  void validate() const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

Mode parse_mode(const std::string& name);
std::string mode_name(Mode mode);

KernelModel build_kernel(const KernelSpec& spec);
GsaSpec build_algorithm(const AlgorithmSpec& spec);

}  // namespace grfopt
