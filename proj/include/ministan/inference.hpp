#pragma once

// Posterior inference over (GlobalTheta, per-record latents) given
// observational and interventional datasets: sequential Monte Carlo that
// folds in one record at a time, with Metropolis-Hastings rejuvenation after
// each resampling, plus a prior importance-sampling oracle for validation.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ministan/compiled_program.hpp"
#include "ministan/interpreter.hpp"
#include "ministan/interventions.hpp"
#include "ministan/parallel.hpp"
#include "ministan/prior.hpp"

namespace ministan {

struct ConditionSpec {
  std::string name;
  std::optional<Intervention> intervention;
  std::vector<std::string> observed_vars;
  std::vector<Observation> records;
};

using RecordKey = std::pair<std::size_t, std::size_t>;  // (condition, record)

struct ParticleState {
  GlobalTheta theta;
  std::map<RecordKey, Env> latents;
  double log_weight = 0.0;
};

struct SMCConfig {
  std::size_t n_particles = 1000;
  double ess_threshold = 0.5;
  std::size_t rejuvenation_sweeps = 5;
  /// Keys are theta parameter names (mu_s, sigma_s, ...) or latent variable
  /// names (s, b, ...). Missing keys use kDefaultStepSize.
  std::map<std::string, double> rw_step_sizes;
  std::uint64_t seed = 0;
  Execution execution = Execution::parallel;

  static constexpr double kDefaultStepSize = 0.1;
  double step_size(const std::string& name) const;
  /// Throws InvalidConfig.
  void validate() const;
};

/// render_program(theta) with the condition's intervention applied.
Program condition_program(const GlobalTheta& theta, const ConditionSpec& cond);

/// Reference (tree-walking) log joint: log prior plus the log density of
/// every record under its condition's program, with the particle's latents.
double particle_log_joint(const ParticleState& particle,
                          const std::vector<ConditionSpec>& conds);

/// Throws InvalidConfig when a condition's observed variables are not
/// defined by its program or a record does not bind exactly them.
void validate_conditions(const std::vector<ConditionSpec>& conds);

struct MoveStats {
  std::uint64_t proposed = 0;
  std::uint64_t accepted = 0;
  double rate() const { return proposed ? double(accepted) / double(proposed) : 0.0; }
};

struct SmcStats {
  std::vector<double> ess_history;  // after each record
  std::size_t resamples = 0;
  MoveStats theta_moves;
  MoveStats edge_flips;
  MoveStats latent_moves;
};

class SmcSampler {
 public:
  SmcSampler(std::vector<ConditionSpec> conds, SMCConfig cfg);

  /// Draws particles from the prior with zero log weight.
  void initialize();
  bool done() const { return incorporated_ == records_.size(); }
  std::size_t records_total() const { return records_.size(); }
  std::size_t records_incorporated() const { return incorporated_; }

  /// Incorporates the next record: extends every particle with latents drawn
  /// by forward simulation and reweights by the observed variables' density.
  /// Resamples and rejuvenates when the ESS drops below the threshold.
  void step();
  void run();

  void resample();
  /// rejuvenation_sweeps MH sweeps on every particle, targeting the
  /// posterior given the records incorporated so far.
  void rejuvenate();

  double ess() const;
  std::vector<double> normalized_weights() const;
  std::vector<ParticleState> particles() const;
  const SmcStats& stats() const { return stats_; }
  const SMCConfig& config() const { return cfg_; }

  /// Fast-path log likelihood of particle i over incorporated records.
  double log_likelihood(std::size_t i) const;
  double log_joint(std::size_t i) const;
  /// MH log acceptance ratio for flipping particle i's edge. The prior is
  /// symmetric under the flip, so this is the log-likelihood difference.
  double edge_flip_log_acceptance(std::size_t i) const;

 private:
  struct Record {
    std::size_t condition;
    std::size_t index;
    std::vector<std::pair<std::size_t, double>> observed;  // slot, value
    std::size_t latent_offset;
  };
  struct ConditionModel {
    CompiledProgram program[2];  // indexed by edge
    std::vector<std::uint8_t> observed_mask;
    std::vector<std::size_t> latent_slots;
    std::vector<double> latent_steps;
  };
  struct Particle {
    GlobalTheta theta;
    std::vector<double> latents;
    double log_weight = 0.0;
  };

  double record_log_density(const GlobalTheta& theta, std::size_t j,
                            const double* latents) const;
  void rejuvenate_particle(Particle& p, Rng& rng, SmcStats& local) const;
  std::vector<double> record_densities(const GlobalTheta& theta,
                                       const Particle& p) const;

  std::vector<ConditionSpec> conds_;
  SMCConfig cfg_;
  std::vector<ConditionModel> models_;
  std::vector<Record> records_;
  std::vector<Particle> particles_;
  std::size_t incorporated_ = 0;
  std::size_t latent_width_ = 0;  // total latents for incorporated records
  std::uint64_t rejuvenation_rounds_ = 0;
  SmcStats stats_;
  std::array<double, 5> theta_steps_{};
};

/// Full SMC run; returned weights are normalized (log-sum-exp of
/// log_weight is 0). Throws DegenerateWeights if every particle's weight
/// becomes zero.
std::vector<ParticleState> smc_infer(const std::vector<ConditionSpec>& conds,
                                     const SMCConfig& cfg);

struct OracleSummary {
  double p_edge = 0.0;
  double lambda_bo_mean = 0.0;
  /// NaN when no weight falls on edge = true.
  double lambda_bo_mean_given_edge = 0.0;
  double log_marginal_likelihood = 0.0;
  double ess = 0.0;
};

/// Self-normalized importance sampling with the prior (including latents)
/// as proposal. Uses the tree-walking interpreter, independently of the
/// SMC fast path.
OracleSummary is_oracle(const std::vector<ConditionSpec>& conds,
                        std::size_t n_samples, std::uint64_t seed,
                        Execution execution = Execution::parallel);

struct PosteriorSummary {
  double p_edge = 0.0;
  /// lambda_bo among edge = true particles, weights renormalized.
  std::vector<std::pair<double, double>> lambda_bo_weighted_samples;
  /// Set when no weight falls on edge = true (the sample list is empty).
  bool edge_posterior_empty = false;
  double lambda_bo_mean = 0.0;
  double lambda_bo_sd = 0.0;
  /// Weighted means of every theta field; "edge" is P(edge).
  std::map<std::string, double> theta_means;
};

PosteriorSummary posterior_summary(const std::vector<ParticleState>& particles);

/// Effective sample size of unnormalized log weights.
double effective_sample_size(const std::vector<double>& log_weights);
/// Reflects x into [0, 1] (period-2 folding); symmetric as a proposal map.
double reflect_unit(double x);
/// Systematic resampling indices from normalized weights and u ~ U[0, 1).
std::vector<std::size_t> systematic_resample(const std::vector<double>& weights,
                                             double u);

}  // namespace ministan
