#include "ministan/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include <omp.h>

#include "ministan/error.hpp"

namespace ministan {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Stream tags for derive_seed paths.
constexpr std::uint64_t kInitTag = 1;
constexpr std::uint64_t kPropagateTag = 2;
constexpr std::uint64_t kResampleTag = 3;
constexpr std::uint64_t kRejuvenateTag = 4;

constexpr std::size_t kInlineSlots = 32;

double log_sum_exp(const std::vector<double>& xs) {
  double m = kNegInf;
  for (double x : xs) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

bool mh_accept(double log_alpha, Rng& rng) {
  double u = draw_uniform(rng, 0.0, 1.0);
  return std::log(u) < log_alpha;
}

// Slot scratch space, on the stack for the common small-program case.
class SlotBuffer {
 public:
  explicit SlotBuffer(std::size_t n) : n_(n) {
    if (n > kInlineSlots) heap_.resize(n);
  }
  double* data() { return n_ > kInlineSlots ? heap_.data() : inline_.data(); }
  std::span<double> span() { return {data(), n_}; }
  double& operator[](std::size_t i) { return data()[i]; }

 private:
  std::size_t n_;
  std::array<double, kInlineSlots> inline_{};
  std::vector<double> heap_;
};

void load_theta(const GlobalTheta& t, SlotBuffer& buf) {
  buf[0] = t.mu_s;
  buf[1] = t.sigma_s;
  buf[2] = t.sigma_b;
  buf[3] = t.lambda_so;
  buf[4] = t.lambda_bo;
}

}  // namespace

int max_threads() { return omp_get_max_threads(); }

double SMCConfig::step_size(const std::string& name) const {
  auto it = rw_step_sizes.find(name);
  return it == rw_step_sizes.end() ? kDefaultStepSize : it->second;
}

void SMCConfig::validate() const {
  if (n_particles == 0) {
    throw Error(ErrorKind::InvalidConfig, "n_particles", "n_particles must be positive");
  }
  if (!(ess_threshold > 0.0 && ess_threshold <= 1.0)) {
    throw Error(ErrorKind::InvalidConfig, "ess_threshold",
                "ess_threshold must lie in (0, 1]");
  }
  for (const auto& [name, step] : rw_step_sizes) {
    if (!std::isfinite(step) || !(step > 0.0)) {
      throw Error(ErrorKind::InvalidConfig, name,
                  "random-walk step size for '" + name + "' must be positive");
    }
  }
}

Program condition_program(const GlobalTheta& theta, const ConditionSpec& cond) {
  Program p = render_program(theta);
  if (cond.intervention) p = apply_intervention(p, *cond.intervention);
  return p;
}

void validate_conditions(const std::vector<ConditionSpec>& conds) {
  for (const auto& c : conds) {
    Program p = condition_program(GlobalTheta{}, c);
    std::set<std::string> observed;
    for (const auto& v : c.observed_vars) {
      if (p.find(v) == Program::npos) {
        throw Error(ErrorKind::InvalidConfig, v,
                    "condition '" + c.name + "' observes '" + v +
                        "', which its program does not define");
      }
      if (!observed.insert(v).second) {
        throw Error(ErrorKind::InvalidConfig, v,
                    "condition '" + c.name + "' lists '" + v + "' twice");
      }
    }
    for (std::size_t r = 0; r < c.records.size(); ++r) {
      const auto& rec = c.records[r];
      bool exact = rec.size() == observed.size() &&
                   std::all_of(rec.begin(), rec.end(),
                               [&](const auto& kv) { return observed.count(kv.first); });
      if (!exact) {
        throw Error(ErrorKind::InvalidConfig, c.name,
                    "record " + std::to_string(r) + " of condition '" + c.name +
                        "' does not bind exactly the observed variables");
      }
    }
  }
}

double particle_log_joint(const ParticleState& particle,
                          const std::vector<ConditionSpec>& conds) {
  double lp = log_prior(particle.theta);
  if (lp == kNegInf) return lp;
  double total = lp;
  static const Env kNone;
  for (std::size_t c = 0; c < conds.size(); ++c) {
    if (conds[c].records.empty()) continue;
    Program p = condition_program(particle.theta, conds[c]);
    for (std::size_t r = 0; r < conds[c].records.size(); ++r) {
      auto it = particle.latents.find({c, r});
      const Env& lat = it == particle.latents.end() ? kNone : it->second;
      total += log_joint_with_latents(p, conds[c].records[r], lat);
    }
  }
  return total;
}

// ---------------------------------------------------------------------------
// SmcSampler

SmcSampler::SmcSampler(std::vector<ConditionSpec> conds, SMCConfig cfg)
    : conds_(std::move(conds)), cfg_(std::move(cfg)) {
  cfg_.validate();
  validate_conditions(conds_);
  for (std::size_t k = 0; k < theta_steps_.size(); ++k) {
    theta_steps_[k] = cfg_.step_size(kThetaParameterNames[k]);
  }

  std::size_t offset = 0;
  for (std::size_t c = 0; c < conds_.size(); ++c) {
    const ConditionSpec& cond = conds_[c];
    ConditionModel m;
    for (int edge = 0; edge < 2; ++edge) {
      Program p = render_template(edge == 1);
      if (cond.intervention) p = apply_intervention(p, *cond.intervention);
      m.program[edge] = CompiledProgram(p, kThetaParameterNames);
    }
    const CompiledProgram& prog = m.program[0];
    m.observed_mask.assign(prog.slot_count(), 0);
    for (const auto& v : cond.observed_vars) {
      std::size_t slot = prog.slot_of(v);
      if (prog.is_sample(slot)) m.observed_mask[slot] = 1;
    }
    for (std::size_t slot : prog.sample_slots()) {
      if (!m.observed_mask[slot]) {
        m.latent_slots.push_back(slot);
        m.latent_steps.push_back(cfg_.step_size(prog.name_of(slot)));
      }
    }
    for (std::size_t r = 0; r < cond.records.size(); ++r) {
      Record rec{c, r, {}, offset};
      for (const auto& [name, value] : cond.records[r]) {
        std::size_t slot = prog.slot_of(name);
        if (m.observed_mask[slot]) rec.observed.emplace_back(slot, value);
      }
      offset += m.latent_slots.size();
      records_.push_back(std::move(rec));
    }
    models_.push_back(std::move(m));
  }
}

void SmcSampler::initialize() {
  particles_.assign(cfg_.n_particles, Particle{});
  incorporated_ = 0;
  latent_width_ = 0;
  rejuvenation_rounds_ = 0;
  stats_ = SmcStats{};
  for_each_index(cfg_.execution, particles_.size(), [&](std::size_t i) {
    Rng rng = make_rng(cfg_.seed, {kInitTag, i});
    particles_[i].theta = sample_theta(rng);
  });
}

double SmcSampler::record_log_density(const GlobalTheta& theta, std::size_t j,
                                      const double* latents) const {
  const Record& rec = records_[j];
  const ConditionModel& m = models_[rec.condition];
  const CompiledProgram& prog = m.program[theta.edge ? 1 : 0];
  SlotBuffer buf(prog.slot_count());
  load_theta(theta, buf);
  for (const auto& [slot, value] : rec.observed) buf[slot] = value;
  for (std::size_t q = 0; q < m.latent_slots.size(); ++q) {
    buf[m.latent_slots[q]] = latents[q];
  }
  return prog.log_density(buf.span());
}

std::vector<double> SmcSampler::record_densities(const GlobalTheta& theta,
                                                 const Particle& p) const {
  std::vector<double> out(incorporated_);
  for (std::size_t j = 0; j < incorporated_; ++j) {
    out[j] = record_log_density(theta, j, p.latents.data() + records_[j].latent_offset);
  }
  return out;
}

double SmcSampler::log_likelihood(std::size_t i) const {
  auto ld = record_densities(particles_[i].theta, particles_[i]);
  return std::accumulate(ld.begin(), ld.end(), 0.0);
}

double SmcSampler::log_joint(std::size_t i) const {
  double lp = log_prior(particles_[i].theta);
  if (lp == kNegInf) return lp;
  return lp + log_likelihood(i);
}

double SmcSampler::edge_flip_log_acceptance(std::size_t i) const {
  const Particle& p = particles_[i];
  GlobalTheta flipped = p.theta;
  flipped.edge = !flipped.edge;
  auto cur = record_densities(p.theta, p);
  auto prop = record_densities(flipped, p);
  return std::accumulate(prop.begin(), prop.end(), 0.0) -
         std::accumulate(cur.begin(), cur.end(), 0.0);
}

void SmcSampler::step() {
  if (done()) return;
  const std::size_t j = incorporated_;
  const Record& rec = records_[j];
  const ConditionModel& m = models_[rec.condition];
  const std::size_t n_latent = m.latent_slots.size();

  for_each_index(cfg_.execution, particles_.size(), [&](std::size_t i) {
    Particle& p = particles_[i];
    const CompiledProgram& prog = m.program[p.theta.edge ? 1 : 0];
    Rng rng = make_rng(cfg_.seed, {kPropagateTag, j, i});
    SlotBuffer buf(prog.slot_count());
    load_theta(p.theta, buf);
    for (const auto& [slot, value] : rec.observed) buf[slot] = value;
    double inc = prog.forward_fill(buf.span(), m.observed_mask, rng);
    p.latents.resize(latent_width_ + n_latent);
    for (std::size_t q = 0; q < n_latent; ++q) {
      p.latents[latent_width_ + q] = buf[m.latent_slots[q]];
    }
    p.log_weight += inc;
  });
  latent_width_ += n_latent;
  ++incorporated_;

  double e = ess();
  if (e == 0.0) {
    throw Error(ErrorKind::DegenerateWeights, conds_[rec.condition].name,
                "all particle weights are zero after record " +
                    std::to_string(rec.index) + " of condition '" +
                    conds_[rec.condition].name + "'");
  }
  stats_.ess_history.push_back(e);
  if (e < cfg_.ess_threshold * static_cast<double>(particles_.size())) {
    resample();
    rejuvenate();
  }
}

void SmcSampler::run() {
  initialize();
  while (!done()) step();
}

double SmcSampler::ess() const {
  std::vector<double> lw(particles_.size());
  for (std::size_t i = 0; i < particles_.size(); ++i) lw[i] = particles_[i].log_weight;
  return effective_sample_size(lw);
}

std::vector<double> SmcSampler::normalized_weights() const {
  std::vector<double> lw(particles_.size());
  for (std::size_t i = 0; i < particles_.size(); ++i) lw[i] = particles_[i].log_weight;
  double lse = log_sum_exp(lw);
  std::vector<double> w(lw.size());
  for (std::size_t i = 0; i < lw.size(); ++i) w[i] = std::exp(lw[i] - lse);
  return w;
}

void SmcSampler::resample() {
  std::vector<double> w = normalized_weights();
  Rng rng = make_rng(cfg_.seed, {kResampleTag, incorporated_, stats_.resamples});
  auto idx = systematic_resample(w, draw_uniform(rng, 0.0, 1.0));
  std::vector<Particle> next;
  next.reserve(particles_.size());
  for (std::size_t k : idx) {
    next.push_back(particles_[k]);
    next.back().log_weight = 0.0;
  }
  particles_ = std::move(next);
  ++stats_.resamples;
}

void SmcSampler::rejuvenate() {
  if (cfg_.rejuvenation_sweeps == 0) return;
  std::vector<SmcStats> local(particles_.size());
  const std::uint64_t round = rejuvenation_rounds_++;
  for_each_index(cfg_.execution, particles_.size(), [&](std::size_t i) {
    Rng rng = make_rng(cfg_.seed, {kRejuvenateTag, incorporated_, round, i});
    rejuvenate_particle(particles_[i], rng, local[i]);
  });
  for (const auto& s : local) {
    stats_.theta_moves.proposed += s.theta_moves.proposed;
    stats_.theta_moves.accepted += s.theta_moves.accepted;
    stats_.edge_flips.proposed += s.edge_flips.proposed;
    stats_.edge_flips.accepted += s.edge_flips.accepted;
    stats_.latent_moves.proposed += s.latent_moves.proposed;
    stats_.latent_moves.accepted += s.latent_moves.accepted;
  }
}

void SmcSampler::rejuvenate_particle(Particle& p, Rng& rng, SmcStats& local) const {
  auto sum = [](const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0);
  };
  std::vector<double> ld = record_densities(p.theta, p);
  double like = sum(ld);
  double lp = log_prior(p.theta);

  for (std::size_t sweep = 0; sweep < cfg_.rejuvenation_sweeps; ++sweep) {
    // (a) Gaussian random walk on each continuous parameter; the four
    // Uniform(0, 1) components are reflected back into the unit interval.
    for (std::size_t k = 0; k < theta_steps_.size(); ++k) {
      GlobalTheta prop = p.theta;
      double& x = continuous_component(prop, k);
      x += draw_normal(rng, 0.0, theta_steps_[k]);
      if (k > 0) x = reflect_unit(x);
      ++local.theta_moves.proposed;
      double lp_prop = log_prior(prop);
      if (lp_prop == kNegInf) continue;
      std::vector<double> ld_prop = record_densities(prop, p);
      double like_prop = sum(ld_prop);
      if (mh_accept(lp_prop + like_prop - lp - like, rng)) {
        p.theta = prop;
        ld = std::move(ld_prop);
        like = like_prop;
        lp = lp_prop;
        ++local.theta_moves.accepted;
      }
    }

    // (b) deterministic edge flip; the prior ratio is exactly 1.
    {
      GlobalTheta prop = p.theta;
      prop.edge = !prop.edge;
      ++local.edge_flips.proposed;
      std::vector<double> ld_prop = record_densities(prop, p);
      double like_prop = sum(ld_prop);
      if (mh_accept(like_prop - like, rng)) {
        p.theta = prop;
        ld = std::move(ld_prop);
        like = like_prop;
        ++local.edge_flips.accepted;
      }
    }

    // (c) per-latent random walk; only the owning record's density changes.
    for (std::size_t j = 0; j < incorporated_; ++j) {
      const Record& rec = records_[j];
      const ConditionModel& m = models_[rec.condition];
      double* lat = p.latents.data() + rec.latent_offset;
      for (std::size_t q = 0; q < m.latent_slots.size(); ++q) {
        double old = lat[q];
        lat[q] = old + draw_normal(rng, 0.0, m.latent_steps[q]);
        ++local.latent_moves.proposed;
        double ld_prop = record_log_density(p.theta, j, lat);
        if (mh_accept(ld_prop - ld[j], rng)) {
          ld[j] = ld_prop;
          ++local.latent_moves.accepted;
        } else {
          lat[q] = old;
        }
      }
    }
    like = sum(ld);
  }
}

std::vector<ParticleState> SmcSampler::particles() const {
  std::vector<double> lw(particles_.size());
  for (std::size_t i = 0; i < particles_.size(); ++i) lw[i] = particles_[i].log_weight;
  double lse = log_sum_exp(lw);

  std::vector<ParticleState> out(particles_.size());
  for (std::size_t i = 0; i < particles_.size(); ++i) {
    const Particle& p = particles_[i];
    ParticleState& s = out[i];
    s.theta = p.theta;
    s.log_weight = lse == kNegInf ? kNegInf : p.log_weight - lse;
    for (std::size_t j = 0; j < incorporated_; ++j) {
      const Record& rec = records_[j];
      const ConditionModel& m = models_[rec.condition];
      Env& env = s.latents[{rec.condition, rec.index}];
      for (std::size_t q = 0; q < m.latent_slots.size(); ++q) {
        env[m.program[0].name_of(m.latent_slots[q])] = p.latents[rec.latent_offset + q];
      }
    }
  }
  return out;
}

std::vector<ParticleState> smc_infer(const std::vector<ConditionSpec>& conds,
                                     const SMCConfig& cfg) {
  SmcSampler sampler(conds, cfg);
  sampler.run();
  return sampler.particles();
}

// ---------------------------------------------------------------------------
// Oracle and summaries

OracleSummary is_oracle(const std::vector<ConditionSpec>& conds,
                        std::size_t n_samples, std::uint64_t seed,
                        Execution execution) {
  if (n_samples == 0) {
    throw Error(ErrorKind::InvalidConfig, "n_samples", "n_samples must be positive");
  }
  validate_conditions(conds);
  std::vector<double> logw(n_samples, 0.0);
  std::vector<GlobalTheta> thetas(n_samples);
  for_each_index(execution, n_samples, [&](std::size_t i) {
    Rng rng = make_rng(seed, {i});
    GlobalTheta theta = sample_theta(rng);
    double w = 0.0;
    for (const auto& c : conds) {
      if (c.records.empty()) continue;
      Program p = condition_program(theta, c);
      for (const auto& rec : c.records) w += simulate_conditioned(p, rec, rng).log_weight;
    }
    thetas[i] = theta;
    logw[i] = w;
  });

  double lse = log_sum_exp(logw);
  if (lse == kNegInf) {
    throw Error(ErrorKind::DegenerateWeights, "",
                "every importance weight is zero; the data are impossible under "
                "the prior's support");
  }
  OracleSummary out;
  double edge_mass = 0.0, lbo = 0.0, lbo_edge = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    double w = std::exp(logw[i] - lse);
    sq += w * w;
    lbo += w * thetas[i].lambda_bo;
    if (thetas[i].edge) {
      edge_mass += w;
      lbo_edge += w * thetas[i].lambda_bo;
    }
  }
  out.p_edge = edge_mass;
  out.lambda_bo_mean = lbo;
  out.lambda_bo_mean_given_edge =
      edge_mass > 0.0 ? lbo_edge / edge_mass : std::numeric_limits<double>::quiet_NaN();
  out.log_marginal_likelihood = lse - std::log(static_cast<double>(n_samples));
  out.ess = 1.0 / sq;
  return out;
}

PosteriorSummary posterior_summary(const std::vector<ParticleState>& particles) {
  if (particles.empty()) {
    throw Error(ErrorKind::InvalidConfig, "particles", "posterior has no particles");
  }
  std::vector<double> lw(particles.size());
  for (std::size_t i = 0; i < particles.size(); ++i) lw[i] = particles[i].log_weight;
  double lse = log_sum_exp(lw);
  if (lse == kNegInf) {
    throw Error(ErrorKind::DegenerateWeights, "", "posterior has no weight");
  }

  PosteriorSummary out;
  double mu = 0, ss = 0, sb = 0, lso = 0, lbo = 0;
  for (std::size_t i = 0; i < particles.size(); ++i) {
    const GlobalTheta& t = particles[i].theta;
    double w = std::exp(lw[i] - lse);
    mu += w * t.mu_s;
    ss += w * t.sigma_s;
    sb += w * t.sigma_b;
    lso += w * t.lambda_so;
    lbo += w * t.lambda_bo;
    if (t.edge) {
      out.p_edge += w;
      out.lambda_bo_weighted_samples.emplace_back(t.lambda_bo, w);
    }
  }
  out.theta_means = {{"mu_s", mu},         {"sigma_s", ss},   {"sigma_b", sb},
                     {"lambda_so", lso},   {"lambda_bo", lbo}, {"edge", out.p_edge}};

  if (out.lambda_bo_weighted_samples.empty() || out.p_edge <= 0.0) {
    out.edge_posterior_empty = true;
    out.lambda_bo_weighted_samples.clear();
    out.lambda_bo_mean = std::numeric_limits<double>::quiet_NaN();
    out.lambda_bo_sd = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  double mean = 0.0;
  for (auto& [v, w] : out.lambda_bo_weighted_samples) {
    w /= out.p_edge;
    mean += w * v;
  }
  double var = 0.0;
  for (const auto& [v, w] : out.lambda_bo_weighted_samples) var += w * (v - mean) * (v - mean);
  out.lambda_bo_mean = mean;
  out.lambda_bo_sd = std::sqrt(var);
  return out;
}

double effective_sample_size(const std::vector<double>& log_weights) {
  double lse = log_sum_exp(log_weights);
  if (lse == kNegInf) return 0.0;
  double sq = 0.0;
  for (double lw : log_weights) {
    double w = std::exp(lw - lse);
    sq += w * w;
  }
  return 1.0 / sq;
}

double reflect_unit(double x) {
  double y = std::fmod(std::fabs(x), 2.0);
  return y > 1.0 ? 2.0 - y : y;
}

std::vector<std::size_t> systematic_resample(const std::vector<double>& weights,
                                             double u) {
  const std::size_t n = weights.size();
  std::vector<std::size_t> out(n);
  double cumulative = weights.empty() ? 0.0 : weights[0];
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double position = (static_cast<double>(i) + u) / static_cast<double>(n);
    while (position > cumulative && k + 1 < n) cumulative += weights[++k];
    out[i] = k;
  }
  return out;
}

}  // namespace ministan
