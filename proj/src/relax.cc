// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "disco/relax.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <random>
#include <string>

#include "disco/errors.h"

namespace disco {
namespace {

double IntPow(double x, int n) {
  double result = 1.0;
  for (int i = 0; i < n; ++i) result *= x;
  return result;
}

double Norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

bool AllZero(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

bool AllFinite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(),
                     [](double x) { return std::isfinite(x); });
}

double L1Norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

}  // namespace

GroupLayout::GroupLayout(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  offsets_.assign(1, 0);
  for (int k : sizes_) {
    if (k < 1) throw InvalidArgument("group sizes must be >= 1");
    offsets_.push_back(offsets_.back() + k);
  }
}

BetaVector::BetaVector(GroupLayout layout, Vector values)
    : layout_(std::move(layout)), values_(std::move(values)) {
  if (static_cast<int>(values_.size()) != layout_.dimension()) {
    throw InvalidArgument("beta length " + std::to_string(values_.size()) +
                          " does not match layout dimension " +
                          std::to_string(layout_.dimension()));
  }
  if (!AllFinite(values_)) throw InvalidArgument("beta has non-finite entries");
}

void RelaxationParams::Validate() const {
  if (p < 1) throw InvalidArgument("p must be >= 1");
  if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be >= 0");
  if (!(eta >= 0.0)) throw InvalidArgument("eta must be >= 0");
  if (!(lipschitz >= 0.0)) throw InvalidArgument("lipschitz must be >= 0");
  if (max_iters < 1) throw InvalidArgument("max_iters must be >= 1");
}

RelaxedObjective::RelaxedObjective(const DifferentiableOracle& oracle,
                                   const CandidateSet& candidates, int p)
    : oracle_(oracle),
      candidates_(candidates),
      p_(p),
      layout_(candidates.GroupSizes()) {
  candidates_.Validate();
  if (static_cast<int>(candidates_.positions[0][0].embedding.size()) !=
      oracle_.dimension()) {
    throw DimensionMismatch("candidate embeddings do not match the oracle");
  }
  if (p < 1) throw InvalidArgument("p must be >= 1");
}

double RelaxedObjective::Value(const BetaVector& beta) const {
  const Vector alpha = AlphaFromBeta(beta, p_);
  return -oracle_.Score(BlendInputs(layout_, alpha, candidates_));
}

double RelaxedObjective::ValueAndGradient(const BetaVector& beta,
                                          Vector* gradient) const {
  const Vector alpha = AlphaFromBeta(beta, p_);
  Embeddings input_grad;
  const double score = oracle_.ScoreAndGradient(
      BlendInputs(layout_, alpha, candidates_), &input_grad);
  Vector d_alpha(alpha.size());
  for (int i = 0; i < layout_.num_groups(); ++i) {
    const auto& slots = candidates_.positions[i];
    for (int j = 0; j < layout_.size(i); ++j) {
      const Vector& w = slots[j].embedding;
      double dot = 0.0;
      for (std::size_t d = 0; d < w.size(); ++d) dot += input_grad[i][d] * w[d];
      d_alpha[layout_.offset(i) + j] = -dot;
    }
  }
  *gradient = BackpropAlpha(beta, p_, d_alpha);
  return -score;
}

QuadraticObjective::QuadraticObjective(int dimension, Vector matrix,
                                       Vector linear, double constant)
    : dim_(dimension), a_(std::move(matrix)), q_(std::move(linear)),
      c_(constant) {
  if (dim_ < 1 || static_cast<int>(a_.size()) != dim_ * dim_ ||
      static_cast<int>(q_.size()) != dim_) {
    throw DimensionMismatch("quadratic objective shape mismatch");
  }
}

double QuadraticObjective::Value(const BetaVector& beta) const {
  Vector unused;
  return ValueAndGradient(beta, &unused);
}

double QuadraticObjective::ValueAndGradient(const BetaVector& beta,
                                            Vector* gradient) const {
  const Vector& x = beta.values();
  if (static_cast<int>(x.size()) != dim_) {
    throw DimensionMismatch("beta does not match the quadratic dimension");
  }
  gradient->assign(dim_, 0.0);
  double value = c_;
  for (int r = 0; r < dim_; ++r) {
    double ax = 0.0;
    for (int c = 0; c < dim_; ++c) ax += a_[r * dim_ + c] * x[c];
    (*gradient)[r] = ax - q_[r];
    value += 0.5 * x[r] * ax - q_[r] * x[r];
  }
  return value;
}

Vector GroupPowerSums(const BetaVector& beta, int p) {
  const GroupLayout& layout = beta.layout();
  Vector z(layout.num_groups(), 0.0);
  for (int i = 0; i < layout.num_groups(); ++i) {
    for (double b : beta.group(i)) z[i] += IntPow(b, 2 * p);
  }
  return z;
}

double FeasibilityResidual(const BetaVector& beta, int p) {
  double worst = 0.0;
  for (double z : GroupPowerSums(beta, p)) {
    worst = std::max(worst, std::abs(z - 1.0));
  }
  return worst;
}

Vector AlphaFromBeta(const BetaVector& beta, int p) {
  const GroupLayout& layout = beta.layout();
  const Vector z = GroupPowerSums(beta, p);
  Vector alpha(beta.dimension());
  for (int i = 0; i < layout.num_groups(); ++i) {
    if (!(z[i] > 0.0)) {
      throw DegenerateGroup("group " + std::to_string(i) + " has Z = 0");
    }
    const auto g = beta.group(i);
    for (int j = 0; j < layout.size(i); ++j) {
      alpha[layout.offset(i) + j] = IntPow(g[j], 2 * p) / z[i];
    }
  }
  return alpha;
}

Vector BackpropAlpha(const BetaVector& beta, int p,
                     std::span<const double> d_alpha) {
  const GroupLayout& layout = beta.layout();
  if (static_cast<int>(d_alpha.size()) != layout.dimension()) {
    throw DimensionMismatch("d_alpha does not match the beta layout");
  }
  const Vector alpha = AlphaFromBeta(beta, p);
  const Vector z = GroupPowerSums(beta, p);
  Vector grad(beta.dimension());
  // d alpha_j / d beta_l = 2p beta_l^{2p-1} (delta_jl - alpha_j) / Z.
  for (int i = 0; i < layout.num_groups(); ++i) {
    const int off = layout.offset(i);
    double weighted = 0.0;
    for (int j = 0; j < layout.size(i); ++j) {
      weighted += d_alpha[off + j] * alpha[off + j];
    }
    const auto g = beta.group(i);
    for (int l = 0; l < layout.size(i); ++l) {
      grad[off + l] = 2.0 * p * IntPow(g[l], 2 * p - 1) / z[i] *
                      (d_alpha[off + l] - weighted);
    }
  }
  return grad;
}

Embeddings BlendInputs(const GroupLayout& layout,
                       std::span<const double> alpha,
                       const CandidateSet& candidates) {
  if (candidates.num_positions() != layout.num_groups() ||
      static_cast<int>(alpha.size()) != layout.dimension()) {
    throw DimensionMismatch("weights, layout and candidates disagree");
  }
  Embeddings out(layout.num_groups());
  std::size_t dim = 0;
  for (int i = 0; i < layout.num_groups(); ++i) {
    const auto& slots = candidates.positions[i];
    if (static_cast<int>(slots.size()) != layout.size(i)) {
      throw DimensionMismatch("candidate count differs from group size at " +
                              std::to_string(i));
    }
    if (i == 0) dim = slots[0].embedding.size();
    Vector& x = out[i];
    x.assign(dim, 0.0);
    for (int j = 0; j < layout.size(i); ++j) {
      const Vector& w = slots[j].embedding;
      if (w.size() != dim) {
        throw DimensionMismatch("candidate vectors must share one dimension");
      }
      const double a = alpha[layout.offset(i) + j];
      for (std::size_t d = 0; d < dim; ++d) x[d] += a * w[d];
    }
  }
  return out;
}

PhiValue ObjectivePhi(const SmoothObjective& objective, const BetaVector& beta,
                      const RelaxationParams& params) {
  PhiValue out;
  out.f = objective.Value(beta);
  out.h = params.lambda * L1Norm(beta.values());
  out.phi = out.f + out.h;
  return out;
}

Vector GradPhiSmooth(const SmoothObjective& objective,
                     const BetaVector& beta) {
  Vector grad;
  objective.ValueAndGradient(beta, &grad);
  return grad;
}

Vector ProxL1(std::span<const double> values, double eta_lambda) {
  if (!(eta_lambda >= 0.0)) throw InvalidArgument("threshold must be >= 0");
  Vector out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double x = values[i];
    if (x > eta_lambda) {
      out[i] = x - eta_lambda;
    } else if (x < -eta_lambda) {
      out[i] = x + eta_lambda;
    } else {
      out[i] = 0.0;
    }
  }
  return out;
}

BetaVector ProjectGroupSphere(const BetaVector& beta, int p,
                              std::vector<int>* degenerate_groups) {
  BetaVector out = beta;
  const Vector z = GroupPowerSums(beta, p);
  for (int i = 0; i < beta.layout().num_groups(); ++i) {
    if (!(z[i] > 0.0)) {
      if (degenerate_groups != nullptr) degenerate_groups->push_back(i);
      continue;
    }
    const double norm = std::pow(z[i], 1.0 / (2.0 * p));
    for (double& b : out.mutable_group(i)) b /= norm;
  }
  return out;
}

BetaVector InitBeta(const GroupLayout& layout, int p, RelaxationMode mode,
                    bool project) {
  if (p < 1) throw InvalidArgument("p must be >= 1");
  Vector values(layout.dimension());
  for (int i = 0; i < layout.num_groups(); ++i) {
    const int k = layout.size(i);
    for (int j = 0; j < k; ++j) {
      double& v = values[layout.offset(i) + j];
      if (mode == RelaxationMode::kTheorem) {
        v = 1.0 / std::pow(static_cast<double>(k), 1.0 / (2.0 * p));
      } else {
        v = (j == 0) ? 10.0 : 0.05;
      }
    }
  }
  BetaVector beta(layout, std::move(values));
  if (project) beta = ProjectGroupSphere(beta, p);
  return beta;
}

double EstimateLipschitz(const SmoothObjective& objective,
                         const GroupLayout& layout, int p, int pairs,
                         std::uint64_t seed, double safety) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto random_point = [&] {
    Vector v(layout.dimension());
    for (double& x : v) x = normal(rng);
    return ProjectGroupSphere(BetaVector(layout, std::move(v)), p);
  };
  double worst = 0.0;
  for (int t = 0; t < pairs; ++t) {
    const BetaVector x = random_point();
    const BetaVector y = random_point();
    const Vector gx = GradPhiSmooth(objective, x);
    const Vector gy = GradPhiSmooth(objective, y);
    Vector dg(gx.size()), dx(gx.size());
    for (std::size_t i = 0; i < gx.size(); ++i) {
      dg[i] = gx[i] - gy[i];
      dx[i] = x.values()[i] - y.values()[i];
    }
    const double denom = Norm2(dx);
    if (denom > 0.0) worst = std::max(worst, Norm2(dg) / denom);
  }
  return safety * worst;
}

double DefaultLambda(double clean_loss, const GroupLayout& layout) {
  double extra = 0.0;
  for (int k : layout.sizes()) extra += k - 1;
  return 3.0 * clean_loss / (10.0 * layout.num_groups() + 0.05 * extra);
}

namespace {

void Record(OptimizerTrace* trace, const PhiValue& v, const BetaVector& beta,
            int p) {
  trace->phi_values.push_back(v.phi);
  trace->f_values.push_back(v.f);
  trace->h_values.push_back(v.h);
  trace->residuals.push_back(FeasibilityResidual(beta, p));
}

bool Finite(const PhiValue& v) {
  return std::isfinite(v.phi) && std::isfinite(v.f) && std::isfinite(v.h);
}

void RunTheoremMode(const SmoothObjective& objective,
                    const RelaxationParams& params, BetaVector beta,
                    OptimizerTrace* trace) {
  const GroupLayout& layout = beta.layout();
  const double eta = trace->eta;
  for (int k = 0; k < params.max_iters; ++k) {
    Vector grad;
    objective.ValueAndGradient(beta, &grad);
    Vector step(beta.values());
    for (std::size_t i = 0; i < step.size(); ++i) step[i] -= eta * grad[i];
    Vector proxed = ProxL1(step, eta * params.lambda);
    for (int g = 0; g < layout.num_groups(); ++g) {
      const int off = layout.offset(g);
      const int len = layout.size(g);
      std::span<double> group(proxed.data() + off, len);
      if (!AllZero(group)) continue;
      // The prox wiped out the whole group; keep the gradient step so the
      // projection stays defined.
      ++trace->prox_skips;
      std::span<const double> fallback(step.data() + off, len);
      if (AllZero(fallback)) fallback = beta.group(g);
      std::copy(fallback.begin(), fallback.end(), group.begin());
    }
    if (!AllFinite(proxed)) {
      trace->aborted = true;
      trace->abort_reason = "non-finite iterate at step " + std::to_string(k);
      break;
    }
    BetaVector next = ProjectGroupSphere(BetaVector(layout, std::move(proxed)),
                                         params.p);
    const PhiValue v = ObjectivePhi(objective, next, params);
    if (!Finite(v)) {
      trace->aborted = true;
      trace->abort_reason = "non-finite objective at step " + std::to_string(k);
      break;
    }
    beta = std::move(next);
    Record(trace, v, beta, params.p);
  }
  trace->final_beta = std::move(beta);
}

void RunPracticalMode(const SmoothObjective& objective,
                      const RelaxationParams& params, BetaVector beta,
                      OptimizerTrace* trace) {
  const GroupLayout& layout = beta.layout();
  const std::size_t dim = beta.values().size();
  Vector m(dim, 0.0), v(dim, 0.0);
  double beta1_power = 1.0, beta2_power = 1.0;
  for (int k = 0; k < params.max_iters; ++k) {
    Vector grad;
    objective.ValueAndGradient(beta, &grad);
    beta1_power *= params.adam_beta1;
    beta2_power *= params.adam_beta2;
    Vector next = beta.values();
    for (std::size_t i = 0; i < dim; ++i) {
      const double b = beta.values()[i];
      const double sign = (b > 0.0) - (b < 0.0);
      const double g = grad[i] + params.lambda * sign;
      m[i] = params.adam_beta1 * m[i] + (1.0 - params.adam_beta1) * g;
      v[i] = params.adam_beta2 * v[i] + (1.0 - params.adam_beta2) * g * g;
      const double m_hat = m[i] / (1.0 - beta1_power);
      const double v_hat = v[i] / (1.0 - beta2_power);
      next[i] -= trace->eta * m_hat / (std::sqrt(v_hat) + params.adam_epsilon);
    }
    if (!AllFinite(next)) {
      trace->aborted = true;
      trace->abort_reason = "non-finite iterate at step " + std::to_string(k);
      break;
    }
    BetaVector candidate(layout, std::move(next));
    const Vector z = GroupPowerSums(candidate, params.p);
    for (int g = 0; g < layout.num_groups(); ++g) {
      if (z[g] > 0.0) continue;
      ++trace->degenerate_reverts;
      auto old_group = beta.group(g);
      std::copy(old_group.begin(), old_group.end(),
                candidate.mutable_group(g).begin());
    }
    const PhiValue value = ObjectivePhi(objective, candidate, params);
    if (!Finite(value)) {
      trace->aborted = true;
      trace->abort_reason = "non-finite objective at step " + std::to_string(k);
      break;
    }
    beta = std::move(candidate);
    Record(trace, value, beta, params.p);
  }
  trace->final_beta = std::move(beta);
}

}  // namespace

OptimizerTrace DiscoOptimize(const SmoothObjective& objective,
                             const GroupLayout& layout,
                             const RelaxationParams& params,
                             const BetaVector* init) {
  params.Validate();
  if (layout.num_groups() == 0) throw InvalidArgument("empty layout");
  BetaVector beta = init != nullptr
                        ? *init
                        : InitBeta(layout, params.p, params.mode,
                                   params.project_init);
  if (!(beta.layout() == layout)) {
    throw InvalidArgument("initial beta does not match the layout");
  }

  OptimizerTrace trace;
  if (params.mode == RelaxationMode::kTheorem) {
    double lipschitz = params.lipschitz;
    if (params.eta == 0.0 && lipschitz == 0.0) {
      lipschitz = EstimateLipschitz(objective, layout, params.p, 100,
                                    params.seed);
    }
    if (params.eta > 0.0) {
      if (lipschitz > 0.0 && params.eta * lipschitz >= 1.0) {
        throw InvalidArgument("theorem mode requires eta < 1/L");
      }
      trace.eta = params.eta;
    } else {
      trace.eta = lipschitz > 0.0 ? 0.9 / lipschitz : 1.0;
    }
    trace.lipschitz = lipschitz;
  } else {
    trace.eta = params.eta > 0.0 ? params.eta : 1.0;
  }

  const PhiValue start = ObjectivePhi(objective, beta, params);
  if (!Finite(start)) {
    trace.aborted = true;
    trace.abort_reason = "non-finite objective at the starting point";
    trace.final_beta = std::move(beta);
    return trace;
  }
  Record(&trace, start, beta, params.p);
  if (params.mode == RelaxationMode::kTheorem) {
    RunTheoremMode(objective, params, std::move(beta), &trace);
  } else {
    RunPracticalMode(objective, params, std::move(beta), &trace);
  }
  return trace;
}

OptimizerTrace DiscoOptimize(const DifferentiableOracle& oracle,
                             const CandidateSet& candidates,
                             const RelaxationParams& params) {
  const RelaxedObjective objective(oracle, candidates, params.p);
  return DiscoOptimize(objective, objective.layout(), params);
}

TransformationIndex RoundToOneHot(const BetaVector& beta) {
  const GroupLayout& layout = beta.layout();
  TransformationIndex index(layout.num_groups(), 0);
  for (int i = 0; i < layout.num_groups(); ++i) {
    const auto g = beta.group(i);
    int best = 0;
    for (int j = 1; j < layout.size(i); ++j) {
      if (std::abs(g[j]) > std::abs(g[best])) best = j;
    }
    index[i] = best;
  }
  return index;
}

TransformationIndex EnforceBudget(const TransformationIndex& index,
                                  const BetaVector& beta, int m) {
  if (m < 0) throw InvalidArgument("budget must be >= 0");
  const GroupLayout& layout = beta.layout();
  if (static_cast<int>(index.size()) != layout.num_groups()) {
    throw InvalidArgument("index length does not match the beta layout");
  }
  std::vector<int> changed;
  for (int i = 0; i < static_cast<int>(index.size()); ++i) {
    if (index[i] != 0) changed.push_back(i);
  }
  if (static_cast<int>(changed.size()) <= m) return index;
  auto margin = [&](int i) {
    const auto g = beta.group(i);
    return std::abs(g[index[i]]) - std::abs(g[0]);
  };
  std::stable_sort(changed.begin(), changed.end(),
                   [&](int a, int b) { return margin(a) > margin(b); });
  TransformationIndex out = index;
  for (std::size_t r = m; r < changed.size(); ++r) out[changed[r]] = 0;
  return out;
}

void WriteTrace(std::ostream& out, const OptimizerTrace& trace) {
  out << "# iter f h phi residual\n";
  char line[160];
  for (std::size_t k = 0; k < trace.phi_values.size(); ++k) {
    std::snprintf(line, sizeof(line), "%zu %.17g %.17g %.17g %.17g\n", k,
                  trace.f_values[k], trace.h_values[k], trace.phi_values[k],
                  trace.residuals[k]);
    out << line;
  }
}

std::string ModeName(RelaxationMode mode) {
  return mode == RelaxationMode::kTheorem ? "theorem" : "practical";
}

RelaxationMode ParseMode(const std::string& name) {
  if (name == "theorem") return RelaxationMode::kTheorem;
  if (name == "practical") return RelaxationMode::kPractical;
  throw InvalidArgument("unknown relaxation mode '" + name + "'");
}

}  // namespace disco
