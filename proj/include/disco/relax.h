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

#ifndef DISCO_RELAX_H_
#define DISCO_RELAX_H_

// Continuous relaxation of per-position candidate selection.
//
// Each position i with k_i candidate slots gets a parameter group
// beta_i in R^{k_i}. Slot weights are alpha_i^j = beta_i^j^{2p} / Z_i with
// Z_i = sum_j beta_i^j^{2p}, and the model is evaluated on the blended input
// sum_j alpha_i^j w_i^j. The minimized objective is
//
//   phi(beta) = f(beta) + lambda * ||beta||_1,   f = -score(blend(alpha)).
//
// Two optimizers are provided. Theorem mode runs projected proximal
// gradient steps on the sphere Z_i = 1 with a fixed step below 1/L.
// Practical mode runs Adam on the unconstrained objective.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "disco/candidate_set.h"
#include "disco/oracle.h"
#include "disco/types.h"

namespace disco {

class GroupLayout {
 public:
  GroupLayout() : offsets_{0} {}
  // Every size must be >= 1.
  explicit GroupLayout(std::vector<int> sizes);

  int num_groups() const { return static_cast<int>(sizes_.size()); }
  int size(int group) const { return sizes_.at(group); }
  int offset(int group) const { return offsets_.at(group); }
  int dimension() const { return offsets_.back(); }
  const std::vector<int>& sizes() const { return sizes_; }

  friend bool operator==(const GroupLayout&, const GroupLayout&) = default;

 private:
  std::vector<int> sizes_;
  std::vector<int> offsets_;  // num_groups + 1 prefix sums.
};

class BetaVector {
 public:
  BetaVector() = default;
  // Throws InvalidArgument if the length does not match or an entry is not
  // finite.
  BetaVector(GroupLayout layout, Vector values);

  const GroupLayout& layout() const { return layout_; }
  const Vector& values() const { return values_; }
  Vector& mutable_values() { return values_; }
  int dimension() const { return static_cast<int>(values_.size()); }

  std::span<const double> group(int g) const {
    return {values_.data() + layout_.offset(g),
            static_cast<std::size_t>(layout_.size(g))};
  }
  std::span<double> mutable_group(int g) {
    return {values_.data() + layout_.offset(g),
            static_cast<std::size_t>(layout_.size(g))};
  }

 private:
  GroupLayout layout_;
  Vector values_;
};

enum class RelaxationMode {
  // Sphere-constrained projected proximal gradient, fixed step.
  kTheorem,
  // Unconstrained Adam on phi.
  kPractical,
};

struct RelaxationParams {
  int p = 1;
  double lambda = 0.0;
  // Step size. 0 selects the mode default: 0.9 / L in theorem mode and the
  // initial Adam rate 1 in practical mode.
  double eta = 0.0;
  // Smoothness constant for theorem mode. 0 means estimate it.
  double lipschitz = 0.0;
  int max_iters = 100;
  RelaxationMode mode = RelaxationMode::kPractical;
  // Practical mode: sphere-project the (10, 0.05, ...) start.
  bool project_init = false;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  // Seed for the Lipschitz estimate.
  std::uint64_t seed = 0;

  // Throws InvalidArgument on p < 1, lambda < 0, eta < 0 or max_iters < 1.
  void Validate() const;
};

// Smooth part f of the objective as a function of the stacked beta.
class SmoothObjective {
 public:
  virtual ~SmoothObjective() = default;
  virtual double Value(const BetaVector& beta) const = 0;
  // Writes grad f into `gradient` (resized to beta's dimension).
  virtual double ValueAndGradient(const BetaVector& beta,
                                  Vector* gradient) const = 0;
};

// f(beta) = -score(blend(alpha(beta))). Holds references to the oracle and
// candidates.
class RelaxedObjective : public SmoothObjective {
 public:
  RelaxedObjective(const DifferentiableOracle& oracle,
                   const CandidateSet& candidates, int p);

  double Value(const BetaVector& beta) const override;
  double ValueAndGradient(const BetaVector& beta,
                          Vector* gradient) const override;

  const GroupLayout& layout() const { return layout_; }

 private:
  const DifferentiableOracle& oracle_;
  const CandidateSet& candidates_;
  int p_;
  GroupLayout layout_;
};

// f(beta) = 0.5 beta^T A beta - q^T beta + c with A symmetric, row-major.
class QuadraticObjective : public SmoothObjective {
 public:
  QuadraticObjective(int dimension, Vector matrix, Vector linear,
                     double constant = 0.0);

  double Value(const BetaVector& beta) const override;
  double ValueAndGradient(const BetaVector& beta,
                          Vector* gradient) const override;

 private:
  int dim_;
  Vector a_;
  Vector q_;
  double c_;
};

// Z_i = sum_j beta_i^j^{2p} for every group.
Vector GroupPowerSums(const BetaVector& beta, int p);

// max_i |Z_i - 1|.
double FeasibilityResidual(const BetaVector& beta, int p);

// Flat slot weights in beta's layout. Throws DegenerateGroup when Z_i = 0.
Vector AlphaFromBeta(const BetaVector& beta, int p);

// Gradient with respect to beta of a function whose gradient with respect to
// the slot weights is `d_alpha`.
Vector BackpropAlpha(const BetaVector& beta, int p,
                     std::span<const double> d_alpha);

// Position i receives sum_j alpha_i^j w_i^j. Throws DimensionMismatch.
Embeddings BlendInputs(const GroupLayout& layout,
                       std::span<const double> alpha,
                       const CandidateSet& candidates);

struct PhiValue {
  double phi = 0.0;
  double f = 0.0;
  double h = 0.0;
};

PhiValue ObjectivePhi(const SmoothObjective& objective, const BetaVector& beta,
                      const RelaxationParams& params);

// Gradient of the smooth part f.
Vector GradPhiSmooth(const SmoothObjective& objective, const BetaVector& beta);

// Elementwise soft threshold: the prox operator of eta_lambda * ||.||_1.
Vector ProxL1(std::span<const double> values, double eta_lambda);

// Divides every group by its 2p-norm so that Z_i = 1. Groups with zero norm
// are left unchanged and their ids appended to `degenerate_groups`.
BetaVector ProjectGroupSphere(const BetaVector& beta, int p,
                              std::vector<int>* degenerate_groups = nullptr);

// Theorem mode: 1 / k_i^{1/2p} in every slot of group i.
// Practical mode: 10 in slot 0 and 0.05 elsewhere, optionally projected.
BetaVector InitBeta(const GroupLayout& layout, int p, RelaxationMode mode,
                    bool project = false);

// max over `pairs` random sphere-feasible pairs of
// ||grad f(x) - grad f(y)|| / ||x - y||, multiplied by `safety`.
double EstimateLipschitz(const SmoothObjective& objective,
                         const GroupLayout& layout, int p, int pairs = 100,
                         std::uint64_t seed = 0, double safety = 2.0);

// lambda = 3 C / (10 n + 0.05 sum_i (k_i - 1)), C the loss at the original
// input. The denominator is ||beta||_1 at the practical start.
double DefaultLambda(double clean_loss, const GroupLayout& layout);

struct OptimizerTrace {
  // All of length iterations + 1; entry 0 is the starting point.
  std::vector<double> phi_values;
  std::vector<double> f_values;
  std::vector<double> h_values;
  std::vector<double> residuals;
  BetaVector final_beta;
  double eta = 0.0;
  double lipschitz = 0.0;  // 0 when unused (practical mode).
  // Theorem mode: group updates where the prox zeroed a whole group and was
  // skipped for that group.
  int prox_skips = 0;
  // Practical mode: group updates reverted because Z_i reached 0.
  int degenerate_reverts = 0;
  bool aborted = false;
  std::string abort_reason;

  int iterations() const {
    return phi_values.empty() ? 0 : static_cast<int>(phi_values.size()) - 1;
  }
};

// Runs max_iters steps from `init` (or InitBeta for the mode when null).
// A non-finite objective stops the run and sets `aborted`.
OptimizerTrace DiscoOptimize(const SmoothObjective& objective,
                             const GroupLayout& layout,
                             const RelaxationParams& params,
                             const BetaVector* init = nullptr);

OptimizerTrace DiscoOptimize(const DifferentiableOracle& oracle,
                             const CandidateSet& candidates,
                             const RelaxationParams& params);

// Per group, the slot with the largest |beta|; ties go to the lowest slot.
TransformationIndex RoundToOneHot(const BetaVector& beta);

// Keeps at most m changed positions: those with the largest margin
// |beta_i^{j_i}| - |beta_i^0| (ties to the lower position). The rest revert
// to slot 0.
TransformationIndex EnforceBudget(const TransformationIndex& index,
                                  const BetaVector& beta, int m);

// One line per iterate: "iter f h phi residual", preceded by a '#' header.
void WriteTrace(std::ostream& out, const OptimizerTrace& trace);

std::string ModeName(RelaxationMode mode);
// Accepts "theorem" or "practical". Throws InvalidArgument.
RelaxationMode ParseMode(const std::string& name);

}  // namespace disco

#endif  // DISCO_RELAX_H_
