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

#ifndef DISCO_VERIFY_H_
#define DISCO_VERIFY_H_

// Randomized property suites and the independent reference solvers they
// check against. Shared by the `verify` CLI command and the test binaries.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "disco/types.h"

namespace disco {

struct SuiteResult {
  std::string name;
  bool passed = false;
  // Informational suites report a measurement and never fail a run.
  bool informational = false;
  int cases = 0;
  int failures = 0;
  // Largest observed error or violation, suite specific.
  double worst = 0.0;
  double seconds = 0.0;
  std::string detail;
};

// "PASS name: detail (cases, failures, worst, seconds)".
std::string FormatSuite(const SuiteResult& result);

// Soft threshold against its piecewise form and a 1e-4 grid argmin.
SuiteResult VerifyProx(std::uint64_t seed, int samples = 10000);
// |Z_i - 1| and idempotence of the group sphere projection, p in {1,2,3}.
SuiteResult VerifyProjection(std::uint64_t seed, int samples = 1000);
// Theorem-mode phi traces are non-increasing on convex quadratics (p = 1).
SuiteResult VerifyDescent(std::uint64_t seed, int instances = 10,
                          int iterations = 500);
// phi(beta_{T+1}) - phi* <= sum_i k_i (1 + k_i^{-1/2p})^2 / (2 eta T) on
// separable quadratics whose gradient steps leave every group outside the
// unit ball; phi* from the sphere solver below.
SuiteResult VerifyRateBound(std::uint64_t seed, int instances = 5,
                            int iterations = 500);
// Informational: the same bound on unrestricted quadratics.
SuiteResult ProbeRateBoundGeneral(std::uint64_t seed, int instances = 50,
                                  int iterations = 500);
// Greedy >= (1 - 1/e) OPT and f(S_t) >= (1 - e^{-t/k}) OPT on coverage.
SuiteResult VerifyGreedyGuarantee(std::uint64_t seed, int instances = 50);
// Single-filter W-CNN with window = stride = 1 and filtered candidates.
SuiteResult VerifyWcnnSubmodularity(std::uint64_t seed, int instances = 50);
// Informational: W-CNN with window = stride = 2.
SuiteResult ProbeWcnnWideWindow(std::uint64_t seed, int instances = 50);
// Scalar RNN with w, y > 0 and 1 - exp(-x).
SuiteResult VerifyRnnSubmodularity(std::uint64_t seed, int instances = 50);
// Analytic gradients of every oracle and of f(beta) against central
// differences.
SuiteResult VerifyGradients(std::uint64_t seed, int points = 100);
// Brute-force minimum distance is 0 exactly when the DP says solvable.
SuiteResult VerifySubsetSumReduction(std::uint64_t seed, int instances = 20);

std::vector<std::string> SuiteNames();
// Runs the named suites (all when empty) in SuiteNames() order. Throws
// InvalidArgument for unknown names.
std::vector<SuiteResult> RunSuites(const std::vector<std::string>& names,
                                   std::uint64_t seed);

// Reference solvers --------------------------------------------------------

struct SphereMinimum {
  Vector argmin;
  double value = 0.0;
};

// min 0.5 x^T A x - q^T x + lambda ||x||_1 subject to ||x||_2 = 1, A
// symmetric row-major, through eigendecompositions and the secular
// equation. For lambda > 0 every (support, sign pattern) face is searched
// for stationary points, so the cost grows as 3^dim.
SphereMinimum SphereQuadraticMinimum(int dim, const Vector& a, const Vector& q,
                                     double lambda);

// Classic boolean DP over reachable sums. Values must be nonnegative.
bool SubsetSumSolvable(std::span<const long long> values, long long target);

}  // namespace disco

#endif  // DISCO_VERIFY_H_
