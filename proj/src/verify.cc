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

#include "disco/verify.h"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <memory>
#include <numeric>
#include <random>

#include "disco/errors.h"
#include "disco/models.h"
#include "disco/relax.h"
#include "disco/setfn.h"

namespace disco {
namespace {

using Clock = std::chrono::steady_clock;
using Rng = std::mt19937_64;

double Uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int UniformInt(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

double Gaussian(Rng& rng) { return std::normal_distribution<double>()(rng); }

Vector GaussianVector(Rng& rng, int n, double scale = 1.0) {
  Vector v(n);
  for (double& x : v) x = scale * Gaussian(rng);
  return v;
}

double Norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Runs `body` and fills the bookkeeping fields.
SuiteResult Timed(const std::string& name, bool informational,
                  const std::function<void(SuiteResult*)>& body) {
  SuiteResult r;
  r.name = name;
  r.informational = informational;
  const auto start = Clock::now();
  body(&r);
  r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  if (!informational) r.passed = r.failures == 0 && r.cases > 0;
  else r.passed = true;
  return r;
}

std::string Format(const char* fmt, double a, double b = 0.0,
                   double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), fmt, a, b, c);
  return buf;
}

GroupLayout RandomLayout(Rng& rng, int max_groups, int min_size,
                         int max_size) {
  std::vector<int> sizes(UniformInt(rng, 1, max_groups));
  for (int& k : sizes) k = UniformInt(rng, min_size, max_size);
  return GroupLayout(sizes);
}

// Random symmetric positive semidefinite matrix, row-major.
Vector RandomPsd(Rng& rng, int n, double ridge) {
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = Gaussian(rng);
  }
  const Eigen::MatrixXd a =
      m.transpose() * m / n + ridge * Eigen::MatrixXd::Identity(n, n);
  Vector out(n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) out[i * n + j] = a(i, j);
  }
  return out;
}

double LargestEigenvalue(int n, const Vector& a) {
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                       Eigen::RowMajor>>
      m(a.data(), n, n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  return solver.eigenvalues().maxCoeff();
}

// min 0.5 x^T A x - q^T x on the unit sphere.
SphereMinimum SphereTrs(const Eigen::MatrixXd& a, const Eigen::VectorXd& q) {
  const int n = static_cast<int>(q.size());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
  const Eigen::VectorXd lam = solver.eigenvalues();
  const Eigen::MatrixXd vecs = solver.eigenvectors();
  const Eigen::VectorXd c = vecs.transpose() * q;
  const double lmin = lam(0);
  const double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());
  const double degenerate = 1e-12 * scale;

  // Components along the bottom eigenspace decide the hard case.
  const double tiny = 1e-12 * std::max(1.0, q.norm());
  bool hard = true;
  for (int i = 0; i < n; ++i) {
    if (lam(i) - lmin <= degenerate && std::abs(c(i)) > tiny) hard = false;
  }
  // ||x(mu)||^2 = sum c_i^2 / (lam_i - mu)^2, increasing on mu < lmin.
  auto norm_sq = [&](double mu) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      if (hard && lam(i) - lmin <= degenerate) continue;
      const double d = lam(i) - mu;
      s += c(i) * c(i) / (d * d);
    }
    return s;
  };
  Eigen::VectorXd y(n);
  if (!hard || norm_sq(lmin) >= 1.0) {
    double lo = lmin - q.norm() - 1.0;
    double hi = lmin;
    for (int it = 0; it < 2000; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (norm_sq(mid) > 1.0 ? hi : lo) = mid;
    }
    for (int i = 0; i < n; ++i) y(i) = c(i) / (lam(i) - lo);
    y /= y.norm();
  } else {
    // Hard case: fill the missing norm along the bottom eigenvector.
    double used = 0.0;
    for (int i = 0; i < n; ++i) {
      y(i) = lam(i) - lmin <= degenerate ? 0.0 : c(i) / (lam(i) - lmin);
      used += y(i) * y(i);
    }
    y(0) = std::sqrt(std::max(0.0, 1.0 - used));
  }
  const Eigen::VectorXd x = vecs * y;
  SphereMinimum out;
  out.argmin.assign(x.data(), x.data() + n);
  out.value = 0.5 * x.dot(a * x) - q.dot(x);
  return out;
}

// Every stationary point of 0.5 x^T A x - q^T x on the unit sphere: the
// roots of sum_i c_i^2 / (lam_i - mu)^2 = 1, found per interval between
// poles, where the left side is convex.
std::vector<Eigen::VectorXd> SphereStationaryPoints(const Eigen::MatrixXd& a,
                                                    const Eigen::VectorXd& q) {
  const int n = static_cast<int>(q.size());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
  const Eigen::VectorXd lam = solver.eigenvalues();
  const Eigen::MatrixXd vecs = solver.eigenvectors();
  const Eigen::VectorXd c = vecs.transpose() * q;
  auto psi = [&](double mu) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += c(i) * c(i) / ((lam(i) - mu) * (lam(i) - mu));
    return s;
  };
  auto point = [&](double mu) {
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y(i) = c(i) / (lam(i) - mu);
    return Eigen::VectorXd(vecs * (y / y.norm()));
  };
  // Bisection for psi = 1 between a point below 1 and one above.
  auto root = [&](double below, double above) {
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (below + above);
      if (mid == below || mid == above) break;
      (psi(mid) > 1.0 ? above : below) = mid;
    }
    return below;
  };
  std::vector<Eigen::VectorXd> out;
  const double reach = q.norm() + 1.0;
  out.push_back(point(root(lam(0) - reach, lam(0))));
  out.push_back(point(root(lam(n - 1) + reach, lam(n - 1))));
  for (int i = 0; i + 1 < n; ++i) {
    double lo = lam(i), hi = lam(i + 1);
    if (hi - lo <= 1e-12 * std::max(1.0, std::abs(hi))) continue;
    // Minimum of the convex psi on (lo, hi) by golden-section search.
    double x0 = lo, x1 = hi;
    for (int it = 0; it < 200; ++it) {
      const double m1 = x0 + 0.381966 * (x1 - x0);
      const double m2 = x1 - 0.381966 * (x1 - x0);
      if (psi(m1) < psi(m2)) x1 = m2; else x0 = m1;
    }
    const double mid = 0.5 * (x0 + x1);
    if (psi(mid) > 1.0) continue;
    out.push_back(point(root(mid, lo)));
    out.push_back(point(root(mid, hi)));
  }
  return out;
}

double SphereObjective(const Eigen::MatrixXd& a, const Eigen::VectorXd& q,
                       double lambda, const Vector& x) {
  const Eigen::Map<const Eigen::VectorXd> v(x.data(), x.size());
  return 0.5 * v.dot(a * v) - q.dot(v) + lambda * v.lpNorm<1>();
}

// Central differences of `fn` around `x`.
Vector FiniteDifference(const std::function<double(const Vector&)>& fn,
                        Vector x, double h) {
  Vector g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = fn(x);
    x[i] = keep - h;
    const double down = fn(x);
    x[i] = keep;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

double RelativeError(const Vector& a, const Vector& b) {
  Vector d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return Norm(d) / std::max({Norm(a), Norm(b), 1e-6});
}

Vector Flatten(const Embeddings& e) {
  Vector out;
  for (const auto& v : e) out.insert(out.end(), v.begin(), v.end());
  return out;
}

Embeddings Unflatten(const Vector& flat, int n, int d) {
  Embeddings out(n, Vector(d));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) out[i][j] = flat[i * d + j];
  }
  return out;
}

CandidateSet RandomCandidates(Rng& rng, int positions, int dim, int max_slots,
                              double scale) {
  CandidateSet set;
  int token = 0;
  for (int i = 0; i < positions; ++i) {
    std::vector<Candidate> slots;
    const int k = UniformInt(rng, 1, max_slots);
    for (int j = 0; j < k; ++j) {
      slots.push_back({token++, GaussianVector(rng, dim, scale)});
    }
    set.positions.push_back(std::move(slots));
  }
  return set;
}

constexpr Activation kMonotone[] = {
    Activation::kIdentity, Activation::kRelu,     Activation::kTanh,
    Activation::kSigmoid,  Activation::kSoftplus, Activation::kOneMinusExp};
constexpr Activation kSmooth[] = {Activation::kIdentity, Activation::kTanh,
                                  Activation::kSigmoid, Activation::kSoftplus,
                                  Activation::kOneMinusExp};

WcnnModel RandomWcnn(Rng& rng, int dim, int window, int stride, int filters,
                     Activation activation, bool positive_readout) {
  WcnnModel m;
  m.embedding_dim = dim;
  m.window = window;
  m.stride = stride;
  m.activation = activation;
  for (int j = 0; j < filters; ++j) {
    m.filters.push_back(GaussianVector(rng, dim * window));
    m.filter_bias.push_back(Uniform(rng, -0.5, 0.5));
    m.output_weights.push_back(positive_readout ? Uniform(rng, 0.1, 2.0)
                                                : Gaussian(rng));
  }
  m.output_bias = Uniform(rng, -1.0, 1.0);
  return m;
}

// Recurrence parameters that keep 1 - exp(-x) away from overflow.
RnnModel RandomRnn(Rng& rng, int dim, Activation activation) {
  RnnModel m;
  m.recurrence = Uniform(rng, 0.1, 1.0);
  m.input_weights = GaussianVector(rng, dim);
  m.bias = Uniform(rng, 0.0, 1.0);
  m.output_weight = Uniform(rng, 0.1, 2.0);
  m.activation = activation;
  return m;
}

SuiteResult SubmodularitySuite(const std::string& name, bool informational,
                               std::uint64_t seed, int instances,
                               const std::function<void(Rng&, SuiteResult*)>&
                                   one_instance) {
  return Timed(name, informational, [&](SuiteResult* r) {
    Rng rng(seed);
    for (int t = 0; t < instances; ++t) one_instance(rng, r);
    r->detail = std::to_string(r->failures) + "/" + std::to_string(r->cases) +
                " instances with violations beyond 1e-9" +
                Format(", worst gap %.3g", r->worst);
  });
}

void CheckTransformationOracle(const DifferentiableOracle& model,
                               const CandidateSet& candidates,
                               SuiteResult* r) {
  const auto oracle = AsSetOracle(model, candidates,
                                  TransformationSetOracle::InnerMax::kAlways);
  const ViolationReport report =
      CheckSubmodular(oracle, GroundSet(candidates.num_positions()));
  ++r->cases;
  if (!report.empty()) {
    ++r->failures;
    r->worst = std::max(r->worst, report.worst_gap);
  }
}

}  // namespace

std::string FormatSuite(const SuiteResult& r) {
  const char* verdict = r.informational ? "INFO" : (r.passed ? "PASS" : "FAIL");
  char tail[160];
  std::snprintf(tail, sizeof(tail),
                " (cases %d, failures %d, worst %.3g, %.2f s)", r.cases,
                r.failures, r.worst, r.seconds);
  return std::string(verdict) + " " + r.name + ": " + r.detail + tail;
}

SuiteResult VerifyProx(std::uint64_t seed, int samples) {
  return Timed("prox", false, [&](SuiteResult* r) {
    Rng rng(seed);
    constexpr double kGrid = 1e-4;
    double worst_piecewise = 0.0, worst_grid = 0.0;
    int piecewise_fail = 0, grid_fail = 0;
    for (int s = 0; s < samples; ++s) {
      const double x = Uniform(rng, -3.0, 3.0);
      const double t = s % 10 == 0 ? 0.0 : Uniform(rng, 0.0, 2.0);
      const double got = ProxL1(std::span<const double>(&x, 1), t)[0];
      const double expected = x > t ? x - t : (x < -t ? x + t : 0.0);
      const double e1 = std::abs(got - expected);
      worst_piecewise = std::max(worst_piecewise, e1);
      piecewise_fail += e1 > 1e-12;
      // The minimizer of 0.5 (u - x)^2 + t |u| lies between 0 and x; the
      // grid is anchored at 0 so the kink is a grid point.
      const long lo = static_cast<long>(std::floor(std::min(0.0, x) / kGrid));
      const long hi = static_cast<long>(std::ceil(std::max(0.0, x) / kGrid));
      double best_u = 0.0, best = std::numeric_limits<double>::infinity();
      for (long j = lo - 2; j <= hi + 2; ++j) {
        const double u = j * kGrid;
        const double v = 0.5 * (u - x) * (u - x) + t * std::abs(u);
        if (v < best) {
          best = v;
          best_u = u;
        }
      }
      const double e2 = std::abs(got - best_u);
      worst_grid = std::max(worst_grid, e2);
      grid_fail += e2 > kGrid;
      ++r->cases;
      r->failures += (e1 > 1e-12) || (e2 > kGrid);
    }
    r->worst = worst_piecewise;
    r->detail = std::to_string(piecewise_fail) + " piecewise and " +
                std::to_string(grid_fail) + " grid mismatches" +
                Format("; worst piecewise %.3g, worst grid %.3g",
                       worst_piecewise, worst_grid);
  });
}

SuiteResult VerifyProjection(std::uint64_t seed, int samples) {
  return Timed("projection", false, [&](SuiteResult* r) {
    Rng rng(seed);
    double worst_z = 0.0, worst_idem = 0.0;
    for (int p = 1; p <= 3; ++p) {
      for (int s = 0; s < samples; ++s) {
        const GroupLayout layout = RandomLayout(rng, 6, 1, 6);
        Vector values(layout.dimension());
        for (int g = 0; g < layout.num_groups(); ++g) {
          const double scale = std::pow(10.0, Uniform(rng, -2.0, 2.0));
          for (int j = 0; j < layout.size(g); ++j) {
            values[layout.offset(g) + j] = scale * Gaussian(rng);
          }
        }
        const BetaVector beta(layout, values);
        const BetaVector once = ProjectGroupSphere(beta, p);
        const BetaVector twice = ProjectGroupSphere(once, p);
        const double z = FeasibilityResidual(once, p);
        double idem = 0.0;
        for (int i = 0; i < layout.dimension(); ++i) {
          idem = std::max(idem,
                          std::abs(once.values()[i] - twice.values()[i]));
        }
        worst_z = std::max(worst_z, z);
        worst_idem = std::max(worst_idem, idem);
        ++r->cases;
        r->failures += z > 1e-9 || idem > 1e-12;
      }
    }
    r->worst = worst_z;
    r->detail = Format("max |Z-1| %.3g, max idempotence gap %.3g", worst_z,
                       worst_idem);
  });
}

SuiteResult VerifyDescent(std::uint64_t seed, int instances,
                          int iterations) {
  return Timed("descent", false, [&](SuiteResult* r) {
    Rng rng(seed);
    double worst = 0.0;
    for (int t = 0; t < instances; ++t) {
      const GroupLayout layout = RandomLayout(rng, 4, 2, 5);
      const int n = layout.dimension();
      const Vector a = RandomPsd(rng, n, 0.01);
      const QuadraticObjective objective(n, a, GaussianVector(rng, n));
      RelaxationParams params;
      params.mode = RelaxationMode::kTheorem;
      params.p = 1;
      params.lambda = t % 3 == 0 ? 0.0 : Uniform(rng, 0.0, 1.0);
      params.lipschitz = LargestEigenvalue(n, a);
      params.max_iters = iterations;
      const OptimizerTrace trace = DiscoOptimize(objective, layout, params);
      double rise = 0.0;
      for (std::size_t k = 1; k < trace.phi_values.size(); ++k) {
        rise = std::max(rise, trace.phi_values[k] - trace.phi_values[k - 1]);
      }
      worst = std::max(worst, rise);
      ++r->cases;
      r->failures += trace.aborted || rise > 1e-12 ||
                     trace.iterations() != iterations;
    }
    r->worst = worst;
    r->detail = Format("largest phi increase %.3g over %g iterations", worst,
                       iterations);
  });
}

namespace {

struct RateInstance {
  GroupLayout layout;
  Vector a;  // block diagonal, row-major
  Vector q;
  double lambda = 0.0;
};

struct RateOutcome {
  int violations = 0;
  double worst_excess = -std::numeric_limits<double>::infinity();
  // min_t phi_t - phi*; negative means the reference solver missed.
  double oracle_slack = 0.0;
  double min_preprojection_norm = std::numeric_limits<double>::infinity();
};

RateOutcome CheckRate(const RateInstance& inst, int iterations) {
  const int n = inst.layout.dimension();
  const double lipschitz = LargestEigenvalue(n, inst.a);
  const QuadraticObjective objective(n, inst.a, inst.q);
  RelaxationParams params;
  params.mode = RelaxationMode::kTheorem;
  params.p = 1;
  params.lambda = inst.lambda;
  params.lipschitz = lipschitz;
  params.max_iters = iterations;
  const OptimizerTrace trace = DiscoOptimize(objective, inst.layout, params);

  // phi* per separable block.
  double phi_star = 0.0;
  for (int g = 0; g < inst.layout.num_groups(); ++g) {
    const int k = inst.layout.size(g), off = inst.layout.offset(g);
    Vector block(k * k), qg(k);
    for (int i = 0; i < k; ++i) {
      qg[i] = inst.q[off + i];
      for (int j = 0; j < k; ++j) {
        block[i * k + j] = inst.a[(off + i) * n + off + j];
      }
    }
    phi_star += SphereQuadraticMinimum(k, block, qg, inst.lambda).value;
  }

  RateOutcome out;
  out.oracle_slack =
      *std::min_element(trace.phi_values.begin(), trace.phi_values.end()) -
      phi_star;
  double constant = 0.0;
  for (int k : inst.layout.sizes()) {
    const double term = 1.0 + std::pow(static_cast<double>(k), -0.5);
    constant += k * term * term;
  }
  for (int t = 1; t <= trace.iterations(); ++t) {
    const double bound = constant / (2.0 * trace.eta * t);
    const double excess = trace.phi_values[t] - phi_star - bound;
    out.worst_excess = std::max(out.worst_excess, excess);
    out.violations += excess > 0.0;
  }

  // Premise of the per-step inequality: every prox point lies outside the
  // unit ball. Replays the iterates one step at a time.
  RelaxationParams one = params;
  one.max_iters = 1;
  BetaVector beta = InitBeta(inst.layout, 1, RelaxationMode::kTheorem);
  for (int t = 0; t < iterations; ++t) {
    const Vector grad = GradPhiSmooth(objective, beta);
    Vector step(n);
    for (int i = 0; i < n; ++i) {
      step[i] = beta.values()[i] - trace.eta * grad[i];
    }
    const Vector z = ProxL1(step, trace.eta * inst.lambda);
    for (int g = 0; g < inst.layout.num_groups(); ++g) {
      out.min_preprojection_norm = std::min(
          out.min_preprojection_norm,
          Norm(std::span<const double>(z.data() + inst.layout.offset(g),
                                       inst.layout.size(g))));
    }
    beta = DiscoOptimize(objective, inst.layout, one, &beta).final_beta;
  }
  return out;
}

// Block-diagonal convex quadratic. With `strong_pull` the linear term is
// large enough that eta ||q_g|| >= 3 + eta lambda sqrt(k_g).
RateInstance RandomRateInstance(Rng& rng, bool strong_pull, double lambda) {
  RateInstance inst;
  inst.layout = RandomLayout(rng, 4, 2, 5);
  inst.lambda = lambda;
  const int n = inst.layout.dimension();
  inst.a.assign(n * n, 0.0);
  for (int g = 0; g < inst.layout.num_groups(); ++g) {
    const int k = inst.layout.size(g), off = inst.layout.offset(g);
    const Vector block = RandomPsd(rng, k, 0.05);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) inst.a[(off + i) * n + off + j] = block[i * k + j];
    }
  }
  inst.q = GaussianVector(rng, n);
  if (strong_pull) {
    const double eta = 0.9 / LargestEigenvalue(n, inst.a);
    for (int g = 0; g < inst.layout.num_groups(); ++g) {
      const int k = inst.layout.size(g), off = inst.layout.offset(g);
      std::span<double> qg(inst.q.data() + off, k);
      const double target =
          (4.0 + eta * lambda * std::sqrt(static_cast<double>(k))) / eta;
      const double norm = Norm(qg);
      for (double& v : qg) v *= target / norm;
    }
  }
  return inst;
}

}  // namespace

SuiteResult VerifyRateBound(std::uint64_t seed, int instances,
                            int iterations) {
  return Timed("rate-bound", false, [&](SuiteResult* r) {
    Rng rng(seed);
    double slack = std::numeric_limits<double>::infinity();
    double min_norm = std::numeric_limits<double>::infinity();
    double worst_excess = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < instances; ++t) {
      const double lambda = t % 2 == 0 ? 0.0 : Uniform(rng, 0.05, 1.0);
      const RateOutcome o =
          CheckRate(RandomRateInstance(rng, true, lambda), iterations);
      ++r->cases;
      r->failures += o.violations > 0 || o.oracle_slack < -1e-9;
      worst_excess = std::max(worst_excess, o.worst_excess);
      slack = std::min(slack, o.oracle_slack);
      min_norm = std::min(min_norm, o.min_preprojection_norm);
    }
    r->worst = worst_excess;
    r->detail = Format(
        "max (phi_T - phi* - bound) %.3g; min (phi_t - phi*) %.3g; "
        "min prox-point group norm %.3g",
        worst_excess, slack, min_norm);
  });
}

SuiteResult ProbeRateBoundGeneral(std::uint64_t seed, int instances,
                                  int iterations) {
  return Timed("rate-bound-general", true, [&](SuiteResult* r) {
    Rng rng(seed);
    int stuck = 0;
    for (int t = 0; t < instances; ++t) {
      const double lambda = t % 2 == 0 ? 0.0 : Uniform(rng, 0.05, 1.0);
      const RateOutcome o =
          CheckRate(RandomRateInstance(rng, false, lambda), iterations);
      ++r->cases;
      r->failures += o.violations > 0;
      stuck += o.violations > 0 && o.oracle_slack > 1e-6;
      r->worst = std::max(r->worst, o.worst_excess);
    }
    r->detail = std::to_string(r->failures) + "/" + std::to_string(r->cases) +
                " unrestricted instances exceed the bound at some T (" +
                std::to_string(stuck) + " of them end above phi*)";
  });
}

SuiteResult VerifyGreedyGuarantee(std::uint64_t seed, int instances) {
  return Timed("greedy", false, [&](SuiteResult* r) {
    Rng rng(seed);
    double worst_ratio = std::numeric_limits<double>::infinity();
    for (int t = 0; t < instances; ++t) {
      const int items = UniformInt(rng, 5, 12);
      const int ground = UniformInt(rng, 4, 10);
      const int k = UniformInt(rng, 1, 4);
      std::vector<double> weights(items);
      for (double& w : weights) w = Uniform(rng, 0.1, 1.0);
      std::vector<std::vector<int>> sets(ground);
      for (auto& s : sets) {
        for (int u = 0; u < items; ++u) {
          if (Uniform(rng, 0.0, 1.0) < 0.3) s.push_back(u);
        }
      }
      const CoverageOracle oracle(sets, weights);
      const GroundSet e(ground);
      const CardinalityConstraint constraint(k);
      const GreedyTrace trace = GreedyMaximize(oracle, e, constraint);
      const double opt = BruteForceMaximize(oracle, e, constraint).value;
      bool ok = static_cast<int>(trace.chosen.size()) == std::min(k, ground);
      const double slack = 1e-12 * std::max(1.0, opt);
      for (std::size_t s = 0; s < trace.values.size(); ++s) {
        const double bound =
            (1.0 - std::exp(-static_cast<double>(s + 1) / k)) * opt;
        ok &= trace.values[s] >= bound - slack;
      }
      const double final_value = trace.values.empty() ? 0.0
                                                      : trace.values.back();
      ok &= final_value >= (1.0 - std::exp(-1.0)) * opt - slack;
      if (opt > 0.0) worst_ratio = std::min(worst_ratio, final_value / opt);
      ++r->cases;
      r->failures += !ok;
    }
    r->worst = worst_ratio;
    r->detail = Format("worst greedy/OPT %.4f (bound %.4f)", worst_ratio,
                       1.0 - std::exp(-1.0));
  });
}

SuiteResult VerifyWcnnSubmodularity(std::uint64_t seed, int instances) {
  return SubmodularitySuite(
      "wcnn-submodular", false, seed, instances,
      [](Rng& rng, SuiteResult* r) {
        const int dim = UniformInt(rng, 1, 3);
        const int n = UniformInt(rng, 2, 4);
        const Activation act = kMonotone[UniformInt(rng, 0, 5)];
        const WcnnModel model = RandomWcnn(rng, dim, 1, 1, 1, act, true);
        const CandidateSet raw = RandomCandidates(rng, n, dim, 3, 1.0);
        const FilteredCandidates filtered =
            FilterOutputIncreasing(model, raw);
        CheckTransformationOracle(model, filtered.candidates, r);
      });
}

SuiteResult ProbeWcnnWideWindow(std::uint64_t seed, int instances) {
  return SubmodularitySuite(
      "wcnn-wide-window", true, seed, instances,
      [](Rng& rng, SuiteResult* r) {
        const int dim = UniformInt(rng, 1, 3);
        const WcnnModel model =
            RandomWcnn(rng, dim, 2, 2, 1, Activation::kIdentity, true);
        const CandidateSet raw = RandomCandidates(rng, 4, dim, 3, 1.0);
        CheckTransformationOracle(model,
                                  FilterOutputIncreasing(model, raw).candidates,
                                  r);
      });
}

SuiteResult VerifyRnnSubmodularity(std::uint64_t seed, int instances) {
  return SubmodularitySuite(
      "rnn-submodular", false, seed, instances,
      [](Rng& rng, SuiteResult* r) {
        const int dim = UniformInt(rng, 1, 3);
        const int n = UniformInt(rng, 2, 4);
        const RnnModel model = RandomRnn(rng, dim, Activation::kOneMinusExp);
        CheckTransformationOracle(model, RandomCandidates(rng, n, dim, 3, 0.5),
                                  r);
      });
}

SuiteResult VerifyGradients(std::uint64_t seed, int points) {
  return Timed("gradients", false, [&](SuiteResult* r) {
    Rng rng(seed);
    constexpr double kStep = 1e-5;
    constexpr double kTolerance = 1e-5;
    std::string detail;
    auto check_oracle = [&](const std::string& label,
                            const std::function<bool(Rng&, int*, int*,
                                                     std::unique_ptr<
                                                         DifferentiableOracle>*,
                                                     Embeddings*)>& sample) {
      double worst = 0.0;
      int failures = 0;
      for (int s = 0; s < points; ++s) {
        std::unique_ptr<DifferentiableOracle> model;
        Embeddings x;
        int n = 0, d = 0;
        while (!sample(rng, &n, &d, &model, &x)) {
        }
        Embeddings grad;
        model->ScoreAndGradient(x, &grad);
        const Vector numeric = FiniteDifference(
            [&](const Vector& flat) {
              return model->Score(Unflatten(flat, n, d));
            },
            Flatten(x), kStep);
        const double e = RelativeError(Flatten(grad), numeric);
        worst = std::max(worst, e);
        failures += e > kTolerance;
      }
      r->cases += points;
      r->failures += failures;
      r->worst = std::max(r->worst, worst);
      detail += label + Format(" %.2g; ", worst);
    };

    check_oracle("mean-embedding", [](Rng& g, int* n, int* d, auto* model,
                                      Embeddings* x) {
      *n = UniformInt(g, 1, 5);
      *d = UniformInt(g, 1, 4);
      const auto dir = UniformInt(g, 0, 1)
                           ? MeanEmbeddingModel::Direction::kMaximizeDistance
                           : MeanEmbeddingModel::Direction::kMinimizeDistance;
      const auto agg = UniformInt(g, 0, 1)
                           ? MeanEmbeddingModel::Aggregation::kMean
                           : MeanEmbeddingModel::Aggregation::kSum;
      *model = std::make_unique<MeanEmbeddingModel>(GaussianVector(g, *d), dir,
                                                    agg);
      x->clear();
      for (int i = 0; i < *n; ++i) x->push_back(GaussianVector(g, *d));
      return true;
    });

    check_oracle("wcnn", [](Rng& g, int* n, int* d, auto* model,
                            Embeddings* x) {
      *d = UniformInt(g, 1, 3);
      const int window = UniformInt(g, 1, 2);
      const int stride = UniformInt(g, 0, 1) ? window : 1;
      const int windows = UniformInt(g, 1, 3);
      *n = window + stride * (windows - 1);
      const Activation act = kMonotone[UniformInt(g, 0, 5)];
      auto m = std::make_unique<WcnnModel>(RandomWcnn(
          g, *d, window, stride, UniformInt(g, 1, 3), act, false));
      x->clear();
      for (int i = 0; i < *n; ++i) x->push_back(GaussianVector(g, *d));
      // Reject points near a pooling tie or a relu kink.
      for (std::size_t j = 0; j < m->filters.size(); ++j) {
        Vector acts;
        for (int w = 0; w < windows; ++w) {
          double pre = m->filter_bias[j];
          for (int h = 0; h < window; ++h) {
            for (int k = 0; k < *d; ++k) {
              pre += m->filters[j][h * *d + k] * (*x)[w * stride + h][k];
            }
          }
          if (act == Activation::kRelu && std::abs(pre) < 1e-3) return false;
          acts.push_back(ApplyActivation(act, pre));
        }
        std::sort(acts.begin(), acts.end());
        if (acts.size() > 1 && acts.back() - acts[acts.size() - 2] < 1e-3) {
          return false;
        }
      }
      *model = std::move(m);
      return true;
    });

    check_oracle("rnn", [](Rng& g, int* n, int* d, auto* model,
                           Embeddings* x) {
      *n = UniformInt(g, 1, 5);
      *d = UniformInt(g, 1, 3);
      *model = std::make_unique<RnnModel>(
          RandomRnn(g, *d, kSmooth[UniformInt(g, 0, 4)]));
      x->clear();
      for (int i = 0; i < *n; ++i) x->push_back(GaussianVector(g, *d, 0.5));
      return true;
    });

    // Victim pieces must outlive the oracle that references them.
    std::vector<std::unique_ptr<LinearVictim>> victims;
    check_oracle("victim-loss", [&victims](Rng& g, int* n, int* d,
                                           auto* model, Embeddings* x) {
      *n = UniformInt(g, 1, 5);
      *d = UniformInt(g, 1, 4);
      const int classes = UniformInt(g, 2, 4);
      std::vector<std::string> names;
      for (int c = 0; c < classes; ++c) names.push_back("c" + std::to_string(c));
      auto victim = std::make_unique<LinearVictim>(names, *d);
      for (auto& row : victim->mutable_weights()) row = GaussianVector(g, *d);
      victim->mutable_bias() = GaussianVector(g, classes);
      *model = std::make_unique<VictimLossOracle>(
          *victim, UniformInt(g, 0, classes - 1));
      victims.push_back(std::move(victim));
      x->clear();
      for (int i = 0; i < *n; ++i) x->push_back(GaussianVector(g, *d));
      return true;
    });

    // grad f(beta) through the relaxation, p in {1, 2, 3}.
    double worst = 0.0;
    int failures = 0;
    for (int s = 0; s < points; ++s) {
      const int d = UniformInt(rng, 1, 3);
      const int n = UniformInt(rng, 1, 4);
      const CandidateSet candidates = RandomCandidates(rng, n, d, 4, 0.5);
      const int p = 1 + s % 3;
      std::unique_ptr<DifferentiableOracle> oracle;
      if (s % 2 == 0) {
        oracle = std::make_unique<RnnModel>(
            RandomRnn(rng, d, kSmooth[UniformInt(rng, 0, 4)]));
      } else {
        oracle = std::make_unique<MeanEmbeddingModel>(
            GaussianVector(rng, d),
            MeanEmbeddingModel::Direction::kMaximizeDistance);
      }
      const RelaxedObjective objective(*oracle, candidates, p);
      const GroupLayout& layout = objective.layout();
      Vector values(layout.dimension());
      for (double& v : values) v = Uniform(rng, 0.3, 1.2) * (Uniform(rng, 0, 1) < 0.5 ? -1 : 1);
      const BetaVector beta(layout, values);
      const Vector analytic = GradPhiSmooth(objective, beta);
      const Vector numeric = FiniteDifference(
          [&](const Vector& v) {
            return objective.Value(BetaVector(layout, v));
          },
          values, kStep);
      const double e = RelativeError(analytic, numeric);
      worst = std::max(worst, e);
      failures += e > kTolerance;
    }
    r->cases += points;
    r->failures += failures;
    r->worst = std::max(r->worst, worst);
    detail += Format("grad-phi-smooth %.2g", worst);
    r->detail = "worst relative error: " + detail;
  });
}

SuiteResult VerifySubsetSumReduction(std::uint64_t seed, int instances) {
  return Timed("subset-sum", false, [&](SuiteResult* r) {
    Rng rng(seed);
    int solvable = 0;
    for (int t = 0; t < instances; ++t) {
      const int n = UniformInt(rng, 1, 12);
      std::vector<long long> values(n);
      for (auto& v : values) v = UniformInt(rng, 1, 30);
      const long long total =
          std::accumulate(values.begin(), values.end(), 0LL);
      long long target = 0;
      if (t % 2 == 0) {
        for (auto v : values) target += UniformInt(rng, 0, 1) ? v : 0;
      } else {
        target = UniformInt(rng, 0, static_cast<int>(total) + 5);
      }
      const SubsetSumInstance inst =
          MakeSubsetSumInstance(values, target, UniformInt(rng, 1, 3));
      // Element i of a subset swaps position i to the zero vector.
      const TransformationIndex none(n, 0);
      const double base = inst.Distance(none);
      const FunctionOracle oracle([&](std::span<const int> subset) {
        TransformationIndex index(n, 0);
        for (int e : subset) index[e] = 1;
        return base - inst.Distance(index);
      });
      const BruteForceResult best =
          BruteForceMaximize(oracle, GroundSet(n), CardinalityConstraint(n));
      const double min_distance = base - best.value;
      const bool brute = min_distance == 0.0;
      const bool dp = SubsetSumSolvable(values, target);
      solvable += dp;
      ++r->cases;
      r->failures += brute != dp;
    }
    r->detail = std::to_string(r->failures) + " disagreements; " +
                std::to_string(solvable) + "/" + std::to_string(r->cases) +
                " solvable";
  });
}

std::vector<std::string> SuiteNames() {
  return {"prox",          "projection",       "descent",
          "rate-bound",    "rate-bound-general", "greedy",
          "wcnn-submodular", "wcnn-wide-window", "rnn-submodular",
          "gradients",     "subset-sum"};
}

std::vector<SuiteResult> RunSuites(const std::vector<std::string>& names,
                                   std::uint64_t seed) {
  const auto all = SuiteNames();
  for (const auto& name : names) {
    if (std::find(all.begin(), all.end(), name) == all.end()) {
      throw InvalidArgument("unknown suite '" + name + "'");
    }
  }
  std::vector<SuiteResult> out;
  for (const auto& name : all) {
    if (!names.empty() &&
        std::find(names.begin(), names.end(), name) == names.end()) {
      continue;
    }
    if (name == "prox") out.push_back(VerifyProx(seed));
    if (name == "projection") out.push_back(VerifyProjection(seed));
    if (name == "descent") out.push_back(VerifyDescent(seed));
    if (name == "rate-bound") out.push_back(VerifyRateBound(seed));
    if (name == "rate-bound-general") out.push_back(ProbeRateBoundGeneral(seed));
    if (name == "greedy") out.push_back(VerifyGreedyGuarantee(seed));
    if (name == "wcnn-submodular") out.push_back(VerifyWcnnSubmodularity(seed));
    if (name == "wcnn-wide-window") out.push_back(ProbeWcnnWideWindow(seed));
    if (name == "rnn-submodular") out.push_back(VerifyRnnSubmodularity(seed));
    if (name == "gradients") out.push_back(VerifyGradients(seed));
    if (name == "subset-sum") out.push_back(VerifySubsetSumReduction(seed));
  }
  return out;
}

SphereMinimum SphereQuadraticMinimum(int dim, const Vector& a, const Vector& q,
                                     double lambda) {
  if (dim < 1 || static_cast<int>(a.size()) != dim * dim ||
      static_cast<int>(q.size()) != dim) {
    throw DimensionMismatch("sphere quadratic shapes disagree");
  }
  if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be >= 0");
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                       Eigen::RowMajor>>
      am(a.data(), dim, dim);
  const Eigen::MatrixXd m = 0.5 * (am + am.transpose());
  const Eigen::Map<const Eigen::VectorXd> qm(q.data(), dim);
  if (lambda == 0.0) return SphereTrs(m, qm);
  // The minimizer is a stationary point of f + lambda s^T x restricted to
  // its support F and sign pattern s, so the smallest phi over all such
  // points over all (F, s) is the exact minimum.
  SphereMinimum best;
  best.value = std::numeric_limits<double>::infinity();
  for (std::uint32_t support = 1; support < (1u << dim); ++support) {
    std::vector<int> idx;
    for (int i = 0; i < dim; ++i) {
      if ((support >> i) & 1u) idx.push_back(i);
    }
    const int k = static_cast<int>(idx.size());
    Eigen::MatrixXd sub(k, k);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) sub(i, j) = m(idx[i], idx[j]);
    }
    for (std::uint32_t signs = 0; signs < (1u << k); ++signs) {
      Eigen::VectorXd shifted(k);
      for (int i = 0; i < k; ++i) {
        shifted(i) = qm(idx[i]) - lambda * ((signs >> i) & 1u ? -1.0 : 1.0);
      }
      for (const auto& y : SphereStationaryPoints(sub, shifted)) {
        if (!y.allFinite()) continue;
        Vector x(dim, 0.0);
        for (int i = 0; i < k; ++i) x[idx[i]] = y(i);
        const double value = SphereObjective(m, qm, lambda, x);
        if (value < best.value) {
          best.value = value;
          best.argmin = std::move(x);
        }
      }
    }
  }
  return best;
}

bool SubsetSumSolvable(std::span<const long long> values, long long target) {
  if (target < 0) return false;
  for (auto v : values) {
    if (v < 0) throw InvalidArgument("subset-sum values must be >= 0");
  }
  std::vector<char> reachable(static_cast<std::size_t>(target) + 1, 0);
  reachable[0] = 1;
  for (auto v : values) {
    for (long long s = target; s >= v; --s) {
      if (reachable[s - v]) reachable[s] = 1;
    }
  }
  return reachable[target] != 0;
}

}  // namespace disco
