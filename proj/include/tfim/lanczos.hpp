#pragma once

// Lanczos iteration with full reorthogonalization and explicit restarts for
// the few lowest eigenpairs of a real symmetric operator.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "tfim/chain.hpp"

namespace tfim {

/// y = A x for a real symmetric A.
using LinearMap = std::function<void(std::span<const double> x, std::span<double> y)>;

struct LanczosOptions {
  int max_krylov = 150;
  int max_restarts = 40;
  /// Ritz residual threshold relative to the running norm estimate of A.
  double tolerance = 1e-12;
  std::uint64_t seed = 0x5eed'1a9c'20b5ULL;
  /// Krylov storage budget; large dimensions get a shorter basis.
  std::size_t memory_budget_bytes = std::size_t{512} << 20;
};

struct EigenPair {
  double value = 0.0;
  Eigen::VectorXd vector;
  double residual = 0.0;  // ||A v - value v||
};

struct LanczosResult {
  std::vector<EigenPair> pairs;  // ascending
  int matvecs = 0;
  double norm_estimate = 0.0;
};

/// Lowest `count` eigenpairs, found one at a time with deflation against the
/// converged ones. Eigenvector sign is fixed so that the largest-magnitude
/// component is positive. Throws ConvergenceError after max_restarts.
LanczosResult lanczos_lowest(const LinearMap& op, Index dimension, int count, const LanczosOptions& options = {});

/// Flip `v` so that its largest-magnitude entry is positive.
void fix_phase(Eigen::VectorXd& v);

}  // namespace tfim
