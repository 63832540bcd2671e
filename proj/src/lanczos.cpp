#include "tfim/lanczos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>

#include "tfim/errors.hpp"

namespace tfim {

namespace {

std::span<double> as_span(Eigen::VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

void orthogonalize(Eigen::VectorXd& w, const std::vector<Eigen::VectorXd>& against) {
  for (const auto& q : against) w -= q.dot(w) * q;
}

struct Ritz {
  double value;
  Eigen::VectorXd coefficients;
  double residual_estimate;
};

Ritz lowest_ritz(const std::vector<double>& alpha, const std::vector<double>& beta) {
  const auto m = static_cast<Index>(alpha.size());
  Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), m);
  Eigen::VectorXd sub(std::max<Index>(m - 1, 0));
  for (Index i = 0; i + 1 < m; ++i) sub[i] = beta[static_cast<std::size_t>(i)];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  const Eigen::VectorXd s = es.eigenvectors().col(0);
  return {es.eigenvalues()[0], s, std::abs(beta[static_cast<std::size_t>(m - 1)] * s[m - 1])};
}

}  // namespace

void fix_phase(Eigen::VectorXd& v) {
  if (v.size() == 0) return;
  Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  if (v[imax] < 0.0) v = -v;
}

LanczosResult lanczos_lowest(const LinearMap& op, Index dimension, int count, const LanczosOptions& options) {
  if (dimension <= 0) throw ContractViolation("lanczos: empty operator");
  if (count < 1 || count > dimension) throw ContractViolation("lanczos: requested eigenpair count out of range");

  const auto per_vector = static_cast<std::size_t>(dimension) * sizeof(double);
  const int krylov_cap = static_cast<int>(std::min<std::size_t>(
      {static_cast<std::size_t>(options.max_krylov), static_cast<std::size_t>(dimension),
       std::max<std::size_t>(20, options.memory_budget_bytes / per_vector)}));

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);

  LanczosResult result;
  std::vector<Eigen::VectorXd> locked;
  Eigen::VectorXd w(dimension);

  for (int target = 0; target < count; ++target) {
    Eigen::VectorXd start(dimension);
    for (Index i = 0; i < dimension; ++i) start[i] = uniform(rng);
    orthogonalize(start, locked);
    orthogonalize(start, locked);
    start.normalize();

    bool done = false;
    double last_residual = std::numeric_limits<double>::infinity();
    int restart = 0;
    for (; restart <= options.max_restarts && !done; ++restart) {
      std::vector<Eigen::VectorXd> basis;
      std::vector<double> alpha;
      std::vector<double> beta;
      basis.push_back(start);

      Ritz ritz{};
      bool invariant = false;
      for (int j = 0; j < krylov_cap; ++j) {
        op({basis.back().data(), static_cast<std::size_t>(dimension)}, as_span(w));
        ++result.matvecs;
        orthogonalize(w, locked);
        const double a = basis.back().dot(w);
        w -= a * basis.back();
        if (j > 0) w -= beta.back() * basis[basis.size() - 2];
        // two passes of classical Gram-Schmidt keep the basis orthogonal to
        // working precision
        for (int pass = 0; pass < 2; ++pass) {
          orthogonalize(w, basis);
          orthogonalize(w, locked);
        }
        const double b = w.norm();
        alpha.push_back(a);
        beta.push_back(b);
        result.norm_estimate = std::max(result.norm_estimate, std::abs(a) + b + (j > 0 ? beta[beta.size() - 2] : 0.0));

        ritz = lowest_ritz(alpha, beta);
        const double scale = std::max(result.norm_estimate, 1.0);
        invariant = b <= 1e-14 * scale;
        if (invariant || ritz.residual_estimate <= options.tolerance * scale) break;
        if (j + 1 < krylov_cap) basis.push_back(w / b);
      }

      Eigen::VectorXd y = Eigen::VectorXd::Zero(dimension);
      for (std::size_t i = 0; i < basis.size(); ++i) y += ritz.coefficients[static_cast<Index>(i)] * basis[i];
      orthogonalize(y, locked);
      y.normalize();

      op({y.data(), static_cast<std::size_t>(dimension)}, as_span(w));
      ++result.matvecs;
      orthogonalize(w, locked);
      const double theta = y.dot(w);
      last_residual = (w - theta * y).norm();
      const double scale = std::max(result.norm_estimate, 1.0);
      if (last_residual <= 10.0 * options.tolerance * scale || (invariant && last_residual <= 1e-10 * scale)) {
        fix_phase(y);
        result.pairs.push_back({theta, y, last_residual});
        locked.push_back(std::move(y));
        done = true;
      } else {
        start = std::move(y);
      }
    }
    if (!done) {
      throw ConvergenceError("lanczos did not converge for eigenpair " + std::to_string(target) + " after " +
                                 std::to_string(restart) + " restarts (residual " + std::to_string(last_residual) + ")",
                             last_residual, result.matvecs);
    }
  }
  std::sort(result.pairs.begin(), result.pairs.end(), [](const auto& a, const auto& b) { return a.value < b.value; });
  return result;
}

}  // namespace tfim
