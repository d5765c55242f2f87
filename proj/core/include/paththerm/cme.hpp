#ifndef PATHTHERM_CME_HPP
#define PATHTHERM_CME_HPP

#include <Eigen/Dense>
#include <cstddef>

#include "paththerm/generator.hpp"
#include "paththerm/state_box.hpp"

namespace paththerm {

enum class StationaryMethod {
  automatic,  ///< gth when the elimination fill is affordable, else sparse_lu
  gth,        ///< Grassmann-Taksar-Heyman state reduction (subtraction free)
  sparse_lu,  ///< one balance row replaced by normalization, sparse LU
  power,      ///< power iteration on the uniformized matrix
};

struct StationaryOptions {
  StationaryMethod method = StationaryMethod::automatic;
  double power_tolerance = 1e-14;
  std::size_t power_max_iterations = 50'000'000;
};

/// True when every state of the box reaches every other state through
/// lumped transitions.
bool is_irreducible(const Generator& generator);

/// Stationary distribution P_s with G P_s = 0. Throws NumericalError when the
/// lumped chain is reducible (absorbing states) or when the solution's
/// residual exceeds 1e-10 times the largest rate.
Distribution stationary(const Generator& generator, const StationaryOptions& options = {});

/// ||G p||_inf divided by the largest rate (max total outflow).
double stationary_residual(const Generator& generator, const Distribution& distribution);

/// Probability held by states whose transitions were cut by the truncation.
double boundary_mass(const Generator& generator, const Distribution& distribution);

/// Throws NumericalError("truncation too small ...") when the boundary mass
/// is not below `threshold`.
void require_adequate_truncation(const Generator& generator, const Distribution& distribution,
                                 double threshold = 1e-10);

enum class BalanceMode {
  pairwise,     ///< every lumped transition pair, any dimension
  birth_death,  ///< one species, jumps of +-1: mu(X) P(X) vs lambda(X-1) P(X-1)
};

/// Largest relative detailed-balance defect
///   |W(b|a) P(a) - W(a|b) P(b)| / max(W(b|a) P(a), W(a|b) P(b))
/// over all lumped transitions. The birth_death mode evaluates the same
/// quantity from the birth and death rates and throws InputError unless the
/// network has one dynamic species and only +-1 jumps. Pairs where either
/// probability has underflowed below the smallest normal double are skipped.
double detailed_balance_residual(const Generator& generator, const Distribution& distribution,
                                 BalanceMode mode = BalanceMode::pairwise);

/// exp(G t) p0 by uniformization with Poisson tail mass at most `tail`.
Distribution transient(const Generator& generator, const Distribution& p0, double t, double tail = 1e-12);

/// Dense matrix of P(X, t + dt | X', t), indexed (to, from): columns are
/// probability vectors. Limited to boxes of at most `max_states` states.
Eigen::MatrixXd conditional_matrix(const Generator& generator, double dt, double tail = 1e-12,
                                   std::size_t max_states = 20'000);

/// Channel-resolved average entropy production rate (k_B = 1):
///   1/2 sum_{rho, X} [W_rho P(X) - W_-rho P(X')] ln[W_rho P(X) / (W_-rho P(X'))]
/// Requires a reverse-channel pairing; throws NumericalError if a channel
/// with positive rate has a reverse of zero rate.
double mean_entropy_production_rate(const Generator& generator, const Distribution& distribution);

/// -sum P ln P with 0 ln 0 = 0.
double gibbs_shannon_entropy(const Distribution& distribution);

/// 1 / (spectral gap of the lumped generator); 0 for a one-state box.
double relaxation_time(const Generator& generator);

}  // namespace paththerm

#endif  // PATHTHERM_CME_HPP
