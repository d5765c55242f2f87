#include "paththerm/cme.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <deque>
#include <iomanip>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "paththerm/error.hpp"

namespace paththerm {

namespace {

// Probabilities below the normal range carry no relative precision.
bool underflowed(double p) { return p < std::numeric_limits<double>::min(); }

std::string format_number(double v) {
  std::ostringstream out;
  out << std::setprecision(3) << v;
  return out.str();
}


using SparseMatrix = Eigen::SparseMatrix<double>;

// Out-neighbour lists of the lumped transition graph.
std::vector<std::vector<std::size_t>> transition_graph(const Generator& generator, bool reversed) {
  const auto& g = generator.lumped();
  std::vector<std::vector<std::size_t>> adjacency(generator.size());
  for (Eigen::Index from = 0; from < g.outerSize(); ++from) {
    for (SparseMatrix::InnerIterator it(g, from); it; ++it) {
      if (it.row() == from || it.value() <= 0.0) continue;
      const auto a = static_cast<std::size_t>(from);
      const auto b = static_cast<std::size_t>(it.row());
      if (reversed) {
        adjacency[b].push_back(a);
      } else {
        adjacency[a].push_back(b);
      }
    }
  }
  return adjacency;
}

std::size_t reach_count(const std::vector<std::vector<std::size_t>>& adjacency) {
  std::vector<char> seen(adjacency.size(), 0);
  std::deque<std::size_t> queue{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!queue.empty()) {
    const auto v = queue.front();
    queue.pop_front();
    for (const auto w : adjacency[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        queue.push_back(w);
      }
    }
  }
  return count;
}

// I + G / lambda, entrywise nonnegative when lambda >= max outflow.
SparseMatrix uniformized(const Generator& generator, double lambda) {
  SparseMatrix m = generator.lumped() / lambda;
  SparseMatrix identity(m.rows(), m.cols());
  identity.setIdentity();
  m += identity;
  // Diagonal 1 - out/lambda may round to a tiny negative at the argmax state.
  for (Eigen::Index k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
      if (it.value() < 0.0) it.valueRef() = 0.0;
    }
  }
  m.makeCompressed();
  return m;
}

std::size_t bandwidth(const Generator& generator) {
  const auto& g = generator.lumped();
  std::size_t band = 0;
  for (Eigen::Index col = 0; col < g.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(g, col); it; ++it) {
      const auto d = static_cast<std::size_t>(std::abs(it.row() - col));
      band = std::max(band, d);
    }
  }
  return band;
}

std::vector<double> solve_gth(const Generator& generator) {
  const std::size_t n = generator.size();
  // out[i][j]: rate i -> j; in[j]: sources i with out[i][j] > 0.
  std::vector<std::map<std::size_t, double>> out(n);
  std::vector<std::set<std::size_t>> in(n);
  const auto& g = generator.lumped();
  for (Eigen::Index from = 0; from < g.outerSize(); ++from) {
    for (SparseMatrix::InnerIterator it(g, from); it; ++it) {
      if (it.row() == from || it.value() <= 0.0) continue;
      out[static_cast<std::size_t>(from)][static_cast<std::size_t>(it.row())] = it.value();
      in[static_cast<std::size_t>(it.row())].insert(static_cast<std::size_t>(from));
    }
  }
  std::vector<double> exit_rate(n, 0.0);
  for (std::size_t k = n; k-- > 1;) {
    double s = 0.0;
    for (const auto& [j, rate] : out[k]) {
      if (j < k) s += rate;
    }
    if (!(s > 0.0)) throw NumericalError("GTH elimination found a state with no path back (reducible chain)");
    exit_rate[k] = s;
    for (const auto i : in[k]) {
      if (i >= k) continue;
      const double r_ik = out[i].at(k);
      for (const auto& [j, r_kj] : out[k]) {
        if (j >= k || j == i) continue;
        auto [it, inserted] = out[i].try_emplace(j, 0.0);
        it->second += r_ik * r_kj / s;
        if (inserted) in[j].insert(i);
      }
    }
  }
  std::vector<double> pi(n, 0.0);
  pi[0] = 1.0;
  for (std::size_t k = 1; k < n; ++k) {
    double flow = 0.0;
    for (const auto i : in[k]) {
      if (i < k) flow += pi[i] * out[i].at(k);
    }
    pi[k] = flow / exit_rate[k];
  }
  return pi;
}

std::vector<double> solve_sparse_lu(const Generator& generator) {
  const auto n = static_cast<Eigen::Index>(generator.size());
  const auto& g = generator.lumped();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(g.nonZeros() + n));
  for (Eigen::Index col = 0; col < g.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(g, col); it; ++it) {
      if (it.row() != 0) triplets.emplace_back(static_cast<int>(it.row()), static_cast<int>(col), it.value());
    }
    triplets.emplace_back(0, static_cast<int>(col), 1.0);
  }
  SparseMatrix a(n, n);
  a.setFromTriplets(triplets.begin(), triplets.end());
  a.makeCompressed();
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) throw NumericalError("sparse LU factorization failed: " + lu.lastErrorMessage());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs[0] = 1.0;
  const Eigen::VectorXd x = lu.solve(rhs);
  if (lu.info() != Eigen::Success) throw NumericalError("sparse LU solve failed");
  const double scale = x.cwiseAbs().maxCoeff();
  std::vector<double> p(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    double v = x[i];
    if (v < 0.0) {
      if (v < -1e-10 * scale) throw NumericalError("sparse LU produced a clearly negative probability");
      v = 0.0;
    }
    p[static_cast<std::size_t>(i)] = v;
  }
  return p;
}

std::vector<double> solve_power(const Generator& generator, const StationaryOptions& options) {
  const std::size_t n = generator.size();
  const double lambda = 1.05 * generator.max_outflow();
  const SparseMatrix m = uniformized(generator, lambda);
  Eigen::VectorXd p = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n));
  Eigen::VectorXd next(p.size());
  double previous_step = std::numeric_limits<double>::infinity();
  double contraction = 0.0;
  for (std::size_t iter = 0; iter < options.power_max_iterations; ++iter) {
    next.noalias() = m * p;
    next /= next.sum();
    const double step = (next - p).lpNorm<1>();
    p.swap(next);
    if (step == 0.0) break;
    if (std::isfinite(previous_step) && previous_step > 0.0) {
      contraction = 0.99 * contraction + 0.01 * std::min(step / previous_step, 1.0 - 1e-15);
    }
    previous_step = step;
    // Remaining error of a geometric tail is step / (1 - contraction).
    if (iter > 100 && step / std::max(1.0 - contraction, 1e-300) < options.power_tolerance) break;
    if (iter + 1 == options.power_max_iterations) throw NumericalError("power iteration did not converge");
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = std::max(p[static_cast<Eigen::Index>(i)], 0.0);
  return out;
}

struct PoissonWindow {
  std::size_t first = 0;
  std::vector<double> weights;  // weights[k - first], normalized
};

PoissonWindow poisson_window(double mean, double tail) {
  PoissonWindow window;
  if (mean <= 0.0) {
    window.weights = {1.0};
    return window;
  }
  const auto mode = static_cast<std::size_t>(std::floor(mean));
  double sum = 1.0;
  std::vector<double> right;
  double w = 1.0;
  for (std::size_t k = mode;; ++k) {
    const double next = w * mean / static_cast<double>(k + 1);
    const double ratio = mean / static_cast<double>(k + 2);
    if (ratio < 1.0 && next / (1.0 - ratio) <= 0.5 * tail * sum) break;
    right.push_back(next);
    sum += next;
    w = next;
  }
  std::vector<double> left;
  w = 1.0;
  std::size_t k = mode;
  for (; k > 0; --k) {
    const double prev = w * static_cast<double>(k) / mean;
    const double ratio = static_cast<double>(k - 1) / mean;
    if (prev / (1.0 - ratio) <= 0.5 * tail * sum) break;
    left.push_back(prev);
    sum += prev;
    w = prev;
  }
  window.first = k;
  window.weights.reserve(left.size() + 1 + right.size());
  for (auto it = left.rbegin(); it != left.rend(); ++it) window.weights.push_back(*it / sum);
  window.weights.push_back(1.0 / sum);
  for (const double v : right) window.weights.push_back(v / sum);
  return window;
}

Eigen::VectorXd to_vector(const Distribution& d) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) v[static_cast<Eigen::Index>(i)] = d[i];
  return v;
}

}  // namespace

bool is_irreducible(const Generator& generator) {
  const std::size_t n = generator.size();
  if (n <= 1) return true;
  return reach_count(transition_graph(generator, false)) == n && reach_count(transition_graph(generator, true)) == n;
}

Distribution stationary(const Generator& generator, const StationaryOptions& options) {
  if (!is_irreducible(generator)) {
    throw NumericalError("lumped chain is reducible on the box (absorbing or transient states); "
                         "no unique stationary distribution");
  }
  const std::size_t n = generator.size();
  std::vector<double> p;
  if (n == 1) {
    p = {1.0};
  } else {
    auto method = options.method;
    if (method == StationaryMethod::automatic) {
      const double band = static_cast<double>(bandwidth(generator));
      method = static_cast<double>(n) * band * band <= 2e7 ? StationaryMethod::gth : StationaryMethod::sparse_lu;
    }
    switch (method) {
      case StationaryMethod::gth: p = solve_gth(generator); break;
      case StationaryMethod::sparse_lu: p = solve_sparse_lu(generator); break;
      case StationaryMethod::power: p = solve_power(generator, options); break;
      case StationaryMethod::automatic: break;
    }
  }
  Distribution result = Distribution::normalized(generator.box_ptr(), std::move(p));
  const double residual = stationary_residual(generator, result);
  if (residual > 1e-10) {
    throw NumericalError("stationary solve residual " + format_number(residual) + " exceeds 1e-10");
  }
  return result;
}

double stationary_residual(const Generator& generator, const Distribution& distribution) {
  if (generator.max_outflow() == 0.0) return 0.0;
  const Eigen::VectorXd r = generator.lumped() * to_vector(distribution);
  return r.cwiseAbs().maxCoeff() / generator.max_outflow();
}

double boundary_mass(const Generator& generator, const Distribution& distribution) {
  double mass = 0.0;
  const auto cut = generator.truncated_outflow();
  for (std::size_t i = 0; i < cut.size(); ++i) {
    if (cut[i] > 0.0) mass += distribution[i];
  }
  return mass;
}

void require_adequate_truncation(const Generator& generator, const Distribution& distribution, double threshold) {
  const double mass = boundary_mass(generator, distribution);
  if (!(mass < threshold)) {
    throw NumericalError("truncation too small: boundary mass " + format_number(mass) + " is not below " +
                         format_number(threshold) + "; enlarge the box");
  }
}

double detailed_balance_residual(const Generator& generator, const Distribution& distribution, BalanceMode mode) {
  if (mode == BalanceMode::birth_death) {
    const auto& network = generator.network();
    if (network.dimension() != 1) throw InputError("birth-death balance check needs exactly one dynamic species");
    for (std::size_t r = 0; r < network.reaction_count(); ++r) {
      const auto v = network.jump(r)[0];
      if (v != 1 && v != -1 && v != 0) {
        throw InputError("birth-death balance check needs jump vectors of +-1; reaction " + std::to_string(r) +
                         " jumps by " + std::to_string(v));
      }
    }
    const auto& grouping = generator.grouping();
    const auto up = grouping.find(JumpVector{1});
    const auto down = grouping.find(JumpVector{-1});
    const auto& box = generator.box();
    double worst = 0.0;
    State x(1), below(1);
    for (std::size_t k = 0; k < box.size(); ++k) {
      box.state_into(k, x.data());
      below[0] = x[0] - 1;
      const auto kb = box.index_of(below);
      if (!kb) continue;
      const double mu = down ? group_rate(network, grouping.groups()[*down], x.data()) : 0.0;
      const double lambda = up ? group_rate(network, grouping.groups()[*up], below.data()) : 0.0;
      if (underflowed(distribution[k]) || underflowed(distribution[*kb])) continue;
      const double lhs = mu * distribution[k];
      const double rhs = lambda * distribution[*kb];
      const double scale = std::max(lhs, rhs);
      if (scale > 0.0) worst = std::max(worst, std::abs(lhs - rhs) / scale);
    }
    return worst;
  }

  const auto& g = generator.lumped();
  double worst = 0.0;
  for (Eigen::Index from = 0; from < g.outerSize(); ++from) {
    for (SparseMatrix::InnerIterator it(g, from); it; ++it) {
      if (it.row() == from || it.value() <= 0.0) continue;
      const auto a = static_cast<std::size_t>(from);
      const auto b = static_cast<std::size_t>(it.row());
      if (underflowed(distribution[a]) || underflowed(distribution[b])) continue;
      const double forward = it.value() * distribution[a];
      const double backward = generator.rate(b, a) * distribution[b];
      const double scale = std::max(forward, backward);
      if (scale > 0.0) worst = std::max(worst, std::abs(forward - backward) / scale);
    }
  }
  return worst;
}

Distribution transient(const Generator& generator, const Distribution& p0, double t, double tail) {
  if (!(t >= 0.0)) throw InputError("transient solve needs t >= 0");
  if (p0.size() != generator.size()) throw InputError("initial distribution lives on a different box");
  const double lambda = generator.max_outflow();
  if (t == 0.0 || lambda == 0.0) return p0;
  const SparseMatrix m = uniformized(generator, lambda);
  const auto window = poisson_window(lambda * t, tail);
  Eigen::VectorXd v = to_vector(p0);
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(v.size());
  Eigen::VectorXd next(v.size());
  const std::size_t last = window.first + window.weights.size() - 1;
  for (std::size_t k = 0; k <= last; ++k) {
    if (k >= window.first) acc += window.weights[k - window.first] * v;
    if (k < last) {
      next.noalias() = m * v;
      v.swap(next);
    }
  }
  std::vector<double> p(static_cast<std::size_t>(acc.size()));
  for (Eigen::Index i = 0; i < acc.size(); ++i) p[static_cast<std::size_t>(i)] = std::max(acc[i], 0.0);
  return Distribution::normalized(generator.box_ptr(), std::move(p));
}

Eigen::MatrixXd conditional_matrix(const Generator& generator, double dt, double tail, std::size_t max_states) {
  if (!(dt >= 0.0)) throw InputError("conditional matrix needs dt >= 0");
  const auto n = static_cast<Eigen::Index>(generator.size());
  if (generator.size() > max_states) {
    throw InputError("conditional matrix is dense; box of " + std::to_string(generator.size()) +
                     " states exceeds the limit of " + std::to_string(max_states));
  }
  const double lambda = generator.max_outflow();
  if (dt == 0.0 || lambda == 0.0) return Eigen::MatrixXd::Identity(n, n);
  const SparseMatrix m = uniformized(generator, lambda);
  const auto window = poisson_window(lambda * dt, tail);
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd next(n, n);
  const std::size_t last = window.first + window.weights.size() - 1;
  for (std::size_t k = 0; k <= last; ++k) {
    if (k >= window.first) acc += window.weights[k - window.first] * v;
    if (k < last) {
      next.noalias() = m * v;
      v.swap(next);
    }
  }
  return acc;
}

double mean_entropy_production_rate(const Generator& generator, const Distribution& distribution) {
  const auto& network = generator.network();
  if (!network.has_reverse_pairing()) {
    throw InputError("entropy production needs a reverse-channel pairing");
  }
  const auto& box = generator.box();
  State target(box.dimension());
  double sum = 0.0;
  double compensation = 0.0;
  for (std::size_t r = 0; r < network.reaction_count(); ++r) {
    const std::size_t reverse = network.reverse_channel(r);
    for (const auto& tr : generator.channel_rates()[r]) {
      box.state_into(tr.to, target.data());
      const double back = network.propensity_unchecked(target.data(), reverse);
      if (!(back > 0.0)) {
        throw NumericalError("channel " + std::to_string(r) + " has no reverse transition (reverse rate is zero)");
      }
      const double pa = distribution[tr.from];
      const double pb = distribution[tr.to];
      if (pa == 0.0 && pb == 0.0) continue;
      const double flux = tr.rate * pa - back * pb;
      double affinity;
      if (pa == 0.0 || pb == 0.0) {
        throw NumericalError("entropy production undefined: one side of a transition has zero probability");
      }
      affinity = std::log(tr.rate) + std::log(pa) - std::log(back) - std::log(pb);
      // Neumaier summation.
      const double term = 0.5 * flux * affinity;
      const double t = sum + term;
      compensation += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
      sum = t;
    }
  }
  return sum + compensation;
}

double gibbs_shannon_entropy(const Distribution& distribution) {
  double sum = 0.0;
  double compensation = 0.0;
  for (std::size_t i = 0; i < distribution.size(); ++i) {
    const double p = distribution[i];
    if (p <= 0.0) continue;
    const double term = -p * std::log(p);
    const double t = sum + term;
    compensation += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  }
  return sum + compensation;
}

double relaxation_time(const Generator& generator) {
  const std::size_t n = generator.size();
  if (n <= 1) return 0.0;
  if (n <= 600) {
    const Eigen::MatrixXd dense(generator.lumped());
    const Eigen::EigenSolver<Eigen::MatrixXd> solver(dense, false);
    std::vector<double> decay;
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) decay.push_back(-solver.eigenvalues()[i].real());
    std::sort(decay.begin(), decay.end());
    // decay[0] is the stationary mode (~0).
    const double gap = decay[1];
    if (!(gap > 0.0)) throw NumericalError("generator has no spectral gap (reducible chain)");
    return 1.0 / gap;
  }
  // Larger boxes: power iteration on a zero-sum vector. The uniformized matrix
  // preserves the sum, so the stationary mode never re-enters.
  const double lambda = 1.05 * generator.max_outflow();
  const SparseMatrix m = uniformized(generator, lambda);
  Eigen::VectorXd d = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), -1.0 / static_cast<double>(n - 1));
  d[0] = 1.0;
  Eigen::VectorXd next(d.size());
  constexpr std::size_t block = 500;
  double estimate = -1.0;
  double log_contraction = 0.0;
  for (std::size_t iter = 1; iter <= 20'000'000; ++iter) {
    next.noalias() = m * d;
    const double norm = next.lpNorm<1>();
    if (!(norm > 0.0)) break;
    log_contraction += std::log(norm / d.lpNorm<1>());
    d = next / norm;
    if (iter % block == 0) {
      const double rate = std::exp(log_contraction / static_cast<double>(block));
      log_contraction = 0.0;
      const double gap = lambda * (1.0 - rate);
      if (estimate > 0.0 && std::abs(gap - estimate) < 1e-7 * estimate) return 1.0 / gap;
      estimate = gap;
    }
  }
  if (!(estimate > 0.0)) throw NumericalError("could not estimate the relaxation time");
  return 1.0 / estimate;
}

}  // namespace paththerm
