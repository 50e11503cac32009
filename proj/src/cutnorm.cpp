#include "cutgraph/cutnorm.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "cutgraph/errors.hpp"

namespace cutgraph {

namespace {

constexpr std::size_t kExactBudget = 24;

// mu_i mu_j k_ij, row-major.
std::vector<double> weighted_entries(const StepKernel& k) {
  const std::size_t m = k.type_count();
  std::vector<double> w(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      w[i * m + j] = k.mass(i) * k.mass(j) * k.value(i, j);
  return w;
}

std::vector<std::size_t> mask_to_set(std::uint32_t mask, std::size_t m) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < m; ++i)
    if (mask & (1u << i)) out.push_back(i);
  return out;
}

void require_budget(const StepKernel& k, const char* what) {
  if (k.type_count() > kExactBudget)
    throw BudgetError(std::string(what) + ": type count " +
                      std::to_string(k.type_count()) + " exceeds the exact "
                      "enumeration budget of 24; use cutnorm_heuristic");
}

}  // namespace

double rectangle_sum(const StepKernel& k, const std::vector<std::size_t>& s,
                     const std::vector<std::size_t>& t) {
  double sum = 0.0;
  for (std::size_t i : s)
    for (std::size_t j : t) sum += k.mass(i) * k.mass(j) * k.value(i, j);
  return sum;
}

double pm_objective(const StepKernel& k, const std::vector<std::int8_t>& f,
                    const std::vector<std::int8_t>& g) {
  const std::size_t m = k.type_count();
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      sum += f[i] * g[j] * k.mass(i) * k.mass(j) * k.value(i, j);
  return sum;
}

CutNormResult cutnorm_sets_exact(const StepKernel& k) {
  require_budget(k, "cutnorm_sets_exact");
  const std::size_t m = k.type_count();
  const std::vector<double> w = weighted_entries(k);

  // Gray-code walk over S; col[j] = sum_{i in S} w_ij. For fixed S the
  // optimal T is {j : col_j > 0} (max branch) or {j : col_j < 0} (min
  // branch), so only S needs enumerating.
  std::vector<double> col(m, 0.0);
  std::uint32_t mask = 0;
  double best = 0.0;
  std::uint32_t best_mask = 0;
  bool best_positive = true;

  const std::uint32_t total = 1u << m;
  for (std::uint32_t g = 1; g < total; ++g) {
    const std::uint32_t gray = g ^ (g >> 1);
    const std::uint32_t flipped = gray ^ mask;
    const std::size_t bit = static_cast<std::size_t>(std::countr_zero(flipped));
    const double sgn = (gray & flipped) ? 1.0 : -1.0;
    for (std::size_t j = 0; j < m; ++j) col[j] += sgn * w[bit * m + j];
    mask = gray;

    double pos = 0.0, neg = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (col[j] > 0.0)
        pos += col[j];
      else
        neg -= col[j];
    }
    if (pos > best) {
      best = pos;
      best_mask = mask;
      best_positive = true;
    }
    if (neg > best) {
      best = neg;
      best_mask = mask;
      best_positive = false;
    }
  }

  CutNormResult res;
  res.exact = true;
  res.set_s = mask_to_set(best_mask, m);
  // Rebuild the optimal T for the winning S.
  std::vector<double> bc(m, 0.0);
  for (std::size_t i : res.set_s)
    for (std::size_t j = 0; j < m; ++j) bc[j] += w[i * m + j];
  for (std::size_t j = 0; j < m; ++j) {
    if (best_positive ? bc[j] > 0.0 : bc[j] < 0.0) res.set_t.push_back(j);
  }
  res.value = std::abs(rectangle_sum(k, res.set_s, res.set_t));
  return res;
}

CutNormResult cutnorm_pm_exact(const StepKernel& k) {
  require_budget(k, "cutnorm_pm_exact");
  const std::size_t m = k.type_count();
  const std::vector<double> w = weighted_entries(k);

  // s_j = sum_i f_i w_ij; objective sum_j |s_j|. Fix f_0 = +1 (f -> -f
  // symmetry) and Gray-walk the remaining coordinates.
  std::vector<double> s(m, 0.0);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < m; ++i) s[j] += w[i * m + j];

  std::vector<std::int8_t> f(m, 1);
  auto objective = [&] {
    double v = 0.0;
    for (std::size_t j = 0; j < m; ++j) v += std::abs(s[j]);
    return v;
  };

  double best = objective();
  std::vector<std::int8_t> best_f = f;

  if (m > 1) {
    const std::size_t bits = m - 1;
    std::uint32_t mask = 0;
    const std::uint32_t total = 1u << bits;
    for (std::uint32_t g = 1; g < total; ++g) {
      const std::uint32_t gray = g ^ (g >> 1);
      const std::uint32_t flipped = gray ^ mask;
      const std::size_t i =
          static_cast<std::size_t>(std::countr_zero(flipped)) + 1;
      mask = gray;
      f[i] = static_cast<std::int8_t>(-f[i]);
      const double d = 2.0 * f[i];
      for (std::size_t j = 0; j < m; ++j) s[j] += d * w[i * m + j];
      const double v = objective();
      if (v > best) {
        best = v;
        best_f = f;
      }
    }
  }

  CutNormResult res;
  res.exact = true;
  res.f = best_f;
  res.g.assign(m, 1);
  // Optimal g matches the sign of the f-weighted column sums.
  std::vector<double> sc(m, 0.0);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < m; ++i) sc[j] += best_f[i] * w[i * m + j];
  for (std::size_t j = 0; j < m; ++j)
    res.g[j] = static_cast<std::int8_t>(sc[j] >= 0.0 ? 1 : -1);
  res.value = std::abs(pm_objective(k, res.f, res.g));
  return res;
}

CutNormResult cutnorm_heuristic(const StepKernel& k, std::size_t restarts,
                                RngStream& rng) {
  if (restarts < 1)
    throw std::invalid_argument("cutnorm_heuristic: restarts must be >= 1");
  const std::size_t m = k.type_count();
  const std::vector<double> w = weighted_entries(k);

  // One ascent pass: with S fixed, T <- argmax/argmin of the column sums;
  // with T fixed, S likewise from the row sums. Each half step is
  // monotone, so the loop terminates at a local optimum.
  auto ascend = [&](std::vector<std::uint8_t>& in_s,
                    std::vector<std::uint8_t>& in_t, bool positive) {
    double value = 0.0;
    for (std::size_t pass = 0; pass < 4 * m + 8; ++pass) {
      std::vector<double> col(m, 0.0);
      for (std::size_t i = 0; i < m; ++i)
        if (in_s[i])
          for (std::size_t j = 0; j < m; ++j) col[j] += w[i * m + j];
      bool changed = false;
      for (std::size_t j = 0; j < m; ++j) {
        std::uint8_t want = positive ? col[j] > 0.0 : col[j] < 0.0;
        if (want != in_t[j]) {
          in_t[j] = want;
          changed = true;
        }
      }
      std::vector<double> row(m, 0.0);
      for (std::size_t j = 0; j < m; ++j)
        if (in_t[j])
          for (std::size_t i = 0; i < m; ++i) row[i] += w[i * m + j];
      for (std::size_t i = 0; i < m; ++i) {
        std::uint8_t want = positive ? row[i] > 0.0 : row[i] < 0.0;
        if (want != in_s[i]) {
          in_s[i] = want;
          changed = true;
        }
      }
      if (!changed) break;
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      if (in_s[i])
        for (std::size_t j = 0; j < m; ++j)
          if (in_t[j]) sum += w[i * m + j];
    value = std::abs(sum);
    return value;
  };

  CutNormResult res;
  res.exact = false;
  bool first = true;
  for (std::size_t r = 0; r < restarts; ++r) {
    RngStream chain = rng.derive(r);
    for (bool positive : {true, false}) {
      std::vector<std::uint8_t> in_s(m), in_t(m);
      for (std::size_t i = 0; i < m; ++i) in_s[i] = chain.bernoulli(0.5);
      for (std::size_t j = 0; j < m; ++j) in_t[j] = chain.bernoulli(0.5);
      const double v = ascend(in_s, in_t, positive);
      if (v > res.value || first) {
        first = false;
        res.value = v;
        res.set_s.clear();
        res.set_t.clear();
        for (std::size_t i = 0; i < m; ++i)
          if (in_s[i]) res.set_s.push_back(i);
        for (std::size_t j = 0; j < m; ++j)
          if (in_t[j]) res.set_t.push_back(j);
      }
    }
  }
  res.value = std::abs(rectangle_sum(k, res.set_s, res.set_t));
  return res;
}

namespace {

double permuted_difference_norm(const WeightMatrix& a, const WeightMatrix& b,
                                const std::vector<std::size_t>& perm,
                                std::size_t restarts, RngStream& rng) {
  const std::size_t n = a.size();
  std::vector<double> diff(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      diff[i * n + j] = a.entry(perm[i], perm[j]) - b.entry(i, j);
  StepKernel d = StepKernel::uniform_masses(n, std::move(diff),
                                            StepKernel::Sign::Signed);
  if (n <= kExactBudget) return cutnorm_sets_exact(d).value;
  RngStream local = rng.derive(0x6375746e);
  return cutnorm_heuristic(d, restarts, local).value;
}

}  // namespace

double cut_distance(const WeightMatrix& a, const WeightMatrix& b,
                    CutDistanceBudget budget, RngStream& rng) {
  if (a.size() != b.size())
    throw std::invalid_argument(
        "cut_distance: matrices must have equal size (couplings between "
        "different sizes are unsupported)");
  const std::size_t n = a.size();

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);

  if (budget.kind == CutDistanceBudget::Kind::Exhaustive) {
    if (n > 8)
      throw BudgetError("cut_distance: exhaustive search limited to n <= 8");
    double best = permuted_difference_norm(a, b, perm, 16, rng);
    while (std::next_permutation(perm.begin(), perm.end())) {
      best = std::min(best, permuted_difference_norm(a, b, perm, 16, rng));
      if (best == 0.0) break;
    }
    return best;
  }

  // Simulated annealing over transpositions, geometric cooling.
  const std::size_t steps = std::max<std::size_t>(budget.anneal_steps, 1);
  const double t0 = 1.0, t1 = 1e-4;
  double current = permuted_difference_norm(a, b, perm, 4, rng);
  double best = current;
  for (std::size_t step = 0; step < steps && best > 0.0; ++step) {
    const double frac =
        steps > 1 ? static_cast<double>(step) / static_cast<double>(steps - 1)
                  : 1.0;
    const double temp = t0 * std::pow(t1 / t0, frac);
    std::size_t u = rng.below(n);
    std::size_t v = rng.below(n);
    if (u == v) continue;
    std::swap(perm[u], perm[v]);
    const double proposal = permuted_difference_norm(a, b, perm, 4, rng);
    const double delta = proposal - current;
    if (delta <= 0.0 || rng.uniform() < std::exp(-delta / temp)) {
      current = proposal;
      best = std::min(best, current);
    } else {
      std::swap(perm[u], perm[v]);
    }
  }
  return best;
}

}  // namespace cutgraph
