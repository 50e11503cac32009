#include "cutgraph/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "cutgraph/errors.hpp"

namespace cutgraph {

namespace {

void check_masses(const std::vector<double>& masses) {
  if (masses.empty()) throw std::invalid_argument("kernel needs >= 1 type");
  double sum = 0.0;
  for (double m : masses) {
    if (!(m > 0.0)) throw std::invalid_argument("type masses must be > 0");
    sum += m;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("type masses must sum to 1 (got " +
                                std::to_string(sum) + ")");
}

}  // namespace

StepKernel::StepKernel(std::vector<double> masses, std::vector<double> values,
                       Sign sign)
    : masses_(std::move(masses)), values_(std::move(values)), sign_(sign) {
  check_masses(masses_);
  const std::size_t m = masses_.size();
  if (values_.size() != m * m)
    throw std::invalid_argument("kernel value matrix must be m*m");
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      if (values_[i * m + j] != values_[j * m + i])
        throw std::invalid_argument("kernel values must be symmetric");
  if (sign_ == Sign::NonNegative) {
    for (double v : values_)
      if (v < 0.0)
        throw std::invalid_argument("kernel values must be nonnegative");
  }
}

StepKernel StepKernel::constant(double c, std::size_t types) {
  std::vector<double> masses(types, 1.0 / static_cast<double>(types));
  std::vector<double> values(types * types, c);
  return StepKernel(std::move(masses), std::move(values),
                    c < 0.0 ? Sign::Signed : Sign::NonNegative);
}

StepKernel StepKernel::uniform_masses(std::size_t types,
                                      std::vector<double> values, Sign sign) {
  std::vector<double> masses(types, 1.0 / static_cast<double>(types));
  return StepKernel(std::move(masses), std::move(values), sign);
}

StepKernel StepKernel::difference(const StepKernel& a, const StepKernel& b) {
  if (a.type_count() != b.type_count())
    throw std::invalid_argument("kernel difference needs a common partition");
  for (std::size_t i = 0; i < a.type_count(); ++i)
    if (std::abs(a.mass(i) - b.mass(i)) > 1e-12)
      throw std::invalid_argument("kernel difference needs equal masses");
  std::vector<double> values(a.values());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] -= b.values()[i];
  return StepKernel(a.masses(), std::move(values), Sign::Signed);
}

double StepKernel::max_value() const {
  double mx = 0.0;
  for (double v : values_) mx = std::max(mx, v);
  return mx;
}

double StepKernel::integral() const {
  const std::size_t m = type_count();
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      sum += masses_[i] * masses_[j] * values_[i * m + j];
  return sum;
}

WeightMatrix::WeightMatrix() : table_(StepKernel::constant(0.0)) {}

WeightMatrix WeightMatrix::dense(std::size_t n, std::vector<double> entries) {
  if (n == 0) throw std::invalid_argument("matrix needs n >= 1");
  if (entries.size() != n * n)
    throw std::invalid_argument("matrix entries must be n*n");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      if (entries[i * n + j] != entries[j * n + i])
        throw std::invalid_argument("matrix must be symmetric");
      if (entries[i * n + j] < 0.0)
        throw std::invalid_argument("matrix entries must be nonnegative");
    }
  WeightMatrix a;
  a.n_ = n;
  a.typed_ = false;
  a.entries_ = std::move(entries);
  return a;
}

WeightMatrix WeightMatrix::from_types(std::vector<std::uint32_t> types,
                                      StepKernel table) {
  if (types.empty()) throw std::invalid_argument("matrix needs n >= 1");
  if (table.is_signed())
    throw std::invalid_argument("typed matrix table must be nonnegative");
  for (std::uint32_t t : types)
    if (t >= table.type_count())
      throw std::invalid_argument("vertex type out of range");
  WeightMatrix a;
  a.n_ = types.size();
  a.typed_ = true;
  a.types_ = std::move(types);
  a.table_ = std::move(table);
  return a;
}

StepKernel WeightMatrix::as_kernel() const {
  std::vector<double> values(n_ * n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) values[i * n_ + j] = entry(i, j);
  return StepKernel::uniform_masses(n_, std::move(values));
}

double WeightMatrix::max_entry() const {
  if (typed_) {
    // Diagonal is zero in typed mode, so the max over realized entries is
    // the max over occupied type pairs; max over the whole table is an
    // upper bound and equals it whenever every type occurs twice. Use the
    // realized value.
    double mx = 0.0;
    std::vector<std::uint32_t> count(table_.type_count(), 0);
    for (std::uint32_t t : types_) ++count[t];
    for (std::size_t a = 0; a < table_.type_count(); ++a) {
      if (count[a] == 0) continue;
      for (std::size_t b = a; b < table_.type_count(); ++b) {
        if (count[b] == 0) continue;
        if (a == b && count[a] < 2) continue;
        mx = std::max(mx, table_.value(a, b));
      }
    }
    return mx;
  }
  double mx = 0.0;
  for (double v : entries_) mx = std::max(mx, v);
  return mx;
}

Marginal marginal(const StepKernel& k) {
  const std::size_t m = k.type_count();
  Marginal out;
  out.per_type.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) s += k.mass(j) * k.value(i, j);
    out.per_type[i] = s;
  }
  return out;
}

std::vector<double> apply_T(const StepKernel& k, std::span<const double> f) {
  const std::size_t m = k.type_count();
  if (f.size() != m)
    throw std::invalid_argument("apply_T: vector length != type count");
  std::vector<double> out(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) s += k.value(i, j) * f[j] * k.mass(j);
    out[i] = s;
  }
  return out;
}

double operator_norm(const StepKernel& k, double tol, std::size_t max_iter) {
  if (!(tol > 0.0)) throw std::invalid_argument("operator_norm: tol must be > 0");
  const std::size_t m = k.type_count();

  // Row-sum bound on the spectral radius of M_ij = k_ij mu_j; also the
  // shift that makes M + sI entrywise dominant-eigenvalue friendly.
  double shift = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < m; ++j)
      row += std::abs(k.value(i, j)) * k.mass(j);
    shift = std::max(shift, row);
  }
  if (shift == 0.0) return 0.0;

  std::vector<double> f(m, 1.0);
  double estimate = 0.0;
  for (std::size_t iter = 1; iter <= max_iter; ++iter) {
    std::vector<double> g = apply_T(k, f);
    for (std::size_t i = 0; i < m; ++i) g[i] += shift * f[i];

    // Rayleigh quotient in the mu-weighted inner product.
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      num += k.mass(i) * f[i] * g[i];
      den += k.mass(i) * f[i] * f[i];
    }
    const double lambda = num / den - shift;

    double norm = 0.0;
    for (std::size_t i = 0; i < m; ++i) norm += k.mass(i) * g[i] * g[i];
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < m; ++i) f[i] = g[i] / norm;

    const double change = std::abs(lambda - estimate);
    estimate = lambda;
    if (iter > 1 && change <= tol * std::max(1.0, std::abs(estimate)))
      return estimate;
  }
  throw ConvergenceError("operator_norm: power iteration did not converge in " +
                             std::to_string(max_iter) + " iterations",
                         std::move(f), estimate, max_iter);
}

StepKernel truncate(const StepKernel& k, double M) {
  if (M < 0.0) throw std::invalid_argument("truncate: M must be >= 0");
  std::vector<double> values(k.values());
  for (double& v : values) v = std::min(v, M);
  return StepKernel(k.masses(), std::move(values),
                    k.is_signed() ? StepKernel::Sign::Signed
                                  : StepKernel::Sign::NonNegative);
}

StepKernel scale(const StepKernel& k, double c) {
  if (c < 0.0 && !k.is_signed())
    throw std::invalid_argument("scale: c must be >= 0");
  std::vector<double> values(k.values());
  for (double& v : values) v *= c;
  return StepKernel(k.masses(), std::move(values),
                    k.is_signed() ? StepKernel::Sign::Signed
                                  : StepKernel::Sign::NonNegative);
}

IrreducibleDecomposition decompose_irreducible(const StepKernel& k) {
  const std::size_t m = k.type_count();
  // Connected components of the positive-support graph on types. A type
  // with k_ii > 0 is a valid singleton block; one with an all-zero row
  // likewise ends up alone.
  std::vector<std::size_t> comp(m, m);
  std::size_t ncomp = 0;
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < m; ++s) {
    if (comp[s] != m) continue;
    comp[s] = ncomp;
    stack.push_back(s);
    while (!stack.empty()) {
      std::size_t i = stack.back();
      stack.pop_back();
      for (std::size_t j = 0; j < m; ++j)
        if (comp[j] == m && k.value(i, j) != 0.0) {
          comp[j] = ncomp;
          stack.push_back(j);
        }
    }
    ++ncomp;
  }

  struct Raw {
    std::vector<std::size_t> types;
    double mass = 0.0;
  };
  std::vector<Raw> raw(ncomp);
  for (std::size_t i = 0; i < m; ++i) {
    raw[comp[i]].types.push_back(i);
    raw[comp[i]].mass += k.mass(i);
  }
  std::sort(raw.begin(), raw.end(), [](const Raw& a, const Raw& b) {
    if (a.mass != b.mass) return a.mass > b.mass;
    return a.types.front() < b.types.front();
  });

  IrreducibleDecomposition out;
  for (Raw& r : raw) {
    const std::size_t bm = r.types.size();
    std::vector<double> masses(bm), values(bm * bm);
    for (std::size_t a = 0; a < bm; ++a) {
      masses[a] = k.mass(r.types[a]) / r.mass;
      for (std::size_t b = 0; b < bm; ++b)
        values[a * bm + b] = k.value(r.types[a], r.types[b]);
    }
    out.blocks.push_back({std::move(r.types),
                          StepKernel(std::move(masses), std::move(values)),
                          r.mass});
  }
  return out;
}

EliminationResult eliminate_large_entries(const WeightMatrix& a, double M) {
  if (!(M > 0.0))
    throw std::invalid_argument("eliminate_large_entries: M must be > 0");
  std::uint64_t removed_count = 0;
  double removed_sum = 0.0;
  const std::size_t n = a.size();
  if (a.typed()) {
    const StepKernel& t = a.table();
    const std::size_t m = t.type_count();
    std::vector<std::uint64_t> count(m, 0);
    for (std::uint32_t x : a.types()) ++count[x];
    std::vector<double> values(t.values());
    for (std::size_t p = 0; p < m; ++p)
      for (std::size_t q = 0; q < m; ++q) {
        const double v = t.value(p, q);
        if (v > M) {
          values[p * m + q] = 0.0;
          // Off-diagonal realized entries with this type pair; the
          // diagonal is already zero in typed mode.
          std::uint64_t pairs =
              (p == q) ? count[p] * (count[p] - 1) : count[p] * count[q];
          removed_count += pairs;
          removed_sum += static_cast<double>(pairs) * v;
        }
      }
    return {WeightMatrix::from_types(a.types(),
                                     StepKernel(t.masses(), std::move(values))),
            removed_count, removed_sum};
  }
  std::vector<double> entries(a.entries());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double& v = entries[i * n + j];
      if (i == j || v > M) {
        if (v != 0.0) {
          ++removed_count;
          removed_sum += v;
          v = 0.0;
        }
      }
    }
  return {WeightMatrix::dense(n, std::move(entries)), removed_count,
          removed_sum};
}

WeightMatrix scale(const WeightMatrix& a, double c) {
  if (c < 0.0) throw std::invalid_argument("scale: c must be >= 0");
  if (a.typed())
    return WeightMatrix::from_types(a.types(), scale(a.table(), c));
  std::vector<double> entries(a.entries());
  for (double& v : entries) v *= c;
  return WeightMatrix::dense(a.size(), std::move(entries));
}

}  // namespace cutgraph
