#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "haarlab/combination.hpp"

namespace haarlab {

enum class NormKind { L1, L2, Linf };

inline std::string to_string(NormKind kind) {
  switch (kind) {
    case NormKind::L1: return "l1";
    case NormKind::L2: return "l2";
    case NormKind::Linf: return "linf";
  }
  return "?";
}

/// R^dim with the l1, l2 or l-infinity norm.
struct NormedSpaceSpec {
  int dim = 1;
  NormKind norm = NormKind::L2;

  static NormedSpaceSpec make(int dim, NormKind norm) {
    if (dim < 1) throw DomainError("space dimension must be >= 1");
    return {dim, norm};
  }

  double norm_of(const Vector& x) const {
    double acc = 0.0;
    switch (norm) {
      case NormKind::L1:
        for (double v : x) acc += std::abs(v);
        return acc;
      case NormKind::L2:
        for (double v : x) acc += v * v;
        return std::sqrt(acc);
      case NormKind::Linf:
        for (double v : x) acc = std::max(acc, std::abs(v));
        return acc;
    }
    return acc;
  }

  /// A subgradient of the norm at x (a dual unit vector attaining <s,x> = |x|).
  /// Kinks: zero coordinates get 0 for l1; the first maximal coordinate
  /// carries the mass for l-infinity; 0 at the origin.
  Vector subgradient(const Vector& x) const {
    Vector s(x.size(), 0.0);
    switch (norm) {
      case NormKind::L1:
        for (std::size_t i = 0; i < x.size(); ++i) s[i] = x[i] > 0 ? 1.0 : (x[i] < 0 ? -1.0 : 0.0);
        break;
      case NormKind::L2: {
        const double n = norm_of(x);
        if (n > 0)
          for (std::size_t i = 0; i < x.size(); ++i) s[i] = x[i] / n;
        break;
      }
      case NormKind::Linf: {
        std::size_t best = 0;
        double mag = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
          if (std::abs(x[i]) > mag) {
            mag = std::abs(x[i]);
            best = i;
          }
        if (mag > 0) s[best] = x[best] > 0 ? 1.0 : -1.0;
        break;
      }
    }
    return s;
  }

  friend bool operator==(const NormedSpaceSpec&, const NormedSpaceSpec&) = default;
};

struct DenseKind {
  std::vector<Vector> rows;  // codomain.dim x domain.dim
};
struct DiagonalKind {
  Vector entries;
};
struct IdentityKind {};

/// Linear map between two finite-dimensional normed spaces.
class OperatorSpec {
public:
  using Kind = std::variant<DenseKind, DiagonalKind, IdentityKind>;

  static OperatorSpec identity(NormedSpaceSpec space) { return OperatorSpec(space, space, IdentityKind{}); }

  static OperatorSpec diagonal(NormedSpaceSpec space, Vector entries) {
    if (entries.size() != static_cast<std::size_t>(space.dim)) {
      throw DomainError("diagonal operator: " + std::to_string(entries.size()) + " entries for dimension " +
                        std::to_string(space.dim));
    }
    return OperatorSpec(space, space, DiagonalKind{std::move(entries)});
  }

  static OperatorSpec dense(NormedSpaceSpec domain, NormedSpaceSpec codomain, std::vector<Vector> rows) {
    if (rows.size() != static_cast<std::size_t>(codomain.dim)) {
      throw DomainError("dense operator: " + std::to_string(rows.size()) + " rows for codomain dimension " +
                        std::to_string(codomain.dim));
    }
    for (const auto& r : rows)
      if (r.size() != static_cast<std::size_t>(domain.dim)) {
        throw DomainError("dense operator: row of length " + std::to_string(r.size()) +
                          " for domain dimension " + std::to_string(domain.dim));
      }
    return OperatorSpec(domain, codomain, DenseKind{std::move(rows)});
  }

  const NormedSpaceSpec& domain() const { return domain_; }
  const NormedSpaceSpec& codomain() const { return codomain_; }
  const Kind& kind() const { return kind_; }

  Vector apply(const Vector& x) const {
    if (const auto* d = std::get_if<DenseKind>(&kind_)) {
      Vector y(static_cast<std::size_t>(codomain_.dim), 0.0);
      for (std::size_t r = 0; r < d->rows.size(); ++r)
        for (std::size_t c = 0; c < x.size(); ++c) y[r] += d->rows[r][c] * x[c];
      return y;
    }
    if (const auto* g = std::get_if<DiagonalKind>(&kind_)) {
      Vector y = x;
      for (std::size_t i = 0; i < y.size(); ++i) y[i] *= g->entries[i];
      return y;
    }
    return x;
  }

  Vector apply_transpose(const Vector& y) const {
    if (const auto* d = std::get_if<DenseKind>(&kind_)) {
      Vector x(static_cast<std::size_t>(domain_.dim), 0.0);
      for (std::size_t r = 0; r < d->rows.size(); ++r)
        for (std::size_t c = 0; c < x.size(); ++c) x[c] += d->rows[r][c] * y[r];
      return x;
    }
    return apply(y);  // diagonal and identity are symmetric
  }

  /// Dense matrix (codomain.dim x domain.dim).
  std::vector<Vector> matrix() const {
    std::vector<Vector> m(static_cast<std::size_t>(codomain_.dim), Vector(static_cast<std::size_t>(domain_.dim), 0.0));
    for (int c = 0; c < domain_.dim; ++c) {
      Vector e(static_cast<std::size_t>(domain_.dim), 0.0);
      e[static_cast<std::size_t>(c)] = 1.0;
      const Vector col = apply(e);
      for (int r = 0; r < codomain_.dim; ++r) m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = col[static_cast<std::size_t>(r)];
    }
    return m;
  }

  bool hilbert_to_hilbert() const {
    return domain_.norm == NormKind::L2 && codomain_.norm == NormKind::L2;
  }

private:
  OperatorSpec(NormedSpaceSpec domain, NormedSpaceSpec codomain, Kind kind)
      : domain_(domain), codomain_(codomain), kind_(std::move(kind)) {}

  NormedSpaceSpec domain_;
  NormedSpaceSpec codomain_;
  Kind kind_;
};

/// Coefficientwise image T f.
inline HaarCombination apply(const OperatorSpec& op, const HaarCombination& f) {
  if (f.dim() != op.domain().dim) {
    throw DomainError("operator domain dimension " + std::to_string(op.domain().dim) +
                      " does not match combination dimension " + std::to_string(f.dim()));
  }
  HaarCombination out(op.codomain().dim);
  for (const auto& [idx, x] : f) out.set(idx, op.apply(x));
  return out;
}

/// Sum over the combination of |x|^2 in the given norm.
inline double coefficient_energy(const HaarCombination& f, const NormedSpaceSpec& space) {
  double acc = 0.0;
  for (const auto& [idx, x] : f) {
    const double n = space.norm_of(x);
    acc += n * n;
  }
  return acc;
}

}  // namespace haarlab
