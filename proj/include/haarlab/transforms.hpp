#pragma once

// The swap of the two middle quarters of a Haar support, its action on Haar
// functions, index sets and coefficient families, and the compression of an
// index set into a band of levels.

#include <array>
#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "haarlab/combination.hpp"
#include "haarlab/combinatorics.hpp"
#include "haarlab/root_two.hpp"

namespace haarlab {

/// The swap anchored at tree node (level, pos); its fork is
/// {(h,i), (h+1,2i-1), (h+1,2i)}.
struct ForkTransform {
  HaarIndex root;

  static ForkTransform at(int level, std::int64_t pos) {
    const HaarIndex idx{level, pos};
    require_valid(idx);
    // The successors must be representable too.
    require_level(level + 1, "ForkTransform");
    return {idx};
  }

  int level() const { return root.level; }
  std::int64_t pos() const { return root.pos; }
  HaarIndex left_successor() const { return left_child(root); }
  HaarIndex right_successor() const { return right_child(root); }

  /// Level-(h+1) intervals exchanged by the swap: quarters 4i-2 and 4i-1.
  DyadicInterval moves_right() const { return {root.level + 1, 4 * root.pos - 2}; }
  DyadicInterval moves_left() const { return {root.level + 1, 4 * root.pos - 1}; }

  friend bool operator==(const ForkTransform&, const ForkTransform&) = default;
};

inline DyadicRational phi_apply(const ForkTransform& fork, const DyadicRational& t) {
  const int k = fork.level() + 1;
  if (fork.moves_right().contains(t)) return shifted(t, +1, k);
  if (fork.moves_left().contains(t)) return shifted(t, -1, k);
  return t;
}

// Fates of a tree index under a fork transform.
struct ForkRoot {
  friend bool operator==(const ForkRoot&, const ForkRoot&) = default;
};
struct ForkSuccessor {
  friend bool operator==(const ForkSuccessor&, const ForkSuccessor&) = default;
};
struct ShiftRight {
  std::int64_t offset;
  friend bool operator==(const ShiftRight&, const ShiftRight&) = default;
};
struct ShiftLeft {
  std::int64_t offset;
  friend bool operator==(const ShiftLeft&, const ShiftLeft&) = default;
};
struct Invariant {
  friend bool operator==(const Invariant&, const Invariant&) = default;
};

using IndexFate = std::variant<ForkRoot, ForkSuccessor, ShiftRight, ShiftLeft, Invariant>;

inline IndexFate classify_index(const ForkTransform& fork, const HaarIndex& idx) {
  require_valid(idx);
  if (idx == fork.root) return ForkRoot{};
  if (idx == fork.left_successor() || idx == fork.right_successor()) return ForkSuccessor{};
  if (idx.level >= fork.level() + 2) {
    const DyadicInterval supp = haar_support(idx);
    const std::int64_t offset = pow2(idx.level - fork.level() - 2);
    if (fork.moves_right().contains(supp)) return ShiftRight{offset};
    if (fork.moves_left().contains(supp)) return ShiftLeft{offset};
  }
  return Invariant{};
}

inline bool is_fork_member(const IndexFate& fate) {
  return std::holds_alternative<ForkRoot>(fate) || std::holds_alternative<ForkSuccessor>(fate);
}

/// The index whose Haar function equals chi_idx composed with the swap.
/// Fork members have no such index; use rewrite_combination for them.
inline HaarIndex phi_index_image(const ForkTransform& fork, const HaarIndex& idx) {
  const IndexFate fate = classify_index(fork, idx);
  if (const auto* r = std::get_if<ShiftRight>(&fate)) return {idx.level, idx.pos + r->offset};
  if (const auto* l = std::get_if<ShiftLeft>(&fate)) return {idx.level, idx.pos - l->offset};
  if (std::holds_alternative<Invariant>(fate)) return idx;
  throw DomainError("phi_index_image: " + idx.str() + " belongs to the fork at " + fork.root.str());
}

/// Rows: chi_root, chi_left, chi_right composed with the swap, written over
/// the basis (chi_root, chi_left, chi_right).
using ForkRelationTable = std::array<std::array<RootTwoDyadic, 3>, 3>;

inline ForkRelationTable fork_identity_table(const ForkTransform& /*fork*/) {
  const RootTwoDyadic z{};
  const RootTwoDyadic h = RootTwoDyadic::half();
  const RootTwoDyadic s = RootTwoDyadic::inv_root_two();
  return {{{z, s, s}, {s, h, -h}, {s, -h, h}}};
}

/// Checks all three relations of `table` pointwise at every grid point of
/// level h + 3, exactly.
inline bool fork_relations_hold(const ForkTransform& fork, const ForkRelationTable& table) {
  const std::array<HaarIndex, 3> basis{fork.root, fork.left_successor(), fork.right_successor()};
  for (const auto& t : dyadic_grid(fork.level() + 3)) {
    const DyadicRational moved = phi_apply(fork, t);
    for (std::size_t row = 0; row < 3; ++row) {
      const RootTwoDyadic lhs = RootTwoDyadic::from(haar_eval(basis[row], moved));
      RootTwoDyadic rhs{};
      for (std::size_t col = 0; col < 3; ++col) rhs += table[row][col] * RootTwoDyadic::from(haar_eval(basis[col], t));
      if (!(lhs == rhs)) return false;
    }
  }
  return true;
}

inline bool is_admissible(const IndexSet& set, const HaarIndex& idx) {
  return set.contains(idx) && !set.contains(left_child(idx)) && !set.contains(right_child(idx));
}

inline void require_admissible(const IndexSet& set, const ForkTransform& fork, const char* op) {
  if (!is_admissible(set, fork.root)) {
    throw PreconditionError(std::string(op) + ": " + fork.root.str() + " is not admissible in " + set.str());
  }
}

/// Replace the admissible root by its two successors and move every other
/// member to its image index.
inline IndexSet phi_transform_set(const IndexSet& set, const ForkTransform& fork) {
  require_admissible(set, fork, "phi_transform_set");
  IndexSet out;
  out.insert(fork.left_successor());
  out.insert(fork.right_successor());
  for (const auto& idx : set)
    if (idx != fork.root) out.insert(phi_index_image(fork, idx));
  return out;
}

/// Coefficients of f composed with the swap, on the transformed frame. The
/// frame is f.indices() (explicit zero coefficients count as members).
inline HaarCombination rewrite_combination(const HaarCombination& f, const ForkTransform& fork) {
  require_admissible(f.indices(), fork, "rewrite_combination");
  HaarCombination out(f.dim());
  Vector split = f.at(fork.root);
  for (double& v : split) v /= std::sqrt(2.0);
  out.set(fork.left_successor(), split);
  out.set(fork.right_successor(), split);
  for (const auto& [idx, x] : f)
    if (idx != fork.root) out.set(phi_index_image(fork, idx), x);
  return out;
}

struct CompressionTrace {
  int m = 1;
  IndexSet initial;
  std::vector<ForkTransform> steps;
  IndexSet final_set;
};

/// Applies the swap at the first admissible index (lowest level, then lowest
/// position) with level below m + n until none is left; n is the local
/// height and m the least integer >= 1 with F inside D_1^(m+n).
inline CompressionTrace compress(const IndexSet& set) {
  if (set.empty()) throw DomainError("compress: empty index set");
  const int height = local_height(set);
  CompressionTrace trace;
  trace.m = std::max(1, set.max_level() - height);
  trace.initial = set;
  const int top = trace.m + height;
  require_level(top, "compress");

  IndexSet current = set;
  for (;;) {
    std::optional<HaarIndex> site;
    for (const auto& idx : current) {
      if (idx.level >= top) break;
      if (is_admissible(current, idx)) {
        site = idx;
        break;
      }
    }
    if (!site) break;
    const ForkTransform fork{*site};
    current = phi_transform_set(current, fork);
    trace.steps.push_back(fork);
  }
  trace.final_set = std::move(current);
  return trace;
}

}  // namespace haarlab
