#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "ktsim/knowledge.hpp"
#include "ktsim/random.hpp"

namespace ktsim {

enum class Membership { InK, InKc };

// Forest-structured binary generative model. Each tree root is a fair coin;
// every child copies its parent's bit with probability p_stay, otherwise flips it.
// Two variables are dependent exactly when they share a tree.
class GroundTruth {
 public:
  // Validates that `parent` is acyclic, in range, and that 0.5 < p_stay < 1.
  GroundTruth(std::vector<std::optional<VariableId>> parent, double p_stay);

  std::size_t variable_count() const noexcept { return parent_.size(); }
  double p_stay() const noexcept { return p_stay_; }
  const std::vector<std::optional<VariableId>>& parents() const noexcept { return parent_; }
  std::optional<VariableId> parent(VariableId v) const { return parent_.at(v.index); }

  std::size_t tree_count() const noexcept { return tree_count_; }
  std::size_t edge_count() const noexcept { return parent_.size() - tree_count_; }

  // Index of the tree (0-based, ordered by smallest member) containing v.
  std::size_t tree_of(VariableId v) const { return tree_.at(v.index); }
  bool same_tree(VariableId a, VariableId b) const { return tree_of(a) == tree_of(b); }

  // Path length between a and b in the forest; nullopt across trees.
  std::optional<std::size_t> distance(VariableId a, VariableId b) const;

  // True when the tree path between a and b passes through `via` as an interior node.
  bool path_crosses(VariableId a, VariableId b, VariableId via) const;

  // Parents precede children.
  const std::vector<VariableId>& topological_order() const noexcept { return order_; }

 private:
  std::vector<VariableId> path(VariableId a, VariableId b) const;

  std::vector<std::optional<VariableId>> parent_;
  double p_stay_;
  std::vector<std::size_t> tree_;
  std::vector<std::size_t> depth_;
  std::vector<VariableId> order_;
  std::size_t tree_count_ = 0;
};

// A uniformly random labeled forest with exactly `tree_count` trees over `m`
// variables. Each tree is rooted at its smallest variable.
GroundTruth build_ground_truth(std::size_t m, std::size_t tree_count, double p_stay, SeedStream& rng);

// Chain 0 - 1 - ... - (m-1) as a single tree.
GroundTruth make_chain(std::size_t m, double p_stay);

// The set K: one claim per pair, Dependent iff the pair shares a tree.
KnowledgeBase true_knowledge(const GroundTruth& gt);

// Ground-truth oracle. Only the simulator harness (metrics, validator) is
// meant to consult this.
Membership membership(const Claim& c, const GroundTruth& gt);

inline Claim true_claim(const Pair& p, const GroundTruth& gt) {
  return Claim{p, gt.same_tree(p.u(), p.v()) ? Polarity::Dependent : Polarity::Independent};
}

}  // namespace ktsim
