#include "ktsim/ground_truth.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <string>

#include "ktsim/error.hpp"

namespace ktsim {

namespace {

void check_p_stay(double p_stay) {
  if (!(p_stay > 0.5 && p_stay < 1.0)) {
    throw ConfigError("p_stay must lie in (0.5, 1), got " + std::to_string(p_stay), "p_stay");
  }
}

}  // namespace

GroundTruth::GroundTruth(std::vector<std::optional<VariableId>> parent, double p_stay)
    : parent_(std::move(parent)), p_stay_(p_stay) {
  check_p_stay(p_stay_);
  const std::size_t m = parent_.size();
  if (m == 0) throw ConfigError("ground truth needs at least one variable");

  constexpr std::size_t kUnset = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> root(m, kUnset);
  depth_.assign(m, kUnset);
  for (std::size_t v = 0; v < m; ++v) {
    if (parent_[v] && parent_[v]->index >= m) {
      throw ConfigError("parent of variable " + std::to_string(v) + " is out of range");
    }
    if (parent_[v] && parent_[v]->index == v) {
      throw ConfigError("variable " + std::to_string(v) + " is its own parent");
    }
  }
  for (std::size_t v = 0; v < m; ++v) {
    // Walk up until a resolved node or a root; more than m steps means a cycle.
    std::vector<std::size_t> chain;
    std::size_t cur = v;
    while (depth_[cur] == kUnset && parent_[cur]) {
      chain.push_back(cur);
      if (chain.size() > m) throw ConfigError("parent links contain a cycle");
      cur = parent_[cur]->index;
    }
    if (depth_[cur] == kUnset) {
      depth_[cur] = 0;
      root[cur] = cur;
    }
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      depth_[*it] = depth_[cur] + 1;
      root[*it] = root[cur];
      cur = *it;
    }
  }

  tree_.assign(m, kUnset);
  std::vector<std::size_t> tree_of_root(m, kUnset);
  for (std::size_t v = 0; v < m; ++v) {
    std::size_t& t = tree_of_root[root[v]];
    if (t == kUnset) t = tree_count_++;
    tree_[v] = t;
  }

  order_.resize(m);
  for (std::uint32_t v = 0; v < m; ++v) order_[v] = VariableId{v};
  std::stable_sort(order_.begin(), order_.end(),
                   [this](VariableId a, VariableId b) { return depth_[a.index] < depth_[b.index]; });
}

std::vector<VariableId> GroundTruth::path(VariableId a, VariableId b) const {
  std::vector<VariableId> up_a{a};
  std::vector<VariableId> up_b{b};
  while (up_a.back() != up_b.back()) {
    const VariableId x = up_a.back();
    const VariableId y = up_b.back();
    if (depth_[x.index] >= depth_[y.index]) {
      up_a.push_back(*parent_[x.index]);
    } else {
      up_b.push_back(*parent_[y.index]);
    }
  }
  up_b.pop_back();
  up_a.insert(up_a.end(), up_b.rbegin(), up_b.rend());
  return up_a;
}

std::optional<std::size_t> GroundTruth::distance(VariableId a, VariableId b) const {
  if (!same_tree(a, b)) return std::nullopt;
  return path(a, b).size() - 1;
}

bool GroundTruth::path_crosses(VariableId a, VariableId b, VariableId via) const {
  if (!same_tree(a, b) || !same_tree(a, via) || via == a || via == b) return false;
  const auto p = path(a, b);
  return std::find(p.begin() + 1, p.end() - 1, via) != p.end() - 1;
}

namespace {

double log_sum_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

double log_choose(std::size_t n, std::size_t k) {
  return std::lgamma(static_cast<double>(n) + 1) - std::lgamma(static_cast<double>(k) + 1) -
         std::lgamma(static_cast<double>(n - k) + 1);
}

// log of s^(s-2), the number of labeled trees on s vertices.
double log_tree_count(std::size_t s) {
  return s <= 2 ? 0.0 : static_cast<double>(s - 2) * std::log(static_cast<double>(s));
}

// log_forests[n][k] = log #labeled forests on n vertices with exactly k trees.
// Recurses on the size s of the tree containing the smallest vertex.
std::vector<std::vector<double>> forest_count_table(std::size_t m, std::size_t k_max) {
  const double neg_inf = -std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> t(m + 1, std::vector<double>(k_max + 1, neg_inf));
  t[0][0] = 0.0;
  for (std::size_t n = 1; n <= m; ++n) {
    for (std::size_t k = 1; k <= std::min(n, k_max); ++k) {
      double acc = neg_inf;
      for (std::size_t s = 1; s + (k - 1) <= n; ++s) {
        const double rest = t[n - s][k - 1];
        if (rest == neg_inf) continue;
        acc = log_sum_exp(acc, log_choose(n - 1, s - 1) + log_tree_count(s) + rest);
      }
      t[n][k] = acc;
    }
  }
  return t;
}

// Uniform labeled tree on `nodes` via a random Pruefer sequence. Returns edges.
std::vector<std::pair<std::size_t, std::size_t>> random_tree(const std::vector<std::size_t>& nodes,
                                                             SeedStream& rng) {
  const std::size_t s = nodes.size();
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  if (s < 2) return edges;
  if (s == 2) {
    edges.emplace_back(nodes[0], nodes[1]);
    return edges;
  }
  std::vector<std::size_t> code(s - 2);
  for (auto& c : code) c = uniform_index(rng, s);
  std::vector<std::size_t> degree(s, 1);
  for (std::size_t c : code) ++degree[c];
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> leaves;
  for (std::size_t i = 0; i < s; ++i) {
    if (degree[i] == 1) leaves.push(i);
  }
  for (std::size_t c : code) {
    const std::size_t leaf = leaves.top();
    leaves.pop();
    edges.emplace_back(nodes[leaf], nodes[c]);
    if (--degree[c] == 1) leaves.push(c);
  }
  const std::size_t a = leaves.top();
  leaves.pop();
  edges.emplace_back(nodes[a], nodes[leaves.top()]);
  return edges;
}

}  // namespace

GroundTruth build_ground_truth(std::size_t m, std::size_t tree_count, double p_stay, SeedStream& rng) {
  if (m == 0) throw ConfigError("variable count must be positive", "ground_truth.variables");
  if (tree_count < 1 || tree_count > m) {
    throw ConfigError("tree count must lie in [1, " + std::to_string(m) + "], got " + std::to_string(tree_count),
                      "ground_truth.trees");
  }
  check_p_stay(p_stay);

  const auto log_forests = forest_count_table(m, tree_count);
  std::vector<std::size_t> remaining(m);
  std::iota(remaining.begin(), remaining.end(), std::size_t{0});
  std::vector<std::vector<std::size_t>> adjacency(m);

  for (std::size_t k = tree_count; k >= 1; --k) {
    const std::size_t n = remaining.size();
    // Size of the tree holding the smallest remaining vertex.
    std::size_t size = n - (k - 1);
    if (k > 1) {
      const double total = log_forests[n][k];
      double u = uniform_real(rng, 0.0, 1.0);
      for (std::size_t s = 1; s + (k - 1) <= n; ++s) {
        const double rest = log_forests[n - s][k - 1];
        if (rest == -std::numeric_limits<double>::infinity()) continue;
        u -= std::exp(log_choose(n - 1, s - 1) + log_tree_count(s) + rest - total);
        if (u <= 0.0) {
          size = s;
          break;
        }
      }
    }
    std::vector<std::size_t> others(remaining.begin() + 1, remaining.end());
    std::shuffle(others.begin(), others.end(), rng);
    std::vector<std::size_t> members{remaining.front()};
    members.insert(members.end(), others.begin(), others.begin() + static_cast<std::ptrdiff_t>(size - 1));
    std::sort(members.begin(), members.end());
    for (auto [a, b] : random_tree(members, rng)) {
      adjacency[a].push_back(b);
      adjacency[b].push_back(a);
    }
    std::vector<std::size_t> rest;
    std::set_difference(remaining.begin(), remaining.end(), members.begin(), members.end(),
                        std::back_inserter(rest));
    remaining = std::move(rest);
  }

  // Orient each tree away from its smallest vertex.
  std::vector<std::optional<VariableId>> parent(m);
  std::vector<bool> seen(m, false);
  for (std::size_t r = 0; r < m; ++r) {
    if (seen[r]) continue;
    seen[r] = true;
    std::vector<std::size_t> stack{r};
    while (!stack.empty()) {
      const std::size_t x = stack.back();
      stack.pop_back();
      for (std::size_t y : adjacency[x]) {
        if (seen[y]) continue;
        seen[y] = true;
        parent[y] = VariableId{static_cast<std::uint32_t>(x)};
        stack.push_back(y);
      }
    }
  }
  return GroundTruth(std::move(parent), p_stay);
}

GroundTruth make_chain(std::size_t m, double p_stay) {
  std::vector<std::optional<VariableId>> parent(m);
  for (std::uint32_t v = 1; v < m; ++v) parent[v] = VariableId{v - 1};
  return GroundTruth(std::move(parent), p_stay);
}

KnowledgeBase true_knowledge(const GroundTruth& gt) {
  KnowledgeBase k;
  for (const Pair& p : all_pairs(gt.variable_count())) {
    k.insert(WeightedClaim{true_claim(p, gt), 1.0});
  }
  return k;
}

Membership membership(const Claim& c, const GroundTruth& gt) {
  const std::size_t m = gt.variable_count();
  if (c.pair.v().index >= m) {
    throw ConfigError("claim references variable " + std::to_string(c.pair.v().index) + " outside [0, " +
                      std::to_string(m) + ")");
  }
  return true_claim(c.pair, gt).polarity == c.polarity ? Membership::InK : Membership::InKc;
}

}  // namespace ktsim
