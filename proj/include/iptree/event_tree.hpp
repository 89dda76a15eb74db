#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "iptree/errors.hpp"

namespace iptree {

// A finite rooted event tree of situations. Nodes are stored in depth-first
// preorder, so every subtree occupies a contiguous index range and the
// precedence relation is an interval check. Immutable after build; every
// query is const and safe to share across threads.
class EventTree {
 public:
  using Node = std::int32_t;
  static constexpr Node npos = -1;

  // Parent -> ordered children adjacency, by label. Labels absent from
  // `edges` are terminal. A single-node tree is a bare root.
  struct Spec {
    std::string root;
    std::vector<std::pair<std::string, std::vector<std::string>>> edges;
  };

  static EventTree build(const Spec& spec);

  Node root() const { return 0; }
  int node_count() const { return static_cast<int>(labels_.size()); }
  int terminal_count() const { return static_cast<int>(terminals_.size()); }

  // Length of the longest root path; fixed once at construction.
  int depth_bound() const { return depth_bound_; }

  bool is_terminal(Node t) const { return children_[check(t)].empty(); }
  const std::vector<Node>& children(Node t) const { return children_[check(t)]; }
  Node parent(Node t) const { return parent_[check(t)]; }
  int depth(Node t) const { return depth_[check(t)]; }
  int subtree_size(Node t) const { return subtree_size_[check(t)]; }
  const std::string& label(Node t) const { return labels_[check(t)]; }

  Node index_of(std::string_view label) const;
  bool has_label(std::string_view label) const;

  // All terminal situations, in preorder.
  std::span<const Node> terminals() const { return terminals_; }

  // The paths through t: terminal situations of the subtree rooted at t.
  // For terminal t this is {t}.
  std::span<const Node> terminals_through(Node t) const {
    check(t);
    return std::span<const Node>(terminals_).subspan(term_begin_[t], term_count_[t]);
  }
  int terminal_offset(Node t) const { return term_begin_[check(t)]; }

  // s precedes t: s lies on the root path of t (reflexive).
  bool precedes(Node s, Node t) const {
    check(s);
    check(t);
    return s <= t && t < s + subtree_size_[s];
  }
  bool strictly_precedes(Node s, Node t) const { return s != t && precedes(s, t); }

  // Number of arcs from t down to its descendant s.
  int distance(Node t, Node s) const {
    if (!precedes(t, s))
      fail(Err::NotADescendant,
           "'" + label(s) + "' does not follow '" + label(t) + "'");
    return depth_[s] - depth_[t];
  }

  // The child of `ancestor` on the path toward `descendant`; returns the
  // position within children(ancestor).
  int move_index(Node ancestor, Node descendant) const;
  Node child_toward(Node ancestor, Node descendant) const {
    return children_[ancestor][move_index(ancestor, descendant)];
  }

  // Ordered labels of the children of t (the move space at t).
  std::vector<std::string> child_labels(Node t) const;

 private:
  Node check(Node t) const {
    if (t < 0 || t >= static_cast<Node>(labels_.size()))
      fail(Err::UnknownId, "situation index out of range");
    return t;
  }

  std::vector<std::string> labels_;
  std::vector<Node> parent_;
  std::vector<std::vector<Node>> children_;
  std::vector<int> depth_;
  std::vector<int> subtree_size_;
  std::vector<Node> terminals_;
  std::vector<int> term_begin_;
  std::vector<int> term_count_;
  std::unordered_map<std::string, Node> index_;
  int depth_bound_ = 0;
};

// A cut of `base`: an antichain of situations partitioning the paths
// through base. Members are kept in preorder.
struct Cut {
  EventTree::Node base = 0;
  std::vector<EventTree::Node> members;

  bool contains(EventTree::Node t) const {
    for (auto m : members)
      if (m == t) return true;
    return false;
  }
};

// Checks the partition property and returns the cut; members are reordered
// into preorder. Throws NotAPartition when a path through base misses all
// members or meets two.
Cut validate_cut(const EventTree& tree, EventTree::Node base,
                 std::vector<EventTree::Node> members);
Cut validate_cut(const EventTree& tree, std::string_view base,
                 const std::vector<std::string>& members);

// The children cut C(t). Throws TerminalSituation for terminal t.
Cut children_cut(const EventTree& tree, EventTree::Node t);

// The member of U whose subtree contains the terminal `leaf`.
EventTree::Node cut_member_through(const EventTree& tree, const Cut& cut,
                                   EventTree::Node leaf);

// True when s strictly precedes some member of the cut.
bool strictly_before_cut(const EventTree& tree, const Cut& cut, EventTree::Node s);

}  // namespace iptree
