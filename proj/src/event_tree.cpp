#include "iptree/event_tree.hpp"

#include <algorithm>
#include <unordered_set>

namespace iptree {

EventTree EventTree::build(const Spec& spec) {
  std::unordered_map<std::string, const std::vector<std::string>*> adjacency;
  adjacency.reserve(spec.edges.size());
  for (const auto& [parent, kids] : spec.edges) {
    if (!adjacency.emplace(parent, &kids).second)
      fail(Err::DuplicateId, "situation '" + parent + "' listed twice");
    if (kids.size() == 1)
      fail(Err::SingletonMoveSpace,
           "situation '" + parent + "' has a single child; move spaces need at least two moves");
  }

  EventTree tree;
  // Iterative preorder DFS; `path` carries the labels on the current root
  // path for cycle detection.
  struct Frame {
    std::string label;
    Node parent;
  };
  std::vector<Frame> stack{{spec.root, npos}};
  std::unordered_set<std::string> on_path_guard;  // labels seen anywhere
  std::vector<std::string> path;                  // labels on the current root path
  // Preorder with explicit path maintenance: store, per stack entry, the
  // depth at which it will be placed so the path can be unwound.
  std::vector<int> stack_depth{0};

  while (!stack.empty()) {
    Frame frame = std::move(stack.back());
    stack.pop_back();
    int d = stack_depth.back();
    stack_depth.pop_back();
    path.resize(d);

    if (std::find(path.begin(), path.end(), frame.label) != path.end())
      fail(Err::Cycle, "situation '" + frame.label + "' is its own ancestor");
    if (!on_path_guard.insert(frame.label).second)
      fail(Err::DuplicateId, "situation '" + frame.label + "' reached twice");
    path.push_back(frame.label);

    Node me = static_cast<Node>(tree.labels_.size());
    tree.labels_.push_back(frame.label);
    tree.parent_.push_back(frame.parent);
    tree.children_.emplace_back();
    tree.depth_.push_back(d);
    tree.index_.emplace(frame.label, me);
    if (frame.parent != npos) tree.children_[frame.parent].push_back(me);

    auto it = adjacency.find(frame.label);
    if (it != adjacency.end() && !it->second->empty()) {
      // Children pushed in reverse so preorder visits them left to right.
      for (auto rit = it->second->rbegin(); rit != it->second->rend(); ++rit) {
        stack.push_back({*rit, me});
        stack_depth.push_back(d + 1);
      }
    }
  }

  for (const auto& [parent, kids] : spec.edges) {
    (void)kids;
    if (!tree.index_.count(parent))
      fail(Err::Disconnected, "situation '" + parent + "' is not reachable from the root");
  }

  const int n = tree.node_count();
  tree.subtree_size_.assign(n, 1);
  tree.term_begin_.assign(n, 0);
  tree.term_count_.assign(n, 0);
  tree.depth_bound_ = 0;
  for (Node t = static_cast<Node>(n - 1); t >= 0; --t) {
    tree.depth_bound_ = std::max(tree.depth_bound_, tree.depth_[t]);
    for (Node c : tree.children_[t]) tree.subtree_size_[t] += tree.subtree_size_[c];
    if (tree.children_[t].empty()) tree.term_count_[t] = 1;
  }
  // Terminals in preorder; term_begin_ is each node's offset into that list.
  int seen = 0;
  for (Node t = 0; t < n; ++t) {
    tree.term_begin_[t] = seen;
    if (tree.children_[t].empty()) {
      tree.terminals_.push_back(t);
      ++seen;
    }
  }
  for (Node t = static_cast<Node>(n - 1); t >= 0; --t) {
    for (Node c : tree.children_[t]) tree.term_count_[t] += tree.term_count_[c];
    if (!tree.children_[t].empty())
      tree.term_begin_[t] = tree.term_begin_[tree.children_[t].front()];
  }
  return tree;
}

EventTree::Node EventTree::index_of(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end())
    fail(Err::UnknownId, "unknown situation '" + std::string(label) + "'");
  return it->second;
}

bool EventTree::has_label(std::string_view label) const {
  return index_.count(std::string(label)) != 0;
}

int EventTree::move_index(Node ancestor, Node descendant) const {
  if (!strictly_precedes(ancestor, descendant))
    fail(Err::NotADescendant, "'" + label(descendant) + "' does not strictly follow '" +
                                  label(ancestor) + "'");
  const auto& kids = children_[ancestor];
  // Children are preorder-sorted; find the child interval holding descendant.
  for (std::size_t i = 0; i < kids.size(); ++i)
    if (precedes(kids[i], descendant)) return static_cast<int>(i);
  fail(Err::NotADescendant, "internal: no child interval holds the descendant");
}

std::vector<std::string> EventTree::child_labels(Node t) const {
  std::vector<std::string> out;
  out.reserve(children(t).size());
  for (Node c : children(t)) out.push_back(label(c));
  return out;
}

Cut validate_cut(const EventTree& tree, EventTree::Node base,
                 std::vector<EventTree::Node> members) {
  if (members.empty()) fail(Err::NotAPartition, "a cut needs at least one member");
  std::sort(members.begin(), members.end());
  for (std::size_t i = 0; i + 1 < members.size(); ++i)
    if (members[i] == members[i + 1])
      fail(Err::NotAPartition, "cut member '" + tree.label(members[i]) + "' repeated");

  // Partition of the paths through base <=> the members' terminal intervals
  // tile the terminal interval of base exactly.
  int expected = tree.terminal_offset(base);
  for (auto m : members) {
    if (!tree.precedes(base, m))
      fail(Err::NotAPartition,
           "cut member '" + tree.label(m) + "' does not follow '" + tree.label(base) + "'");
    if (tree.terminal_offset(m) != expected)
      fail(Err::NotAPartition, "paths through '" + tree.label(base) +
                                   "' are not covered exactly once near '" +
                                   tree.label(m) + "'");
    expected += static_cast<int>(tree.terminals_through(m).size());
  }
  if (expected !=
      tree.terminal_offset(base) + static_cast<int>(tree.terminals_through(base).size()))
    fail(Err::NotAPartition,
         "some path through '" + tree.label(base) + "' misses every cut member");
  return Cut{base, std::move(members)};
}

Cut validate_cut(const EventTree& tree, std::string_view base,
                 const std::vector<std::string>& members) {
  std::vector<EventTree::Node> ids;
  ids.reserve(members.size());
  for (const auto& m : members) ids.push_back(tree.index_of(m));
  return validate_cut(tree, tree.index_of(base), std::move(ids));
}

Cut children_cut(const EventTree& tree, EventTree::Node t) {
  if (tree.is_terminal(t))
    fail(Err::TerminalSituation, "terminal situation '" + tree.label(t) + "' has no children cut");
  return Cut{t, tree.children(t)};
}

EventTree::Node cut_member_through(const EventTree& tree, const Cut& cut,
                                   EventTree::Node leaf) {
  // Members are preorder-sorted with consecutive terminal intervals.
  auto it = std::upper_bound(cut.members.begin(), cut.members.end(), leaf);
  if (it != cut.members.begin()) {
    auto m = *(it - 1);
    if (tree.precedes(m, leaf)) return m;
  }
  fail(Err::NotAPartition, "'" + tree.label(leaf) + "' passes through no member of the cut");
}

bool strictly_before_cut(const EventTree& tree, const Cut& cut, EventTree::Node s) {
  // Some member strictly inside the subtree interval of s?
  auto lo = std::upper_bound(cut.members.begin(), cut.members.end(), s);
  return lo != cut.members.end() && *lo < s + tree.subtree_size(s);
}

}  // namespace iptree
