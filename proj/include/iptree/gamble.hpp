#pragma once

#include <algorithm>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "iptree/errors.hpp"
#include "iptree/event_tree.hpp"
#include "iptree/numeric.hpp"

namespace iptree {

// An immutable ordered label set: the terminals of a tree, the members of a
// cut, a move space, or a state space.
class Carrier {
 public:
  explicit Carrier(std::vector<std::string> labels) : labels_(std::move(labels)) {
    index_.reserve(labels_.size());
    for (std::size_t i = 0; i < labels_.size(); ++i)
      if (!index_.emplace(labels_[i], i).second)
        fail(Err::DuplicateId, "carrier label '" + labels_[i] + "' repeated");
  }

  std::size_t size() const { return labels_.size(); }
  const std::string& label(std::size_t i) const { return labels_[i]; }
  const std::vector<std::string>& labels() const { return labels_; }

  bool has(const std::string& label) const { return index_.count(label) != 0; }
  std::size_t index_of(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end())
      fail(Err::CarrierMismatch, "label '" + label + "' not in carrier");
    return it->second;
  }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::size_t> index_;
};

using CarrierPtr = std::shared_ptr<const Carrier>;

inline CarrierPtr make_carrier(std::vector<std::string> labels) {
  return std::make_shared<const Carrier>(std::move(labels));
}

inline bool same_carrier(const CarrierPtr& a, const CarrierPtr& b) {
  return a == b || a->labels() == b->labels();
}

// Carrier of the paths through t.
inline CarrierPtr terminal_carrier(const EventTree& tree, EventTree::Node t) {
  std::vector<std::string> labels;
  auto terms = tree.terminals_through(t);
  labels.reserve(terms.size());
  for (auto leaf : terms) labels.push_back(tree.label(leaf));
  return make_carrier(std::move(labels));
}

inline CarrierPtr cut_carrier(const EventTree& tree, const Cut& cut) {
  std::vector<std::string> labels;
  labels.reserve(cut.members.size());
  for (auto m : cut.members) labels.push_back(tree.label(m));
  return make_carrier(std::move(labels));
}

// A real-valued map on a finite carrier.
template <class T>
class Gamble {
 public:
  Gamble(CarrierPtr carrier, std::vector<T> values)
      : carrier_(std::move(carrier)), values_(std::move(values)) {
    if (values_.size() != carrier_->size())
      fail(Err::CarrierMismatch, "gamble has " + std::to_string(values_.size()) +
                                     " values for a carrier of size " +
                                     std::to_string(carrier_->size()));
    for (const T& v : values_)
      if (!num<T>::finite(v)) fail(Err::NonFiniteValue, "gamble value is not finite");
  }

  static Gamble constant(CarrierPtr carrier, T value) {
    std::vector<T> v(carrier->size(), value);
    return Gamble(std::move(carrier), std::move(v));
  }

  static Gamble indicator(CarrierPtr carrier, const std::vector<std::string>& event) {
    std::vector<T> v(carrier->size(), T(0));
    for (const auto& label : event) v[carrier->index_of(label)] = T(1);
    return Gamble(std::move(carrier), std::move(v));
  }

  const CarrierPtr& carrier() const { return carrier_; }
  std::size_t size() const { return values_.size(); }
  const std::vector<T>& values() const { return values_; }
  const T& operator[](std::size_t i) const { return values_[i]; }
  const T& at(const std::string& label) const { return values_[carrier_->index_of(label)]; }

  T min_value() const {
    T m = values_[0];
    for (const T& v : values_)
      if (v < m) m = v;
    return m;
  }
  T max_value() const {
    T m = values_[0];
    for (const T& v : values_)
      if (v > m) m = v;
    return m;
  }

  friend Gamble operator+(const Gamble& a, const Gamble& b) {
    return zip(a, b, [](const T& x, const T& y) { return x + y; });
  }
  friend Gamble operator-(const Gamble& a, const Gamble& b) {
    return zip(a, b, [](const T& x, const T& y) { return x - y; });
  }
  friend Gamble operator-(const Gamble& a) {
    return a.map([](const T& x) { return -x; });
  }
  friend Gamble operator*(const T& scale, const Gamble& a) {
    return a.map([&](const T& x) { return scale * x; });
  }
  friend Gamble operator+(const Gamble& a, const T& shift) {
    return a.map([&](const T& x) { return x + shift; });
  }
  friend Gamble operator-(const Gamble& a, const T& shift) {
    return a.map([&](const T& x) { return x - shift; });
  }

  template <class F>
  Gamble map(F&& f) const {
    std::vector<T> v;
    v.reserve(values_.size());
    for (const T& x : values_) v.push_back(f(x));
    return Gamble(carrier_, std::move(v));
  }

 private:
  template <class F>
  static Gamble zip(const Gamble& a, const Gamble& b, F&& f) {
    if (!same_carrier(a.carrier_, b.carrier_))
      fail(Err::CarrierMismatch, "gambles live on different carriers");
    std::vector<T> v;
    v.reserve(a.values_.size());
    for (std::size_t i = 0; i < a.values_.size(); ++i) v.push_back(f(a.values_[i], b.values_[i]));
    return Gamble(a.carrier_, std::move(v));
  }

  CarrierPtr carrier_;
  std::vector<T> values_;
};

template <class T>
Gamble<T> pointwise_min(const Gamble<T>& a, const Gamble<T>& b) {
  if (!same_carrier(a.carrier(), b.carrier()))
    fail(Err::CarrierMismatch, "gambles live on different carriers");
  std::vector<T> v;
  v.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) v.push_back(a[i] < b[i] ? a[i] : b[i]);
  return Gamble<T>(a.carrier(), std::move(v));
}

// Values of a terminal gamble laid out by tree node index; situations other
// than the terminals through `t` are left at zero. The gamble's carrier must
// cover every terminal through t (it may cover more, e.g. all of Omega).
template <class T>
std::vector<T> values_by_node(const EventTree& tree, const Gamble<T>& f, EventTree::Node t) {
  std::vector<T> out(tree.node_count(), T(0));
  for (auto leaf : tree.terminals_through(t)) out[leaf] = f.at(tree.label(leaf));
  return out;
}

// A t-process: one value per situation following `base`.
template <class T>
struct TreeProcess {
  const EventTree* tree = nullptr;
  EventTree::Node base = 0;
  std::vector<T> values;  // indexed by node; defined on the subtree of base

  const T& at(EventTree::Node s) const {
    if (!tree->precedes(base, s))
      fail(Err::UnknownId, "process undefined at '" + tree->label(s) + "'");
    return values[s];
  }
};

// Restriction of a process to the terminals through t (the variable F_Omega).
template <class T>
Gamble<T> restrict_to_terminals(const TreeProcess<T>& process, EventTree::Node t) {
  const EventTree& tree = *process.tree;
  std::vector<T> v;
  auto terms = tree.terminals_through(t);
  v.reserve(terms.size());
  for (auto leaf : terms) v.push_back(process.at(leaf));
  return Gamble<T>(terminal_carrier(tree, t), std::move(v));
}

// The U-measurability test: f constant on the paths through each member.
template <class T>
bool is_cut_measurable(const EventTree& tree, const Gamble<T>& f, const Cut& cut,
                       T tol = num<T>::measurability_tol()) {
  for (auto m : cut.members) {
    auto terms = tree.terminals_through(m);
    const T& first = f.at(tree.label(terms[0]));
    for (auto leaf : terms)
      if (!within(f.at(tree.label(leaf)), first, tol)) return false;
  }
  return true;
}

// Reads a U-measurable gamble off as a gamble on the cut itself.
template <class T>
Gamble<T> project_to_cut(const EventTree& tree, const Gamble<T>& f, const Cut& cut,
                         T tol = num<T>::measurability_tol()) {
  if (!is_cut_measurable(tree, f, cut, tol))
    fail(Err::NotMeasurable, "gamble is not measurable with respect to the cut");
  std::vector<T> v;
  v.reserve(cut.members.size());
  for (auto m : cut.members) v.push_back(f.at(tree.label(tree.terminals_through(m)[0])));
  return Gamble<T>(cut_carrier(tree, cut), std::move(v));
}

// The U-measurable terminal gamble with value g(u) on every path through u.
template <class T>
Gamble<T> embed_from_cut(const EventTree& tree, const Gamble<T>& g, const Cut& cut) {
  if (g.size() != cut.members.size())
    fail(Err::CarrierMismatch, "gamble does not match the cut");
  std::vector<T> v(tree.terminals_through(cut.base).size(), T(0));
  int offset = tree.terminal_offset(cut.base);
  for (std::size_t i = 0; i < cut.members.size(); ++i) {
    auto m = cut.members[i];
    const T& value = g.at(tree.label(m));
    for (auto leaf : tree.terminals_through(m)) v[tree.terminal_offset(leaf) - offset] = value;
  }
  return Gamble<T>(terminal_carrier(tree, cut.base), std::move(v));
}

// The U-stopped process: follows F before and on the cut, then freezes at
// the cut value.
template <class T>
TreeProcess<T> stop_process(const EventTree& tree, const TreeProcess<T>& process,
                            const Cut& cut) {
  TreeProcess<T> stopped{&tree, process.base, std::vector<T>(tree.node_count(), T(0))};
  EventTree::Node base = process.base;
  if (!tree.precedes(base, cut.base) && base != cut.base)
    fail(Err::UnknownId, "process undefined at the base of the cut");
  for (EventTree::Node s = base; s < base + tree.subtree_size(base); ++s) {
    EventTree::Node frozen = EventTree::npos;
    // A situation after the cut descends from exactly one member.
    auto it = std::upper_bound(cut.members.begin(), cut.members.end(), s);
    if (it != cut.members.begin() && tree.precedes(*(it - 1), s)) frozen = *(it - 1);
    stopped.values[s] = frozen == EventTree::npos ? process.at(s) : process.at(frozen);
  }
  return stopped;
}

// The variable F_U: on each path, the process value at the cut crossing.
template <class T>
Gamble<T> cut_variable(const EventTree& tree, const TreeProcess<T>& process, const Cut& cut) {
  auto terms = tree.terminals_through(cut.base);
  std::vector<T> v;
  v.reserve(terms.size());
  for (auto leaf : terms) v.push_back(process.at(cut_member_through(tree, cut, leaf)));
  return Gamble<T>(terminal_carrier(tree, cut.base), std::move(v));
}

}  // namespace iptree
