#pragma once

#include <string>
#include <vector>

#include "iptree/errors.hpp"
#include "iptree/gamble.hpp"
#include "iptree/numeric.hpp"
#include "iptree/simplex.hpp"

namespace iptree {

// A finite assessment of really desirable gambles on a flat possibility
// space. The natural extension is the smallest convex cone containing the
// assessment and every non-negative gamble; membership and conditional
// prices reduce to small linear programs.
template <class T>
struct Assessment {
  CarrierPtr space;
  std::vector<Gamble<T>> gambles;

  Assessment(CarrierPtr s, std::vector<Gamble<T>> gs)
      : space(std::move(s)), gambles(std::move(gs)) {
    for (const auto& g : gambles)
      if (!same_carrier(g.carrier(), space))
        fail(Err::CarrierMismatch, "assessment gamble lives on a different space");
  }
};

namespace detail {

// Columns are the combination coefficients lambda_i; row omega carries the
// values g_i(omega).
template <class T>
std::vector<std::vector<T>> combination_matrix(const Assessment<T>& a) {
  std::size_t m = a.space->size();
  std::vector<std::vector<T>> A(m, std::vector<T>(a.gambles.size(), T(0)));
  for (std::size_t j = 0; j < a.gambles.size(); ++j)
    for (std::size_t w = 0; w < m; ++w) A[w][j] = a.gambles[j][w];
  return A;
}

template <class T>
std::vector<bool> event_mask(const Assessment<T>& a, const std::vector<std::string>& event) {
  if (event.empty()) fail(Err::EmptyConditioningEvent, "conditioning event is empty");
  std::vector<bool> mask(a.space->size(), false);
  for (const auto& label : event) mask[a.space->index_of(label)] = true;
  return mask;
}

}  // namespace detail

// Membership of f in the natural extension: are there lambda_i >= 0 with
// f >= sum_i lambda_i g_i pointwise? Infeasibility is a plain `false`.
template <class T>
bool natural_extension_contains(const Assessment<T>& a, const Gamble<T>& f) {
  if (!same_carrier(f.carrier(), a.space))
    fail(Err::CarrierMismatch, "gamble lives on a different space");
  auto A = detail::combination_matrix(a);
  std::vector<T> b(f.values());
  return lp_feasible(std::move(A), std::move(b));
}

// The natural extension avoids partial loss iff it contains no f <= 0 with
// f != 0, i.e. no combination sum lambda_i g_i that is nowhere positive and
// somewhere negative. The cone is scale invariant, so strictness can be
// normalised to total mass -1.
template <class T>
bool avoids_partial_loss(const Assessment<T>& a) {
  std::size_t m = a.space->size();
  std::size_t k = a.gambles.size();
  if (k == 0) return true;
  auto A = detail::combination_matrix(a);
  std::vector<T> b(m, T(0));
  std::vector<T> totals(k, T(0));
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t w = 0; w < m; ++w) totals[j] += a.gambles[j][w];
  A.push_back(std::move(totals));
  b.push_back(T(-1));
  return !lp_feasible(std::move(A), std::move(b));
}

// The supremum price for buying f contingent on B:
//     maximize alpha  s.t.  I_B (f - alpha) >= sum_i lambda_i g_i.
// The LP works on the closed cone, so the supremum is attained. An
// unbounded price means the assessment incurs partial loss.
template <class T>
T conditional_lower(const Assessment<T>& a, const Gamble<T>& f,
                    const std::vector<std::string>& event) {
  if (!same_carrier(f.carrier(), a.space))
    fail(Err::CarrierMismatch, "gamble lives on a different space");
  auto mask = detail::event_mask(a, event);
  std::size_t m = a.space->size();
  std::size_t k = a.gambles.size();
  // Variables: lambda_1..lambda_k, alpha+ , alpha-.
  std::vector<std::vector<T>> A(m, std::vector<T>(k + 2, T(0)));
  std::vector<T> b(m, T(0));
  for (std::size_t w = 0; w < m; ++w) {
    for (std::size_t j = 0; j < k; ++j) A[w][j] = a.gambles[j][w];
    if (mask[w]) {
      A[w][k] = T(1);
      A[w][k + 1] = T(-1);
      b[w] = f[w];
    }
  }
  std::vector<T> c(k + 2, T(0));
  c[k] = T(1);
  c[k + 1] = T(-1);
  auto result = solve_lp(std::move(A), std::move(b), std::move(c));
  if (result.status == LpStatus::Unbounded)
    fail(Err::UnboundedPrice, "assessment incurs partial loss: buying price unbounded");
  if (result.status != LpStatus::Optimal)
    fail(Err::UnboundedPrice, "internal: conditional price LP infeasible");
  return result.objective;
}

template <class T>
T conditional_upper(const Assessment<T>& a, const Gamble<T>& f,
                    const std::vector<std::string>& event) {
  return -conditional_lower(a, -f, event);
}

template <class T>
T unconditional_lower(const Assessment<T>& a, const Gamble<T>& f) {
  return conditional_lower(a, f, a.space->labels());
}

// The gamble P(f | partition): on each block, the conditional lower price
// given that block.
template <class T>
Gamble<T> conditional_lower_on_partition(const Assessment<T>& a, const Gamble<T>& f,
                                         const std::vector<std::vector<std::string>>& blocks) {
  std::vector<bool> seen(a.space->size(), false);
  for (const auto& block : blocks) {
    if (block.empty()) fail(Err::NotAPartition, "partition block is empty");
    for (const auto& label : block) {
      std::size_t i = a.space->index_of(label);
      if (seen[i]) fail(Err::NotAPartition, "label '" + label + "' appears in two blocks");
      seen[i] = true;
    }
  }
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (!seen[i]) fail(Err::NotAPartition, "label '" + a.space->label(i) + "' is in no block");

  std::vector<T> values(a.space->size(), T(0));
  for (const auto& block : blocks) {
    T price = conditional_lower(a, f, block);
    for (const auto& label : block) values[a.space->index_of(label)] = price;
  }
  return Gamble<T>(a.space, std::move(values));
}

}  // namespace iptree
