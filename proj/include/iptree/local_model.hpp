#pragma once

#include <span>
#include <string>
#include <vector>

#include "iptree/errors.hpp"
#include "iptree/gamble.hpp"
#include "iptree/numeric.hpp"

namespace iptree {

enum class ModelKind { Vacuous, Precise, LinearVacuous, Credal };

inline const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::Vacuous: return "vacuous";
    case ModelKind::Precise: return "precise";
    case ModelKind::LinearVacuous: return "linvac";
    case ModelKind::Credal: return "credal";
  }
  return "?";
}

// A local imprecise belief model on a finite move space: the lower prevision
// a subject attaches to gambles on the next move.
template <class T>
class LocalModel {
 public:
  static LocalModel vacuous(CarrierPtr carrier) {
    LocalModel m(ModelKind::Vacuous, std::move(carrier));
    return m;
  }

  static LocalModel precise(CarrierPtr carrier, std::vector<T> mass) {
    LocalModel m(ModelKind::Precise, std::move(carrier));
    m.mass_ = std::move(mass);
    m.check_mass(m.mass_);
    return m;
  }

  // Contamination model: (1-delta) * center expectation + delta * minimum.
  static LocalModel linear_vacuous(CarrierPtr carrier, std::vector<T> center, T delta) {
    if (delta < T(0) || delta > T(1))
      fail(Err::DeltaOutOfRange, "contamination must lie in [0, 1]");
    LocalModel m(ModelKind::LinearVacuous, std::move(carrier));
    m.mass_ = std::move(center);
    m.delta_ = std::move(delta);
    m.check_mass(m.mass_);
    return m;
  }

  static LocalModel credal(CarrierPtr carrier, std::vector<std::vector<T>> extreme_points) {
    if (extreme_points.empty())
      fail(Err::EmptyCredalSet, "a credal set needs at least one extreme point");
    LocalModel m(ModelKind::Credal, std::move(carrier));
    m.vertices_ = std::move(extreme_points);
    for (const auto& p : m.vertices_) m.check_mass(p);
    return m;
  }

  // A two-move coin whose heads probability lies within `deviation` of 1/2:
  // uniform center contaminated by 2 * deviation. Carrier order is
  // [tails, heads]; the heads move is the second label.
  static LocalModel near_fair_coin(CarrierPtr carrier, T deviation) {
    if (carrier->size() != 2)
      fail(Err::CarrierMismatch, "a coin model needs exactly two moves");
    if (deviation < T(0) || T(2) * deviation > T(1))
      fail(Err::DeltaOutOfRange, "coin deviation must lie in [0, 1/2]");
    T half = num<T>::from_ratio(1, 2);
    return linear_vacuous(carrier, {half, half}, T(2) * deviation);
  }

  ModelKind kind() const { return kind_; }
  const CarrierPtr& carrier() const { return carrier_; }
  std::size_t arity() const { return carrier_->size(); }
  const std::vector<T>& mass() const { return mass_; }
  const T& delta() const { return delta_; }
  const std::vector<std::vector<T>>& extreme_points() const { return vertices_; }

  bool has_duplicate_vertices() const {
    for (std::size_t i = 0; i < vertices_.size(); ++i)
      for (std::size_t j = i + 1; j < vertices_.size(); ++j)
        if (vertices_[i] == vertices_[j]) return true;
    return false;
  }

  // The supremum acceptable buying price for a gamble on the move space.
  T lower(std::span<const T> g) const {
    if (g.size() != arity())
      fail(Err::CarrierMismatch, "gamble size does not match the move space");
    switch (kind_) {
      case ModelKind::Vacuous:
        return min_of(g);
      case ModelKind::Precise:
        return dot(mass_, g);
      case ModelKind::LinearVacuous:
        return (T(1) - delta_) * dot(mass_, g) + delta_ * min_of(g);
      case ModelKind::Credal: {
        T best = dot(vertices_[0], g);
        for (std::size_t i = 1; i < vertices_.size(); ++i) {
          T e = dot(vertices_[i], g);
          if (e < best) best = e;
        }
        return best;
      }
    }
    fail(Err::CarrierMismatch, "unreachable");
  }

  T lower(const Gamble<T>& g) const {
    require_carrier(g);
    return lower(std::span<const T>(g.values()));
  }

  T upper(std::span<const T> g) const {
    std::vector<T> neg(g.begin(), g.end());
    for (T& v : neg) v = -v;
    return -lower(std::span<const T>(neg));
  }

  T upper(const Gamble<T>& g) const {
    require_carrier(g);
    return upper(std::span<const T>(g.values()));
  }

  // Index of the expectation-minimising extreme point of as_credal(*this);
  // ties break toward the lowest index.
  int argmin_vertex(std::span<const T> g) const {
    const auto& pts = kind_ == ModelKind::Credal ? vertices_ : as_credal().extreme_points();
    int best = 0;
    T value = dot(pts[0], g);
    for (std::size_t i = 1; i < pts.size(); ++i) {
      T e = dot(pts[i], g);
      if (e < value) {
        value = e;
        best = static_cast<int>(i);
      }
    }
    return best;
  }

  // An extreme-point representation generating the same lower prevision.
  LocalModel as_credal() const {
    switch (kind_) {
      case ModelKind::Credal:
        return *this;
      case ModelKind::Precise:
        return credal(carrier_, {mass_});
      case ModelKind::Vacuous: {
        std::vector<std::vector<T>> pts;
        for (std::size_t w = 0; w < arity(); ++w) {
          std::vector<T> p(arity(), T(0));
          p[w] = T(1);
          pts.push_back(std::move(p));
        }
        return credal(carrier_, std::move(pts));
      }
      case ModelKind::LinearVacuous: {
        std::vector<std::vector<T>> pts;
        for (std::size_t w = 0; w < arity(); ++w) {
          std::vector<T> p(arity());
          for (std::size_t i = 0; i < arity(); ++i) p[i] = (T(1) - delta_) * mass_[i];
          p[w] += delta_;
          pts.push_back(std::move(p));
        }
        return credal(carrier_, std::move(pts));
      }
    }
    fail(Err::CarrierMismatch, "unreachable");
  }

 private:
  LocalModel(ModelKind kind, CarrierPtr carrier)
      : kind_(kind), carrier_(std::move(carrier)) {}

  void require_carrier(const Gamble<T>& g) const {
    if (!same_carrier(g.carrier(), carrier_))
      fail(Err::CarrierMismatch, "gamble does not live on the model's move space");
  }

  void check_mass(const std::vector<T>& p) const {
    if (p.size() != arity())
      fail(Err::MassNotNormalized, "mass function does not match the move space");
    T sum(0);
    T tol = num<T>::measurability_tol();
    for (const T& v : p) {
      if (v < -tol) fail(Err::MassNotNormalized, "negative probability mass");
      sum += v;
    }
    if (!within(sum, T(1), tol)) fail(Err::MassNotNormalized, "mass does not sum to one");
  }

  static T dot(const std::vector<T>& p, std::span<const T> g) {
    T s(0);
    for (std::size_t i = 0; i < p.size(); ++i) s += p[i] * g[i];
    return s;
  }

  static T min_of(std::span<const T> g) {
    T m = g[0];
    for (const T& v : g)
      if (v < m) m = v;
    return m;
  }

  ModelKind kind_;
  CarrierPtr carrier_;
  std::vector<T> mass_;
  T delta_{0};
  std::vector<std::vector<T>> vertices_;
};

}  // namespace iptree
