#pragma once

#include <cmath>
#include <map>
#include <span>
#include <stdexcept>

namespace qmem {

// Bath rate function h(omega) >= 0 at the transition frequencies of the
// system, satisfying h(-omega) = exp(-beta*omega) h(omega).
class SpectralFunction {
public:
  static SpectralFunction flat(double beta, double gamma, double gamma0,
                               std::span<const double> omegas) {
    if (beta < 0) throw std::domain_error("SpectralFunction: beta must be >= 0");
    if (gamma < 0 || gamma0 < 0)
      throw std::invalid_argument("SpectralFunction: rates must be >= 0");
    SpectralFunction h;
    h.beta_ = beta;
    h.values_[0.0] = gamma0;
    for (double w : omegas) {
      if (!(w > 0)) throw std::invalid_argument("SpectralFunction: omegas must be > 0");
      h.values_[w] = gamma;
      h.values_[-w] = gamma * std::exp(-beta * w);
    }
    return h;
  }

  static SpectralFunction from_table(double beta, const std::map<double, double>& table) {
    if (beta < 0) throw std::domain_error("SpectralFunction: beta must be >= 0");
    SpectralFunction h;
    h.beta_ = beta;
    for (const auto& [w, v] : table) {
      if (v < 0) throw std::invalid_argument("SpectralFunction: negative rate rejected");
      h.values_[w] = v;
    }
    for (const auto& [w, v] : h.values_) {
      if (w <= 0) continue;
      auto it = h.values_.find(-w);
      if (it == h.values_.end())
        throw std::invalid_argument("SpectralFunction: table must pair omega with -omega");
      double expect = v * std::exp(-beta * w);
      double scale = std::max({1.0, v, it->second});
      if (std::abs(it->second - expect) > 1e-12 * scale)
        throw std::invalid_argument(
            "SpectralFunction: table violates h(-w) = exp(-beta w) h(w)");
    }
    return h;
  }

  double beta() const { return beta_; }

  double at(double omega) const {
    auto it = values_.lower_bound(omega - 1e-9);
    if (it == values_.end() || std::abs(it->first - omega) > 1e-9)
      throw std::invalid_argument("SpectralFunction: no rate stored at requested frequency");
    return it->second;
  }

  const std::map<double, double>& table() const { return values_; }

private:
  double beta_ = 0;
  std::map<double, double> values_;
};

}  // namespace qmem
