#include "hgas/charge_law.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "hgas/error.hpp"

namespace hgas {
namespace {

constexpr std::size_t continuous_cells = 1024;
constexpr double mass_tolerance = 1e-10;

// 8-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 4> gl_x = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                        0.9602898564975363};
constexpr std::array<double, 4> gl_w = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                        0.1012285362903763};

template <class F>
double gauss8(F&& f, double lo, double hi) {
  const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
  double s = 0;
  for (std::size_t k = 0; k < gl_x.size(); ++k) s += gl_w[k] * (f(c - h * gl_x[k]) + f(c + h * gl_x[k]));
  return s * h;
}

}  // namespace

ChargeDistribution ChargeDistribution::atomic(std::vector<Atom> atoms) {
  if (atoms.empty()) throw Error(Errc::malformed_law, "atomic law needs at least one atom");
  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.charge < b.charge; });
  ChargeDistribution law;
  law.atomic_ = true;
  double total = 0;
  for (const auto& a : atoms) {
    if (!(a.charge > 0) || !std::isfinite(a.charge))
      throw Error(Errc::malformed_law, "charges must be positive and finite");
    if (!(a.weight >= 0)) throw Error(Errc::malformed_law, "atom weights must be non-negative");
    total += a.weight;
    if (a.weight == 0) continue;
    if (!law.atoms_.empty() && law.atoms_.back().charge == a.charge)
      law.atoms_.back().weight += a.weight;
    else
      law.atoms_.push_back(a);
  }
  if (std::abs(total - 1) > mass_tolerance)
    throw Error(Errc::malformed_law, "atom weights sum to " + std::to_string(total) + ", expected 1");
  law.qmin_ = law.atoms_.front().charge;
  law.qmax_ = law.atoms_.back().charge;
  law.mean_ = law.second_ = 0;
  for (const auto& a : law.atoms_) {
    law.mean_ += a.weight * a.charge;
    law.second_ += a.weight * a.charge * a.charge;
  }
  return law;
}

ChargeDistribution ChargeDistribution::uniform(double a, double b) {
  if (!(b > a)) throw Error(Errc::malformed_law, "uniform law needs a < b");
  return tabulated({a, b}, {1 / (b - a), 1 / (b - a)});
}

ChargeDistribution ChargeDistribution::continuous(std::function<double(double)> density, double qmin, double qmax) {
  if (!density) throw Error(Errc::malformed_law, "continuous law needs a density");
  if (!(qmin > 0) || !(qmax > qmin) || !std::isfinite(qmax))
    throw Error(Errc::malformed_law, "continuous law needs 0 < q_min < q_max");
  ChargeDistribution law;
  law.density_ = std::move(density);
  law.qmin_ = qmin;
  law.qmax_ = qmax;
  law.nodes_.resize(continuous_cells + 1);
  for (std::size_t k = 0; k <= continuous_cells; ++k)
    law.nodes_[k] = qmin + (qmax - qmin) * static_cast<double>(k) / continuous_cells;
  law.nodes_.back() = qmax;
  for (double q : law.nodes_) {
    const double f = law.density_(q);
    if (!(f >= 0) || !std::isfinite(f)) throw Error(Errc::malformed_law, "density must be non-negative");
  }
  law.build_tables();
  return law;
}

ChargeDistribution ChargeDistribution::tabulated(std::vector<double> q, std::vector<double> density,
                                                 bool renormalize) {
  if (q.size() < 2 || q.size() != density.size())
    throw Error(Errc::malformed_law, "tabulated law needs matching node and value arrays of length >= 2");
  if (!(q.front() > 0)) throw Error(Errc::malformed_law, "q_min must be positive");
  for (std::size_t k = 0; k < q.size(); ++k) {
    if (k > 0 && !(q[k] > q[k - 1])) throw Error(Errc::malformed_law, "tabulated nodes must increase strictly");
    if (!(density[k] >= 0) || !std::isfinite(density[k]))
      throw Error(Errc::malformed_law, "density must be non-negative");
  }
  if (renormalize) {
    double m = 0;
    for (std::size_t k = 0; k + 1 < q.size(); ++k) m += 0.5 * (density[k] + density[k + 1]) * (q[k + 1] - q[k]);
    if (!(m > 0)) throw Error(Errc::malformed_law, "density has zero mass");
    for (auto& v : density) v /= m;
  }
  ChargeDistribution law;
  law.linear_ = true;
  law.qmin_ = q.front();
  law.qmax_ = q.back();
  law.nodes_ = std::move(q);
  law.values_ = std::move(density);
  law.build_tables();
  return law;
}

std::size_t ChargeDistribution::cell_of(double q) const {
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), q);
  std::size_t c = it == nodes_.begin() ? 0 : static_cast<std::size_t>(it - nodes_.begin()) - 1;
  return std::min(c, nodes_.size() - 2);
}

double ChargeDistribution::density(double q) const {
  if (atomic_ || q < qmin_ || q > qmax_) return 0;
  if (!linear_) return density_(q);
  const std::size_t c = cell_of(q);
  const double t = (q - nodes_[c]) / (nodes_[c + 1] - nodes_[c]);
  return values_[c] + t * (values_[c + 1] - values_[c]);
}

double ChargeDistribution::cell_integral(std::size_t cell, double lo, double hi, int power) const {
  if (hi <= lo) return 0;
  if (linear_) {
    const double x0 = nodes_[cell], h = nodes_[cell + 1] - x0;
    const double f0 = values_[cell], df = values_[cell + 1] - f0;
    return gauss8([&](double u) { return (f0 + df * (u - x0) / h) * std::pow(u, power); }, lo, hi);
  }
  return gauss8([&](double u) { return density_(u) * std::pow(u, power); }, lo, hi);
}

void ChargeDistribution::build_tables() {
  const std::size_t cells = nodes_.size() - 1;
  mass_.assign(nodes_.size(), 0.0);
  moment_.assign(nodes_.size(), 0.0);
  double second = 0;
  for (std::size_t c = 0; c < cells; ++c) {
    mass_[c + 1] = mass_[c] + cell_integral(c, nodes_[c], nodes_[c + 1], 0);
    moment_[c + 1] = moment_[c] + cell_integral(c, nodes_[c], nodes_[c + 1], 1);
    second += cell_integral(c, nodes_[c], nodes_[c + 1], 2);
  }
  if (std::abs(mass_.back() - 1) > mass_tolerance)
    throw Error(Errc::malformed_law, "density integrates to " + std::to_string(mass_.back()) + ", expected 1");
  mean_ = moment_.back();
  second_ = second;
}

double ChargeDistribution::cumulative(double q, int power) const {
  const auto& table = power == 0 ? mass_ : moment_;
  if (q <= qmin_) return 0;
  if (q >= qmax_) return table.back();
  const std::size_t c = cell_of(q);
  return table[c] + cell_integral(c, nodes_[c], q, power);
}

double ChargeDistribution::cdf(double q) const {
  if (atomic_) {
    double s = 0;
    for (const auto& a : atoms_)
      if (a.charge <= q) s += a.weight;
    return std::min(s, 1.0);
  }
  return std::min(cumulative(q, 0), 1.0);
}

double ChargeDistribution::quantile(double u) const {
  if (!(u >= 0 && u <= 1)) throw Error(Errc::domain, "quantile level must lie in [0, 1]");
  if (atomic_) {
    double s = 0;
    for (const auto& a : atoms_) {
      s += a.weight;
      if (u <= s) return a.charge;
    }
    return atoms_.back().charge;
  }
  if (u <= 0) return qmin_;
  if (u >= 1) return qmax_;
  auto it = std::lower_bound(mass_.begin(), mass_.end(), u);
  std::size_t c = it == mass_.begin() ? 0 : static_cast<std::size_t>(it - mass_.begin()) - 1;
  c = std::min(c, nodes_.size() - 2);
  const double target = u - mass_[c];
  double lo = nodes_[c], hi = nodes_[c + 1];
  double x = 0.5 * (lo + hi);
  for (int it2 = 0; it2 < 100; ++it2) {
    const double f = cell_integral(c, nodes_[c], x, 0) - target;
    if (f > 0) hi = x; else lo = x;
    const double dens = density(x);
    double next = dens > 0 ? x - f / dens : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-15 * std::max(1.0, std::abs(x)) || hi - lo <= 1e-15 * hi) {
      x = next;
      break;
    }
    x = next;
  }
  return std::clamp(x, qmin_, qmax_);
}

double ChargeDistribution::expectation(const std::function<double(double)>& f) const {
  if (atomic_) {
    double s = 0;
    for (const auto& a : atoms_) s += a.weight * f(a.charge);
    return s;
  }
  double s = 0;
  for (std::size_t c = 0; c + 1 < nodes_.size(); ++c)
    s += gauss8([&](double u) { return density(u) * f(u); }, nodes_[c], nodes_[c + 1]);
  return s;
}

double ChargeDistribution::partial_first_moment(double a, double b) const {
  if (b < a) return 0;
  if (atomic_) {
    double s = 0;
    for (const auto& at : atoms_)
      if (at.charge >= a && at.charge <= b) s += at.weight * at.charge;
    return s;
  }
  return cumulative(b, 1) - cumulative(a, 1);
}

double ChargeDistribution::partial_mass(double a, double b) const {
  if (b < a) return 0;
  if (atomic_) {
    double s = 0;
    for (const auto& at : atoms_)
      if (at.charge >= a && at.charge <= b) s += at.weight;
    return s;
  }
  return cumulative(b, 0) - cumulative(a, 0);
}

bool ChargeDistribution::has_interior_gap() const {
  if (atomic_) return false;
  bool seen_mass = false, seen_gap = false;
  for (std::size_t c = 0; c + 1 < mass_.size(); ++c) {
    const bool empty = mass_[c + 1] - mass_[c] <= 1e-15;
    if (!empty && seen_gap) return true;
    if (empty && seen_mass) seen_gap = true;
    if (!empty) seen_mass = true;
  }
  return false;
}

std::vector<double> sample_charges(const ChargeDistribution& law, std::size_t n, std::uint64_t seed,
                                   SamplingMode mode) {
  if (n == 0) throw Error(Errc::domain, "sample size must be positive");
  std::mt19937_64 rng(seed);
  std::vector<double> out;
  out.reserve(n);
  if (mode == SamplingMode::iid) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) out.push_back(law.quantile(unif(rng)));
    return out;
  }
  if (law.is_atomic()) {
    const auto& atoms = law.atoms();
    std::vector<std::size_t> count(atoms.size());
    std::vector<double> rem(atoms.size());
    std::size_t used = 0;
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      const double exact = atoms[k].weight * static_cast<double>(n);
      count[k] = static_cast<std::size_t>(std::floor(exact + 1e-9));
      rem[k] = exact - static_cast<double>(count[k]);
      used += count[k];
    }
    std::vector<std::size_t> order(atoms.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
    for (std::size_t k = 0; used < n; ++k, ++used) ++count[order[k % order.size()]];
    while (used > n) {
      // Can only happen through the rounding slack above.
      auto it = std::max_element(count.begin(), count.end());
      --*it;
      --used;
    }
    for (std::size_t k = 0; k < atoms.size(); ++k) out.insert(out.end(), count[k], atoms[k].charge);
  } else {
    for (std::size_t k = 0; k < n; ++k) out.push_back(law.quantile((k + 0.5) / static_cast<double>(n)));
  }
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

}  // namespace hgas
