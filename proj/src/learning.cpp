#include "celearn/learning.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <set>

#include "celearn/welfare.hpp"

namespace celearn {

std::vector<PairKey> EstimateTable::active_pairs() const {
  std::vector<PairKey> out;
  for (const auto& [key, est] : entries)
    if (!est.pruned) out.push_back(key);
  return out;
}

const Estimate& EstimateTable::at(int buyer, Bundle s) const {
  auto it = entries.find(PairKey{buyer, s});
  if (it == entries.end()) throw DomainError("no estimate for this pair");
  return it->second;
}

double hoeffding_eps(double c, std::int64_t idx_size, double delta,
                     std::int64_t t) {
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("c must be positive");
  if (idx_size < 1) throw DomainError("index set size must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
  if (t < 1) throw DomainError("sample count must be >= 1");
  return c * std::sqrt(std::log(2.0 * static_cast<double>(idx_size) / delta) /
                       (2.0 * static_cast<double>(t)));
}

std::int64_t invert_hoeffding_t(double c, std::int64_t idx_size, double delta,
                                double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps))
    throw DomainError("eps must be positive");
  const double log_term =
      std::log(2.0 * static_cast<double>(idx_size) / delta);
  double raw = c * c * log_term / (2.0 * eps * eps);
  std::int64_t t = static_cast<std::int64_t>(std::ceil(raw));
  if (t < 1) t = 1;
  // Fix up float rounding around the boundary.
  while (t > 1 && hoeffding_eps(c, idx_size, delta, t - 1) <= eps) --t;
  while (hoeffding_eps(c, idx_size, delta, t) > eps) ++t;
  return t;
}

EaResult ea(NoisyOracle& oracle, const IndexSet& idx, std::int64_t t,
            double delta, double c) {
  if (idx.empty()) throw EmptyIndexSet("ea over an empty index set");
  EaResult out;
  out.eps_hat = hoeffding_eps(c, static_cast<std::int64_t>(idx.size()), delta, t);
  for (const auto& [buyer, s] : idx.pairs()) {
    double sum = 0.0;
    for (std::int64_t k = 0; k < t; ++k) sum += oracle.sample(buyer, s);
    out.estimates[PairKey{buyer, s}] =
        Estimate{sum / static_cast<double>(t), out.eps_hat, false, t};
  }
  return out;
}

bool prune_check(double v_hat, double upper_bound, double eps_hat, int n,
                 double w_star_hat) {
  if (n < 1) throw DomainError("prune check needs n >= 1");
  if (!(eps_hat >= 0.0)) throw DomainError("negative radius");
  return v_hat + upper_bound + 2.0 * eps_hat * static_cast<double>(n) <
         w_star_hat;
}

std::vector<PairKey> select_candidates(const std::vector<PairKey>& active,
                                       const std::map<PairKey, double>& bounds,
                                       std::int64_t budget) {
  std::vector<std::pair<double, PairKey>> order;
  order.reserve(active.size());
  for (const PairKey& key : active) {
    auto it = bounds.find(key);
    if (it == bounds.end())
      throw DomainError("missing upper bound for an active pair");
    order.emplace_back(it->second, key);
  }
  std::sort(order.begin(), order.end());
  std::size_t keep = order.size();
  if (budget >= 0)
    keep = std::min<std::size_t>(keep, static_cast<std::size_t>(budget));
  std::vector<PairKey> out;
  out.reserve(keep);
  for (std::size_t k = 0; k < keep; ++k) out.push_back(order[k].second);
  return out;
}

void Schedules::validate() const {
  const std::size_t rounds = sampling.size();
  if (rounds == 0) throw InvalidSchedule("empty schedule");
  if (failure.size() != rounds || budgets.size() != rounds)
    throw InvalidSchedule("schedule components differ in length");
  double total_delta = 0.0;
  for (std::size_t k = 0; k < rounds; ++k) {
    if (sampling[k] < 1)
      throw InvalidSchedule("sample counts must be positive");
    if (k > 0 && sampling[k] <= sampling[k - 1])
      throw InvalidSchedule("sample counts must be strictly increasing");
    if (!(failure[k] > 0.0 && failure[k] < 1.0))
      throw InvalidSchedule("failure probabilities must lie in (0, 1)");
    if (budgets[k] < kUnboundedBudget)
      throw InvalidSchedule("budgets must be nonnegative or unbounded");
    total_delta += failure[k];
  }
  if (total_delta >= 1.0)
    throw InvalidSchedule("failure probabilities must sum below 1");
}

std::string to_string(BoundMode mode) {
  switch (mode) {
    case BoundMode::Exact:
      return "exact";
    case BoundMode::Relaxed:
      return "relaxed";
    case BoundMode::TwoPass:
      return "two-pass";
  }
  throw DomainError("unknown bound mode");
}

BoundMode bound_mode_from_string(const std::string& name) {
  if (name == "exact") return BoundMode::Exact;
  if (name == "relaxed") return BoundMode::Relaxed;
  if (name == "two-pass") return BoundMode::TwoPass;
  throw ParseError("unknown bound mode '" + name + "'");
}

namespace {

// Empirical welfare solves restricted to the active pairs of an estimate
// table; the empty bundle is always available at value 0.
struct WelfareBackend {
  virtual ~WelfareBackend() = default;
  virtual double w_star(const EstimateTable& table) = 0;
  virtual double exact_bound(const EstimateTable& table, PairKey pair) = 0;
  virtual std::map<PairKey, double> relaxed_bounds(
      const EstimateTable& table, const std::vector<PairKey>& active) = 0;
};

struct DenseBackend : WelfareBackend {
  int n, m;
  DenseBackend(int n_, int m_) : n(n_), m(m_) {}

  std::vector<double> values(const EstimateTable& table) const {
    std::vector<double> out(static_cast<std::size_t>(n) << m,
                            detail::kUnavailable);
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i) << m] = 0.0;
    for (const auto& [key, est] : table.entries)
      if (!est.pruned)
        out[(static_cast<std::size_t>(key.buyer) << m) | key.bundle] =
            est.mean;
    return out;
  }

  double w_star(const EstimateTable& table) override {
    return detail::solve_packing(n, m, values(table)).value;
  }

  double exact_bound(const EstimateTable& table, PairKey pair) override {
    auto vals = values(table);
    const Bundle full = (Bundle{1} << m) - 1;
    for (Bundle s = 1; s <= full; ++s) {
      vals[(static_cast<std::size_t>(pair.buyer) << m) | s] =
          detail::kUnavailable;
      if ((s & pair.bundle) != 0)
        for (int k = 0; k < n; ++k)
          vals[(static_cast<std::size_t>(k) << m) | s] = detail::kUnavailable;
    }
    return detail::solve_packing(n, m, vals).value;
  }

  std::map<PairKey, double> relaxed_bounds(
      const EstimateTable& table, const std::vector<PairKey>& active) override {
    const auto maxsub = detail::max_over_subsets(n, m, values(table));
    const Bundle full = (Bundle{1} << m) - 1;
    std::map<PairKey, double> out;
    for (const PairKey& key : active) {
      const Bundle free = full & ~key.bundle;
      double bound = 0.0;
      for (int k = 0; k < n; ++k)
        if (k != key.buyer)
          bound += maxsub[(static_cast<std::size_t>(k) << m) | free];
      out[key] = bound;
    }
    return out;
  }
};

struct UnitDemandBackend : WelfareBackend {
  int n, m;
  UnitDemandBackend(int n_, int m_) : n(n_), m(m_) {}

  // Inactive cells are held at 0: the matching never profits from them and
  // zero-weight matches are dropped from the assignment.
  std::vector<double> weights(const EstimateTable& table) const {
    std::vector<double> w(static_cast<std::size_t>(n) * m, 0.0);
    for (const auto& [key, est] : table.entries)
      if (!est.pruned) {
        const int j = std::countr_zero(key.bundle);
        w[static_cast<std::size_t>(key.buyer) * m + j] = est.mean;
      }
    return w;
  }

  double w_star(const EstimateTable& table) override {
    return detail::max_weight_matching(weights(table), n, m).value;
  }

  double exact_bound(const EstimateTable& table, PairKey pair) override {
    auto w = weights(table);
    const int j = std::countr_zero(pair.bundle);
    for (int jj = 0; jj < m; ++jj)
      w[static_cast<std::size_t>(pair.buyer) * m + jj] = 0.0;
    for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i) * m + j] = 0.0;
    return detail::max_weight_matching(w, n, m).value;
  }

  std::map<PairKey, double> relaxed_bounds(
      const EstimateTable& table, const std::vector<PairKey>& active) override {
    const auto w = weights(table);
    // Top two clamped row values with the top column, per buyer.
    std::vector<double> top1(n, 0.0), top2(n, 0.0);
    std::vector<int> arg1(n, -1);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) {
        const double x = std::max(0.0, w[static_cast<std::size_t>(i) * m + j]);
        if (x > top1[i]) {
          top2[i] = top1[i];
          top1[i] = x;
          arg1[i] = j;
        } else if (x > top2[i]) {
          top2[i] = x;
        }
      }
    std::map<PairKey, double> out;
    for (const PairKey& key : active) {
      const int j = std::countr_zero(key.bundle);
      double bound = 0.0;
      for (int k = 0; k < n; ++k)
        if (k != key.buyer) bound += arg1[k] == j ? top2[k] : top1[k];
      out[key] = bound;
    }
    return out;
  }
};

std::map<PairKey, double> mean_bounds(const EstimateTable& table,
                                      const std::vector<PairKey>& active) {
  std::map<PairKey, double> out;
  for (const PairKey& key : active) out[key] = table.entries.at(key).mean;
  return out;
}

}  // namespace

LearnResult eap(NoisyOracle& oracle, const Schedules& schedules, double c,
                double target_eps, BoundMode mode, const EapObserver& observer) {
  schedules.validate();
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("c must be positive");
  if (!(target_eps >= 0.0)) throw DomainError("target eps must be >= 0");

  const int n = oracle.buyers();
  const int m = oracle.goods();
  std::unique_ptr<WelfareBackend> backend;
  IndexSet idx0;
  if (oracle.unit_demand()) {
    idx0 = IndexSet::singletons(n, m);
    backend = std::make_unique<UnitDemandBackend>(n, m);
  } else {
    if (m > 14)
      throw TooManyGoods("dense EAP capped at m <= 14 by the packing solver");
    idx0 = IndexSet::all_nonempty(n, m);
    backend = std::make_unique<DenseBackend>(n, m);
  }
  if (idx0.empty()) throw EmptyIndexSet("EAP over an empty index set");

  LearnResult out;
  for (double d : schedules.failure) out.delta_budget += d;
  for (const auto& [buyer, s] : idx0.pairs())
    out.estimates.entries[PairKey{buyer, s}] = Estimate{0.0, c / 2.0, false, 0};
  out.eps_hat = c / 2.0;

  for (int k = 0; k < schedules.rounds(); ++k) {
    const auto active = out.estimates.active_pairs();
    if (active.empty()) break;

    std::vector<IndexSet::Pair> pairs;
    pairs.reserve(active.size());
    for (const PairKey& key : active) pairs.emplace_back(key.buyer, key.bundle);
    const EaResult round =
        ea(oracle, IndexSet(std::move(pairs)), schedules.sampling[k],
           schedules.failure[k], c);

    for (const auto& [key, est] : round.estimates) {
      Estimate& e = out.estimates.entries[key];
      e.mean = est.mean;
      e.radius = est.radius;
      e.samples += est.samples;
    }
    out.total_samples +=
        schedules.sampling[k] * static_cast<std::int64_t>(active.size());
    out.delta_spent += schedules.failure[k];
    out.eps_hat = round.eps_hat;
    out.iterations = k + 1;

    const bool terminate =
        out.eps_hat <= target_eps || k + 1 == schedules.rounds();
    std::vector<PairKey> pruned_now;
    if (!terminate) {
      // All bounds of one round are taken against the same pre-pruning
      // active set and its empirical optimum.
      const double w_star_hat = backend->w_star(out.estimates);
      std::set<PairKey> marked;
      const std::int64_t budget = schedules.budgets[k];

      auto try_prune = [&](const PairKey& key, double upper_bound) {
        if (prune_check(out.estimates.entries.at(key).mean, upper_bound,
                        out.eps_hat, n, w_star_hat))
          marked.insert(key);
      };

      if (mode == BoundMode::Exact) {
        for (const PairKey& key :
             select_candidates(active, mean_bounds(out.estimates, active),
                               budget))
          try_prune(key, backend->exact_bound(out.estimates, key));
      } else if (mode == BoundMode::Relaxed) {
        const auto bounds = backend->relaxed_bounds(out.estimates, active);
        for (const PairKey& key : select_candidates(active, bounds, budget))
          try_prune(key, bounds.at(key));
      } else {
        const auto bounds = backend->relaxed_bounds(out.estimates, active);
        for (const PairKey& key : active) try_prune(key, bounds.at(key));
        std::vector<PairKey> survivors;
        for (const PairKey& key : active)
          if (!marked.contains(key)) survivors.push_back(key);
        for (const PairKey& key : select_candidates(survivors, bounds, budget))
          try_prune(key, backend->exact_bound(out.estimates, key));
      }

      for (const PairKey& key : marked) {
        out.estimates.entries.at(key).pruned = true;
        pruned_now.push_back(key);
      }
    }

    if (observer)
      observer(EapRound{k + 1, out.eps_hat, active, pruned_now,
                        &out.estimates});
    if (terminate) break;
  }
  return out;
}

}  // namespace celearn
