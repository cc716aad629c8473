#include "rightmost/qsd.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rightmost/errors.hpp"
#include "rightmost/parallel.hpp"

namespace rightmost {

void TruncatedStateSpace::validate() const {
  if (w < 1) throw ConfigError("oracle width w must be >= 1");
  if (w > kMaxOracleWidth) {
    throw NumericalGuard("oracle width w=" + std::to_string(w) + " exceeds the enumeration limit " +
                         std::to_string(kMaxOracleWidth));
  }
}

std::vector<int> TruncatedStateSpace::offsets_of(std::uint64_t state) {
  std::vector<int> out{0};
  for (int k = 1; state != 0; ++k, state >>= 1) {
    if (state & 1U) out.push_back(-2 * k);
  }
  return out;
}

std::uint64_t TruncatedStateSpace::state_of(const std::vector<int>& offsets) const {
  std::uint64_t s = 0;
  for (const int o : offsets) {
    if (o == 0) continue;
    const int k = -o / 2;
    if (o > 0 || (o & 1) != 0 || k > w - 1) {
      throw ContractViolation("offset " + std::to_string(o) + " is not a state of depth " + std::to_string(w));
    }
    s |= std::uint64_t{1} << (k - 1);
  }
  return s;
}

namespace {

struct ChildEnumerator {
  int w;
  Truncation mode;
  std::size_t n_states;
  std::vector<double> q;  // occupation probability of child j (position 1-2j)
  double* row;
  double* absorbed;

  void leaf(std::uint64_t mask, double prob) const {
    if (mask == 0) {
      *absorbed += prob;
      return;
    }
    const int low = __builtin_ctzll(mask);
    std::uint64_t rest = mask >> (low + 1);  // bit d-1 is the child at depth d
    const std::uint64_t keep = (std::uint64_t{1} << (w - 1)) - 1;
    if ((rest & ~keep) != 0) {
      if (mode == Truncation::Kill) {
        *absorbed += prob;
        return;
      }
      rest &= keep;
    }
    row[rest] += prob;
  }

  void descend(int j, std::uint64_t mask, double prob) const {
    if (j == static_cast<int>(q.size())) {
      leaf(mask, prob);
      return;
    }
    const double qj = q[static_cast<std::size_t>(j)];
    if (qj > 0.0) descend(j + 1, mask | (std::uint64_t{1} << j), prob * qj);
    if (qj < 1.0) descend(j + 1, mask, prob * (1.0 - qj));
  }
};

DistributionTable state_table(const TruncatedStateSpace& space, const std::vector<double>& v) {
  DistributionTable t{Support::AnchoredState, space.w, {}};
  for (std::size_t s = 0; s < v.size(); ++s) {
    if (v[s] > 0.0) t.probs[s] = v[s];
  }
  return t;
}

std::vector<double> dense(const Kernel& kernel, const DistributionTable& law) {
  if (law.support != Support::AnchoredState || law.width != kernel.space.w) {
    throw ContractViolation("law is not over the kernel's state space");
  }
  std::vector<double> v(kernel.size(), 0.0);
  for (const auto& [s, p] : law.probs) {
    if (s >= v.size()) throw ContractViolation("state index out of range");
    v[s] = p;
  }
  return v;
}

// u = v K, returns the surviving mass.
double multiply(const Kernel& kernel, const std::vector<double>& v, std::vector<double>& u) {
  const std::size_t n = kernel.size();
  u.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double vi = v[i];
    if (vi == 0.0) continue;
    const double* row = &kernel.matrix[i * n];
    for (std::size_t j = 0; j < n; ++j) u[j] += vi * row[j];
  }
  double mass = 0.0;
  for (const double x : u) mass += x;
  return mass;
}

double tv_dense(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return 0.5 * s;
}

}  // namespace

Kernel build_kernel(double p, const TruncatedStateSpace& space) {
  space.validate();
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("p must lie in [0,1]");
  const std::size_t n = space.size();
  Kernel k{space, p, std::vector<double>(n * n, 0.0), std::vector<double>(n, 0.0)};
  ChildEnumerator e{space.w, space.mode, n, std::vector<double>(static_cast<std::size_t>(space.w) + 1), nullptr,
                    nullptr};
  for (std::size_t s = 0; s < n; ++s) {
    const std::uint64_t parents = (static_cast<std::uint64_t>(s) << 1) | 1U;  // bit k: offset -2k
    for (int j = 0; j <= space.w; ++j) {
      const int feeders = static_cast<int>((parents >> j) & 1U) +
                          (j > 0 ? static_cast<int>((parents >> (j - 1)) & 1U) : 0);
      e.q[static_cast<std::size_t>(j)] = 1.0 - std::pow(1.0 - p, feeders);
    }
    e.row = &k.matrix[s * n];
    e.absorbed = &k.absorption[s];
    e.descend(0, 0, 1.0);
  }
  return k;
}

DistributionTable origin_law(const TruncatedStateSpace& space) {
  DistributionTable t{Support::AnchoredState, space.w, {}};
  t.probs[0] = 1.0;
  return t;
}

DistributionTable step_law(const Kernel& kernel, const DistributionTable& law, double* survival) {
  const auto v = dense(kernel, law);
  std::vector<double> u;
  const double mass = multiply(kernel, v, u);
  if (survival) *survival = mass;
  if (!(mass > 0.0)) throw NoData("the truncated chain is absorbed with probability one");
  for (auto& x : u) x /= mass;
  return state_table(kernel.space, u);
}

YaglomResult yaglom(const Kernel& kernel, double tol, int max_iter) {
  std::vector<double> v(kernel.size(), 0.0);
  v[0] = 1.0;
  std::vector<double> u;
  for (int it = 1; it <= max_iter; ++it) {
    const double mass = multiply(kernel, v, u);
    if (!(mass > 0.0)) {
      throw NumericalGuard("no quasi-stationary law: the truncated chain dies in one step");
    }
    for (auto& x : u) x /= mass;
    const double change = tv_dense(u, v);
    v.swap(u);
    if (change < tol) return {state_table(kernel.space, v), mass, it};
  }
  throw NumericalGuard("power iteration did not converge within " + std::to_string(max_iter) +
                       " iterations");
}

double fixed_point_residual(const Kernel& kernel, const DistributionTable& law) {
  return tv_distance(step_law(kernel, law), normalized(law));
}

std::vector<DistributionTable> conditional_laws(const Kernel& kernel, int levels) {
  if (levels < 0) throw ContractViolation("levels must be >= 0");
  std::vector<DistributionTable> out;
  out.reserve(static_cast<std::size_t>(levels) + 1);
  out.push_back(origin_law(kernel.space));
  for (int n = 1; n <= levels; ++n) out.push_back(step_law(kernel, out.back()));
  return out;
}

DistributionTable project_to_cylinder(const DistributionTable& states, int r) {
  if (states.support != Support::AnchoredState) throw ContractViolation("expected a law over anchored states");
  if (r < 1 || r > states.width - 1) {
    throw ConfigError("cylinder radius r=" + std::to_string(r) + " needs r < w (w=" +
                      std::to_string(states.width) + ")");
  }
  const std::uint64_t mask = (std::uint64_t{1} << r) - 1;
  DistributionTable t{Support::Cylinder, r, {}};
  for (const auto& [s, p] : states.probs) t.probs[s & mask] += p;
  return t;
}

DistributionTable restrict_depth(const DistributionTable& states, int w_small) {
  if (states.support != Support::AnchoredState) throw ContractViolation("expected a law over anchored states");
  if (w_small < 1 || w_small > states.width) throw ContractViolation("restrict_depth: bad target width");
  const std::uint64_t mask = (std::uint64_t{1} << (w_small - 1)) - 1;
  DistributionTable t{Support::AnchoredState, w_small, {}};
  for (const auto& [s, p] : states.probs) t.probs[s & mask] += p;
  return t;
}

ZetaSample sample_zeta(const SimParams& params, const InitialCondition& init, int n, int r,
                       std::int64_t trials, int threads) {
  params.validate();
  if (init.kind == InitialCondition::Kind::Full) {
    throw ConfigError("sample_zeta needs a finite initial set");
  }
  if (n < 0) throw ConfigError("n must be >= 0");
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (r < 1 || r > 63) throw ConfigError("cylinder radius must lie in 1..63");
  SimParams horizon = params;
  horizon.n_max = std::max(n, 1);
  const Window window = window_for(horizon);
  const BernoulliWord bonds(params.p);
  const LevelConfig start = initial_config(init, window);

  ZetaSample total;
  total.trials = trials;
  auto trial = [&](std::int64_t t, ZetaSample& acc) {
    LevelConfig config = start;
    for (int k = 0; k < n && !config.empty(); ++k) {
      config = step_forward(config, generate_layer(bonds, window, k, trial_layer_key(params.seed, t, k)));
      if (config.lost_left || config.lost_right) {
        throw WindowOverflow("occupied site left the window at level " + std::to_string(k + 1) +
                             "; increase --window");
      }
    }
    if (config.empty()) return;
    ++acc.survivors;
    acc.patterns.add(project(anchor(config), r).bits);
  };
  auto merge = [](ZetaSample& into, const ZetaSample& part) {
    into.survivors += part.survivors;
    into.patterns.merge(part.patterns);
  };
  return run_trials(trials, threads, std::move(total), trial, merge);
}

std::vector<std::int64_t> survival_counts(const SimParams& params, const InitialCondition& init,
                                          std::int64_t trials, int threads) {
  params.validate();
  if (init.kind == InitialCondition::Kind::Full) {
    throw ConfigError("survival needs a finite initial set");
  }
  if (trials < 1) throw ConfigError("trials must be >= 1");
  const Window window = window_for(params);
  const BernoulliWord bonds(params.p);
  const LevelConfig start = initial_config(init, window);
  using Hist = std::vector<std::int64_t>;
  const auto levels = static_cast<std::size_t>(params.n_max) + 1;
  // hist[k]: trials whose last nonempty level is k.
  const Hist hist = run_trials(
      trials, threads, Hist(levels, 0),
      [&](std::int64_t t, Hist& acc) {
        LevelConfig c = start;
        int k = 0;
        for (; k < params.n_max; ++k) {
          LevelConfig next =
              step_forward(c, generate_layer(bonds, window, k, trial_layer_key(params.seed, t, k)));
          if (next.lost_left || next.lost_right) {
            throw WindowOverflow("occupied site left the window at level " + std::to_string(k + 1) +
                                 "; increase --window");
          }
          if (next.empty()) break;
          c = std::move(next);
        }
        ++acc[static_cast<std::size_t>(k)];
      },
      [](Hist& into, const Hist& part) {
        for (std::size_t i = 0; i < into.size(); ++i) into[i] += part[i];
      });
  Hist alive(levels, 0);
  std::int64_t remaining = trials;
  for (std::size_t n = 0; n < levels; ++n) {
    alive[n] = remaining;
    remaining -= hist[n];
  }
  return alive;
}

ConditionalLaw conditional_law_mc(const SimParams& params, int n, int r, std::int64_t trials,
                                  int threads) {
  if (params.p <= 0.45 && n > 40) {
    throw NumericalGuard("rejection conditioning is capped at n <= 40 for p <= 0.45");
  }
  ConditionalLaw out;
  out.sample = sample_zeta(params, InitialCondition::origin(), n, r, trials, threads);
  if (out.sample.survivors == 0) {
    throw NoData("no trial survived to level " + std::to_string(n));
  }
  out.law = to_distribution(out.sample.patterns, Support::Cylinder, r);
  return out;
}

}  // namespace rightmost
