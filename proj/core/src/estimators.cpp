#include "rightmost/estimators.hpp"

#include <cmath>
#include <vector>

#include "rightmost/errors.hpp"

namespace rightmost {

double DistributionTable::total() const {
  double s = 0.0;
  for (const auto& [key, p] : probs) s += p;
  return s;
}

double tv_distance(const DistributionTable& a, const DistributionTable& b) {
  if (a.support != b.support || a.width != b.width) {
    throw ContractViolation("tv_distance: tables use different support encodings");
  }
  double sum = 0.0;
  auto ia = a.probs.begin();
  auto ib = b.probs.begin();
  while (ia != a.probs.end() || ib != b.probs.end()) {
    if (ib == b.probs.end() || (ia != a.probs.end() && ia->first < ib->first)) {
      sum += std::abs(ia->second);
      ++ia;
    } else if (ia == a.probs.end() || ib->first < ia->first) {
      sum += std::abs(ib->second);
      ++ib;
    } else {
      sum += std::abs(ia->second - ib->second);
      ++ia;
      ++ib;
    }
  }
  return 0.5 * sum;
}

DistributionTable normalized(DistributionTable table) {
  const double mass = table.total();
  if (!(mass > 0.0)) throw NoData("cannot normalize a table of zero mass");
  for (auto& [key, p] : table.probs) p /= mass;
  return table;
}

void Counter::merge(const Counter& other) {
  for (const auto& [key, n] : other.counts) counts[key] += n;
  total += other.total;
}

DistributionTable to_distribution(const Counter& counter, Support support, int width) {
  if (counter.total <= 0) throw NoData("empty counter");
  DistributionTable t{support, width, {}};
  const auto total = static_cast<double>(counter.total);
  for (const auto& [key, n] : counter.counts) {
    if (n > 0) t.probs[key] = static_cast<double>(n) / total;
  }
  return t;
}

Interval wilson_ci(std::int64_t count, std::int64_t total, double z) {
  if (total <= 0 || count < 0 || count > total) {
    throw ContractViolation("wilson_ci: need 0 <= count <= total and total > 0");
  }
  const double n = static_cast<double>(total);
  const double phat = static_cast<double>(count) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (phat + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
  Interval ci{std::max(0.0, centre - half), std::min(1.0, centre + half)};
  if (count == 0) ci.low = 0.0;
  if (count == total) ci.high = 1.0;
  return ci;
}

DecayFit fit_log_linear(std::span<const DecayPoint> points, std::int64_t min_count) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& pt : points) {
    if (pt.count >= min_count && pt.p_hat > 0.0) {
      xs.push_back(pt.x);
      ys.push_back(std::log(pt.p_hat));
    }
  }
  if (xs.size() < 3) throw NoData("fit_log_linear: fewer than 3 points with enough counts");

  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx <= 0.0) throw NoData("fit_log_linear: all eligible points share one x");

  DecayFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
    sse += e * e;
  }
  // A constant series has nothing to explain; call it a perfect fit.
  fit.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  fit.slope_se = std::sqrt(sse / (n - 2.0) / sxx);
  fit.x_min = xs.front();
  fit.x_max = xs.back();
  fit.points = static_cast<int>(xs.size());
  return fit;
}

}  // namespace rightmost
