#include "citefair/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include <fmt/format.h>

#include "citefair/error.hpp"

namespace citefair::stats {

namespace {

long double log_choose(std::int64_t n, std::int64_t k) {
  return std::lgamma(static_cast<long double>(n) + 1.0L) - std::lgamma(static_cast<long double>(k) + 1.0L) -
         std::lgamma(static_cast<long double>(n - k) + 1.0L);
}

}  // namespace

void HypergeomParams::check() const {
  if (population < 0 || successes < 0 || draws < 0 || successes > population || draws > population) {
    throw std::invalid_argument(
        fmt::format("invalid hypergeometric parameters N={} K={} n={}", population, successes, draws));
  }
}

std::int64_t HypergeomParams::support_min() const {
  return std::max<std::int64_t>(0, draws + successes - population);
}

std::int64_t HypergeomParams::support_max() const { return std::min(draws, successes); }

double hypergeom_pmf(std::int64_t m, const HypergeomParams& p) {
  p.check();
  if (m < p.support_min() || m > p.support_max()) return 0.0;
  const long double log_p = log_choose(p.successes, m) + log_choose(p.population - p.successes, p.draws - m) -
                            log_choose(p.population, p.draws);
  return static_cast<double>(std::exp(log_p));
}

std::vector<double> hypergeom_pmf_support(const HypergeomParams& p) {
  p.check();
  const auto lo = p.support_min();
  const auto hi = p.support_max();
  const long double log_total = log_choose(p.population, p.draws);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (auto m = lo; m <= hi; ++m) {
    const long double log_p =
        log_choose(p.successes, m) + log_choose(p.population - p.successes, p.draws - m) - log_total;
    out.push_back(static_cast<double>(std::exp(log_p)));
  }
  return out;
}

CountInterval hypergeom_ci(const HypergeomParams& p, double level) {
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("confidence level must lie in (0, 1)");
  const auto pmf = hypergeom_pmf_support(p);
  const auto base = p.support_min();
  const double tail = (1.0 - level) / 2.0;
  const auto last = static_cast<std::int64_t>(pmf.size()) - 1;

  std::int64_t lo = last;
  double cdf = 0.0;
  for (std::int64_t i = 0; i <= last; ++i) {
    cdf += pmf[static_cast<std::size_t>(i)];
    if (cdf > tail) {
      lo = i;
      break;
    }
  }
  std::int64_t hi = last;
  double upper = 0.0;
  for (std::int64_t i = last; i > 0; --i) {
    if (upper + pmf[static_cast<std::size_t>(i)] > tail) break;
    upper += pmf[static_cast<std::size_t>(i)];
    hi = i - 1;
  }
  double coverage = 0.0;
  for (auto i = lo; i <= hi; ++i) coverage += pmf[static_cast<std::size_t>(i)];
  return {base + lo, base + hi, coverage};
}

std::size_t top_count(double z, std::size_t population) {
  const long double q = static_cast<long double>(z) * static_cast<long double>(population) / 100.0L;
  const long double r = std::round(q);
  if (std::fabs(q - r) <= 1e-9L * std::max(1.0L, q)) return static_cast<std::size_t>(r);
  return static_cast<std::size_t>(std::floor(q));
}

TopFraction top_fraction(const IndicatorTable& table, double z) {
  if (!(z > 0.0 && z <= 100.0)) throw std::invalid_argument(fmt::format("z = {} is outside (0, 100]", z));
  std::vector<const IndicatorEntry*> defined;
  defined.reserve(table.entries.size());
  for (const auto& e : table.entries) {
    if (e.value) defined.push_back(&e);
  }
  if (defined.empty()) throw std::invalid_argument(fmt::format("table '{}' has no defined values", table.indicator_id));
  TopFraction out;
  out.population = defined.size();
  out.n_z = top_count(z, defined.size());
  if (out.n_z == 0) {
    throw std::invalid_argument(
        fmt::format("top {}% of {} journals selects nothing; fraction too small", z, defined.size()));
  }
  const auto mid = defined.begin() + static_cast<std::ptrdiff_t>(out.n_z);
  std::partial_sort(defined.begin(), mid, defined.end(), [](const IndicatorEntry* a, const IndicatorEntry* b) {
    if (*a->value != *b->value) return *a->value > *b->value;
    return a->journal_id < b->journal_id;
  });
  out.selected.reserve(out.n_z);
  for (auto it = defined.begin(); it != mid; ++it) out.selected.push_back((*it)->journal_id);
  return out;
}

VarianceDecomposition variance_decomposition(std::span<const double> values, std::span<const std::size_t> labels,
                                             const std::vector<std::string>& group_ids) {
  if (values.size() != labels.size()) throw std::invalid_argument("values and labels differ in length");
  if (values.empty()) throw std::invalid_argument("variance decomposition of an empty sample");
  const std::size_t g = group_ids.size();
  std::vector<double> sums(g, 0.0);
  std::vector<std::size_t> counts(g, 0);
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (labels[i] >= g) throw std::invalid_argument("group label out of range");
    sums[labels[i]] += values[i];
    ++counts[labels[i]];
    total += values[i];
  }
  VarianceDecomposition out;
  out.grand_mean = total / static_cast<double>(values.size());
  std::vector<double> means(g, 0.0);
  for (std::size_t j = 0; j < g; ++j) {
    if (counts[j] == 0) continue;
    means[j] = sums[j] / static_cast<double>(counts[j]);
    out.group_means.push_back({group_ids[j], means[j], counts[j]});
    const double d = means[j] - out.grand_mean;
    out.ss_between += static_cast<double>(counts[j]) * d * d;
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double dt = values[i] - out.grand_mean;
    const double dw = values[i] - means[labels[i]];
    out.ss_total += dt * dt;
    out.ss_within += dw * dw;
  }
  if (out.ss_total > 0.0) out.eta_squared = out.ss_between / out.ss_total;
  return out;
}

VarianceDecomposition variance_decomposition(const IndicatorTable& table, const Partition& partition) {
  std::vector<double> values;
  std::vector<std::size_t> labels;
  for (const auto& e : table.entries) {
    if (!e.value) continue;
    const auto g = partition.cluster_of(e.journal_id);
    if (!g) throw Error(fmt::format("journal '{}' has no cluster", e.journal_id));
    values.push_back(*e.value);
    labels.push_back(*g);
  }
  std::vector<std::string> ids;
  for (const auto& c : partition.clusters()) ids.push_back(c.cluster_id);
  return variance_decomposition(values, labels, ids);
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson: samples differ in length");
  if (x.size() < 2) throw std::invalid_argument("pearson: fewer than two pairs");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

namespace {

void drop_undefined(std::span<const std::optional<double>> x, std::span<const std::optional<double>> y,
                    std::vector<double>& xs, std::vector<double>& ys) {
  if (x.size() != y.size()) throw std::invalid_argument("samples differ in length");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] && y[i]) {
      xs.push_back(*x[i]);
      ys.push_back(*y[i]);
    }
  }
}

}  // namespace

std::optional<double> pearson(std::span<const std::optional<double>> x, std::span<const std::optional<double>> y) {
  std::vector<double> xs;
  std::vector<double> ys;
  drop_undefined(x, y, xs, ys);
  return pearson(std::span<const double>(xs), std::span<const double>(ys));
}

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && x[order[j]] == x[order[i]]) ++j;
    const double r = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = r;
    i = j;
  }
  return ranks;
}

std::optional<double> spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("spearman: samples differ in length");
  if (x.size() < 2) throw std::invalid_argument("spearman: fewer than two pairs");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(std::span<const double>(rx), std::span<const double>(ry));
}

std::optional<double> spearman(std::span<const std::optional<double>> x, std::span<const std::optional<double>> y) {
  std::vector<double> xs;
  std::vector<double> ys;
  drop_undefined(x, y, xs, ys);
  return spearman(std::span<const double>(xs), std::span<const double>(ys));
}

PairedValues pair_tables(const IndicatorTable& x, const IndicatorTable& y) {
  std::unordered_map<std::string, double> yv;
  yv.reserve(y.entries.size());
  for (const auto& e : y.entries) {
    if (e.value) yv.emplace(e.journal_id, *e.value);
  }
  PairedValues out;
  for (const auto& e : x.entries) {
    if (!e.value) continue;
    auto it = yv.find(e.journal_id);
    if (it == yv.end()) continue;
    out.journal_ids.push_back(e.journal_id);
    out.x.push_back(*e.value);
    out.y.push_back(it->second);
  }
  return out;
}

std::optional<double> pearson(const IndicatorTable& x, const IndicatorTable& y) {
  const auto p = pair_tables(x, y);
  return pearson(std::span<const double>(p.x), std::span<const double>(p.y));
}

std::optional<double> spearman(const IndicatorTable& x, const IndicatorTable& y) {
  const auto p = pair_tables(x, y);
  return spearman(std::span<const double>(p.x), std::span<const double>(p.y));
}

std::vector<std::size_t> bin_sizes(std::size_t n, std::size_t k) {
  if (k == 0) throw std::invalid_argument("bin count must be positive");
  std::vector<std::size_t> sizes(k, n / k);
  for (std::size_t i = 0; i < n % k; ++i) ++sizes[i];
  return sizes;
}

std::vector<DecileBin> decile_correlations(const IndicatorTable& baseline, const IndicatorTable& other,
                                           std::size_t k) {
  if (k < 2) throw std::invalid_argument("decile correlations need k >= 2");
  const auto p = pair_tables(baseline, other);
  const std::size_t n = p.x.size();
  if (n < k) {
    throw std::invalid_argument(fmt::format("shared support of {} journals is smaller than k = {}", n, k));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (p.x[a] != p.x[b]) return p.x[a] > p.x[b];
    return p.journal_ids[a] < p.journal_ids[b];
  });
  std::vector<DecileBin> out;
  std::size_t start = 0;
  const auto sizes = bin_sizes(n, k);
  for (std::size_t b = 0; b < k; ++b) {
    DecileBin bin;
    bin.index = b;
    bin.size = sizes[b];
    std::vector<double> bx;
    std::vector<double> by;
    for (std::size_t i = start; i < start + sizes[b]; ++i) {
      bx.push_back(p.x[order[i]]);
      by.push_back(p.y[order[i]]);
    }
    if (!bx.empty()) {
      bin.baseline_max = bx.front();
      bin.baseline_min = bx.back();
    }
    if (bx.size() >= 2) bin.rho = spearman(std::span<const double>(bx), std::span<const double>(by));
    out.push_back(bin);
    start += sizes[b];
  }
  return out;
}

std::vector<EcdfPoint> ecdf(std::span<const double> values) {
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  std::vector<EcdfPoint> out;
  const double n = static_cast<double>(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i + 1 < v.size() && v[i + 1] == v[i]) continue;
    out.push_back({v[i], static_cast<double>(i + 1) / n});
  }
  return out;
}

std::vector<std::vector<double>> values_by_group(const IndicatorTable& table, const Partition& partition) {
  std::vector<std::vector<double>> groups(partition.clusters().size());
  for (const auto& e : table.entries) {
    if (!e.value) continue;
    const auto g = partition.cluster_of(e.journal_id);
    if (!g) throw Error(fmt::format("journal '{}' has no cluster", e.journal_id));
    groups[*g].push_back(*e.value);
  }
  return groups;
}

std::vector<GroupEcdf> ecdf_by_group(const IndicatorTable& table, const Partition& partition) {
  const auto groups = values_by_group(table, partition);
  std::vector<GroupEcdf> out;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    out.push_back({partition.clusters()[g].cluster_id, ecdf(groups[g])});
  }
  return out;
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() || j < y.size()) {
    double v;
    if (j == y.size() || (i < x.size() && x[i] <= y[j])) {
      v = x[i];
    } else {
      v = y[j];
    }
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return d;
}

}  // namespace citefair::stats
