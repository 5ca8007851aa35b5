#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "citefair/model.hpp"

namespace citefair::stats {

// Hypergeometric -------------------------------------------------------------

/// Population of N items, K of them successes, n drawn without replacement.
struct HypergeomParams {
  std::int64_t population = 0;  // N
  std::int64_t successes = 0;    // K
  std::int64_t draws = 0;        // n

  /// Throws std::invalid_argument unless 0 <= K <= N and 0 <= n <= N.
  void check() const;
  [[nodiscard]] std::int64_t support_min() const;
  [[nodiscard]] std::int64_t support_max() const;
};

/// C(K,m) C(N-K,n-m) / C(N,n), evaluated through extended-precision log-gamma.
/// Zero outside the support.
[[nodiscard]] double hypergeom_pmf(std::int64_t m, const HypergeomParams& p);

/// pmf over the whole support, index 0 = support_min().
[[nodiscard]] std::vector<double> hypergeom_pmf_support(const HypergeomParams& p);

struct CountInterval {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  double coverage = 0.0;  // P(lo <= m <= hi)

  [[nodiscard]] bool contains(std::int64_t m) const { return lo <= m && m <= hi; }
};

/// Equal-tail interval on the count: lo is the smallest m with CDF(m) > a,
/// hi the smallest m with P(M > m) <= a, where a = (1 - level) / 2.
[[nodiscard]] CountInterval hypergeom_ci(const HypergeomParams& p, double level);

// Top-z% extraction ----------------------------------------------------------

struct TopFraction {
  std::vector<std::string> selected;  // rank order
  std::size_t n_z = 0;                // floor(z * population / 100)
  std::size_t population = 0;         // DEFINED values
};

/// Selects the first floor(zN/100) journals in rank order (value desc, id asc).
/// Throws std::invalid_argument when z is outside (0, 100], there are no
/// DEFINED values, or n_z would be 0.
[[nodiscard]] TopFraction top_fraction(const IndicatorTable& table, double z);

/// floor(z * population / 100), robust to representation error in z.
[[nodiscard]] std::size_t top_count(double z, std::size_t population);

// Variance decomposition -----------------------------------------------------

struct GroupMean {
  std::string cluster_id;
  double mean = 0.0;
  std::size_t count = 0;
};

struct VarianceDecomposition {
  double ss_total = 0.0;
  double ss_between = 0.0;
  double ss_within = 0.0;
  double grand_mean = 0.0;
  std::vector<GroupMean> group_means;  // clusters with at least one value
  std::optional<double> eta_squared;   // ss_between / ss_total; nullopt when ss_total == 0
};

/// values[i] belongs to group labels[i] (index into group_ids).
[[nodiscard]] VarianceDecomposition variance_decomposition(std::span<const double> values,
                                                           std::span<const std::size_t> labels,
                                                           const std::vector<std::string>& group_ids);

/// DEFINED values of a table grouped by the partition.
[[nodiscard]] VarianceDecomposition variance_decomposition(const IndicatorTable& table, const Partition& partition);

// Correlation ----------------------------------------------------------------

/// Sample Pearson r. nullopt when either variable is constant; throws
/// std::invalid_argument with fewer than two pairs or mismatched lengths.
[[nodiscard]] std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

/// Pairwise deletion: pairs with any UNDEFINED side are dropped first.
[[nodiscard]] std::optional<double> pearson(std::span<const std::optional<double>> x,
                                            std::span<const std::optional<double>> y);

/// Ranks 1..n, ties receive the mean of the ranks they span.
[[nodiscard]] std::vector<double> average_ranks(std::span<const double> x);

/// Pearson correlation of average ranks.
[[nodiscard]] std::optional<double> spearman(std::span<const double> x, std::span<const double> y);
[[nodiscard]] std::optional<double> spearman(std::span<const std::optional<double>> x,
                                             std::span<const std::optional<double>> y);

/// Tables joined on journal id, keeping journals DEFINED in both.
struct PairedValues {
  std::vector<std::string> journal_ids;
  std::vector<double> x;
  std::vector<double> y;
};
[[nodiscard]] PairedValues pair_tables(const IndicatorTable& x, const IndicatorTable& y);

[[nodiscard]] std::optional<double> pearson(const IndicatorTable& x, const IndicatorTable& y);
[[nodiscard]] std::optional<double> spearman(const IndicatorTable& x, const IndicatorTable& y);

// Deciles --------------------------------------------------------------------

/// Sizes of k contiguous bins over n items; the remainder goes one each to
/// the leading (top) bins.
[[nodiscard]] std::vector<std::size_t> bin_sizes(std::size_t n, std::size_t k);

struct DecileBin {
  std::size_t index = 0;  // 0 = top bin (highest baseline values)
  std::size_t size = 0;
  double baseline_max = 0.0;
  double baseline_min = 0.0;
  std::optional<double> rho;  // nullopt when a variable is constant in the bin
};

/// Sorts the shared support by baseline (value desc, id asc), splits it into
/// k bins and reports Spearman's rho inside each bin. Throws
/// std::invalid_argument if k < 2 or the shared support is smaller than k.
[[nodiscard]] std::vector<DecileBin> decile_correlations(const IndicatorTable& baseline,
                                                         const IndicatorTable& other, std::size_t k);

// Empirical distributions ----------------------------------------------------

struct EcdfPoint {
  double value = 0.0;
  double fraction = 0.0;

  bool operator==(const EcdfPoint&) const = default;
};

/// Right-continuous step points: one per distinct value, ascending.
[[nodiscard]] std::vector<EcdfPoint> ecdf(std::span<const double> values);

struct GroupEcdf {
  std::string cluster_id;
  std::vector<EcdfPoint> points;
};

[[nodiscard]] std::vector<GroupEcdf> ecdf_by_group(const IndicatorTable& table, const Partition& partition);

/// sup |F_a - F_b| over the pooled support. Both samples must be nonempty.
[[nodiscard]] double ks_two_sample(std::span<const double> a, std::span<const double> b);

/// DEFINED values of the table per cluster, in partition order.
[[nodiscard]] std::vector<std::vector<double>> values_by_group(const IndicatorTable& table,
                                                               const Partition& partition);

}  // namespace citefair::stats
