#include "citefair/fairness.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <stdexcept>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "citefair/error.hpp"
#include "citefair/tabular.hpp"

namespace citefair {

PercentSummary summarize_percentages(std::span<const double> pct, double z) {
  if (pct.empty()) throw std::invalid_argument("no cluster percentages to summarize");
  PercentSummary s;
  double sum = 0.0;
  for (double p : pct) {
    sum += p;
    s.sum_abs_dev += std::fabs(p - z);
  }
  s.mean_pct = sum / static_cast<double>(pct.size());
  if (pct.size() > 1) {
    double ss = 0.0;
    for (double p : pct) ss += (p - s.mean_pct) * (p - s.mean_pct);
    s.sd_pct = std::sqrt(ss / static_cast<double>(pct.size() - 1));
  }
  return s;
}

FairnessReport fairness_test(const IndicatorTable& table, const Partition& partition, double z, double ci_level) {
  if (!(ci_level > 0.0 && ci_level < 1.0)) throw std::invalid_argument("confidence level must lie in (0, 1)");
  const auto& clusters = partition.clusters();
  std::vector<std::size_t> sizes(clusters.size(), 0);
  for (const auto& e : table.entries) {
    if (!e.value) continue;
    const auto g = partition.cluster_of(e.journal_id);
    if (!g) throw Error(fmt::format("journal '{}' has no cluster", e.journal_id));
    ++sizes[*g];
  }
  for (std::size_t g = 0; g < clusters.size(); ++g) {
    if (sizes[g] == 0) {
      throw Error(fmt::format("cluster '{}' ({}) has no defined values in '{}'", clusters[g].cluster_id,
                              clusters[g].name, table.indicator_id));
    }
  }

  const auto top = stats::top_fraction(table, z);
  std::vector<std::size_t> members(clusters.size(), 0);
  for (const auto& id : top.selected) ++members[*partition.cluster_of(id)];

  FairnessReport report;
  report.indicator_id = table.indicator_id;
  report.z = z;
  report.ci_level = ci_level;
  report.n_z = top.n_z;
  report.population = top.population;
  report.all_within_ci = true;
  std::vector<double> pct;
  for (std::size_t g = 0; g < clusters.size(); ++g) {
    ClusterFairness c;
    c.cluster_id = clusters[g].cluster_id;
    c.name = clusters[g].name;
    c.size = sizes[g];
    c.members = members[g];
    const double n_g = static_cast<double>(sizes[g]);
    c.pct = 100.0 * static_cast<double>(c.members) / n_g;
    c.expected_pct = z;
    c.ci = stats::hypergeom_ci({static_cast<std::int64_t>(top.population), static_cast<std::int64_t>(sizes[g]),
                                static_cast<std::int64_t>(top.n_z)},
                               ci_level);
    c.ci_lo_pct = 100.0 * static_cast<double>(c.ci.lo) / n_g;
    c.ci_hi_pct = 100.0 * static_cast<double>(c.ci.hi) / n_g;
    c.within_ci = c.ci.contains(static_cast<std::int64_t>(c.members));
    report.all_within_ci = report.all_within_ci && c.within_ci;
    pct.push_back(c.pct);
    report.clusters.push_back(std::move(c));
  }
  report.summary = summarize_percentages(pct, z);
  return report;
}

std::string_view to_string(Preference p) {
  switch (p) {
    case Preference::first: return "first";
    case Preference::second: return "second";
    case Preference::tie: return "tie";
    case Preference::mixed: return "mixed";
  }
  return "mixed";
}

namespace {

Preference smaller_is_better(double a, double b) {
  constexpr double kTolerance = 1e-9;
  if (std::fabs(a - b) <= kTolerance) return Preference::tie;
  return a < b ? Preference::first : Preference::second;
}

}  // namespace

ReportComparison compare_reports(const FairnessReport& a, const FairnessReport& b) {
  if (a.z != b.z) throw std::invalid_argument("reports use different z");
  if (a.clusters.size() != b.clusters.size()) throw std::invalid_argument("reports use different partitions");
  for (std::size_t i = 0; i < a.clusters.size(); ++i) {
    if (a.clusters[i].cluster_id != b.clusters[i].cluster_id) {
      throw std::invalid_argument("reports use different partitions");
    }
  }
  ReportComparison cmp;
  cmp.sum_abs_dev = smaller_is_better(a.summary.sum_abs_dev, b.summary.sum_abs_dev);
  cmp.sd_pct = smaller_is_better(a.summary.sd_pct, b.summary.sd_pct);

  bool a_only = false;
  bool b_only = false;
  for (std::size_t i = 0; i < a.clusters.size(); ++i) {
    a_only = a_only || (a.clusters[i].within_ci && !b.clusters[i].within_ci);
    b_only = b_only || (b.clusters[i].within_ci && !a.clusters[i].within_ci);
  }
  cmp.ci_membership = a_only && b_only ? Preference::mixed
                      : a_only         ? Preference::first
                      : b_only         ? Preference::second
                                       : Preference::tie;

  int firsts = 0;
  int seconds = 0;
  bool mixed = false;
  for (auto p : {cmp.sum_abs_dev, cmp.sd_pct, cmp.ci_membership}) {
    firsts += p == Preference::first;
    seconds += p == Preference::second;
    mixed = mixed || p == Preference::mixed;
  }
  if (mixed || (firsts > 0 && seconds > 0)) {
    cmp.overall = Preference::mixed;
  } else if (firsts > 0) {
    cmp.overall = Preference::first;
  } else if (seconds > 0) {
    cmp.overall = Preference::second;
  } else {
    cmp.overall = Preference::tie;
  }
  return cmp;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

CalibrationResult calibration(std::span<const std::size_t> group_sizes, std::size_t trials, double z,
                              double ci_level, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("calibration needs at least one trial");
  if (group_sizes.empty()) throw std::invalid_argument("calibration needs at least one group");

  std::vector<Cluster> clusters;
  std::vector<JournalRecord> journals;
  IndicatorTable table;
  table.indicator_id = "uniform";
  for (std::size_t g = 0; g < group_sizes.size(); ++g) {
    if (group_sizes[g] == 0) throw std::invalid_argument("calibration group sizes must be positive");
    const std::string cid = fmt::format("g{}", g + 1);
    clusters.push_back({cid, cid, group_sizes[g]});
    for (std::size_t k = 0; k < group_sizes[g]; ++k) {
      journals.push_back({fmt::format("j{:06d}", journals.size()), "", cid});
      table.entries.push_back({journals.back().journal_id, 0.0});
    }
  }
  const Partition partition(clusters, journals);

  CalibrationResult result;
  result.group_sizes.assign(group_sizes.begin(), group_sizes.end());
  result.trials = trials;
  std::vector<std::size_t> hits(group_sizes.size(), 0);
  for (std::size_t t = 0; t < trials; ++t) {
    std::mt19937_64 rng(splitmix64(seed ^ splitmix64(t)));
    for (auto& e : table.entries) e.value = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    const auto report = fairness_test(table, partition, z, ci_level);
    for (std::size_t g = 0; g < hits.size(); ++g) hits[g] += report.clusters[g].within_ci ? 1 : 0;
    if (t == 0) {
      for (const auto& c : report.clusters) result.exact_coverage.push_back(c.ci.coverage);
    }
  }
  for (auto h : hits) result.coverage.push_back(static_cast<double>(h) / static_cast<double>(trials));
  return result;
}

namespace {

std::string pct2(double v) { return fmt::format("{:.2f}", v); }

std::string z_label(double z) { return fmt::format("Σ|x−{}|", z); }

}  // namespace

void write_report_tsv(const FairnessReport& r, const std::filesystem::path& path) {
  TabularWriter w(path, '\t');
  w.raw_line(fmt::format("# indicator_id={} z={} ci_level={} n_z={} population={}", r.indicator_id, r.z, r.ci_level,
                         r.n_z, r.population));
  w.row({"cluster_id", "cluster", "N_g", "m_g", "pct", "ci_lo", "ci_hi", "ci_lo_pct", "ci_hi_pct", "within_ci"});
  for (const auto& c : r.clusters) {
    w.row({c.cluster_id, c.name, std::to_string(c.size), std::to_string(c.members), pct2(c.pct),
           std::to_string(c.ci.lo), std::to_string(c.ci.hi), pct2(c.ci_lo_pct), pct2(c.ci_hi_pct),
           c.within_ci ? "yes" : "no"});
  }
  w.row({"Mean (± st.dev.)", "", "", "",
         fmt::format("{:.2f} (± {:.2f})", r.summary.mean_pct, r.summary.sd_pct), "", "", "", "",
         r.all_within_ci ? "yes" : "no"});
  w.row({z_label(r.z), "", "", "", pct2(r.summary.sum_abs_dev), "", "", "", "", ""});
  w.close();
}

void write_report_json(const FairnessReport& r, const std::filesystem::path& path) {
  nlohmann::json j;
  j["indicator_id"] = r.indicator_id;
  j["z"] = r.z;
  j["ci_level"] = r.ci_level;
  j["n_z"] = r.n_z;
  j["population"] = r.population;
  j["all_within_ci"] = r.all_within_ci;
  j["summary"] = {{"mean_pct", r.summary.mean_pct},
                  {"sd_pct", r.summary.sd_pct},
                  {"sum_abs_dev", r.summary.sum_abs_dev}};
  auto& rows = j["per_cluster"] = nlohmann::json::array();
  for (const auto& c : r.clusters) {
    rows.push_back({{"cluster_id", c.cluster_id},
                    {"name", c.name},
                    {"N_g", c.size},
                    {"m_g", c.members},
                    {"pct", c.pct},
                    {"expected_pct", c.expected_pct},
                    {"ci_counts", {c.ci.lo, c.ci.hi}},
                    {"ci_pct", {c.ci_lo_pct, c.ci_hi_pct}},
                    {"ci_coverage", c.ci.coverage},
                    {"within_ci", c.within_ci}});
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << j.dump(2) << '\n';
  if (!out) throw Error(fmt::format("{}: write failed", path.string()));
}

std::string format_report(const FairnessReport& r) {
  std::string s = fmt::format("{}: top {}% = {} of {} journals, {:.0f}% intervals\n", r.indicator_id, r.z, r.n_z,
                              r.population, 100.0 * r.ci_level);
  s += fmt::format("{:<28} {:>6} {:>5} {:>7}  {:>15}  {}\n", "cluster", "N_g", "m_g", "pct", "interval", "fair");
  for (const auto& c : r.clusters) {
    s += fmt::format("{:<28} {:>6} {:>5} {:>7.2f}  [{:>5.2f}, {:>5.2f}]  {}\n", c.cluster_id + ". " + c.name, c.size,
                     c.members, c.pct, c.ci_lo_pct, c.ci_hi_pct, c.within_ci ? "yes" : "no");
  }
  s += fmt::format("{:<28} {:.2f} (± {:.2f})\n", "Mean (± st.dev.)", r.summary.mean_pct, r.summary.sd_pct);
  s += fmt::format("{:<28} {:.2f}\n", z_label(r.z), r.summary.sum_abs_dev);
  return s;
}

void write_comparison_tsv(const FairnessReport& a, const FairnessReport& b, const ReportComparison& cmp,
                          const std::filesystem::path& path) {
  TabularWriter w(path, '\t');
  w.row({"cluster_id", "cluster", a.indicator_id, b.indicator_id});
  for (std::size_t i = 0; i < a.clusters.size(); ++i) {
    w.row({a.clusters[i].cluster_id, a.clusters[i].name, pct2(a.clusters[i].pct), pct2(b.clusters[i].pct)});
  }
  w.row({"Mean (± st.dev.)", "", fmt::format("{:.2f} (± {:.2f})", a.summary.mean_pct, a.summary.sd_pct),
         fmt::format("{:.2f} (± {:.2f})", b.summary.mean_pct, b.summary.sd_pct)});
  w.row({z_label(a.z), "", pct2(a.summary.sum_abs_dev), pct2(b.summary.sum_abs_dev)});
  w.row({"All within CI", "", a.all_within_ci ? "yes" : "no", b.all_within_ci ? "yes" : "no"});
  const auto name = [&](Preference p) -> std::string {
    switch (p) {
      case Preference::first: return a.indicator_id;
      case Preference::second: return b.indicator_id;
      default: return std::string(to_string(p));
    }
  };
  w.row({"preferred: sum_abs_dev", "", name(cmp.sum_abs_dev), ""});
  w.row({"preferred: sd_pct", "", name(cmp.sd_pct), ""});
  w.row({"preferred: ci_membership", "", name(cmp.ci_membership), ""});
  w.row({"preferred: overall", "", name(cmp.overall), ""});
  w.close();
}

}  // namespace citefair
