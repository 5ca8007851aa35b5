#include "citefair/indicators.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <fmt/format.h>

#include "citefair/error.hpp"
#include "citefair/tabular.hpp"

namespace citefair {

void IndicatorSpec::check() const {
  switch (kind) {
    case IndicatorKind::impact_factor:
    case IndicatorKind::numerator_only:
      if (window == Window::all_prior) {
        throw std::invalid_argument(fmt::format("{} needs a 2 or 5 year window", to_string(kind)));
      }
      return;
    case IndicatorKind::total_cites:
    case IndicatorKind::cp_ratio:
      if (window != Window::all_prior) {
        throw std::invalid_argument(fmt::format("{} counts all prior years; window must be 'all'", to_string(kind)));
      }
      return;
    case IndicatorKind::external:
      throw std::invalid_argument("external indicators are read from files, not computed");
  }
}

std::string IndicatorSpec::id() const {
  const char* c = counting == Counting::integer ? "IC" : "FC";
  const int w = static_cast<int>(window);
  switch (kind) {
    case IndicatorKind::impact_factor: return fmt::format("IF{}-{}", w, c);
    case IndicatorKind::numerator_only: return fmt::format("TC-{}{}", c, w);
    case IndicatorKind::total_cites: return fmt::format("TC-{}", c);
    case IndicatorKind::cp_ratio: return fmt::format("CP-{}", c);
    case IndicatorKind::external: return "EXT";
  }
  return "EXT";
}

std::vector<IndicatorSpec> indicator_catalog() {
  std::vector<IndicatorSpec> out;
  for (auto counting : {Counting::integer, Counting::fractional}) {
    out.push_back({IndicatorKind::impact_factor, Window::two, counting});
    out.push_back({IndicatorKind::impact_factor, Window::five, counting});
    out.push_back({IndicatorKind::total_cites, Window::all_prior, counting});
    out.push_back({IndicatorKind::numerator_only, Window::two, counting});
    out.push_back({IndicatorKind::numerator_only, Window::five, counting});
    out.push_back({IndicatorKind::cp_ratio, Window::all_prior, counting});
  }
  return out;
}

namespace {

bool counts_toward(const IndicatorSpec& spec, int census_year, const CitationEvent& e) {
  if (e.citing_year != census_year) return false;
  if (spec.window == Window::all_prior) return true;
  const int w = static_cast<int>(spec.window);
  return e.cited_year >= census_year - w && e.cited_year <= census_year - 1;
}

std::int64_t items_in(const std::unordered_map<int, std::int64_t>& by_year, int first, int last) {
  std::int64_t total = 0;
  for (int y = first; y <= last; ++y) {
    if (auto it = by_year.find(y); it != by_year.end()) total += it->second;
  }
  return total;
}

}  // namespace

double if_numerator(const Dataset& ds, const std::string& journal_id, const IndicatorSpec& spec) {
  if (spec.kind != IndicatorKind::impact_factor && spec.kind != IndicatorKind::numerator_only) {
    throw std::invalid_argument("if_numerator needs an impact_factor or numerator_only spec");
  }
  spec.check();
  const auto sym = ds.symbols.find(journal_id);
  if (!sym) return 0.0;
  std::int64_t count = 0;
  double weight = 0.0;
  for (const auto& e : ds.events) {
    if (e.cited_journal != *sym || !counts_toward(spec, ds.census_year, e)) continue;
    ++count;
    weight += 1.0 / e.n_refs;
  }
  return spec.counting == Counting::integer ? static_cast<double>(count) : weight;
}

std::int64_t if_denominator(const Dataset& ds, const std::string& journal_id, Window window) {
  if (window == Window::all_prior) throw std::invalid_argument("if_denominator needs a 2 or 5 year window");
  const int t = ds.census_year;
  const int w = static_cast<int>(window);
  std::int64_t total = 0;
  for (const auto& p : ds.publications) {
    if (p.journal_id == journal_id && p.year >= t - w && p.year <= t - 1) total += p.citable_items;
  }
  return total;
}

IndicatorTable compute_table(const Dataset& ds, const IndicatorSpec& spec) {
  spec.check();
  const std::size_t n = ds.journals.size();
  const int t = ds.census_year;

  std::vector<std::int64_t> journal_of(ds.symbols.size(), -1);
  std::unordered_map<std::string, std::size_t> by_id;
  by_id.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    by_id.emplace(ds.journals[j].journal_id, j);
    if (auto s = ds.symbols.find(ds.journals[j].journal_id)) journal_of[*s] = static_cast<std::int64_t>(j);
  }

  std::vector<std::int64_t> counts(n, 0);
  std::vector<double> weights(n, 0.0);
  for (const auto& e : ds.events) {
    const auto j = journal_of[e.cited_journal];
    if (j < 0 || !counts_toward(spec, t, e)) continue;
    ++counts[static_cast<std::size_t>(j)];
    weights[static_cast<std::size_t>(j)] += 1.0 / e.n_refs;
  }

  std::vector<std::unordered_map<int, std::int64_t>> items(n);
  for (const auto& p : ds.publications) {
    if (auto it = by_id.find(p.journal_id); it != by_id.end()) items[it->second][p.year] += p.citable_items;
  }

  IndicatorTable table;
  table.indicator_id = spec.id();
  table.kind = spec.kind;
  table.window = spec.window;
  table.counting = spec.counting;
  table.normalization = Normalization::raw;
  table.census_year = t;
  table.entries.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double numerator =
        spec.counting == Counting::integer ? static_cast<double>(counts[j]) : weights[j];
    std::optional<double> value;
    switch (spec.kind) {
      case IndicatorKind::impact_factor: {
        const auto w = static_cast<int>(spec.window);
        const auto denom = items_in(items[j], t - w, t - 1);
        if (denom > 0) value = numerator / static_cast<double>(denom);
        break;
      }
      case IndicatorKind::cp_ratio: {
        const auto denom = items_in(items[j], t, t);
        if (denom > 0) value = numerator / static_cast<double>(denom);
        break;
      }
      default:
        value = numerator;
    }
    table.entries.push_back({ds.journals[j].journal_id, value});
  }
  return table;
}

IndicatorTable rescale(const IndicatorTable& table, const Partition& partition) {
  const auto& clusters = partition.clusters();
  std::vector<double> sums(clusters.size(), 0.0);
  std::vector<std::size_t> counts(clusters.size(), 0);
  std::vector<std::size_t> members(table.entries.size());
  for (std::size_t i = 0; i < table.entries.size(); ++i) {
    const auto& e = table.entries[i];
    const auto g = partition.cluster_of(e.journal_id);
    if (!g) throw Error(fmt::format("journal '{}' has no cluster", e.journal_id));
    members[i] = *g;
    if (e.value) {
      sums[*g] += *e.value;
      ++counts[*g];
    }
  }

  IndicatorTable out = table;
  out.indicator_id = table.indicator_id + "-rescaled";
  out.source_id = table.indicator_id;
  out.normalization = Normalization::rescaled;
  out.cluster_means.clear();
  std::vector<double> means(clusters.size(), 0.0);
  for (std::size_t g = 0; g < clusters.size(); ++g) {
    if (counts[g] == 0) {
      throw Error(fmt::format("cluster '{}' ({}) has no defined values to rescale", clusters[g].cluster_id,
                              clusters[g].name));
    }
    means[g] = sums[g] / static_cast<double>(counts[g]);
    if (!(means[g] > 0.0)) {
      throw Error(fmt::format("cluster '{}' ({}) has mean {}; cannot rescale", clusters[g].cluster_id,
                              clusters[g].name, means[g]));
    }
    out.cluster_means.push_back({clusters[g].cluster_id, means[g], counts[g]});
  }
  for (std::size_t i = 0; i < out.entries.size(); ++i) {
    auto& v = out.entries[i].value;
    if (v) *v /= means[members[i]];
  }
  return out;
}

std::vector<RankedEntry> rank_table(const IndicatorTable& table) {
  std::vector<const IndicatorEntry*> order;
  order.reserve(table.entries.size());
  for (const auto& e : table.entries) order.push_back(&e);
  std::sort(order.begin(), order.end(), [](const IndicatorEntry* a, const IndicatorEntry* b) {
    if (a->value.has_value() != b->value.has_value()) return a->value.has_value();
    if (a->value && *a->value != *b->value) return *a->value > *b->value;
    return a->journal_id < b->journal_id;
  });
  std::vector<RankedEntry> out;
  out.reserve(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) out.push_back({order[i]->journal_id, order[i]->value, i + 1});
  return out;
}

void write_table(const IndicatorTable& table, const std::filesystem::path& path) {
  TabularWriter w(path, '\t');
  w.raw_line(fmt::format("# indicator_id={} kind={} window={} counting={} normalization={} census_year={} source={}",
                         table.indicator_id, to_string(table.kind), to_string(table.window),
                         to_string(table.counting), to_string(table.normalization), table.census_year,
                         table.source_id));
  for (const auto& m : table.cluster_means) {
    w.raw_line(fmt::format("# cluster_mean={} mean={} defined={}", m.cluster_id, m.mean, m.defined_count));
  }
  w.row({"journal_id", "value"});
  for (const auto& e : table.entries) {
    w.row({e.journal_id, e.value ? fmt::format("{}", *e.value) : std::string("NA")});
  }
  w.close();
}

namespace {

std::unordered_map<std::string, std::string> parse_comment(const std::string& line) {
  std::unordered_map<std::string, std::string> kv;
  std::istringstream in(line.substr(1));
  std::string tok;
  while (in >> tok) {
    const auto eq = tok.find('=');
    if (eq != std::string::npos) kv[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return kv;
}

}  // namespace

IndicatorTable read_table(const std::filesystem::path& path) {
  TabularReader r(path, '\t');
  IndicatorTable table;
  table.indicator_id = path.stem().string();
  for (const auto& c : r.comments()) {
    auto kv = parse_comment(c);
    if (kv.contains("cluster_mean")) {
      ClusterMean m;
      m.cluster_id = kv["cluster_mean"];
      try {
        m.mean = std::stod(kv["mean"]);
        m.defined_count = std::stoul(kv["defined"]);
      } catch (const std::exception&) {
        throw ParseError(path.string(), 1, "malformed cluster_mean line");
      }
      table.cluster_means.push_back(std::move(m));
      continue;
    }
    if (kv.contains("indicator_id")) table.indicator_id = kv["indicator_id"];
    if (auto k = parse_kind(kv["kind"])) table.kind = *k;
    if (auto w = parse_window(kv["window"])) table.window = *w;
    if (auto c2 = parse_counting(kv["counting"])) table.counting = *c2;
    if (auto nz = parse_normalization(kv["normalization"])) table.normalization = *nz;
    if (kv.contains("census_year")) {
      try {
        table.census_year = std::stoi(kv["census_year"]);
      } catch (const std::exception&) {
        throw ParseError(path.string(), 1, "malformed census_year");
      }
    }
    table.source_id = kv["source"];
  }
  const auto c_id = r.column("journal_id");
  const auto c_value = r.column("value");
  while (r.next()) {
    if (r.field(c_id).empty()) throw r.error("empty journal_id");
    std::optional<double> v;
    if (r.field(c_value) != "NA") {
      v = r.real(c_value);
      if (*v < 0.0) throw r.error("indicator values must be non-negative");
    }
    table.entries.push_back({std::string(r.field(c_id)), v});
  }
  return table;
}

void write_ranked(const IndicatorTable& table, const Dataset& ds, const std::filesystem::path& path) {
  std::unordered_map<std::string, const JournalRecord*> journals;
  for (const auto& j : ds.journals) journals.emplace(j.journal_id, &j);
  std::unordered_map<std::string, const Cluster*> clusters;
  for (const auto& c : ds.clusters) clusters.emplace(c.cluster_id, &c);

  TabularWriter w(path, '\t');
  w.row({"rank", "journal_id", "title", "cluster", "value"});
  for (const auto& r : rank_table(table)) {
    std::string title;
    std::string cluster;
    if (auto it = journals.find(r.journal_id); it != journals.end()) {
      title = it->second->title;
      if (auto c = clusters.find(it->second->cluster_id); c != clusters.end()) cluster = c->second->name;
    }
    w.row({std::to_string(r.rank), r.journal_id, title, cluster,
           r.value ? fmt::format("{:.3f}", *r.value) : std::string("NA")});
  }
  w.close();
}

}  // namespace citefair
