#include "citefair/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "citefair/error.hpp"
#include "citefair/tabular.hpp"

namespace citefair {

namespace {

int checked_year(const TabularReader& r, std::size_t col) {
  const auto v = r.integer(col);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw r.error(fmt::format("column '{}': year out of range", r.header()[col]));
  }
  return static_cast<int>(v);
}

void require_nonempty(const TabularReader& r, std::size_t col) {
  if (r.field(col).empty()) throw r.error(fmt::format("empty {}", r.header()[col]));
}

}  // namespace

JournalFile parse_journals(const std::filesystem::path& path, char delimiter) {
  TabularReader r(path, delimiter);
  const auto c_id = r.column("journal_id");
  const auto c_title = r.column("title");
  const auto c_cluster = r.column("cluster_id");
  const auto c_name = r.column("cluster_name");

  JournalFile out;
  std::unordered_map<std::string, std::size_t> cluster_index;
  while (r.next()) {
    require_nonempty(r, c_id);
    require_nonempty(r, c_cluster);
    JournalRecord j{std::string(r.field(c_id)), std::string(r.field(c_title)), std::string(r.field(c_cluster))};
    auto [it, inserted] = cluster_index.try_emplace(j.cluster_id, out.clusters.size());
    if (inserted) {
      out.clusters.push_back({j.cluster_id, std::string(r.field(c_name)), 0});
    } else if (out.clusters[it->second].name != r.field(c_name)) {
      throw r.error(fmt::format("cluster '{}' named both '{}' and '{}'", j.cluster_id,
                                out.clusters[it->second].name, r.field(c_name)));
    }
    ++out.clusters[it->second].size;
    out.journals.push_back(std::move(j));
  }
  return out;
}

std::vector<PublicationCount> parse_publications(const std::filesystem::path& path, char delimiter) {
  TabularReader r(path, delimiter);
  const auto c_id = r.column("journal_id");
  const auto c_year = r.column("year");
  const auto c_items = r.column("citable_items");

  std::vector<PublicationCount> out;
  while (r.next()) {
    require_nonempty(r, c_id);
    PublicationCount p{std::string(r.field(c_id)), checked_year(r, c_year), r.integer(c_items)};
    if (p.citable_items < 0) throw r.error("citable_items must be non-negative");
    out.push_back(std::move(p));
  }
  return out;
}

CitationFile parse_citations(const std::filesystem::path& path, const IngestConfig& config) {
  TabularReader r(path, config.delimiter);
  const auto c_paper = r.column("citing_paper_id");
  const auto c_citing = r.column("citing_journal_id");
  const auto c_citing_year = r.column("citing_year");
  const auto c_cited = r.column("cited_journal_id");
  const auto c_cited_year = r.column("cited_year");
  const auto c_refs = r.column("n_refs");

  CitationFile out;
  while (r.next()) {
    require_nonempty(r, c_paper);
    require_nonempty(r, c_citing);
    require_nonempty(r, c_cited);
    const int citing_year = checked_year(r, c_citing_year);
    const int cited_year = checked_year(r, c_cited_year);
    const auto n_refs = r.integer(c_refs);
    if (n_refs < 0 || n_refs > std::numeric_limits<int>::max()) {
      throw r.error(fmt::format("n_refs {} out of range", n_refs));
    }
    if (n_refs == 0) {
      if (config.zero_refs == ZeroRefsPolicy::error) throw r.error("n_refs is 0");
      ++out.dropped_zero_refs;
      out.warnings.push_back(fmt::format("{}:{}: n_refs is 0; event dropped", r.path(), r.line()));
      continue;
    }
    CitationEvent e;
    e.citing_paper = out.symbols.intern(r.field(c_paper));
    e.citing_journal = out.symbols.intern(r.field(c_citing));
    e.citing_year = citing_year;
    e.cited_journal = out.symbols.intern(r.field(c_cited));
    e.cited_year = cited_year;
    e.n_refs = static_cast<int>(n_refs);
    out.events.push_back(e);
  }
  return out;
}

Assembled assemble(JournalFile journals, std::vector<PublicationCount> publications, CitationFile citations,
                   const IngestConfig& config) {
  if (config.min_cluster_size < 1) throw std::invalid_argument("min_cluster_size must be >= 1");

  Assembled result;
  auto& ds = result.dataset;
  auto& summary = result.summary;
  summary.events_dropped_zero_refs = citations.dropped_zero_refs;
  summary.warnings = std::move(citations.warnings);

  std::unordered_set<std::string> dropped_clusters;
  for (auto& c : journals.clusters) {
    if (c.size < config.min_cluster_size) {
      dropped_clusters.insert(c.cluster_id);
      summary.excluded_clusters.push_back(c);
    } else {
      ds.clusters.push_back(c);
    }
  }

  std::unordered_set<std::string> excluded_journals;
  std::unordered_set<std::string> kept_journals;
  for (auto& j : journals.journals) {
    if (dropped_clusters.contains(j.cluster_id)) {
      excluded_journals.insert(j.journal_id);
      ++summary.excluded_journals;
    } else {
      kept_journals.insert(j.journal_id);
      ds.journals.push_back(std::move(j));
    }
  }
  if (ds.journals.empty()) throw Error("no journals remain after cluster exclusion");

  for (auto& p : publications) {
    if (kept_journals.contains(p.journal_id)) {
      ds.publications.push_back(std::move(p));
    } else {
      ++summary.publications_dropped;
    }
  }

  // Classify journal symbols once instead of hashing names per event.
  enum class Status : unsigned char { kept, excluded, unknown };
  const auto& sym = citations.symbols;
  std::vector<Status> status(sym.size(), Status::unknown);
  for (Symbol s = 0; s < sym.size(); ++s) {
    const auto& name = sym.name(s);
    if (kept_journals.contains(name)) {
      status[s] = Status::kept;
    } else if (excluded_journals.contains(name)) {
      status[s] = Status::excluded;
    }
  }

  ds.events.reserve(citations.events.size());
  ds.symbols.reserve(sym.size());
  int latest_year = std::numeric_limits<int>::min();
  for (std::size_t i = 0; i < citations.events.size(); ++i) {
    const auto& e = citations.events[i];
    if (status[e.cited_journal] == Status::excluded || status[e.citing_journal] == Status::excluded) {
      ++summary.events_dropped_excluded;
      continue;
    }
    if (status[e.cited_journal] == Status::unknown) {
      if (config.unknown_cited == UnknownCitedPolicy::error) {
        throw Error(fmt::format("citation event #{} cites unknown journal '{}'", i, sym.name(e.cited_journal)));
      }
      ++summary.events_dropped_unknown_cited;
      continue;
    }
    CitationEvent out = e;
    out.citing_paper = ds.symbols.intern(sym.name(e.citing_paper));
    out.citing_journal = ds.symbols.intern(sym.name(e.citing_journal));
    out.cited_journal = ds.symbols.intern(sym.name(e.cited_journal));
    latest_year = std::max(latest_year, e.citing_year);
    ds.events.push_back(out);
  }

  if (config.census_year) {
    ds.census_year = *config.census_year;
  } else if (!ds.events.empty()) {
    ds.census_year = latest_year;
  } else {
    throw Error("no citation events and no census year given");
  }

  if (auto violations = validate(ds); !violations.empty()) throw ValidationError(std::move(violations));
  return result;
}

InputPaths InputPaths::in_directory(const std::filesystem::path& dir) {
  return {dir / "journals.tsv", dir / "publications.tsv", dir / "citations.tsv"};
}

Assembled ingest_files(const InputPaths& paths, const IngestConfig& config) {
  for (const auto* p : {&paths.journals, &paths.publications, &paths.citations}) {
    if (!std::filesystem::exists(*p)) throw Error(fmt::format("{}: no such file", p->string()));
  }
  auto journals = std::async(std::launch::async, [&] { return parse_journals(paths.journals, config.delimiter); });
  auto pubs =
      std::async(std::launch::async, [&] { return parse_publications(paths.publications, config.delimiter); });
  CitationFile cites = parse_citations(paths.citations, config);
  return assemble(journals.get(), pubs.get(), std::move(cites), config);
}

void write_dataset(const Dataset& ds, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  constexpr char kDelim = '\t';
  {
    std::unordered_map<std::string, const Cluster*> clusters;
    for (const auto& c : ds.clusters) clusters.emplace(c.cluster_id, &c);
    TabularWriter w(dir / "journals.tsv", kDelim);
    w.row({"journal_id", "title", "cluster_id", "cluster_name"});
    for (const auto& j : ds.journals) {
      auto it = clusters.find(j.cluster_id);
      w.row({j.journal_id, j.title, j.cluster_id, it == clusters.end() ? std::string_view{} : it->second->name});
    }
    w.close();
  }
  {
    TabularWriter w(dir / "publications.tsv", kDelim);
    w.row({"journal_id", "year", "citable_items"});
    for (const auto& p : ds.publications) {
      w.row({p.journal_id, std::to_string(p.year), std::to_string(p.citable_items)});
    }
    w.close();
  }
  {
    TabularWriter w(dir / "citations.tsv", kDelim);
    w.row({"citing_paper_id", "citing_journal_id", "citing_year", "cited_journal_id", "cited_year", "n_refs"});
    for (const auto& e : ds.events) {
      w.row({ds.symbols.name(e.citing_paper), ds.symbols.name(e.citing_journal), std::to_string(e.citing_year),
             ds.symbols.name(e.cited_journal), std::to_string(e.cited_year), std::to_string(e.n_refs)});
    }
    w.close();
  }
  nlohmann::json manifest = {
      {"format", "citefair-dataset"},
      {"version", 1},
      {"census_year", ds.census_year},
      {"journals", ds.journals.size()},
      {"clusters", ds.clusters.size()},
      {"publications", ds.publications.size()},
      {"events", ds.events.size()},
  };
  std::ofstream out(dir / "dataset.json", std::ios::binary | std::ios::trunc);
  out << manifest.dump(2) << '\n';
  if (!out) throw Error(fmt::format("{}: write failed", (dir / "dataset.json").string()));
}

Dataset read_dataset(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "dataset.json";
  std::ifstream in(manifest_path);
  if (!in) throw Error(fmt::format("{}: no dataset manifest (run ingest first)", manifest_path.string()));
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(fmt::format("{}: {}", manifest_path.string(), e.what()));
  }
  if (manifest.value("format", "") != "citefair-dataset" || !manifest.contains("census_year")) {
    throw Error(fmt::format("{}: not a dataset manifest", manifest_path.string()));
  }
  IngestConfig config;
  config.min_cluster_size = 1;
  config.unknown_cited = UnknownCitedPolicy::error;
  config.zero_refs = ZeroRefsPolicy::error;
  config.census_year = manifest.at("census_year").get<int>();
  return ingest_files(InputPaths::in_directory(dir), config).dataset;
}

void write_exclusion_summary(const ExclusionSummary& s, const std::filesystem::path& path) {
  TabularWriter w(path, '\t');
  w.row({"item", "count", "detail"});
  for (const auto& c : s.excluded_clusters) {
    w.row({"excluded_cluster", std::to_string(c.size), fmt::format("{} {}", c.cluster_id, c.name)});
  }
  w.row({"excluded_clusters", std::to_string(s.excluded_clusters.size()), ""});
  w.row({"excluded_journals", std::to_string(s.excluded_journals), ""});
  w.row({"events_dropped_excluded", std::to_string(s.events_dropped_excluded), ""});
  w.row({"events_dropped_unknown_cited", std::to_string(s.events_dropped_unknown_cited), ""});
  w.row({"events_dropped_zero_refs", std::to_string(s.events_dropped_zero_refs), ""});
  w.row({"publications_dropped", std::to_string(s.publications_dropped), ""});
  w.close();
}

}  // namespace citefair
