#include "citefair/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "citefair/error.hpp"

namespace citefair::synth {

void SynthProfile::check() const {
  if (clusters.empty()) throw std::invalid_argument("profile has no clusters");
  for (const auto& c : clusters) {
    if (c.cluster_id.empty()) throw std::invalid_argument("profile cluster without id");
    if (c.size < 1) throw std::invalid_argument(fmt::format("cluster '{}' has no journals", c.cluster_id));
    if (!(c.mean_cites_per_item > 0.0) || !(c.mean_refs >= 1.0) || !(c.dispersion >= 0.0)) {
      throw std::invalid_argument(fmt::format("cluster '{}' needs positive rates (mean_refs >= 1)", c.cluster_id));
    }
  }
  if (items_min < 0 || items_max < items_min) throw std::invalid_argument("invalid citable item range");
  if (first_year >= census_year) throw std::invalid_argument("first_year must precede census_year");
  if (!(journal_dispersion >= 0.0)) throw std::invalid_argument("journal_dispersion must be >= 0");
  if (!(aging > 0.0 && aging <= 1.0)) throw std::invalid_argument("aging must lie in (0, 1]");
  if (!(field_affinity >= 0.0 && field_affinity <= 1.0)) throw std::invalid_argument("field_affinity must lie in [0, 1]");
  if (!(indexed_share > 0.0 && indexed_share <= 1.0)) throw std::invalid_argument("indexed_share must lie in (0, 1]");
}

std::size_t SynthProfile::journal_count() const {
  std::size_t n = 0;
  for (const auto& c : clusters) n += c.size;
  return n;
}

SynthProfile paper2010_profile() {
  SynthProfile p;
  p.name = "paper2010";
  // Sizes of clusters 2, 7, 9, 10, 12 and 13 follow the published set; the
  // five remaining clusters split the residual 2,658 journals evenly.
  p.clusters = {
      {"1", "Biology", 532, 2.0, 40.0, 0.5},
      {"2", "Biomedical Research", 514, 5.0, 45.0, 0.5},
      {"3", "Chemistry", 532, 3.0, 35.0, 0.5},
      {"4", "Clinical Medicine", 532, 3.2, 32.0, 0.5},
      {"5", "Earth & Space", 531, 2.2, 40.0, 0.5},
      {"6", "Engineering & Tech", 531, 1.2, 22.0, 0.5},
      {"7", "Health Sciences", 32, 1.5, 30.0, 0.5},
      {"9", "Mathematics", 173, 0.5, 8.0, 0.5},
      {"10", "Physics", 245, 2.6, 25.0, 0.5},
      {"12", "Psychology", 42, 2.4, 45.0, 0.5},
      {"13", "Social Sciences", 31, 0.8, 45.0, 0.5},
  };
  p.items_min = 10;
  p.items_max = 75;
  p.first_year = 2000;
  p.census_year = 2010;
  p.seed = 2010;
  return p;
}

SynthProfile small_profile() {
  SynthProfile p;
  p.name = "small";
  p.clusters = {
      {"1", "Alpha", 50, 5.0, 45.0, 0.5}, {"2", "Beta", 40, 2.5, 30.0, 0.5}, {"3", "Gamma", 45, 1.5, 20.0, 0.5},
      {"4", "Delta", 35, 1.0, 15.0, 0.5}, {"5", "Epsilon", 30, 0.7, 10.0, 0.5}, {"6", "Zeta", 40, 0.5, 8.0, 0.5},
  };
  p.items_min = 5;
  p.items_max = 30;
  p.first_year = 2004;
  p.census_year = 2010;
  p.seed = 7;
  return p;
}

SynthProfile builtin_profile(const std::string& name) {
  if (name == "paper2010") return paper2010_profile();
  if (name == "small") return small_profile();
  throw Error(fmt::format("unknown profile '{}' (known: paper2010, small)", name));
}

SynthProfile load_profile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("{}: cannot open profile", path.string()));
  SynthProfile p;
  try {
    const auto j = nlohmann::json::parse(in);
    p.name = j.value("name", path.stem().string());
    for (const auto& c : j.at("clusters")) {
      ClusterProfile cp;
      cp.cluster_id = c.at("cluster_id").get<std::string>();
      cp.name = c.value("name", cp.cluster_id);
      cp.size = c.at("size").get<std::size_t>();
      cp.mean_cites_per_item = c.at("mean_cites_per_item").get<double>();
      cp.mean_refs = c.at("mean_refs").get<double>();
      cp.dispersion = c.value("dispersion", 0.5);
      p.clusters.push_back(std::move(cp));
    }
    if (j.contains("items_per_journal")) {
      p.items_min = j["items_per_journal"].at(0).get<std::int64_t>();
      p.items_max = j["items_per_journal"].at(1).get<std::int64_t>();
    }
    if (j.contains("years")) {
      p.first_year = j["years"].at(0).get<int>();
      p.census_year = j["years"].at(1).get<int>();
    }
    p.seed = j.value("seed", p.seed);
    p.journal_dispersion = j.value("journal_dispersion", p.journal_dispersion);
    p.aging = j.value("aging", p.aging);
    p.field_affinity = j.value("field_affinity", p.field_affinity);
    p.indexed_share = j.value("indexed_share", p.indexed_share);
  } catch (const nlohmann::json::exception& e) {
    throw Error(fmt::format("{}: invalid profile: {}", path.string(), e.what()));
  }
  try {
    p.check();
  } catch (const std::invalid_argument& e) {
    throw Error(fmt::format("{}: {}", path.string(), e.what()));
  }
  return p;
}

void save_profile(const SynthProfile& p, const std::filesystem::path& path) {
  nlohmann::json j;
  j["name"] = p.name;
  auto& cs = j["clusters"] = nlohmann::json::array();
  for (const auto& c : p.clusters) {
    cs.push_back({{"cluster_id", c.cluster_id},
                  {"name", c.name},
                  {"size", c.size},
                  {"mean_cites_per_item", c.mean_cites_per_item},
                  {"mean_refs", c.mean_refs},
                  {"dispersion", c.dispersion}});
  }
  j["items_per_journal"] = {p.items_min, p.items_max};
  j["years"] = {p.first_year, p.census_year};
  j["seed"] = p.seed;
  j["journal_dispersion"] = p.journal_dispersion;
  j["aging"] = p.aging;
  j["field_affinity"] = p.field_affinity;
  j["indexed_share"] = p.indexed_share;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << j.dump(2) << '\n';
  if (!out) throw Error(fmt::format("{}: write failed", path.string()));
}

namespace {

std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t x = seed ^ (stream * 0xD1B54A32D192ED03ULL);
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Cumulative weights with binary-search sampling.
class WeightedPicker {
 public:
  void add(std::size_t item, double weight) {
    if (weight <= 0.0) return;
    total_ += weight;
    cumulative_.push_back(total_);
    items_.push_back(item);
  }
  [[nodiscard]] bool empty() const { return items_.empty(); }

  template <class Rng>
  std::size_t pick(Rng& rng) const {
    const double u = std::uniform_real_distribution<double>(0.0, total_)(rng);
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return items_[static_cast<std::size_t>(it - cumulative_.begin())];
  }

 private:
  std::vector<double> cumulative_;
  std::vector<std::size_t> items_;
  double total_ = 0.0;
};

}  // namespace

Dataset generate(const SynthProfile& profile) {
  profile.check();
  const int t = profile.census_year;
  const int years = t - profile.first_year + 1;  // publication years incl. census year
  const int cited_years = years - 1;              // years that can be cited

  Dataset ds;
  ds.census_year = t;
  const std::size_t n = profile.journal_count();
  ds.journals.reserve(n);

  std::vector<std::size_t> cluster_of;
  std::vector<std::vector<std::int64_t>> items(n);
  std::vector<double> attractiveness(n);
  for (std::size_t g = 0; g < profile.clusters.size(); ++g) {
    const auto& c = profile.clusters[g];
    ds.clusters.push_back({c.cluster_id, c.name, c.size});
    for (std::size_t k = 0; k < c.size; ++k) {
      const std::size_t j = ds.journals.size();
      ds.journals.push_back({fmt::format("J{:05d}", j + 1), fmt::format("{} Journal {}", c.name, k + 1), c.cluster_id});
      cluster_of.push_back(g);
      std::mt19937_64 rng(mix(profile.seed, j));
      std::uniform_int_distribution<std::int64_t> item_dist(profile.items_min, profile.items_max);
      items[j].resize(static_cast<std::size_t>(years));
      for (auto& it : items[j]) it = item_dist(rng);
      const double sigma = profile.journal_dispersion;
      std::lognormal_distribution<double> mult(-0.5 * sigma * sigma, sigma);
      attractiveness[j] = c.mean_cites_per_item * (sigma > 0.0 ? mult(rng) : 1.0);
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    for (int y = 0; y < years; ++y) {
      ds.publications.push_back({ds.journals[j].journal_id, profile.first_year + y, items[j][static_cast<std::size_t>(y)]});
    }
  }

  // Expected citations from the census year to (journal, year) pairs; the
  // two most recent years average to the journal's attractiveness.
  std::vector<double> recency(static_cast<std::size_t>(cited_years) + 1, 0.0);
  for (int age = 1; age <= cited_years; ++age) {
    recency[static_cast<std::size_t>(age)] = std::pow(profile.aging, age - 1) / ((1.0 + profile.aging) / 2.0);
  }
  std::vector<WeightedPicker> by_cluster(profile.clusters.size());
  WeightedPicker global;
  std::vector<double> expected(profile.clusters.size(), 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (int y = 0; y < cited_years; ++y) {
      const int age = t - (profile.first_year + y);
      const double w = static_cast<double>(items[j][static_cast<std::size_t>(y)]) * attractiveness[j] *
                       recency[static_cast<std::size_t>(age)];
      const std::size_t slot = j * static_cast<std::size_t>(cited_years) + static_cast<std::size_t>(y);
      by_cluster[cluster_of[j]].add(slot, w);
      global.add(slot, w);
      expected[cluster_of[j]] += w;
    }
  }

  std::size_t paper_serial = 0;
  std::size_t first_journal = 0;
  for (std::size_t g = 0; g < profile.clusters.size(); ++g) {
    const auto& c = profile.clusters[g];
    WeightedPicker citing;
    for (std::size_t j = first_journal; j < first_journal + c.size; ++j) {
      citing.add(j, static_cast<double>(items[j].back()) + 1.0);
    }
    first_journal += c.size;
    if (by_cluster[g].empty()) continue;

    std::mt19937_64 rng(mix(profile.seed, 0x100000000ULL + g));
    std::bernoulli_distribution indexed(profile.indexed_share);
    std::bernoulli_distribution stay(profile.field_affinity);
    const double sigma = c.dispersion;
    std::normal_distribution<double> log_len(std::log(c.mean_refs) - 0.5 * sigma * sigma, sigma > 0.0 ? sigma : 1.0);
    const auto papers =
        static_cast<std::size_t>(std::llround(expected[g] / (c.mean_refs * profile.indexed_share)));
    for (std::size_t p = 0; p < papers; ++p) {
      const double len = sigma > 0.0 ? std::exp(log_len(rng)) : c.mean_refs;
      const int n_refs = std::max(1, static_cast<int>(std::lround(len)));
      const std::size_t from = citing.pick(rng);
      const Symbol paper_sym = ds.symbols.intern(fmt::format("P{}-{:07d}", t, ++paper_serial));
      const Symbol from_sym = ds.symbols.intern(ds.journals[from].journal_id);
      for (int r = 0; r < n_refs; ++r) {
        if (!indexed(rng)) continue;
        const std::size_t slot = stay(rng) ? by_cluster[g].pick(rng) : global.pick(rng);
        const std::size_t to = slot / static_cast<std::size_t>(cited_years);
        const int year = profile.first_year + static_cast<int>(slot % static_cast<std::size_t>(cited_years));
        ds.events.push_back({paper_sym, from_sym, t, ds.symbols.intern(ds.journals[to].journal_id), year, n_refs});
      }
    }
  }
  return ds;
}

}  // namespace citefair::synth
