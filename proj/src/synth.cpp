#include "graphadv/synth.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "graphadv/errors.hpp"
#include "graphadv/scenario_file.hpp"

namespace graphadv {

namespace {

bool is_label_char(char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-'; }

template <class T>
const T& pick(Rng& rng, const std::vector<T>& items) {
  return items[rng.uniform(items.size())];
}

std::string random_string(Rng& rng, std::string_view charset, std::size_t len) {
  std::string s(len, 'a');
  for (auto& c : s) c = charset[rng.uniform(charset.size())];
  return s;
}

std::string digits(Rng& rng, std::size_t len) { return random_string(rng, "0123456789", len); }

// Retries a generator until `n` distinct values or the attempt budget runs out.
template <class Gen>
std::vector<std::string> distinct(std::size_t n, Gen&& gen, std::string_view what) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  out.reserve(n);
  std::size_t budget = 50 * n + 1000;
  while (out.size() < n) {
    if (budget-- == 0) throw DataError(std::string(what) + ": could not draw enough distinct names");
    std::string s = gen();
    if (seen.insert(s).second) out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

void DgaFamilySpec::validate() const {
  if (name.empty()) throw DataError("dga family: empty name");
  if (min_length < 4 || max_length > 63 || min_length > max_length)
    throw DataError("dga family " + name + ": length range must satisfy 4 <= min <= max <= 63");
  if (tlds.empty()) throw DataError("dga family " + name + ": no tlds");
  if (charset.empty()) throw DataError("dga family " + name + ": empty charset");
  for (char c : charset)
    if (!is_label_char(c)) throw DataError("dga family " + name + ": charset has non-DNS character");
  if (charset.find_first_not_of('-') == std::string::npos)
    throw DataError("dga family " + name + ": charset needs a non-dash character");
}

std::vector<std::string> generate_dga_domains(const DgaFamilySpec& spec, std::size_t n,
                                              const WordCorpus& words) {
  spec.validate();
  if (n == 0) throw DataError("generate_dga_domains: n must be >= 1");
  Rng rng = Rng(spec.seed).split("dga:" + spec.name);

  if (spec.style == DgaStyle::random_chars) {
    std::string chars;
    for (char c : spec.charset)
      if (chars.find(c) == std::string::npos) chars.push_back(c);
    std::string edge_chars;
    for (char c : chars)
      if (c != '-') edge_chars.push_back(c);
    // Upper bound on distinct names, saturating.
    long double capacity = 0;
    for (int len = spec.min_length; len <= spec.max_length && capacity < 1e18L; ++len) {
      long double per = 1;
      for (int i = 0; i < len && per < 1e18L; ++i)
        per *= static_cast<long double>((i == 0 || i == len - 1) ? edge_chars.size() : chars.size());
      capacity += per;
    }
    capacity *= static_cast<long double>(spec.tlds.size());
    if (capacity < static_cast<long double>(n))
      throw DataError("dga family " + spec.name + ": charset too small for " + std::to_string(n) +
                      " distinct names");
    return distinct(
        n,
        [&] {
          auto len = static_cast<std::size_t>(spec.min_length) +
                     rng.uniform(static_cast<std::uint64_t>(spec.max_length - spec.min_length + 1));
          std::string label = random_string(rng, chars, len);
          label.front() = edge_chars[rng.uniform(edge_chars.size())];
          label.back() = edge_chars[rng.uniform(edge_chars.size())];
          return label + "." + pick(rng, spec.tlds);
        },
        "dga family " + spec.name);
  }

  std::vector<std::string> usable;
  for (const auto& w : words.dictionary)
    if (std::all_of(w.begin(), w.end(), [&](char c) { return spec.charset.find(c) != std::string::npos; }))
      usable.push_back(w);
  if (usable.empty()) throw DataError("dga family " + spec.name + ": no dictionary word fits the charset");
  return distinct(
      n,
      [&] {
        std::string label;
        for (int tries = 0; tries < 64; ++tries) {
          label.clear();
          while (static_cast<int>(label.size()) < spec.min_length) label += pick(rng, usable);
          if (static_cast<int>(label.size()) <= spec.max_length) break;
        }
        if (static_cast<int>(label.size()) > spec.max_length) label.resize(static_cast<std::size_t>(spec.max_length));
        return label + "." + pick(rng, spec.tlds);
      },
      "dga family " + spec.name);
}

void BenignDgaSpec::validate() const {
  if (tlds.size() != 4) throw DataError("benign dga: exactly 4 tlds required");
  for (double f : {punycode_fraction, www_fraction, number_dash_fraction})
    if (f < 0.0 || f > 1.0) throw DataError("benign dga: fractions must lie in [0,1]");
  if (dictionary_weight < 0 || web_term_weight < 0 || domain_token_weight < 0 ||
      dictionary_weight + web_term_weight + domain_token_weight <= 0)
    throw DataError("benign dga: invalid source weights");
  if (min_parts < 1 || max_parts < min_parts) throw DataError("benign dga: invalid part count range");
}

BenignDgaGenerator::BenignDgaGenerator(BenignDgaSpec spec, const WordCorpus& words)
    : spec_(std::move(spec)), words_(&words), rng_(Rng(spec_.seed).split("benign-dga")) {
  spec_.validate();
  if ((spec_.dictionary_weight > 0 && words.dictionary.empty()) ||
      (spec_.web_term_weight > 0 && words.web_terms.empty()) ||
      (spec_.domain_token_weight > 0 && words.domain_tokens.empty()))
    throw DataError("benign dga: empty word corpus");
}

const std::string& BenignDgaGenerator::draw_word() {
  double total = spec_.dictionary_weight + spec_.web_term_weight + spec_.domain_token_weight;
  double u = rng_.uniform01() * total;
  if (u < spec_.dictionary_weight) return pick(rng_, words_->dictionary);
  if (u < spec_.dictionary_weight + spec_.web_term_weight) return pick(rng_, words_->web_terms);
  return pick(rng_, words_->domain_tokens);
}

std::string BenignDgaGenerator::next() {
  auto parts = static_cast<int>(spec_.min_parts +
                                rng_.uniform(static_cast<std::uint64_t>(spec_.max_parts - spec_.min_parts + 1)));
  bool decorate = rng_.bernoulli(spec_.number_dash_fraction);
  std::string label;
  for (int i = 0; i < parts; ++i) {
    if (i > 0 && decorate && rng_.bernoulli(0.5)) label += '-';
    label += draw_word();
  }
  if (decorate) label += digits(rng_, 1 + rng_.uniform(3));
  bool puny = rng_.bernoulli(spec_.punycode_fraction);
  std::size_t max_len = puny ? 59 : 63;
  if (label.size() > max_len) label.resize(max_len);
  while (!label.empty() && label.back() == '-') label.pop_back();
  if (puny) label = "xn--" + label;
  std::string name = label + "." + pick(rng_, spec_.tlds);
  if (rng_.bernoulli(spec_.www_fraction)) name = "www." + name;
  return name;
}

std::vector<std::string> generate_benign_dga(const BenignDgaSpec& spec, std::size_t n, const WordCorpus& words) {
  BenignDgaGenerator gen(spec, words);
  return distinct(n, [&] { return gen.next(); }, "benign dga");
}

BackgroundDomainGenerator::BackgroundDomainGenerator(std::uint64_t seed, const WordCorpus& words)
    : rng_(Rng(seed).split("background")), words_(&words) {
  if (words.dictionary.empty() || words.web_terms.empty() || words.domain_tokens.empty())
    throw DataError("background generator: empty word corpus");
}

std::string BackgroundDomainGenerator::next() {
  static const std::vector<std::string> public_tlds{"com", "net", "org", "io", "co", "de", "ru", "info", "biz", "us"};
  static const std::vector<std::string> internal{"home", "lan", "local", "corp", "internal"};
  static constexpr std::string_view letters = "abcdefghijklmnopqrstuvwxyz";
  static constexpr std::string_view alnum = "abcdefghijklmnopqrstuvwxyz0123456789";
  double u = rng_.uniform01();
  if (u < 0.30) {
    // Browser-style random probe resolved through a search suffix.
    return random_string(rng_, letters, 7 + rng_.uniform(9)) + "." + pick(rng_, internal);
  }
  if (u < 0.60) {
    std::string label = pick(rng_, words_->dictionary);
    if (rng_.bernoulli(0.5)) label += pick(rng_, words_->dictionary);
    if (rng_.bernoulli(0.3)) label += digits(rng_, 1 + rng_.uniform(4));
    if (label.size() > 63) label.resize(63);
    return label + "." + pick(rng_, public_tlds);
  }
  if (u < 0.75) {
    // Typo of a popular name.
    std::string label = rng_.bernoulli(0.5) ? pick(rng_, words_->web_terms) : pick(rng_, words_->domain_tokens);
    std::size_t pos = rng_.uniform(label.size());
    switch (rng_.uniform(3)) {
      case 0: label[pos] = letters[rng_.uniform(letters.size())]; break;
      case 1: label.insert(pos, 1, label[pos]); break;
      default:
        if (label.size() > 3) label.erase(pos, 1);
        break;
    }
    return label + "." + pick(rng_, public_tlds);
  }
  if (u < 0.90) {
    std::string label = pick(rng_, words_->domain_tokens) + "-" +
                        (rng_.bernoulli(0.5) ? digits(rng_, 1 + rng_.uniform(3))
                                             : random_string(rng_, letters, 2 + rng_.uniform(3)));
    return label + "." + pick(rng_, internal);
  }
  return random_string(rng_, alnum, 16 + rng_.uniform(17)) + "." + pick(rng_, words_->web_terms) + ".net";
}

bool is_valid_domain_name(std::string_view name) {
  if (name.empty() || name.size() > 253) return false;
  std::size_t start = 0;
  while (true) {
    auto dot = name.find('.', start);
    auto label = name.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start);
    if (label.empty() || label.size() > 63) return false;
    if (label.front() == '-' || label.back() == '-') return false;
    for (char c : label)
      if (!is_label_char(c)) return false;
    if (dot == std::string_view::npos) return true;
    start = dot + 1;
  }
}

std::vector<DgaFamilySpec> default_family_catalog() {
  std::vector<DgaFamilySpec> out;
  out.push_back({"suppa", "abcdefgh", 10, 12, {"net", "com"}, 11, DgaStyle::random_chars});
  out.push_back({"murex", "ijklmnopqrstuvwxyz", 6, 9, {"ru", "com", "biz"}, 12, DgaStyle::random_chars});
  out.push_back({"pyksa", "01234", 8, 10, {"info", "org"}, 13, DgaStyle::random_chars});
  out.push_back({"gimex", "56789", 14, 17, {"com"}, 14, DgaStyle::random_chars});
  return out;
}

void ScenarioSpec::validate() const {
  if (background_degree_mean < 1.0) throw DataError("scenario: background degree mean must be >= 1");
  if (private_fraction < 0 || private_fraction > 1) throw DataError("scenario: private_fraction outside [0,1]");
  if (background_hosts > 0 && pool_domains == 0 && private_fraction < 1)
    throw DataError("scenario: background hosts need a domain pool");
  if (group_hosts_min < 1 || group_hosts_min > group_hosts_max || group_domains_min < 1 ||
      group_domains_min > group_domains_max)
    throw DataError("scenario: invalid benign group ranges");
  if (benign_groups > 0 && group_hosts_max > background_hosts)
    throw DataError("scenario: benign groups larger than the background");
  if (group_density <= 0 || group_density > 1) throw DataError("scenario: group_density outside (0,1]");
  std::size_t overlapping = 0;
  std::unordered_set<std::string> names;
  for (const auto& f : families) {
    f.family.validate();
    if (!names.insert(f.family.name).second) throw DataError("scenario: duplicate family " + f.family.name);
    if (f.infected_hosts == 0 || f.domains == 0) throw DataError("scenario: empty planted family");
    if (f.sharing.kind == SharingModel::Kind::subset &&
        (f.sharing.subset_size == 0 || f.sharing.subset_size > f.infected_hosts))
      throw DataError("scenario: subset size outside [1, infected hosts]");
    if (f.sharing.kind == SharingModel::Kind::fraction && (f.sharing.fraction <= 0 || f.sharing.fraction > 1))
      throw DataError("scenario: sharing fraction outside (0,1]");
    if (f.overlap_background) overlapping += f.infected_hosts;
  }
  if (overlapping > background_hosts) throw DataError("scenario: not enough background hosts to infect");
}

namespace {

class ZipfPool {
 public:
  ZipfPool(std::size_t n, double exponent) : cumulative_(n) {
    double acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += 1.0 / std::pow(static_cast<double>(i + 1), exponent);
      cumulative_[i] = acc;
    }
  }
  std::size_t draw(Rng& rng) const {
    double u = rng.uniform01() * cumulative_.back();
    return static_cast<std::size_t>(std::upper_bound(cumulative_.begin(), cumulative_.end(), u) -
                                    cumulative_.begin());
  }
  [[nodiscard]] bool empty() const { return cumulative_.empty(); }

 private:
  std::vector<double> cumulative_;
};

std::string host_name(std::size_t i) {
  std::ostringstream os;
  os << "h" << std::setw(5) << std::setfill('0') << i;
  return os.str();
}

// Chooses k distinct indices out of n, returned in ascending order.
std::vector<std::size_t> sample_indices(Rng& rng, std::size_t n, std::size_t k) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + rng.uniform(n - i)]);
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

struct BackgroundBuild {
  std::vector<std::string> host_ids;
  std::vector<std::string> pool;
};

// Background hosts with their pool/private queries plus benign groups.
BackgroundBuild add_background(const ScenarioSpec& spec, std::size_t host_count, Rng rng,
                               BipartiteGraph& g, std::map<std::string, std::string>& reference,
                               const std::string& host_prefix) {
  BackgroundBuild out;
  BackgroundDomainGenerator names(rng.split("names")());
  std::unordered_set<std::string> used;
  auto fresh = [&] {
    for (;;) {
      std::string n = names.next();
      if (used.insert(n).second) return n;
    }
  };
  for (std::size_t i = 0; i < spec.pool_domains; ++i) out.pool.push_back(fresh());
  ZipfPool zipf(out.pool.size(), spec.pool_zipf_exponent);

  Rng host_rng = rng.split("hosts");
  for (std::size_t i = 0; i < host_count; ++i) {
    std::string h = host_prefix + host_name(i);
    out.host_ids.push_back(h);
    g.add_host(h);
    std::size_t degree = 1 + host_rng.geometric(spec.background_degree_mean - 1.0);
    for (std::size_t q = 0, tries = 0; q < degree && tries < 20 * degree; ++tries) {
      if (zipf.empty() || host_rng.bernoulli(spec.private_fraction)) {
        g.add_edge(h, fresh());
        ++q;
      } else if (g.add_edge(h, out.pool[zipf.draw(host_rng)])) {
        ++q;
      }
    }
  }

  Rng group_rng = rng.split("groups");
  for (std::size_t gi = 0; gi < spec.benign_groups && host_count >= spec.group_hosts_min; ++gi) {
    std::size_t nh = spec.group_hosts_min + group_rng.uniform(spec.group_hosts_max - spec.group_hosts_min + 1);
    nh = std::min(nh, host_count);
    std::size_t nd =
        spec.group_domains_min + group_rng.uniform(spec.group_domains_max - spec.group_domains_min + 1);
    auto members = sample_indices(group_rng, host_count, nh);
    std::string tag = "benign-group-" + std::to_string(gi);
    for (std::size_t di = 0; di < nd; ++di) {
      std::string d = fresh();
      reference[d] = tag;
      bool any = false;
      for (std::size_t m : members) {
        if (group_rng.bernoulli(spec.group_density)) {
          g.add_edge(out.host_ids[m], d);
          any = true;
        }
      }
      if (!any) g.add_edge(out.host_ids[members[group_rng.uniform(members.size())]], d);
    }
  }
  return out;
}

void plant_family(const PlantedFamilySpec& pf, std::size_t family_index, Rng rng, BipartiteGraph& g,
                  const BackgroundBuild& bg, std::unordered_set<std::size_t>& infected_background,
                  AttackerSubgraph& attacker) {
  const auto domains = generate_dga_domains(pf.family, pf.domains);
  std::vector<std::string> hosts;
  if (pf.overlap_background) {
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < bg.host_ids.size(); ++i)
      if (!infected_background.count(i)) free.push_back(i);
    auto chosen = sample_indices(rng, free.size(), pf.infected_hosts);
    for (std::size_t c : chosen) {
      infected_background.insert(free[c]);
      hosts.push_back(bg.host_ids[free[c]]);
    }
  } else {
    for (std::size_t i = 0; i < pf.infected_hosts; ++i) {
      std::ostringstream os;
      os << "inf" << family_index << "-" << pf.family.name << "-" << std::setw(3) << std::setfill('0') << i;
      hosts.push_back(os.str());
    }
  }

  auto& ag = attacker.graph;
  for (const auto& h : hosts) ag.add_host(h);
  for (const auto& d : domains) ag.add_domain(d);
  const std::size_t nu = hosts.size(), nv = domains.size();
  switch (pf.sharing.kind) {
    case SharingModel::Kind::all:
      for (NodeIndex d = 0; d < nv; ++d)
        for (NodeIndex h = 0; h < nu; ++h) ag.add_edge(h, d);
      break;
    case SharingModel::Kind::subset:
      for (NodeIndex d = 0; d < nv; ++d)
        for (std::size_t h : sample_indices(rng, nu, pf.sharing.subset_size))
          ag.add_edge(static_cast<NodeIndex>(h), d);
      break;
    case SharingModel::Kind::fraction: {
      auto total = static_cast<std::size_t>(std::llround(pf.sharing.fraction * static_cast<double>(nu * nv)));
      total = std::max(total, nv);
      std::vector<char> chosen(nu * nv, 0);
      for (std::size_t d = 0; d < nv; ++d) chosen[d * nu + rng.uniform(nu)] = 1;
      std::vector<std::size_t> rest;
      for (std::size_t i = 0; i < chosen.size(); ++i)
        if (!chosen[i]) rest.push_back(i);
      for (std::size_t c : sample_indices(rng, rest.size(), total - nv)) chosen[rest[c]] = 1;
      for (std::size_t d = 0; d < nv; ++d)
        for (std::size_t h = 0; h < nu; ++h)
          if (chosen[d * nu + h]) ag.add_edge(static_cast<NodeIndex>(h), static_cast<NodeIndex>(d));
      break;
    }
  }
  for (const Edge& e : ag.edges()) g.add_edge(ag.host(e.host), ag.domain(e.domain));
  // Infected hosts may still query background names.
  if (pf.extra_background_mean > 0 && !bg.pool.empty()) {
    ZipfPool zipf(bg.pool.size(), 1.0);
    Rng extra = rng.split("extra");
    for (const auto& h : hosts) {
      std::size_t k = extra.geometric(pf.extra_background_mean);
      for (std::size_t q = 0, tries = 0; q < k && tries < 20 * k + 20; ++tries)
        if (g.add_edge(h, bg.pool[zipf.draw(extra)])) ++q;
    }
  }
}

void finish(Scenario& s) {
  for (NodeIndex d = 0; d < s.graph.num_domains(); ++d)
    if (s.graph.domain_degree(d) == 1 && !s.labels.count(s.graph.domain(d)))
      s.tail_domains.push_back(s.graph.domain(d));
}

}  // namespace

Scenario build_scenario(const ScenarioSpec& spec) {
  spec.validate();
  Scenario s;
  s.id = "scenario-" + scenario_hash(spec);
  Rng root(spec.master_seed);
  auto bg = add_background(spec, spec.background_hosts, root.split("background"), s.graph, s.reference_labels, "");
  std::unordered_set<std::size_t> infected;
  for (std::size_t i = 0; i < spec.families.size(); ++i) {
    const auto& pf = spec.families[i];
    AttackerSubgraph a;
    a.parent_id = s.id;
    a.family = pf.family.name;
    plant_family(pf, i, root.split("family").split(i), s.graph, bg, infected, a);
    for (const auto& d : a.graph.domains()) {
      s.labels[d] = pf.family.name;
      s.reference_labels[d] = pf.family.name;
    }
    s.attackers.push_back(std::move(a));
  }
  finish(s);
  return s;
}

Scenario build_surrogate(const ScenarioSpec& spec, const std::vector<AttackerSubgraph>& attackers,
                         double host_fraction, std::uint64_t seed) {
  if (host_fraction <= 0 || host_fraction > 1) throw DataError("surrogate: host fraction outside (0,1]");
  ScenarioSpec sub = spec;
  sub.master_seed = seed;
  sub.background_hosts = static_cast<std::size_t>(std::llround(host_fraction * static_cast<double>(spec.background_hosts)));
  sub.benign_groups = static_cast<std::size_t>(std::llround(host_fraction * static_cast<double>(spec.benign_groups)));
  sub.pool_domains = static_cast<std::size_t>(std::llround(host_fraction * static_cast<double>(spec.pool_domains)));
  sub.group_hosts_max = std::min(sub.group_hosts_max, std::max<std::size_t>(sub.background_hosts, 1));
  sub.group_hosts_min = std::min(sub.group_hosts_min, sub.group_hosts_max);
  sub.families.clear();
  sub.validate();
  Scenario s;
  s.id = "surrogate-" + scenario_hash(sub);
  Rng root(seed);
  add_background(sub, sub.background_hosts, root.split("background"), s.graph, s.reference_labels, "s-");
  for (const auto& a : attackers) {
    AttackerSubgraph copy = a;
    copy.parent_id = s.id;
    for (const Edge& e : a.graph.edges()) s.graph.add_edge(a.graph.host(e.host), a.graph.domain(e.domain));
    for (const auto& d : a.graph.domains()) {
      s.labels[d] = a.family;
      s.reference_labels[d] = a.family;
    }
    s.attackers.push_back(std::move(copy));
  }
  finish(s);
  return s;
}

ScenarioSpec desk_scenario(std::uint64_t seed) {
  ScenarioSpec spec;
  spec.master_seed = seed;
  spec.background_hosts = 200;
  spec.benign_groups = 10;
  PlantedFamilySpec pf;
  pf.family = default_family_catalog().front();
  pf.infected_hosts = 10;
  pf.domains = 60;
  // Infected machines are ordinary hosts that also run the malware.
  pf.overlap_background = true;
  pf.extra_background_mean = 10.0;
  spec.families.push_back(pf);
  return spec;
}

}  // namespace graphadv
