#include "graphadv/scenario_file.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>

#include "graphadv/errors.hpp"
#include "graphadv/rng.hpp"

namespace graphadv {

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string fmt_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
  throw DataError("scenario line " + std::to_string(line) + ": " + msg);
}

std::uint64_t to_u64(std::size_t line, const std::string& v) {
  std::uint64_t out = 0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) fail(line, "expected an integer, got '" + v + "'");
  return out;
}

double to_real(std::size_t line, const std::string& v) {
  double out = 0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) fail(line, "expected a number, got '" + v + "'");
  return out;
}

std::pair<std::uint64_t, std::uint64_t> to_range(std::size_t line, const std::string& v) {
  auto dash = v.find('-');
  if (dash == std::string::npos) {
    auto x = to_u64(line, v);
    return {x, x};
  }
  return {to_u64(line, trim(v.substr(0, dash))), to_u64(line, trim(v.substr(dash + 1)))};
}

bool to_bool(std::size_t line, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(line, "expected true/false, got '" + v + "'");
}

std::vector<std::string> to_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void set_family_key(PlantedFamilySpec& f, std::size_t line, const std::string& key, const std::string& v) {
  if (key == "name") f.family.name = v;
  else if (key == "charset") f.family.charset = v;
  else if (key == "length") {
    auto [lo, hi] = to_range(line, v);
    f.family.min_length = static_cast<int>(lo);
    f.family.max_length = static_cast<int>(hi);
  } else if (key == "tlds") f.family.tlds = to_list(v);
  else if (key == "seed") f.family.seed = to_u64(line, v);
  else if (key == "style") {
    if (v == "random-chars") f.family.style = DgaStyle::random_chars;
    else if (v == "dictionary-words") f.family.style = DgaStyle::dictionary_words;
    else fail(line, "unknown style '" + v + "'");
  } else if (key == "infected_hosts") f.infected_hosts = to_u64(line, v);
  else if (key == "domains") f.domains = to_u64(line, v);
  else if (key == "sharing") {
    if (v == "all") f.sharing = {SharingModel::Kind::all, 0, 1.0};
    else if (v.rfind("subset:", 0) == 0) f.sharing = {SharingModel::Kind::subset, to_u64(line, v.substr(7)), 1.0};
    else if (v.rfind("fraction:", 0) == 0) f.sharing = {SharingModel::Kind::fraction, 0, to_real(line, v.substr(9))};
    else fail(line, "unknown sharing model '" + v + "'");
  } else if (key == "overlap_background") f.overlap_background = to_bool(line, v);
  else if (key == "extra_background_mean") f.extra_background_mean = to_real(line, v);
  else fail(line, "unknown family key '" + key + "'");
}

void set_top_key(ScenarioSpec& s, std::size_t line, const std::string& key, const std::string& v) {
  if (key == "master_seed") s.master_seed = to_u64(line, v);
  else if (key == "background_hosts") s.background_hosts = to_u64(line, v);
  else if (key == "background_degree_mean") s.background_degree_mean = to_real(line, v);
  else if (key == "pool_domains") s.pool_domains = to_u64(line, v);
  else if (key == "pool_zipf_exponent") s.pool_zipf_exponent = to_real(line, v);
  else if (key == "private_fraction") s.private_fraction = to_real(line, v);
  else if (key == "benign_groups") s.benign_groups = to_u64(line, v);
  else if (key == "group_hosts") std::tie(s.group_hosts_min, s.group_hosts_max) = to_range(line, v);
  else if (key == "group_domains") std::tie(s.group_domains_min, s.group_domains_max) = to_range(line, v);
  else if (key == "group_density") s.group_density = to_real(line, v);
  else fail(line, "unknown key '" + key + "'");
}

}  // namespace

ScenarioSpec parse_scenario(std::istream& in) {
  ScenarioSpec spec;
  spec.families.clear();
  PlantedFamilySpec* current = nullptr;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string text = trim(raw);
    if (text.empty() || text[0] == '#') continue;
    if (text == "[family]") {
      spec.families.emplace_back();
      current = &spec.families.back();
      continue;
    }
    if (text.front() == '[') fail(line, "unknown section " + text);
    auto eq = text.find('=');
    if (eq == std::string::npos) fail(line, "expected key = value");
    std::string key = trim(text.substr(0, eq));
    std::string value = trim(text.substr(eq + 1));
    if (current) set_family_key(*current, line, key, value);
    else set_top_key(spec, line, key, value);
  }
  spec.validate();
  return spec;
}

ScenarioSpec read_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open scenario " + path.string());
  return parse_scenario(in);
}

std::string format_scenario(const ScenarioSpec& s) {
  std::ostringstream os;
  os << "# graphadv scenario\n"
     << "master_seed = " << s.master_seed << "\n"
     << "background_hosts = " << s.background_hosts << "\n"
     << "background_degree_mean = " << fmt_real(s.background_degree_mean) << "\n"
     << "pool_domains = " << s.pool_domains << "\n"
     << "pool_zipf_exponent = " << fmt_real(s.pool_zipf_exponent) << "\n"
     << "private_fraction = " << fmt_real(s.private_fraction) << "\n"
     << "benign_groups = " << s.benign_groups << "\n"
     << "group_hosts = " << s.group_hosts_min << "-" << s.group_hosts_max << "\n"
     << "group_domains = " << s.group_domains_min << "-" << s.group_domains_max << "\n"
     << "group_density = " << fmt_real(s.group_density) << "\n";
  for (const auto& f : s.families) {
    os << "\n[family]\n"
       << "name = " << f.family.name << "\n"
       << "charset = " << f.family.charset << "\n"
       << "length = " << f.family.min_length << "-" << f.family.max_length << "\n"
       << "tlds = ";
    for (std::size_t i = 0; i < f.family.tlds.size(); ++i) os << (i ? "," : "") << f.family.tlds[i];
    os << "\n"
       << "seed = " << f.family.seed << "\n"
       << "style = " << (f.family.style == DgaStyle::random_chars ? "random-chars" : "dictionary-words") << "\n"
       << "infected_hosts = " << f.infected_hosts << "\n"
       << "domains = " << f.domains << "\n"
       << "sharing = ";
    switch (f.sharing.kind) {
      case SharingModel::Kind::all: os << "all"; break;
      case SharingModel::Kind::subset: os << "subset:" << f.sharing.subset_size; break;
      case SharingModel::Kind::fraction: os << "fraction:" << fmt_real(f.sharing.fraction); break;
    }
    os << "\n"
       << "overlap_background = " << (f.overlap_background ? "true" : "false") << "\n"
       << "extra_background_mean = " << fmt_real(f.extra_background_mean) << "\n";
  }
  return os.str();
}

std::string scenario_hash(const ScenarioSpec& spec) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash_string(format_scenario(spec))));
  return buf;
}

}  // namespace graphadv
