#include "commtrack/social.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>

#include "commtrack/io.hpp"

namespace commtrack {
namespace {

// Howard Hinnant's days_from_civil / civil_from_days.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m > 2 ? m - 3 : m + 9) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const auto doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp < 10 ? mp + 3 : mp - 9;
  y = static_cast<std::int64_t>(yoe) + era * 400 + (m <= 2);
}

bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > s.size()) return false;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  std::from_chars(s.data() + pos, s.data() + pos + len, out);
  return true;
}

unsigned days_in_month(int y, int m) {
  static constexpr unsigned kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
  return m == 2 && leap ? 29 : kDays[m - 1];
}

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

}  // namespace

std::optional<std::int64_t> parse_utc_day(std::string_view s) {
  int y = 0, mo = 0, d = 0;
  if (!read_int(s, 0, 4, y) || s.size() < 10 || s[4] != '-' || !read_int(s, 5, 2, mo) || s[7] != '-' ||
      !read_int(s, 8, 2, d)) {
    return std::nullopt;
  }
  if (mo < 1 || mo > 12 || d < 1 || static_cast<unsigned>(d) > days_in_month(y, mo)) return std::nullopt;
  std::int64_t day = days_from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d));
  if (s.size() == 10) return day;
  if (s[10] != 'T' && s[10] != ' ') return std::nullopt;
  int hh, mm, ss = 0;
  if (!read_int(s, 11, 2, hh) || s.size() < 16 || s[13] != ':' || !read_int(s, 14, 2, mm)) return std::nullopt;
  std::size_t pos = 16;
  if (pos < s.size() && s[pos] == ':') {
    if (!read_int(s, pos + 1, 2, ss)) return std::nullopt;
    pos += 3;
    if (pos < s.size() && s[pos] == '.') {
      ++pos;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    }
  }
  if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
  int offset_minutes = 0;
  if (pos < s.size()) {
    if (s[pos] == 'Z' && pos + 1 == s.size()) {
      // UTC
    } else if (s[pos] == '+' || s[pos] == '-') {
      int oh, om;
      if (!read_int(s, pos + 1, 2, oh)) return std::nullopt;
      std::size_t mpos = pos + 3;
      if (mpos < s.size() && s[mpos] == ':') ++mpos;
      if (!read_int(s, mpos, 2, om) || mpos + 2 != s.size() || oh > 23 || om > 59) return std::nullopt;
      offset_minutes = (oh * 60 + om) * (s[pos] == '+' ? 1 : -1);
    } else {
      return std::nullopt;
    }
  }
  const int minutes = hh * 60 + mm - offset_minutes;
  if (minutes < 0) --day;
  if (minutes >= 24 * 60) ++day;
  return day;
}

std::string format_day(std::int64_t day) {
  std::int64_t y;
  unsigned m, d;
  civil_from_days(day, y, m, d);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04lld-%02u-%02u", static_cast<long long>(y), m, d);
  return buf;
}

std::vector<std::string> normalize_hashtags(std::string_view raw) {
  std::vector<std::string> out;
  while (!raw.empty()) {
    const auto comma = raw.find(',');
    std::string tag = trim(raw.substr(0, comma));
    raw = comma == std::string_view::npos ? std::string_view{} : raw.substr(comma + 1);
    tag.erase(0, tag.find_first_not_of('#'));
    std::transform(tag.begin(), tag.end(), tag.begin(), [](unsigned char c) { return std::tolower(c); });
    if (!tag.empty()) out.push_back(std::move(tag));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<TweetRecord> read_tweets(std::istream& in) {
  std::vector<TweetRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line[0] == '#') continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t1 == std::string::npos) throw ParseError(lineno, "expected 'user<TAB>timestamp<TAB>tags'");
    TweetRecord rec;
    rec.user = trim(std::string_view(line).substr(0, t1));
    const std::string stamp = trim(std::string_view(line).substr(t1 + 1, t2 == std::string::npos ? t2 : t2 - t1 - 1));
    const auto day = parse_utc_day(stamp);
    if (!day) throw ParseError(lineno, "unparseable timestamp '" + stamp + "'");
    if (rec.user.empty()) throw ParseError(lineno, "empty user id");
    rec.day = *day;
    if (t2 != std::string::npos) rec.hashtags = normalize_hashtags(std::string_view(line).substr(t2 + 1));
    out.push_back(std::move(rec));
  }
  return out;
}

CohashtagSeries build_cohashtag_series(std::span<const TweetRecord> tweets) {
  if (tweets.empty()) throw Error("no tweet records");
  CohashtagSeries out;
  // day -> user -> tag -> count
  std::map<std::int64_t, std::map<NodeId, std::map<std::string, std::size_t>>> by_day;
  for (const auto& rec : tweets) {
    if (rec.hashtags.empty()) continue;
    const NodeId u = out.series.nodes.intern(rec.user);
    auto& tags = by_day[rec.day][u];
    for (const auto& tag : rec.hashtags) ++tags[tag];
  }
  const std::size_t n = out.series.nodes.size();
  for (auto& [day, users] : by_day) {
    std::map<std::string, std::vector<NodeId>> holders;
    for (const auto& [u, tags] : users) {
      for (const auto& [tag, count] : tags) holders[tag].push_back(u);
    }
    GraphBuilder builder(n);
    bool any = false;
    for (const auto& [tag, us] : holders) {
      for (std::size_t i = 0; i < us.size(); ++i) {
        for (std::size_t j = i + 1; j < us.size(); ++j) {
          builder.add_edge(us[i], us[j], 1.0);
          any = true;
        }
      }
    }
    if (!any) continue;
    for (const auto& [u, tags] : users) builder.add_vertex(u);
    out.series.snapshots.push_back({builder.build(), format_day(day)});
    out.days.push_back(day);
    out.usage.push_back(std::move(users));
  }
  return out;
}

double hashtags_overlap(std::span<const std::string> h1, std::span<const std::string> h2) {
  if (h1.empty() || h2.empty()) throw Error("hashtags overlap is undefined for an empty set");
  std::size_t shared = 0;
  auto i = h1.begin(), j = h2.begin();
  while (i != h1.end() && j != h2.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++shared;
      ++i;
      ++j;
    }
  }
  return static_cast<double>(shared) / static_cast<double>(std::min(h1.size(), h2.size()));
}

ProfileTable hashtag_profiles(const CohashtagSeries& data, std::span<const Partition> partitions, std::size_t top_k) {
  if (partitions.size() > data.usage.size()) throw Error("more partitions than co-hashtag snapshots");
  ProfileTable out(partitions.size());
  for (std::size_t t = 0; t < partitions.size(); ++t) {
    for (const auto& community : partitions[t].communities) {
      std::map<std::string, std::size_t> counts;
      for (NodeId v : community) {
        auto it = data.usage[t].find(v);
        if (it == data.usage[t].end()) continue;
        for (const auto& [tag, c] : it->second) counts[tag] += c;
      }
      HashtagProfile p;
      for (const auto& [tag, c] : counts) {
        p.tags.push_back(tag);
        p.top.push_back({tag, c});
      }
      std::stable_sort(p.top.begin(), p.top.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
      if (p.top.size() > top_k) p.top.resize(top_k);
      out[t].push_back(std::move(p));
    }
  }
  return out;
}

std::optional<double> average_hashtags_overlap(const DynamicCommunity& d, const ProfileTable& profiles) {
  std::set<CommunityRef> refs(d.timeline.begin(), d.timeline.end());
  if (refs.size() < 2) return std::nullopt;
  std::vector<const std::vector<std::string>*> sets;
  for (const auto& r : refs) sets.push_back(&profiles.at(r.snapshot).at(r.community).tags);
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (std::size_t j = i + 1; j < sets.size(); ++j) {
      sum += hashtags_overlap(*sets[i], *sets[j]);
      ++pairs;
    }
  }
  return sum / static_cast<double>(pairs);
}

std::vector<SummaryRow> community_summary(std::span<const DynamicCommunity> communities,
                                          const ProfileTable& profiles) {
  std::vector<SummaryRow> rows;
  for (const auto& d : communities) {
    std::set<std::uint32_t> days;
    for (const auto& r : d.timeline) days.insert(r.snapshot);
    rows.push_back({d.id, d.nodes.size(), days.size(), average_hashtags_overlap(d, profiles)});
  }
  return rows;
}

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows) {
  out << "dyncomm,members,days,avg_overlap\n";
  for (const auto& r : rows) {
    out << r.dyncomm << ',' << r.members << ',' << r.days << ',';
    if (r.avg_overlap) out << format_double(*r.avg_overlap);
    out << '\n';
  }
}

void write_top_hashtags_csv(std::ostream& out, const CohashtagSeries& data, const ProfileTable& profiles) {
  out << "snapshot,date,community,rank,tag,count\n";
  for (std::size_t t = 0; t < profiles.size(); ++t) {
    for (std::size_t c = 0; c < profiles[t].size(); ++c) {
      const auto& top = profiles[t][c].top;
      for (std::size_t k = 0; k < top.size(); ++k) {
        out << t + 1 << ',' << format_day(data.days[t]) << ',' << c << ',' << k + 1 << ',' << top[k].first << ','
            << top[k].second << '\n';
      }
    }
  }
}

}  // namespace commtrack
