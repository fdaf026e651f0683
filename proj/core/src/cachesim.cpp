#include "pcot/cachesim.hpp"

#include <sstream>

namespace pcot {

namespace {

constexpr std::uint64_t kEmpty = ~std::uint64_t(0);

std::int64_t parse_size(const std::string& tok) {
  if (tok.empty()) fail(ErrorKind::Parse, "cache spec: empty size");
  std::size_t pos = 0;
  std::int64_t v = 0;
  while (pos < tok.size() && tok[pos] >= '0' && tok[pos] <= '9') {
    v = checked_add(checked_mul(v, 10), tok[pos] - '0');
    ++pos;
  }
  if (pos == 0) fail(ErrorKind::Parse, "cache spec: bad size '" + tok + "'");
  if (pos < tok.size()) {
    char c = tok[pos];
    if ((c == 'k' || c == 'K') && pos + 1 == tok.size())
      v = checked_mul(v, 1024);
    else if ((c == 'm' || c == 'M') && pos + 1 == tok.size())
      v = checked_mul(v, 1024 * 1024);
    else
      fail(ErrorKind::Parse, "cache spec: bad size suffix '" + tok + "'");
  }
  return v;
}

}  // namespace

CacheConfig parse_cache_spec(const std::string& spec) {
  if (spec == "tiny") return parse_cache_spec("4k:4:64");
  if (spec == "desk-llc") return parse_cache_spec("1m:16:64");
  if (spec == "l1") return parse_cache_spec("32k:8:64");
  if (spec == "l1l2") return parse_cache_spec("32k:8:64,1m:16:64");
  if (spec == "l1l2l3") return parse_cache_spec("32k:8:64,1m:16:64,8m:16:64");

  CacheConfig cfg;
  std::stringstream ss(spec);
  std::string level;
  while (std::getline(ss, level, ',')) {
    std::stringstream ls(level);
    std::string size, assoc, line;
    if (!std::getline(ls, size, ':') || !std::getline(ls, assoc, ':') ||
        !std::getline(ls, line, ':'))
      fail(ErrorKind::Parse, "cache spec: expected SIZE:ASSOC:LINE in '" + level + "'");
    std::string extra;
    if (std::getline(ls, extra, ':'))
      fail(ErrorKind::Parse, "cache spec: trailing fields in '" + level + "'");
    CacheLevelConfig lc;
    lc.size_bytes = parse_size(size);
    lc.assoc = int(parse_size(assoc));
    lc.line_bytes = int(parse_size(line));
    if (lc.assoc <= 0 || lc.line_bytes <= 0 || lc.size_bytes <= 0)
      fail(ErrorKind::Parse, "cache spec: non-positive field in '" + level + "'");
    if (lc.size_bytes % (std::int64_t(lc.assoc) * lc.line_bytes) != 0)
      fail(ErrorKind::Parse, "cache spec: size not divisible by assoc*line in '" + level + "'");
    cfg.levels.push_back(lc);
  }
  if (cfg.levels.empty()) fail(ErrorKind::Parse, "cache spec: no levels");
  return cfg;
}

std::string cache_spec_string(const CacheConfig& c) {
  std::ostringstream os;
  for (std::size_t i = 0; i < c.levels.size(); ++i) {
    if (i) os << ",";
    os << c.levels[i].size_bytes << ":" << c.levels[i].assoc << ":"
       << c.levels[i].line_bytes;
  }
  return os.str();
}

CacheSim::CacheSim(const CacheConfig& cfg) {
  if (cfg.levels.empty()) fail(ErrorKind::Validation, "CacheSim: no levels");
  for (const auto& lc : cfg.levels) {
    Level l;
    l.line = std::uint64_t(lc.line_bytes);
    l.assoc = std::uint32_t(lc.assoc);
    l.sets = std::uint64_t(lc.size_bytes) / (l.line * l.assoc);
    l.tags.assign(l.sets * l.assoc, kEmpty);
    l.stamps.assign(l.sets * l.assoc, 0);
    levels_.push_back(std::move(l));
  }
  stats_.levels.assign(levels_.size(), {});
}

void CacheSim::access(std::uint64_t addr) {
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    Level& l = levels_[i];
    auto& st = stats_.levels[i];
    ++st.accesses;
    std::uint64_t line_addr = addr / l.line;
    std::uint64_t set = line_addr % l.sets;
    std::uint64_t* tags = &l.tags[set * l.assoc];
    std::uint64_t* stamps = &l.stamps[set * l.assoc];
    ++l.counter;
    bool hit = false;
    int empty_way = -1;
    std::uint32_t lru_way = 0;
    for (std::uint32_t w = 0; w < l.assoc; ++w) {
      if (tags[w] == line_addr) {
        stamps[w] = l.counter;
        hit = true;
        break;
      }
      if (tags[w] == kEmpty) {
        if (empty_way < 0) empty_way = int(w);
      } else if (stamps[w] < stamps[lru_way] || tags[lru_way] == kEmpty) {
        lru_way = w;
      }
    }
    if (hit) return;
    ++st.misses;
    std::uint32_t victim = empty_way >= 0 ? std::uint32_t(empty_way) : lru_way;
    tags[victim] = line_addr;
    stamps[victim] = l.counter;
    // fall through to the next level
  }
}

void CacheSim::on_batch(const TraceEvent* ev, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) access(ev[i].addr);
}

void CacheSim::reset() {
  for (auto& l : levels_) {
    std::fill(l.tags.begin(), l.tags.end(), kEmpty);
    std::fill(l.stamps.begin(), l.stamps.end(), 0);
    l.counter = 0;
  }
  for (auto& s : stats_.levels) s = {};
}

}  // namespace pcot
