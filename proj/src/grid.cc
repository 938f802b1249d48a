#include "terids/grid.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "terids/cdd.h"

namespace terids {

std::vector<DistInterval> TupleRect(const TupleProfile& profile) {
  std::vector<DistInterval> out;
  for (const auto& p : profile.piv) out.push_back(p.front());
  return out;
}

ErGrid::ErGrid(int dims, double cell_width) : dims_(dims), width_(cell_width) {
  if (dims < 1) throw Error(ErrorCode::kConfigError, "grid needs at least one dimension");
  if (!(cell_width > 0.0 && cell_width <= 1.0))
    throw Error(ErrorCode::kConfigError, "cell width must be in (0,1]");
  ncells_ = std::max(1, static_cast<int>(std::ceil(1.0 / cell_width - 1e-9)));
}

int ErGrid::CellIndex(double coord) const {
  return std::clamp(static_cast<int>(std::floor(coord / width_)), 0, ncells_ - 1);
}

// Eviction defers the rebuild of the full aggregate until a query or a
// reader needs it.
void ErGrid::Refresh(Cell& c) const {
  if (!c.dirty) return;
  c.agg = TupleProfile{};
  for (auto m : c.members) CoverProfile(c.agg, slots_[m].profile);
  c.dirty = false;
}

const std::map<ErGrid::CellKey, ErGrid::Cell>& ErGrid::cells() const {
  for (auto& [key, c] : cells_) Refresh(c);
  return cells_;
}

void ErGrid::Insert(const std::string& rid, int stream, const TupleProfile& profile) {
  if (by_rid_.count(rid)) throw Error(ErrorCode::kDuplicateTuple, "tuple " + rid + " already in grid");
  if (static_cast<int>(profile.piv.size()) != dims_)
    throw Error(ErrorCode::kConfigError, "profile arity does not match grid");
  std::uint32_t slot;
  if (!free_.empty()) {
    slot = free_.back();
    free_.pop_back();
  } else {
    slot = static_cast<std::uint32_t>(slots_.size());
    slots_.emplace_back();
  }
  Member& m = slots_[slot];
  m = Member{};
  m.rid = rid;
  m.stream = stream;
  m.profile = profile;
  m.keyword = profile.keywords.Any();

  // Enumerate every cell of the rectangle.
  std::vector<int> lo(dims_), hi(dims_);
  for (int x = 0; x < dims_; ++x) {
    lo[x] = CellIndex(profile.piv[x][0].lb);
    hi[x] = CellIndex(profile.piv[x][0].ub);
  }
  CellKey key = lo;
  while (true) {
    m.cells.push_back(key);
    int x = dims_ - 1;
    while (x >= 0 && key[x] == hi[x]) {
      key[x] = lo[x];
      --x;
    }
    if (x < 0) break;
    ++key[x];
  }
  for (const auto& k : m.cells) {
    auto [it, fresh] = cells_.try_emplace(k);
    Cell& c = it->second;
    c.members.push_back(slot);
    if (!c.dirty) CoverProfile(c.agg, m.profile);
    if (m.keyword) {
      c.kw_members.push_back(slot);
      CoverProfile(c.kw_agg, m.profile);
      keyword_cells_.insert(&it->first);
    }
  }
  by_rid_.emplace(rid, slot);
  ++live_per_stream_[stream];
  if (!m.keyword) ++plain_per_stream_[stream];
}

void ErGrid::Evict(const std::string& rid) {
  auto found = by_rid_.find(rid);
  if (found == by_rid_.end()) throw Error(ErrorCode::kUnknownTuple, "tuple " + rid + " not in grid");
  const std::uint32_t slot = found->second;
  Member& m = slots_[slot];
  for (const auto& k : m.cells) {
    auto it = cells_.find(k);
    Cell& c = it->second;
    c.members.erase(std::find(c.members.begin(), c.members.end(), slot));
    if (m.keyword) {
      c.kw_members.erase(std::find(c.kw_members.begin(), c.kw_members.end(), slot));
      c.kw_agg = TupleProfile{};
      for (auto k : c.kw_members) CoverProfile(c.kw_agg, slots_[k].profile);
      if (c.kw_members.empty()) keyword_cells_.erase(&it->first);
    }
    if (c.members.empty()) {
      cells_.erase(it);
      continue;
    }
    c.dirty = true;
  }
  if (--live_per_stream_[m.stream] == 0) live_per_stream_.erase(m.stream);
  if (!m.keyword && --plain_per_stream_[m.stream] == 0) plain_per_stream_.erase(m.stream);
  m = Member{};
  free_.push_back(slot);
  by_rid_.erase(found);
}

std::vector<std::string> ErGrid::Candidates(const TupleProfile& q, int stream,
                                            const QueryConfig& cfg, GridQueryStats* stats) const {
  std::vector<std::string> out;
  const std::uint64_t gen = ++generation_;
  const bool q_keyword = q.keywords.Any();

  std::uint64_t others = 0, plain_others = 0;
  for (const auto& [s, n] : live_per_stream_)
    if (s != stream) others += n;
  for (const auto& [s, n] : plain_per_stream_)
    if (s != stream) plain_others += n;
  // Without a keyword in q, only keyword-bearing members can match.
  const std::uint64_t eligible = q_keyword ? others : others - plain_others;

  // Query box along main-pivot coordinates: each attribute's distance is
  // below d - gamma for any match.
  const double reach = cfg.dims - cfg.gamma;
  std::vector<int> lo(dims_), hi(dims_);
  for (int x = 0; x < dims_; ++x) {
    lo[x] = CellIndex(q.piv[x][0].lb - reach);
    hi[x] = CellIndex(q.piv[x][0].ub + reach);
  }

  std::array<std::uint64_t, kPruneStageCount> marked{};
  std::uint64_t survivors = 0, scanned = 0;
  // Without a keyword in q only keyword members matter, summarized by kw_agg.
  auto visit = [&](const CellKey& key, Cell& c) {
    for (int x = 0; x < dims_; ++x)
      if (key[x] < lo[x] || key[x] > hi[x]) return;
    ++scanned;
    if (q_keyword) Refresh(c);
    const TupleProfile& agg = q_keyword ? c.agg : c.kw_agg;
    int reason = 0;
    if (SimUbSize(q, agg) <= cfg.gamma - kGammaTol)
      reason = static_cast<int>(PruneStage::kSimUbSize) + 1;
    else if (SimUbPivot(q, agg) <= cfg.gamma - kGammaTol)
      reason = static_cast<int>(PruneStage::kSimUbPivot) + 1;
    for (auto slot : q_keyword ? c.members : c.kw_members) {
      const Member& m = slots_[slot];
      if (m.stream == stream) continue;
      if (m.stamp != gen) {
        m.stamp = gen;
        m.state = 0;
      }
      if (m.state == kPruneStageCount + 1) continue;  // already a survivor
      if (reason == 0) {
        if (m.state != 0) --marked[m.state - 1];
        m.state = kPruneStageCount + 1;
        ++survivors;
        out.push_back(m.rid);
      } else if (m.state == 0 || reason < m.state) {
        if (m.state != 0) --marked[m.state - 1];
        m.state = reason;
        ++marked[reason - 1];
      }
    }
  };
  if (q_keyword) {
    for (auto& [key, c] : cells_) visit(key, c);
  } else {
    for (const CellKey* key : keyword_cells_) visit(*key, cells_.find(*key)->second);
  }

  if (stats) {
    *stats = GridQueryStats{};
    stats->considered = others;
    stats->cells_scanned = scanned;
    stats->pruned = marked;
    stats->pruned[static_cast<int>(PruneStage::kKeyword)] += others - eligible;
    std::uint64_t touched = survivors;
    for (auto n : marked) touched += n;
    // Members outside the query box fail the per-attribute pivot bound.
    stats->pruned[static_cast<int>(PruneStage::kSimUbPivot)] += eligible - touched;
  }
  return out;
}

std::vector<ErGrid::CellKey> ErGrid::CellsOf(const std::string& rid) const {
  auto it = by_rid_.find(rid);
  if (it == by_rid_.end()) throw Error(ErrorCode::kUnknownTuple, "tuple " + rid + " not in grid");
  return slots_[it->second].cells;
}

const TupleProfile& ErGrid::ProfileOf(const std::string& rid) const {
  auto it = by_rid_.find(rid);
  if (it == by_rid_.end()) throw Error(ErrorCode::kUnknownTuple, "tuple " + rid + " not in grid");
  return slots_[it->second].profile;
}

std::string ErGrid::Dump() const {
  std::ostringstream os;
  for (const auto& [key, c] : cells()) {
    os << "cell";
    for (int k : key) os << ' ' << k;
    os << " kw=" << c.agg.keywords.ToString() << " si=";
    for (const auto& s : c.agg.sizes) os << s.min_size << ':' << s.max_size << ',';
    os << " piv=";
    for (const auto& p : c.agg.piv)
      for (const auto& iv : p) os << FormatDouble(iv.lb) << ':' << FormatDouble(iv.ub) << ',';
    os << " members=";
    for (auto m : c.members) os << slots_[m].rid << ',';
    os << '\n';
  }
  return os.str();
}

}  // namespace terids
