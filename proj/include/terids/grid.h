#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "terids/metric.h"
#include "terids/model.h"
#include "terids/prune.h"

namespace terids {

// Per attribute, [min, max] of the candidates' distances to the main pivot.
std::vector<DistInterval> TupleRect(const TupleProfile& profile);

// Cell-level pruning tallies of one candidate query, over live members of
// other streams. Indexed by PruneStage.
struct GridQueryStats {
  std::array<std::uint64_t, kPruneStageCount> pruned{};
  std::uint64_t considered = 0;  // other-stream members at query time
  std::uint64_t cells_scanned = 0;
};

// Uniform grid over main-pivot coordinates of windowed imputed tuples.
class ErGrid {
 public:
  using CellKey = std::vector<int>;

  struct Cell {
    std::vector<std::uint32_t> members;     // member slots, insertion order
    std::vector<std::uint32_t> kw_members;  // keyword-bearing subset
    TupleProfile agg;                       // over members
    TupleProfile kw_agg;                    // over kw_members
    bool dirty = false;                     // agg awaits recomputation
  };

  explicit ErGrid(int dims, double cell_width = 0.1);

  int dims() const { return dims_; }
  double cell_width() const { return width_; }
  std::size_t size() const { return by_rid_.size(); }
  bool Contains(const std::string& rid) const { return by_rid_.count(rid) > 0; }

  // Throws kDuplicateTuple.
  void Insert(const std::string& rid, int stream, const TupleProfile& profile);
  // Throws kUnknownTuple.
  void Evict(const std::string& rid);

  // Rids of other-stream members surviving cell-level pruning, unordered.
  std::vector<std::string> Candidates(const TupleProfile& q, int stream, const QueryConfig& cfg,
                                      GridQueryStats* stats = nullptr) const;

  int CellIndex(double coord) const;
  // Aggregates are refreshed before returning.
  const std::map<CellKey, Cell>& cells() const;
  // Cells a member is registered in.
  std::vector<CellKey> CellsOf(const std::string& rid) const;
  const TupleProfile& ProfileOf(const std::string& rid) const;

  // Canonical text form of the whole grid.
  std::string Dump() const;

 private:
  struct Member {
    std::string rid;
    int stream = 0;
    TupleProfile profile;
    bool keyword = false;
    std::vector<CellKey> cells;
    mutable std::uint64_t stamp = 0;
    mutable int state = 0;  // per-query: 0 unseen, else PruneStage + 1
  };

  void Refresh(Cell& c) const;

  int dims_;
  double width_;
  int ncells_;
  std::vector<Member> slots_;
  std::vector<std::uint32_t> free_;
  std::unordered_map<std::string, std::uint32_t> by_rid_;
  mutable std::map<CellKey, Cell> cells_;
  std::set<const CellKey*> keyword_cells_;  // cells with keyword members
  std::map<int, std::uint64_t> live_per_stream_;
  std::map<int, std::uint64_t> plain_per_stream_;  // members without any keyword
  mutable std::uint64_t generation_ = 0;
};

}  // namespace terids
