#pragma once

#include <optional>
#include <span>
#include <vector>

#include "panjoin/llat.hpp"
#include "panjoin/store.hpp"

namespace panjoin {

// Range-partition boundaries. With splitters s_1..s_{P-1}, partition i holds
// values in [s_{i-1}, s_i), where s_0 is the domain minimum and s_P is one
// past the domain maximum. Equal splitters are allowed; the zero-width
// partitions they form simply stay empty.
class PartitionTable {
public:
    explicit PartitionTable(std::vector<Value> splitters);

    // Evenly divides the full 32-bit value range.
    static PartitionTable uniform(std::uint32_t partitions);

    std::uint32_t partition_count() const {
        return static_cast<std::uint32_t>(splitters_.size() + 1);
    }
    std::span<const Value> splitters() const { return splitters_; }

    std::uint32_t find(Value v) const;
    std::uint32_t find_hinted(Value v, std::uint32_t hint) const;

    friend bool operator==(const PartitionTable&, const PartitionTable&) = default;

private:
    std::vector<Value> splitters_;
};

// Per-partition runtime sampling: tuple count plus min/max value. min/max are
// meaningful only where count > 0.
struct Histograms {
    std::vector<std::uint64_t> count;
    std::vector<Value> min_value;
    std::vector<Value> max_value;

    explicit Histograms(std::uint32_t partitions = 0)
        : count(partitions, 0), min_value(partitions, 0), max_value(partitions, 0) {}

    void record(std::uint32_t partition, Value v) {
        if (count[partition] == 0) {
            min_value[partition] = v;
            max_value[partition] = v;
        } else {
            if (v < min_value[partition]) min_value[partition] = v;
            if (v > max_value[partition]) max_value[partition] = v;
        }
        ++count[partition];
    }
};

struct AdjustStats {
    std::uint64_t loop_iterations = 0;
};

// Equi-depth splitter adjustment: one O(P) pass over the count histogram
// places each balancing indicator bal_j = (N/P)*j inside a source partition
// and interpolates the new splitter from that partition's min/max, assuming
// values are uniform inside it. Output splitters are clamped non-decreasing.
PartitionTable adjust_splitters(const Histograms& hist, std::uint64_t total,
                                std::uint32_t partitions, AdjustStats* stats = nullptr);

// Mean absolute deviation of per-partition counts from N/P, divided by N/P.
double normalized_mae(std::span<const std::uint64_t> counts, std::uint64_t total,
                      std::uint32_t partitions);

struct RapConfig {
    std::uint32_t partitions = 64;
    std::size_t capacity = 0;  // N_sub
    double sigma = 1.25;
    unsigned probe_threads = 1;
};

// Range-partitioned subwindow: partition table + histograms + LLAT storage.
class RapTable : public SubwindowStore {
public:
    RapTable(const RapConfig& cfg, PartitionTable table);
    explicit RapTable(const RapConfig& cfg)
        : RapTable(cfg, PartitionTable::uniform(cfg.partitions)) {}

    StructureKind kind() const override { return StructureKind::RapTable; }
    std::size_t size() const override { return store_.size(); }
    std::size_t capacity() const override { return cfg_.capacity; }

    void insert_batch(const Batch& batch) override;
    using SubwindowStore::probe_batch;
    void probe_batch(const Batch& batch, const JoinCondition& cond, ProbeSink& sink,
                     ProbeStats* stats = nullptr) const override;
    void for_each_tuple(const std::function<void(const Tuple&)>& fn) const override;

    Tuple expire_for_key(std::uint32_t partition);

    const PartitionTable& table() const { return table_; }
    const Histograms& histograms() const { return hist_; }
    const Llat& store() const { return store_; }

    // Successor subwindow's table, derived from this subwindow's sampling.
    PartitionTable adjusted_table(AdjustStats* stats = nullptr) const {
        return adjust_splitters(hist_, store_.size(), table_.partition_count(), stats);
    }

private:
    struct ProbeBound;

    void probe_not_equal(const Batch& batch, ProbeSink& sink, ProbeStats* stats) const;
    void probe_bands(const Batch& batch, const JoinCondition& cond, ProbeSink& sink,
                     ProbeStats* stats) const;
    void sweep_partitions(std::span<const ProbeBound> bounds, std::uint32_t p_first,
                          std::uint32_t p_last, ProbeSink& sink, ProbeStats* stats) const;

    RapConfig cfg_;
    PartitionTable table_;
    Histograms hist_;
    Llat store_;
};

}  // namespace panjoin
