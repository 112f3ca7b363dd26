#pragma once

#include <cstdint>
#include <functional>

#include "panjoin/core.hpp"

namespace panjoin {

enum class StructureKind : std::uint8_t { RapTable = 0, WibTree = 1, BiSort = 2, NestedLoop = 3 };

constexpr const char* structure_name(StructureKind k) {
    switch (k) {
        case StructureKind::RapTable: return "rap";
        case StructureKind::WibTree: return "wib";
        case StructureKind::BiSort: return "bis";
        case StructureKind::NestedLoop: return "nlj";
    }
    return "?";
}

// Counters filled by probe_batch when requested. Single-threaded probes only;
// passing stats forces the single-threaded path.
struct ProbeStats {
    std::uint64_t comparisons = 0;   // value comparisons against stored tuples
    std::uint64_t search_steps = 0;  // partition/index search steps
    std::uint64_t emitted = 0;       // matches plus range records
};

// One subwindow's tuple container. Insertion is a single exclusive operation;
// probing is read-only and may run concurrently with other probes, never with
// an insert on the same store (the window layer guarantees the phasing).
class SubwindowStore {
public:
    virtual ~SubwindowStore() = default;

    virtual StructureKind kind() const = 0;
    virtual std::size_t size() const = 0;
    virtual std::size_t capacity() const = 0;

    virtual void insert_batch(const Batch& batch) = 0;
    virtual void probe_batch(const Batch& batch, const JoinCondition& cond, ProbeSink& sink,
                             ProbeStats* stats = nullptr) const = 0;

    virtual void for_each_tuple(const std::function<void(const Tuple&)>& fn) const = 0;

    ProbeResult probe_batch(const Batch& batch, const JoinCondition& cond,
                            ProbeStats* stats = nullptr) const {
        CollectSink sink(batch.tuples.size());
        probe_batch(batch, cond, sink, stats);
        return sink.take();
    }
};

}  // namespace panjoin
