#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace panjoin {

using Key = std::uint32_t;
using Value = std::uint32_t;

inline constexpr Value kValueMin = 0;
inline constexpr Value kValueMax = std::numeric_limits<Value>::max();

// The unit of stream input. `key` identifies the tuple, `value` is the join
// attribute. Keys are unique within one stream's live window.
struct Tuple {
    Key key = 0;
    Value value = 0;

    friend bool operator==(const Tuple&, const Tuple&) = default;
};

enum class StreamId : std::uint8_t { S = 0, R = 1 };

constexpr StreamId opposite(StreamId s) {
    return s == StreamId::S ? StreamId::R : StreamId::S;
}

constexpr const char* stream_name(StreamId s) {
    return s == StreamId::S ? "S" : "R";
}

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct EmptyBatchError : std::runtime_error {
    EmptyBatchError() : std::runtime_error("batch must not be empty") {}
};

struct CapacityExceededError : std::runtime_error {
    explicit CapacityExceededError(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyPartitionError : std::runtime_error {
    explicit EmptyPartitionError(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateHistogramError : std::runtime_error {
    DegenerateHistogramError() : std::runtime_error("histogram holds no tuples") {}
};

struct NothingToExpireError : std::runtime_error {
    NothingToExpireError() : std::runtime_error("no sealed subwindow to expire") {}
};

struct WatermarkRegressionError : std::runtime_error {
    WatermarkRegressionError() : std::runtime_error("watermark must not move backwards") {}
};

struct ProtocolViolationError : std::runtime_error {
    explicit ProtocolViolationError(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Join conditions
// ---------------------------------------------------------------------------

enum class ConditionKind : std::uint8_t { Equi = 0, NotEqual = 1, Band = 2, MultiBand = 3 };

// One band of a multi-band predicate, as a closed offset interval relative to
// the probe value: the band matches x in [v + lo, v + hi].
struct BandOffset {
    std::int32_t lo = 0;
    std::int32_t hi = 0;

    friend bool operator==(const BandOffset&, const BandOffset&) = default;
};

class JoinCondition {
public:
    static JoinCondition equi() { return JoinCondition(ConditionKind::Equi, 0, {}); }
    static JoinCondition not_equal() { return JoinCondition(ConditionKind::NotEqual, 0, {}); }
    static JoinCondition band(Value epsilon) { return JoinCondition(ConditionKind::Band, epsilon, {}); }

    // Bands must be sorted ascending and pairwise disjoint.
    static JoinCondition multi_band(std::vector<BandOffset> bands);

    ConditionKind kind() const { return kind_; }
    Value epsilon() const { return epsilon_; }
    std::span<const BandOffset> bands() const { return bands_; }

    friend bool operator==(const JoinCondition&, const JoinCondition&) = default;

private:
    JoinCondition(ConditionKind kind, Value epsilon, std::vector<BandOffset> bands)
        : kind_(kind), epsilon_(epsilon), bands_(std::move(bands)) {}

    ConditionKind kind_;
    Value epsilon_;
    std::vector<BandOffset> bands_;
};

// A closed value interval produced by bounds_of. `negated` marks the
// complement request used by the not-equal condition.
struct ValueInterval {
    Value lo = 0;
    Value hi = 0;
    bool negated = false;

    friend bool operator==(const ValueInterval&, const ValueInterval&) = default;
};

// Per-probe-tuple bounds of `cond` applied to value `v`, saturated at the
// domain limits. Bands that fall entirely outside the domain are dropped, so
// a multi-band condition yields at most bands().size() intervals.
std::vector<ValueInterval> bounds_of(const JoinCondition& cond, Value v);

// ---------------------------------------------------------------------------
// Batches
// ---------------------------------------------------------------------------

// A value-sorted group of tuples processed as one command. Ties keep their
// input order.
struct Batch {
    StreamId stream = StreamId::S;
    std::vector<Tuple> tuples;
    std::uint64_t arrival_seq = 0;
};

Batch make_batch(std::vector<Tuple> tuples, StreamId stream, std::uint64_t arrival_seq = 0);

// ---------------------------------------------------------------------------
// Probe results
// ---------------------------------------------------------------------------

// Half-open index range [begin, end) into a subwindow's main array. `negated`
// asks the consumer for the complement of the range.
struct IndexRange {
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    bool negated = false;

    friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

struct TupleMatches {
    std::vector<Key> keys;
    std::vector<IndexRange> ranges;
};

struct ProbeResult {
    std::vector<TupleMatches> per_tuple;
};

// Streaming consumer for probe output. Materialized matches arrive through
// on_match; only BI-Sort emits on_range.
class ProbeSink {
public:
    virtual ~ProbeSink() = default;
    virtual void on_match(std::size_t probe_idx, const Tuple& t) = 0;
    virtual void on_range(std::size_t probe_idx, const IndexRange& r) = 0;
};

class CollectSink : public ProbeSink {
public:
    explicit CollectSink(std::size_t probe_count) { result_.per_tuple.resize(probe_count); }

    void on_match(std::size_t probe_idx, const Tuple& t) override {
        result_.per_tuple[probe_idx].keys.push_back(t.key);
    }
    void on_range(std::size_t probe_idx, const IndexRange& r) override {
        result_.per_tuple[probe_idx].ranges.push_back(r);
    }

    ProbeResult take() { return std::move(result_); }
    const ProbeResult& result() const { return result_; }

private:
    ProbeResult result_;
};

// ---------------------------------------------------------------------------
// Rebounding binary search
// ---------------------------------------------------------------------------

// Hinted lower bound: returns the smallest index i with sorted[i] >= target.
// Starting from `start_hint` the search gallops with doubling steps in the
// needed direction, then binary-searches the bracketed range. The result does
// not depend on the hint; batched callers pass the previous tuple's result to
// make consecutive lookups cheap.
std::size_t rebounding_search(std::span<const Value> sorted, std::size_t start_hint, Value target);

}  // namespace panjoin
