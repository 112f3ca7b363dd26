#include "panjoin/rap_table.hpp"

#include <algorithm>
#include <cassert>
#include <thread>

namespace panjoin {

PartitionTable::PartitionTable(std::vector<Value> splitters) : splitters_(std::move(splitters)) {
    for (std::size_t i = 1; i < splitters_.size(); ++i) {
        if (splitters_[i] < splitters_[i - 1]) {
            throw std::invalid_argument("splitters must be non-decreasing");
        }
    }
}

PartitionTable PartitionTable::uniform(std::uint32_t partitions) {
    std::vector<Value> sp;
    sp.reserve(partitions > 0 ? partitions - 1 : 0);
    const std::uint64_t domain = std::uint64_t{1} << 32;
    for (std::uint32_t j = 1; j < partitions; ++j) {
        sp.push_back(static_cast<Value>(domain * j / partitions));
    }
    return PartitionTable(std::move(sp));
}

std::uint32_t PartitionTable::find(Value v) const {
    if (v == kValueMax) {
        return static_cast<std::uint32_t>(splitters_.size());
    }
    const auto it = std::lower_bound(splitters_.begin(), splitters_.end(), v + 1);
    return static_cast<std::uint32_t>(it - splitters_.begin());
}

std::uint32_t PartitionTable::find_hinted(Value v, std::uint32_t hint) const {
    if (v == kValueMax) {
        return static_cast<std::uint32_t>(splitters_.size());
    }
    return static_cast<std::uint32_t>(rebounding_search(splitters_, hint, v + 1));
}

PartitionTable adjust_splitters(const Histograms& hist, std::uint64_t total,
                                std::uint32_t partitions, AdjustStats* stats) {
    if (total == 0) {
        throw DegenerateHistogramError();
    }
    using u128 = unsigned __int128;
    const std::uint32_t P = partitions;
    std::vector<Value> out;
    out.reserve(P > 0 ? P - 1 : 0);

    std::uint64_t sum_prev = 0;
    std::uint32_t j = 1;
    Value last = 0;
    for (std::uint32_t i = 0; i < P && j < P; ++i) {
        if (stats) ++stats->loop_iterations;
        const std::uint64_t sum_i = sum_prev + hist.count[i];
        // bal_j <= sum_i  <=>  total*j <= sum_i*P, kept exact in 128 bits.
        while (j < P && u128{total} * j <= u128{sum_i} * P) {
            if (stats) ++stats->loop_iterations;
            // bal_j > sum_prev holds here, so count[i] > 0 and min/max are valid.
            const u128 num_frac = u128{total} * j - u128{sum_prev} * P;
            const std::uint64_t range = hist.max_value[i] - hist.min_value[i];
            const u128 den = u128{hist.count[i]} * P;
            const auto offset =
                static_cast<std::uint64_t>((num_frac * range * 2 + den) / (den * 2));
#ifdef PANJOIN_LITERAL_ADJUST
            // Fraction-only form, without anchoring at min_i.
            Value s = static_cast<Value>(std::min<std::uint64_t>(offset, kValueMax));
#else
            Value s = hist.min_value[i] + static_cast<Value>(offset);
#endif
            if (s < last) s = last;  // enforce a non-decreasing table
            out.push_back(s);
            last = s;
            ++j;
        }
        sum_prev = sum_i;
    }
    assert(out.size() + 1 == P);
    return PartitionTable(std::move(out));
}

double normalized_mae(std::span<const std::uint64_t> counts, std::uint64_t total,
                      std::uint32_t partitions) {
    if (partitions == 0 || total == 0) {
        return 0.0;
    }
    const double avg = static_cast<double>(total) / partitions;
    double abs_err = 0.0;
    for (const std::uint64_t c : counts) {
        abs_err += std::abs(static_cast<double>(c) - avg);
    }
    return abs_err / partitions / avg;
}

RapTable::RapTable(const RapConfig& cfg, PartitionTable table)
    : cfg_(cfg),
      table_(std::move(table)),
      hist_(cfg.partitions),
      store_(Llat::for_partitions({cfg.partitions, cfg.capacity, cfg.sigma})) {
    if (table_.partition_count() != cfg.partitions) {
        throw std::invalid_argument("partition table size does not match config");
    }
}

void RapTable::insert_batch(const Batch& batch) {
    if (store_.size() + batch.tuples.size() > cfg_.capacity) {
        throw CapacityExceededError("RaP-Table subwindow is full");
    }
    std::uint32_t hint = 0;
    for (const Tuple& t : batch.tuples) {
        const std::uint32_t p = table_.find_hinted(t.value, hint);
        store_.insert(p, t);
        hist_.record(p, t.value);
        hint = p;
    }
}

Tuple RapTable::expire_for_key(std::uint32_t partition) {
    const Tuple t = store_.expire_one(partition);
    --hist_.count[partition];
    return t;
}

void RapTable::for_each_tuple(const std::function<void(const Tuple&)>& fn) const {
    for (std::uint32_t p = 0; p < cfg_.partitions; ++p) {
        store_.for_each_in_chain(p, fn);
    }
}

// Per probe tuple, one band's partition reach and value bounds.
struct RapTable::ProbeBound {
    std::uint32_t p_lo = 0;
    std::uint32_t p_up = 0;
    Value lo = 0;
    Value hi = 0;
    bool valid = false;
};

namespace {

// Buffers matches so partition chunks probed on different threads can be
// replayed into the caller's sink in deterministic order.
class BufferSink : public ProbeSink {
public:
    void on_match(std::size_t probe_idx, const Tuple& t) override {
        matches_.emplace_back(probe_idx, t);
    }
    void on_range(std::size_t, const IndexRange&) override {
        assert(false && "range records are BI-Sort only");
    }
    void replay(ProbeSink& sink) const {
        for (const auto& [idx, t] : matches_) {
            sink.on_match(idx, t);
        }
    }

private:
    std::vector<std::pair<std::size_t, Tuple>> matches_;
};

}  // namespace

void RapTable::probe_batch(const Batch& batch, const JoinCondition& cond, ProbeSink& sink,
                           ProbeStats* stats) const {
    if (batch.tuples.empty() || store_.size() == 0) {
        return;
    }
    if (cond.kind() == ConditionKind::NotEqual) {
        probe_not_equal(batch, sink, stats);
    } else {
        probe_bands(batch, cond, sink, stats);
    }
}

void RapTable::probe_bands(const Batch& batch, const JoinCondition& cond, ProbeSink& sink,
                           ProbeStats* stats) const {
    const std::size_t n = batch.tuples.size();
    const std::size_t band_count =
        cond.kind() == ConditionKind::MultiBand ? cond.bands().size() : 1;

    std::vector<ProbeBound> bounds(n);
    for (std::size_t b = 0; b < band_count; ++b) {
        std::uint32_t hint_lo = 0;
        std::uint32_t hint_up = 0;
        std::uint32_t p_first = 0, p_last = 0;
        bool any_valid = false;
        for (std::size_t i = 0; i < n; ++i) {
            const auto v = static_cast<std::int64_t>(batch.tuples[i].value);
            std::int64_t lo64, hi64;
            switch (cond.kind()) {
                case ConditionKind::Equi:
                    lo64 = hi64 = v;
                    break;
                case ConditionKind::Band:
                    lo64 = v - cond.epsilon();
                    hi64 = v + cond.epsilon();
                    break;
                default:
                    lo64 = v + cond.bands()[b].lo;
                    hi64 = v + cond.bands()[b].hi;
                    break;
            }
            ProbeBound& bd = bounds[i];
            if (hi64 < 0 || lo64 > static_cast<std::int64_t>(kValueMax)) {
                bd.valid = false;
                continue;
            }
            bd.valid = true;
            bd.lo = static_cast<Value>(std::max<std::int64_t>(lo64, 0));
            bd.hi = static_cast<Value>(std::min<std::int64_t>(hi64, kValueMax));
            bd.p_lo = table_.find_hinted(bd.lo, hint_lo);
            bd.p_up = table_.find_hinted(bd.hi, hint_up);
            if (stats) stats->search_steps += 2;
            hint_lo = bd.p_lo;
            hint_up = bd.p_up;
            if (!any_valid) {
                p_first = bd.p_lo;
                any_valid = true;
            }
            p_last = bd.p_up;
        }
        if (!any_valid) {
            continue;
        }

        const std::uint32_t span = p_last - p_first + 1;
        unsigned threads = stats ? 1 : cfg_.probe_threads;
        threads = std::min<unsigned>(threads, span);
        if (threads <= 1) {
            sweep_partitions(bounds, p_first, p_last, sink, stats);
        } else {
            std::vector<BufferSink> buffers(threads);
            std::vector<std::thread> pool;
            for (unsigned t = 0; t < threads; ++t) {
                const auto c_first =
                    p_first + static_cast<std::uint32_t>(std::uint64_t{span} * t / threads);
                const auto c_last =
                    p_first + static_cast<std::uint32_t>(std::uint64_t{span} * (t + 1) / threads) -
                    1;
                pool.emplace_back([&, t, c_first, c_last] {
                    sweep_partitions(bounds, c_first, c_last, buffers[t], nullptr);
                });
            }
            for (auto& th : pool) th.join();
            for (const auto& buf : buffers) buf.replay(sink);
        }
    }
}

void RapTable::sweep_partitions(std::span<const ProbeBound> bounds, std::uint32_t p_first,
                                std::uint32_t p_last, ProbeSink& sink, ProbeStats* stats) const {
    const std::size_t n = bounds.size();
    std::size_t a = 0, b = 0;
    for (std::uint32_t p = p_first; p <= p_last; ++p) {
        while (a < n && (!bounds[a].valid || bounds[a].p_up < p)) ++a;
        if (b < a) b = a;
        while (b < n && bounds[b].valid && bounds[b].p_lo <= p) ++b;
        if (a >= b || hist_.count[p] == 0) {
            continue;
        }
        // One scan of the partition serves every probe tuple reaching it.
        for (auto c = store_.scan_partition(p); !c.done(); c.next()) {
            const Tuple& t = c.get();
            for (std::size_t i = a; i < b; ++i) {
                const ProbeBound& bd = bounds[i];
                if (bd.p_lo < p && p < bd.p_up) {
                    // whole partition lies inside the band: copy, no compare
                    sink.on_match(i, t);
                    if (stats) ++stats->emitted;
                } else {
                    if (stats) ++stats->comparisons;
                    if (t.value >= bd.lo && t.value <= bd.hi) {
                        sink.on_match(i, t);
                        if (stats) ++stats->emitted;
                    }
                }
            }
        }
    }
}

void RapTable::probe_not_equal(const Batch& batch, ProbeSink& sink, ProbeStats* stats) const {
    const std::size_t n = batch.tuples.size();
    const std::uint32_t P = cfg_.partitions;
    unsigned threads = stats ? 1 : std::min<unsigned>(cfg_.probe_threads, P);

    auto scan = [&](std::uint32_t first, std::uint32_t last, ProbeSink& out) {
        for (std::uint32_t p = first; p <= last; ++p) {
            if (hist_.count[p] == 0) continue;
            for (auto c = store_.scan_partition(p); !c.done(); c.next()) {
                const Tuple& t = c.get();
                for (std::size_t i = 0; i < n; ++i) {
                    if (stats) ++stats->comparisons;
                    if (t.value != batch.tuples[i].value) {
                        out.on_match(i, t);
                        if (stats) ++stats->emitted;
                    }
                }
            }
        }
    };

    if (threads <= 1) {
        scan(0, P - 1, sink);
        return;
    }
    std::vector<BufferSink> buffers(threads);
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        const auto c_first = static_cast<std::uint32_t>(std::uint64_t{P} * t / threads);
        const auto c_last = static_cast<std::uint32_t>(std::uint64_t{P} * (t + 1) / threads) - 1;
        pool.emplace_back([&, t, c_first, c_last] { scan(c_first, c_last, buffers[t]); });
    }
    for (auto& th : pool) th.join();
    for (const auto& buf : buffers) buf.replay(sink);
}

}  // namespace panjoin
