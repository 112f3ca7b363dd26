#include "panjoin/core.hpp"

#include <algorithm>

namespace panjoin {

JoinCondition JoinCondition::multi_band(std::vector<BandOffset> bands) {
    if (bands.empty()) {
        throw std::invalid_argument("multi-band condition needs at least one band");
    }
    for (std::size_t i = 0; i < bands.size(); ++i) {
        if (bands[i].lo > bands[i].hi) {
            throw std::invalid_argument("band interval has lo > hi");
        }
        if (i > 0 && bands[i].lo <= bands[i - 1].hi) {
            throw std::invalid_argument("bands must be sorted and disjoint");
        }
    }
    return JoinCondition(ConditionKind::MultiBand, 0, std::move(bands));
}

namespace {

// Clamp a closed int64 interval to the value domain; empty after clamping
// means the band cannot match anything and is dropped by the caller.
bool saturate(std::int64_t lo, std::int64_t hi, ValueInterval& out) {
    if (hi < static_cast<std::int64_t>(kValueMin) || lo > static_cast<std::int64_t>(kValueMax)) {
        return false;
    }
    out.lo = static_cast<Value>(std::max<std::int64_t>(lo, kValueMin));
    out.hi = static_cast<Value>(std::min<std::int64_t>(hi, kValueMax));
    return true;
}

}  // namespace

std::vector<ValueInterval> bounds_of(const JoinCondition& cond, Value v) {
    std::vector<ValueInterval> out;
    switch (cond.kind()) {
        case ConditionKind::Equi:
            out.push_back({v, v, false});
            break;
        case ConditionKind::NotEqual:
            out.push_back({v, v, true});
            break;
        case ConditionKind::Band: {
            const auto base = static_cast<std::int64_t>(v);
            const auto eps = static_cast<std::int64_t>(cond.epsilon());
            ValueInterval iv;
            saturate(base - eps, base + eps, iv);
            out.push_back(iv);
            break;
        }
        case ConditionKind::MultiBand: {
            const auto base = static_cast<std::int64_t>(v);
            for (const BandOffset& b : cond.bands()) {
                ValueInterval iv;
                if (saturate(base + b.lo, base + b.hi, iv)) {
                    out.push_back(iv);
                }
            }
            break;
        }
    }
    return out;
}

Batch make_batch(std::vector<Tuple> tuples, StreamId stream, std::uint64_t arrival_seq) {
    if (tuples.empty()) {
        throw EmptyBatchError();
    }
    std::stable_sort(tuples.begin(), tuples.end(),
                     [](const Tuple& a, const Tuple& b) { return a.value < b.value; });
    return Batch{stream, std::move(tuples), arrival_seq};
}

std::size_t rebounding_search(std::span<const Value> sorted, std::size_t start_hint, Value target) {
    const std::size_t n = sorted.size();
    if (n == 0) {
        return 0;
    }
    const std::size_t pos = std::min(start_hint, n);

    std::size_t lo, hi;
    if (pos < n && sorted[pos] < target) {
        // Forward phase: the answer is right of pos. Step doubles until the
        // probe overshoots or runs off the end.
        std::size_t off = 1;
        while (pos + off < n && sorted[pos + off] < target) {
            off <<= 1;
        }
        lo = pos + off / 2 + 1;
        hi = std::min(pos + off, n);
    } else {
        // Backward phase: the answer is at or left of pos.
        std::size_t off = 1;
        while (off <= pos && sorted[pos - off] >= target) {
            off <<= 1;
        }
        lo = off <= pos ? pos - off + 1 : 0;
        hi = pos;
    }
    const auto first = sorted.begin() + static_cast<std::ptrdiff_t>(lo);
    const auto last = sorted.begin() + static_cast<std::ptrdiff_t>(hi);
    return static_cast<std::size_t>(std::lower_bound(first, last, target) - sorted.begin());
}

}  // namespace panjoin
