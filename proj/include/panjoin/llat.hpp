#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <vector>

#include "panjoin/core.hpp"

namespace panjoin {

struct LlatConfig {
    std::uint32_t partitions = 1;   // P
    std::size_t capacity = 0;       // N_sub
    double sigma = 1.25;            // overflow factor, > 1

    // Per-entry tuple capacity: ceil((N_sub / P) * sigma). Ceiling keeps the
    // 2P-sufficiency argument intact.
    std::size_t entry_capacity() const {
        const double raw = static_cast<double>(capacity) / partitions * sigma;
        auto c = static_cast<std::size_t>(std::ceil(raw));
        return c > 0 ? c : 1;
    }
};

// Linked List Adaptive Table: fixed-capacity entries with overflow chaining.
//
// Two layouts share the implementation. The range-partitioned layout has 2P
// entries, one normal entry per partition plus P reserved entries handed out
// through ptr_g; it backs RaP-Table. The arena layout starts with an empty
// pool and allocates chains on demand (ptr_g starts at the first entry); it
// backs the tree leaves, which appear and split dynamically.
class Llat {
public:
    static constexpr std::uint32_t npos = 0xffffffff;

    static Llat for_partitions(const LlatConfig& cfg);
    static Llat arena(std::size_t entry_capacity, std::size_t initial_entries = 0);

    // --- range-partitioned interface -------------------------------------

    // Appends t to the chain tail of `partition`. Throws CapacityExceededError
    // once `capacity` tuples are stored.
    void insert(std::uint32_t partition, const Tuple& t);

    // Removes and returns the oldest live tuple of the partition.
    Tuple expire_one(std::uint32_t partition);

    // --- arena interface ---------------------------------------------------

    std::uint32_t new_chain();
    void append_to_chain(std::uint32_t chain_head, const Tuple& t);
    // Returns the number of live tuples released.
    std::size_t release_chain(std::uint32_t chain_head);

    // --- shared -------------------------------------------------------------

    class ChainCursor {
    public:
        bool done() const { return entry_ == npos; }
        const Tuple& get() const { return llat_->entries_[entry_].slots[offset_]; }
        void next() {
            ++offset_;
            settle();
        }

    private:
        friend class Llat;
        ChainCursor(const Llat* llat, std::uint32_t entry)
            : llat_(llat), entry_(entry), offset_(entry == npos ? 0 : llat->entries_[entry].tail) {
            settle();
        }
        void settle() {
            while (entry_ != npos && offset_ >= llat_->entries_[entry_].slots.size()) {
                entry_ = llat_->entries_[entry_].next;
                offset_ = entry_ == npos ? 0 : llat_->entries_[entry_].tail;
            }
        }

        const Llat* llat_;
        std::uint32_t entry_;
        std::uint32_t offset_;
    };

    ChainCursor scan_partition(std::uint32_t partition) const { return scan_chain(partition); }
    ChainCursor scan_chain(std::uint32_t chain_head) const {
        return ChainCursor(this, chain_head == npos ? npos : chain_head);
    }

    template <typename F>
    void for_each_in_chain(std::uint32_t chain_head, F&& fn) const {
        for (auto c = scan_chain(chain_head); !c.done(); c.next()) {
            fn(c.get());
        }
    }

    std::size_t size() const { return size_; }
    std::size_t ptr_g() const { return ptr_g_; }
    std::uint32_t partition_count() const { return partitions_; }
    std::size_t entry_capacity() const { return entry_capacity_; }
    std::size_t entry_count() const { return entries_.size(); }

    std::uint32_t entry_next(std::uint32_t entry) const { return entries_[entry].next; }
    std::size_t entry_live(std::uint32_t entry) const {
        return entries_[entry].slots.size() - entries_[entry].tail;
    }

private:
    struct Entry {
        std::vector<Tuple> slots;   // head == slots.size()
        std::uint32_t tail = 0;     // expire offset
        std::uint32_t next = npos;
    };

    Llat() = default;

    std::uint32_t alloc_entry();
    void append_at(std::uint32_t chain_head, std::uint32_t& chain_tail_slot, const Tuple& t);

    std::vector<Entry> entries_;
    std::vector<std::uint32_t> chain_tail_;  // valid at chain-head indices
    std::vector<std::uint32_t> free_list_;   // arena only
    std::uint32_t partitions_ = 0;
    std::size_t entry_capacity_ = 0;
    std::size_t capacity_ = 0;   // 0 means unlimited (arena)
    std::size_t ptr_g_ = 0;
    std::size_t size_ = 0;
    bool fixed_pool_ = false;
};

// Storage overhead ratio of the range-partitioned layout:
// (N_sub / P * sigma) * 2P / N_sub - 1.
inline double llat_storage_overhead(const LlatConfig& cfg) {
    return 2.0 * cfg.sigma - 1.0;
}

}  // namespace panjoin
