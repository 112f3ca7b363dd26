#include "panjoin/llat.hpp"

namespace panjoin {

Llat Llat::for_partitions(const LlatConfig& cfg) {
    Llat t;
    t.partitions_ = cfg.partitions;
    t.entry_capacity_ = cfg.entry_capacity();
    t.capacity_ = cfg.capacity;
    t.fixed_pool_ = true;
    t.entries_.resize(2 * static_cast<std::size_t>(cfg.partitions));
    for (auto& e : t.entries_) {
        e.slots.reserve(t.entry_capacity_);
    }
    t.chain_tail_.resize(t.entries_.size(), npos);
    for (std::uint32_t p = 0; p < cfg.partitions; ++p) {
        t.chain_tail_[p] = p;
    }
    t.ptr_g_ = cfg.partitions;
    return t;
}

Llat Llat::arena(std::size_t entry_capacity, std::size_t initial_entries) {
    Llat t;
    t.entry_capacity_ = entry_capacity > 0 ? entry_capacity : 1;
    t.fixed_pool_ = false;
    t.entries_.reserve(initial_entries);
    return t;
}

std::uint32_t Llat::alloc_entry() {
    if (!free_list_.empty()) {
        const std::uint32_t e = free_list_.back();
        free_list_.pop_back();
        return e;
    }
    if (fixed_pool_) {
        // Reserved entries run out only if more than N_sub tuples are stored,
        // which insert() already rules out.
        assert(ptr_g_ < entries_.size());
        return static_cast<std::uint32_t>(ptr_g_++);
    }
    entries_.emplace_back();
    entries_.back().slots.reserve(entry_capacity_);
    chain_tail_.push_back(npos);
    ++ptr_g_;
    return static_cast<std::uint32_t>(entries_.size() - 1);
}

void Llat::append_at(std::uint32_t chain_head, std::uint32_t& chain_tail_slot, const Tuple& t) {
    Entry& tail = entries_[chain_tail_slot];
    assert(tail.slots.size() < entry_capacity_);
    tail.slots.push_back(t);
    ++size_;
    if (tail.slots.size() == entry_capacity_) {
        const std::uint32_t fresh = alloc_entry();
        entries_[chain_tail_slot].next = fresh;
        chain_tail_[chain_head] = fresh;
    } else {
        chain_tail_[chain_head] = chain_tail_slot;
    }
}

void Llat::insert(std::uint32_t partition, const Tuple& t) {
    assert(partition < partitions_);
    if (capacity_ != 0 && size_ == capacity_) {
        throw CapacityExceededError("LLAT subwindow is full");
    }
    std::uint32_t tail = chain_tail_[partition];
    append_at(partition, tail, t);
}

Tuple Llat::expire_one(std::uint32_t partition) {
    assert(partition < partitions_);
    std::uint32_t e = partition;
    while (e != npos) {
        Entry& entry = entries_[e];
        if (entry.tail < entry.slots.size()) {
            const Tuple t = entry.slots[entry.tail];
            ++entry.tail;
            --size_;
            return t;
        }
        if (entry.tail == entry_capacity_) {
            e = entry.next;  // drained full entry; never reclaimed
        } else {
            break;
        }
    }
    throw EmptyPartitionError("partition holds no live tuples");
}

std::uint32_t Llat::new_chain() {
    assert(!fixed_pool_);
    const std::uint32_t head = alloc_entry();
    chain_tail_[head] = head;
    return head;
}

void Llat::append_to_chain(std::uint32_t chain_head, const Tuple& t) {
    std::uint32_t tail = chain_tail_[chain_head];
    append_at(chain_head, tail, t);
}

std::size_t Llat::release_chain(std::uint32_t chain_head) {
    assert(!fixed_pool_);
    std::size_t live = 0;
    std::uint32_t e = chain_head;
    while (e != npos) {
        Entry& entry = entries_[e];
        live += entry.slots.size() - entry.tail;
        const std::uint32_t next = entry.next;
        entry.slots.clear();
        entry.tail = 0;
        entry.next = npos;
        free_list_.push_back(e);
        e = next;
    }
    size_ -= live;
    return live;
}

}  // namespace panjoin
