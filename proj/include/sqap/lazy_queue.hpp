#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sqap/errors.hpp"
#include "sqap/hugepage.hpp"
#include "sqap/prefetch.hpp"

namespace sqap {

// Per-handle bookkeeping shared by every queue built over the same handle
// universe. A handle is owned by at most one such queue at a time; `owner`
// holds that queue's tag (0 = unowned).
//
// The authoritative key for each handle lives in truth storage; a stored
// copy mirrors the key currently sitting in the owning heap. Lazy
// soundness keeps stored <= truth for every owned handle, so a stale heap
// entry can only look better than it really is and a valid-min scan can
// never pass over the true minimum.
//
// Key storage comes in two layouts, both behind the *_at accessors:
//
//   flat (default)  truth and stored are separate dense arrays, eight
//                   keys per cache line each. Truth defaults to an owned
//                   backing array, or is repointed at caller storage
//                   (bind_truth) so a caller maintaining those keys
//                   anyway — e.g. a delta table — shares them with the
//                   queues instead of mirroring every write.
//
//   paired          bind_paired points both at one caller-owned buffer of
//                   16-byte pairs: truth in the even cell, stored in the
//                   odd. A pair never straddles a cache line, so the
//                   caller's truth write drags the stored copy's line in
//                   with it, and the "has this key dropped below its
//                   stored copy?" probe that follows hits cache instead
//                   of pulling a second line per handle.
//
// `pos` and `owner` stay separate stride-1 arrays in both layouts: probes
// touch only keys, and an entry's pos/owner lines are pulled in only when
// it actually moves.
struct QueueSlots {
  template <class T>
  using Vec = std::vector<T, detail::HugePageAllocator<T>>;

  Vec<std::int32_t> pos;
  Vec<std::uint8_t> owner;

  explicit QueueSlots(std::int32_t capacity)
      : pos(static_cast<std::size_t>(capacity), 0),
        owner(static_cast<std::size_t>(capacity), 0),
        stored_flat_(static_cast<std::size_t>(capacity), 0),
        owned_truth_(static_cast<std::size_t>(capacity), 0),
        truth_(owned_truth_.data()),
        stored_(stored_flat_.data()) {}

  QueueSlots(const QueueSlots&) = delete;
  QueueSlots& operator=(const QueueSlots&) = delete;

  std::int64_t truth_at(std::int32_t h) const { return truth_[idx(h)]; }
  void set_truth(std::int32_t h, std::int64_t key) { truth_[idx(h)] = key; }
  std::int64_t stored_at(std::int32_t h) const { return stored_[idx(h)]; }
  std::int64_t& stored_ref(std::int32_t h) { return stored_[idx(h)]; }
  const std::int64_t* truth_addr(std::int32_t h) const { return truth_ + idx(h); }

  // Base pointer and stride for batched probes over many handles: the key
  // for handle h sits at stored_base()[h << stride_shift()].
  const std::int64_t* stored_base() const { return stored_; }
  unsigned stride_shift() const { return shift_; }

  // Repoint the authoritative keys at caller-owned flat storage. Only
  // legal while no handle is owned, since existing entries would change
  // keys.
  void bind_truth(std::int64_t* authoritative) {
    require_unowned("bind_truth");
    owned_truth_.clear();
    owned_truth_.shrink_to_fit();
    truth_ = authoritative;
    stored_ = stored_flat_.data();
    shift_ = 0;
  }

  // Repoint both truth and stored at one caller-owned paired buffer
  // (truth at cell 2h, stored at 2h+1; see the layout note above). The
  // caller provides 2 * capacity cells and owns the truth cells; the
  // stored cells belong to this store.
  void bind_paired(std::int64_t* pairs) {
    require_unowned("bind_paired");
    owned_truth_.clear();
    owned_truth_.shrink_to_fit();
    stored_flat_.clear();
    stored_flat_.shrink_to_fit();
    truth_ = pairs;
    stored_ = pairs + 1;
    shift_ = 1;
  }

  std::int32_t capacity() const { return static_cast<std::int32_t>(owner.size()); }

 private:
  std::size_t idx(std::int32_t h) const { return static_cast<std::size_t>(h) << shift_; }

  void require_unowned(const char* op) const {
    for (const std::uint8_t ow : owner)
      if (ow != 0) throw QueueError(std::string(op) + ": store still has owned handles");
  }

  Vec<std::int64_t> stored_flat_;
  Vec<std::int64_t> owned_truth_;
  std::int64_t* truth_ = nullptr;
  std::int64_t* stored_ = nullptr;
  unsigned shift_ = 0;
};

// Indexed min-heap over (key, handle) with lazy key increases. Decreases
// below the stored key are applied immediately; any other update only
// rewrites `truth`, leaving the heap entry stale with stored key <= true
// key. peek_valid_min repairs stale tops until a fresh minimum surfaces,
// so the reported minimum is always exact. Ties break toward the smaller
// handle.
//
// The heap is 4-ary with each 4-entry child group starting on its own
// cache line (entries are 16 bytes; a few leading pad entries give group
// offsets that are multiples of 64 bytes), which halves the depth of the
// sift paths repairs take and makes every level a single line fill.
class LazyIndexedQueue {
 public:
  struct Entry {
    std::int64_t key;
    std::int32_t handle;
  };
  using EntryVec = std::vector<Entry, detail::HugePageAllocator<Entry>>;

  // Standalone queue owning its slot store.
  explicit LazyIndexedQueue(std::int32_t capacity, std::uint8_t tag = 1)
      : owned_(std::make_unique<QueueSlots>(capacity)), slots_(owned_.get()), tag_(tag) {
    if (tag == 0) throw QueueError("queue tag must be nonzero");
    init_heap(capacity);
  }

  // Queue sharing a slot store with sibling queues (distinct tags).
  LazyIndexedQueue(QueueSlots& shared, std::uint8_t tag) : slots_(&shared), tag_(tag) {
    if (tag == 0) throw QueueError("queue tag must be nonzero");
    init_heap(shared.capacity());
  }

  bool empty() const { return heap_.size() == pad_; }
  std::size_t size() const { return heap_.size() - pad_; }
  std::uint8_t tag() const { return tag_; }

  bool contains(std::int32_t handle) const {
    return slots_->owner[static_cast<std::size_t>(handle)] == tag_;
  }

  std::int64_t true_key(std::int32_t handle) const {
    require_owned(handle, "true_key");
    return slots_->truth_at(handle);
  }

  void insert(std::int32_t handle, std::int64_t key) {
    std::uint8_t& ow = slots_->owner[static_cast<std::size_t>(handle)];
    if (ow != 0)
      throw QueueError("insert: handle " + std::to_string(handle) + " already owned by tag " +
                       std::to_string(int(ow)));
    ow = tag_;
    slots_->stored_ref(handle) = key;
    slots_->set_truth(handle, key);
    heap_.push_back({key, handle});
    slots_->pos[static_cast<std::size_t>(handle)] = static_cast<std::int32_t>(heap_.size() - 1);
    sift_up(static_cast<std::int32_t>(size()) - 1);
  }

  // Bulk load into an empty queue: O(n) heapify instead of n sifted inserts.
  void build(const std::vector<Entry>& entries) {
    if (!empty()) throw QueueError("build: queue not empty");
    heap_.insert(heap_.end(), entries.begin(), entries.end());
    Entry* b = heap_.data() + pad_;
    const std::int32_t count = static_cast<std::int32_t>(size());
    for (std::int32_t i = 0; i < count; ++i) {
      const std::size_t h = static_cast<std::size_t>(b[i].handle);
      if (slots_->owner[h] != 0)
        throw QueueError("build: handle " + std::to_string(b[i].handle) + " already owned");
      slots_->owner[h] = tag_;
      slots_->stored_ref(b[i].handle) = b[i].key;
      slots_->pos[h] = i + static_cast<std::int32_t>(pad_);
      slots_->set_truth(b[i].handle, b[i].key);
    }
    if (count > 1)
      for (std::int32_t i = (count - 2) / 4; i >= 0; --i) sift_down(i);
  }

  void remove(std::int32_t handle) {
    require_owned(handle, "remove");
    const std::int32_t at =
        slots_->pos[static_cast<std::size_t>(handle)] - static_cast<std::int32_t>(pad_);
    slots_->owner[static_cast<std::size_t>(handle)] = 0;
    Entry* b = heap_.data() + pad_;
    const std::int32_t last = static_cast<std::int32_t>(size()) - 1;
    if (at != last) {
      b[at] = b[last];
      slots_->pos[static_cast<std::size_t>(b[at].handle)] = at + static_cast<std::int32_t>(pad_);
      heap_.pop_back();
      if (!sift_up(at)) sift_down(at);
    } else {
      heap_.pop_back();
    }
  }

  // Lazy reprioritization: a key dropping below its stored copy moves up
  // immediately; any other change is recorded in `truth` only, to be
  // reconciled if the stale entry ever reaches the top.
  void update_key(std::int32_t handle, std::int64_t key) {
    require_owned(handle, "update_key");
    slots_->set_truth(handle, key);
    reposition_if_below_stored(handle, key);
  }

  // update_key for callers that already wrote the new authoritative key
  // through shared truth storage (bind_truth): performs the reposition
  // half only, leaving the already-correct truth untouched.
  void update_key_prewritten(std::int32_t handle, std::int64_t key) {
    require_owned(handle, "update_key_prewritten");
    reposition_if_below_stored(handle, key);
  }

  // Exact minimum by (true key, handle), repairing stale tops on the way.
  // Each repair pushes one entry down; an entry is repaired at most once
  // per batch of deferred increases, which is what keeps the amortized
  // cost low. The next top after a repair comes from the root's children,
  // so their truth cells are prefetched before the sift.
  std::optional<Entry> peek_valid_min() {
    while (!empty()) {
      Entry* b = heap_.data() + pad_;
      Entry& top = b[0];
      const std::int64_t t = slots_->truth_at(top.handle);
      if (top.key == t) return top;
      const std::int32_t count = static_cast<std::int32_t>(size());
      for (std::int32_t c = 1; c <= 4 && c < count; ++c)
        detail::prefetch_read(slots_->truth_addr(b[c].handle));
      top.key = t;
      slots_->stored_ref(top.handle) = t;
      repairs_ += 1;
      sift_down(0);
    }
    return std::nullopt;
  }

  std::optional<Entry> pop_valid_min() {
    auto top = peek_valid_min();
    if (top) remove(top->handle);
    return top;
  }

  void clear() {
    Entry* b = heap_.data() + pad_;
    const std::size_t count = size();
    for (std::size_t i = 0; i < count; ++i)
      slots_->owner[static_cast<std::size_t>(b[i].handle)] = 0;
    heap_.resize(pad_);
  }

  // Stale-top repairs performed by peek_valid_min since construction.
  std::uint64_t repair_count() const { return repairs_; }

  // Backing storage, for structural audits: entries live at positions
  // [pad, pad + size), where pad is the alignment prefix; a slot's pos
  // indexes this vector directly.
  const EntryVec& raw_heap() const { return heap_; }

 private:
  void init_heap(std::int32_t capacity) {
    heap_.reserve(static_cast<std::size_t>(capacity) + 3);
    // Choose the pad so every child group (4l+1..4l+4) starts a cache
    // line. reserve() fixed the allocation: entries never exceed the slot
    // capacity, so data() is stable from here on.
    const std::uintptr_t addr = reinterpret_cast<std::uintptr_t>(heap_.data());
    pad_ = (3u - ((addr >> 4) & 3u)) & 3u;
    heap_.resize(pad_);
  }

  void require_owned(std::int32_t handle, const char* op) const {
    if (handle < 0 || handle >= slots_->capacity())
      throw QueueError(std::string(op) + ": handle " + std::to_string(handle) + " out of range");
    const auto ow = slots_->owner[static_cast<std::size_t>(handle)];
    if (ow != tag_)
      throw QueueError(std::string(op) + ": handle " + std::to_string(handle) +
                       (ow == 0 ? " not in any queue" : " owned by tag " + std::to_string(int(ow))));
  }

  void reposition_if_below_stored(std::int32_t handle, std::int64_t key) {
    std::int64_t& st = slots_->stored_ref(handle);
    if (key < st) {
      st = key;
      const std::int32_t p = slots_->pos[static_cast<std::size_t>(handle)];
      heap_[static_cast<std::size_t>(p)].key = key;
      sift_up(p - static_cast<std::int32_t>(pad_));
    }
  }

  static bool entry_less(const Entry& a, const Entry& b) {
    return a.key < b.key || (a.key == b.key && a.handle < b.handle);
  }

  // Positions below are logical (0-based from the root); the physical
  // position recorded in a slot is logical + pad.
  bool sift_up(std::int32_t at) {
    Entry* b = heap_.data() + pad_;
    {
      // The rise path is the ancestor chain, known in advance: get its
      // lines moving before the compares walk it.
      std::int32_t a = at;
      for (int d = 0; d < 4 && a > 0; ++d) {
        a = (a - 1) / 4;
        detail::prefetch_read(b + a);
      }
    }
    const Entry e = b[at];
    bool moved = false;
    while (at > 0) {
      const std::int32_t parent = (at - 1) / 4;
      if (!entry_less(e, b[parent])) break;
      b[at] = b[parent];
      slots_->pos[static_cast<std::size_t>(b[at].handle)] = at + static_cast<std::int32_t>(pad_);
      at = parent;
      moved = true;
    }
    b[at] = e;
    slots_->pos[static_cast<std::size_t>(e.handle)] = at + static_cast<std::int32_t>(pad_);
    return moved;
  }

  void sift_down(std::int32_t at) {
    Entry* b = heap_.data() + pad_;
    const std::int32_t count = static_cast<std::int32_t>(size());
    const Entry e = b[at];
    while (true) {
      const std::int32_t c0 = 4 * at + 1;
      if (c0 >= count) break;
      // Fetch the grandchild groups while the child compares resolve: deep
      // sinks walk cold lines, and the next level's group is always among
      // these four.
      const std::int32_t g0 = 4 * c0 + 1;
      if (g0 < count) {
        detail::prefetch_read(b + g0);
        detail::prefetch_read(b + std::min(g0 + 4, count - 1));
        detail::prefetch_read(b + std::min(g0 + 8, count - 1));
        detail::prefetch_read(b + std::min(g0 + 12, count - 1));
      }
      const std::int32_t cend = std::min(c0 + 4, count);
      std::int32_t best = c0;
      for (std::int32_t c = c0 + 1; c < cend; ++c)
        if (entry_less(b[c], b[best])) best = c;
      if (!entry_less(b[best], e)) break;
      b[at] = b[best];
      slots_->pos[static_cast<std::size_t>(b[at].handle)] = at + static_cast<std::int32_t>(pad_);
      at = best;
    }
    b[at] = e;
    slots_->pos[static_cast<std::size_t>(e.handle)] = at + static_cast<std::int32_t>(pad_);
  }

  std::unique_ptr<QueueSlots> owned_;
  QueueSlots* slots_;
  EntryVec heap_;
  std::size_t pad_ = 0;
  std::uint8_t tag_;
  std::uint64_t repairs_ = 0;
};

}  // namespace sqap
