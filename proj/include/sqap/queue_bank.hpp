#pragma once

#include <cassert>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "sqap/delta.hpp"
#include "sqap/errors.hpp"
#include "sqap/lazy_queue.hpp"
#include "sqap/moves.hpp"
#include "sqap/prefetch.hpp"

namespace sqap {

enum class MoveState : std::uint8_t { ineligible = 1, authorized = 2, aspired = 3 };

inline const char* to_string(MoveState s) {
  switch (s) {
    case MoveState::ineligible: return "ineligible";
    case MoveState::authorized: return "authorized";
    case MoveState::aspired: return "aspired";
  }
  return "?";
}

struct StateTransition {
  MoveId move;
  MoveState from;
  MoveState to;
};

// The five queues driving sparse move selection. Two shared slot stores:
// the delta store, whose three queues partition all moves by state and are
// keyed by swap delta, and the tabu store, keyed by the iteration at which
// a move stops being tabu (aspired moves sit in no tabu queue).
//
// After init_all_ineligible the delta store's authoritative keys are the
// delta table's own cells, so the table repair that follows each swap
// already performs the key write; update_delta then only has to reconcile
// heap positions. The tabu store owns its keys, and doubles as the
// per-move eligibility record: a move's eligible iteration stays readable
// after it leaves the tabu queues (aspired moves), because removal clears
// ownership, not the key.
class QueueBank {
 public:
  explicit QueueBank(std::int32_t moves)
      : moves_(moves),
        delta_slots_(moves),
        tabu_slots_(moves),
        ineligible_delta_(delta_slots_, std::uint8_t(MoveState::ineligible)),
        authorized_delta_(delta_slots_, std::uint8_t(MoveState::authorized)),
        aspired_delta_(delta_slots_, std::uint8_t(MoveState::aspired)),
        ineligible_tabu_(tabu_slots_, std::uint8_t(MoveState::ineligible)),
        authorized_tabu_(tabu_slots_, std::uint8_t(MoveState::authorized)) {}

  std::int32_t move_count() const { return moves_; }

  // Fresh-start state: every move ineligible with eligible iteration 0, so
  // the first migration releases the whole move set into authorized. The
  // table becomes the delta store's key storage — adopting the table's own
  // layout, flat or paired — so it must outlive the bank's use and keep
  // its cells at stable addresses.
  void init_all_ineligible(DeltaTable& table) {
    if (static_cast<std::int32_t>(table.size()) != moves_)
      throw QueueError("init: table size does not match move count");
    ineligible_delta_.clear();
    authorized_delta_.clear();
    aspired_delta_.clear();
    ineligible_tabu_.clear();
    authorized_tabu_.clear();
    if (table.stride_shift() == 0)
      delta_slots_.bind_truth(table.deltas.data());
    else
      delta_slots_.bind_paired(table.deltas.data());
    std::vector<LazyIndexedQueue::Entry> dentries, tentries;
    dentries.reserve(static_cast<std::size_t>(moves_));
    tentries.reserve(static_cast<std::size_t>(moves_));
    for (std::int32_t m = 0; m < moves_; ++m) {
      dentries.push_back({table.at(m), m});
      tentries.push_back({0, m});
    }
    ineligible_delta_.build(dentries);
    ineligible_tabu_.build(tentries);
  }

  MoveState state_of(MoveId m) const {
    return MoveState(delta_slots_.owner[static_cast<std::size_t>(m)]);
  }

  std::int64_t eligible_iter(MoveId m) const { return tabu_slots_.truth_at(m); }

  // Advance queue states to iteration `iter`: moves whose tabu window ended
  // become authorized, and moves authorized for more than `aspiration`
  // iterations become aspired. Returns the number of migrated moves and,
  // when `transitions` is given, appends one record per migrated move.
  std::int64_t migrate(std::int64_t iter, std::int64_t aspiration,
                       std::vector<StateTransition>* transitions = nullptr) {
    std::int64_t migrated = 0;
    while (auto top = ineligible_tabu_.peek_valid_min()) {
      if (top->key >= iter) break;
      const MoveId m = top->handle;
      ineligible_tabu_.remove(m);
      authorized_tabu_.insert(m, top->key);
      const cost_t d = ineligible_delta_.true_key(m);
      ineligible_delta_.remove(m);
      authorized_delta_.insert(m, d);
      if (transitions) transitions->push_back({m, MoveState::ineligible, MoveState::authorized});
      ++migrated;
    }
    while (auto top = authorized_tabu_.peek_valid_min()) {
      if (top->key >= iter - aspiration) break;
      const MoveId m = top->handle;
      authorized_tabu_.remove(m);
      const cost_t d = authorized_delta_.true_key(m);
      authorized_delta_.remove(m);
      aspired_delta_.insert(m, d);
      if (transitions) transitions->push_back({m, MoveState::authorized, MoveState::aspired});
      ++migrated;
    }
    return migrated;
  }

  // An executed move becomes tabu until `eligible`: it leaves whatever
  // state it was selected from and re-enters the ineligible pair of queues.
  // `delta_key` is the move's current table delta (the caller reconciles it
  // against the post-swap value afterwards via update_delta).
  void reset_to_ineligible(MoveId m, std::int64_t eligible, cost_t delta_key) {
    if (ineligible_tabu_.contains(m))
      ineligible_tabu_.remove(m);
    else if (authorized_tabu_.contains(m))
      authorized_tabu_.remove(m);
    switch (state_of(m)) {
      case MoveState::ineligible: ineligible_delta_.remove(m); break;
      case MoveState::authorized: authorized_delta_.remove(m); break;
      case MoveState::aspired: aspired_delta_.remove(m); break;
    }
    ineligible_delta_.insert(m, delta_key);
    ineligible_tabu_.insert(m, eligible);
  }

  // Reconcile a move's position inside whichever delta queue holds it with
  // its table delta, which the caller has already rewritten (the table is
  // the delta store's key storage): an improvement below the stored key
  // repositions eagerly, anything else stays deferred.
  void update_delta(MoveId m, cost_t delta) {
    assert(delta_slots_.truth_at(m) == delta);
    switch (state_of(m)) {
      case MoveState::ineligible: ineligible_delta_.update_key_prewritten(m, delta); break;
      case MoveState::authorized: authorized_delta_.update_key_prewritten(m, delta); break;
      case MoveState::aspired: aspired_delta_.update_key_prewritten(m, delta); break;
    }
  }

  // Batch form of update_delta for a refresh's worth of changes, split
  // into a filter pass and a reposition pass. The filter is a pure gather
  // over the stored keys — nothing but prefetched loads and compares, so
  // misses overlap freely; with the paired key layout those loads land in
  // lines the table repair just wrote — and only keys dropping below
  // their stored copy survive to the second pass (the bank's own
  // partition invariant guarantees ownership, so the per-entry dispatch
  // is saved for the few entries that reposition). Survivor collection is
  // branchless — append unconditionally, advance the cursor only on
  // survival — because the survival test is taken rarely and irregularly
  // enough that a branch would mispredict its way through the batch. The
  // survivors' owner/pos lines are then prefetched as a batch, hiding the
  // reposition pass's scattered reads behind its own start-up.
  void update_deltas(const std::vector<DeltaChange>& changes) {
    constexpr std::size_t kAhead = 48;
    const std::int64_t* stored = delta_slots_.stored_base();
    const unsigned shift = delta_slots_.stride_shift();
    const std::uint8_t* owner = delta_slots_.owner.data();
    const std::int32_t* pos = delta_slots_.pos.data();
    const std::size_t count = changes.size();
    if (survivors_.size() < count) survivors_.resize(count);  // scratch: size is high-water
    DeltaChange* out = survivors_.data();
    std::size_t ns = 0;
    for (std::size_t i = 0; i < count; ++i) {
      if (i + kAhead < count)
        detail::prefetch_read(stored + (static_cast<std::size_t>(changes[i + kAhead].move) << shift));
      const DeltaChange c = changes[i];
      assert(delta_slots_.truth_at(c.move) == c.value);
      out[ns] = c;
      ns += c.value < stored[static_cast<std::size_t>(c.move) << shift] ? 1u : 0u;
    }
    for (std::size_t i = 0; i < ns; ++i) {
      detail::prefetch_read(owner + out[i].move);
      detail::prefetch_read(pos + out[i].move);
    }
    // The reposition loop stalls on each survivor's heap entry line; owner
    // and pos a few entries ahead are already warm from the batch above,
    // so the entry line four repositions out can start moving now.
    for (std::size_t i = 0; i < ns; ++i) {
      if (i + 4 < ns) {
        const MoveId mm = out[i + 4].move;
        const LazyIndexedQueue::Entry* hb =
            delta_queue(MoveState(owner[mm])).raw_heap().data();
        detail::prefetch_write(hb + pos[mm]);
      }
      update_delta(out[i].move, out[i].value);
    }
  }

  std::optional<LazyIndexedQueue::Entry> peek_ineligible_delta() {
    return ineligible_delta_.peek_valid_min();
  }
  std::optional<LazyIndexedQueue::Entry> peek_authorized_delta() {
    return authorized_delta_.peek_valid_min();
  }
  std::optional<LazyIndexedQueue::Entry> peek_aspired_delta() {
    return aspired_delta_.peek_valid_min();
  }
  // Ineligible move closest to release: min (eligible iteration, move id).
  std::optional<LazyIndexedQueue::Entry> peek_fallback() {
    return ineligible_tabu_.peek_valid_min();
  }

  std::size_t ineligible_count() const { return ineligible_delta_.size(); }
  std::size_t authorized_count() const { return authorized_delta_.size(); }
  std::size_t aspired_count() const { return aspired_delta_.size(); }

  std::uint64_t repair_count() const {
    return ineligible_delta_.repair_count() + authorized_delta_.repair_count() +
           aspired_delta_.repair_count() + ineligible_tabu_.repair_count() +
           authorized_tabu_.repair_count();
  }

  const QueueSlots& delta_slots() const { return delta_slots_; }
  const QueueSlots& tabu_slots() const { return tabu_slots_; }

  // Read-only view of the delta queue holding moves in state `st`.
  const LazyIndexedQueue& delta_queue(MoveState st) const {
    switch (st) {
      case MoveState::ineligible: return ineligible_delta_;
      case MoveState::authorized: return authorized_delta_;
      case MoveState::aspired: return aspired_delta_;
    }
    throw QueueError("delta_queue: bad state");
  }

  // Full structural audit: the three delta queues partition the move set,
  // tabu ownership mirrors the delta state, every authoritative key matches
  // the delta table, eligibility agrees with the state boundaries at
  // iteration `iter`, and both stores are lazily sound (stored <= truth,
  // with each stored key sitting where the slot says it is). Throws
  // DebugCheckError on the first violation.
  void audit(const DeltaTable& table, std::int64_t iter, std::int64_t aspiration) const {
    if (ineligible_delta_.size() + authorized_delta_.size() + aspired_delta_.size() !=
        static_cast<std::size_t>(moves_))
      throw DebugCheckError("audit: delta queues do not partition the move set");
    for (std::int32_t m = 0; m < moves_; ++m) {
      const std::uint8_t down = delta_slots_.owner[static_cast<std::size_t>(m)];
      const std::uint8_t town = tabu_slots_.owner[static_cast<std::size_t>(m)];
      if (down == 0) throw DebugCheckError("audit: move " + std::to_string(m) + " unowned");
      const MoveState st = MoveState(down);
      if (st == MoveState::aspired ? town != 0 : town != down)
        throw DebugCheckError("audit: move " + std::to_string(m) + " tabu/delta owner mismatch");
      if (delta_slots_.truth_at(m) != table.at(m))
        throw DebugCheckError("audit: move " + std::to_string(m) + " truth != table delta");
      check_slot(delta_queue(st), delta_slots_, m, "delta");
      if (town != 0) {
        const LazyIndexedQueue& tq =
            town == std::uint8_t(MoveState::ineligible) ? ineligible_tabu_ : authorized_tabu_;
        check_slot(tq, tabu_slots_, m, "tabu");
      }
      const std::int64_t e = eligible_iter(m);
      MoveState expect;
      if (iter <= e)
        expect = MoveState::ineligible;
      else if (iter - aspiration > e)
        expect = MoveState::aspired;
      else
        expect = MoveState::authorized;
      if (st != expect)
        throw DebugCheckError("audit: move " + std::to_string(m) + " state " + to_string(st) +
                              " but boundaries say " + to_string(expect) + " (iter " +
                              std::to_string(iter) + ", eligible " + std::to_string(e) + ")");
    }
  }

 private:
  static void check_slot(const LazyIndexedQueue& q, const QueueSlots& slots, std::int32_t m,
                         const char* store) {
    const std::int64_t stored = slots.stored_at(m);
    if (stored > slots.truth_at(m))
      throw DebugCheckError("audit: move " + std::to_string(m) + " " + store +
                            " stored key exceeds truth (lazy soundness)");
    const auto& heap = q.raw_heap();
    const std::int32_t pos = slots.pos[static_cast<std::size_t>(m)];
    if (pos < 0 || static_cast<std::size_t>(pos) >= heap.size() ||
        heap[static_cast<std::size_t>(pos)].handle != m ||
        heap[static_cast<std::size_t>(pos)].key != stored)
      throw DebugCheckError("audit: move " + std::to_string(m) + " " + store +
                            " slot out of sync with heap");
  }

  std::int32_t moves_;
  std::vector<DeltaChange> survivors_;
  QueueSlots delta_slots_;
  QueueSlots tabu_slots_;
  LazyIndexedQueue ineligible_delta_;
  LazyIndexedQueue authorized_delta_;
  LazyIndexedQueue aspired_delta_;
  LazyIndexedQueue ineligible_tabu_;
  LazyIndexedQueue authorized_tabu_;
};

}  // namespace sqap
