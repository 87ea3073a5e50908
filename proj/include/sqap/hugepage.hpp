#pragma once

#include <cstddef>
#include <cstdlib>
#include <new>

#if defined(__linux__)
#include <sys/mman.h>
#endif

namespace sqap::detail {

// Allocator for the solver's big flat arrays (delta table, queue slots,
// heap storage). These are tens of megabytes accessed by random handle, so
// with 4 KiB pages nearly every probe adds a TLB miss and page walk on top
// of the cache miss. Buffers at least one huge page long are 2 MiB-aligned
// and madvise(MADV_HUGEPAGE)d, letting a kernel in madvise THP mode back
// them with huge pages and collapse those walks; elsewhere (or for small
// buffers) this degrades to a plain aligned allocation.
template <class T>
struct HugePageAllocator {
  using value_type = T;
  using is_always_equal = std::true_type;

  static constexpr std::size_t kHugePage = std::size_t(2) << 20;

  HugePageAllocator() = default;
  template <class U>
  HugePageAllocator(const HugePageAllocator<U>&) noexcept {}

  T* allocate(std::size_t count) {
    const std::size_t bytes = count * sizeof(T);
    const std::size_t align = bytes >= kHugePage ? kHugePage : alignof(std::max_align_t);
    void* p = nullptr;
    if (posix_memalign(&p, align, bytes) != 0) throw std::bad_alloc();
#if defined(__linux__) && defined(MADV_HUGEPAGE)
    if (bytes >= kHugePage) (void)madvise(p, bytes, MADV_HUGEPAGE);
#endif
    return static_cast<T*>(p);
  }

  void deallocate(T* p, std::size_t) noexcept { std::free(p); }

  template <class U>
  bool operator==(const HugePageAllocator<U>&) const noexcept {
    return true;
  }
};

}  // namespace sqap::detail
