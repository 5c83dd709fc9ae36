#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace l0 {

/// Fixed-size bitset over 64-bit blocks; the unused tail of the last block is
/// kept zero so that block-wise equality and popcounts stay honest.
class Bits {
  public:
    Bits() = default;
    explicit Bits(std::size_t size, bool value = false)
        : size_(size), blocks_((size + 63) / 64, value ? ~std::uint64_t{0} : 0) {
        trim();
    }

    std::size_t size() const { return size_; }

    bool test(std::size_t i) const { return (blocks_[i >> 6] >> (i & 63)) & 1u; }
    void set(std::size_t i, bool v = true) {
        std::uint64_t mask = std::uint64_t{1} << (i & 63);
        if (v)
            blocks_[i >> 6] |= mask;
        else
            blocks_[i >> 6] &= ~mask;
    }

    std::size_t count() const {
        std::size_t c = 0;
        for (std::uint64_t b : blocks_) c += static_cast<std::size_t>(__builtin_popcountll(b));
        return c;
    }
    bool none() const {
        for (std::uint64_t b : blocks_)
            if (b) return false;
        return true;
    }
    bool any() const { return !none(); }
    bool all() const { return count() == size_; }

    Bits operator&(const Bits& o) const { return zip(o, [](std::uint64_t a, std::uint64_t b) { return a & b; }); }
    Bits operator|(const Bits& o) const { return zip(o, [](std::uint64_t a, std::uint64_t b) { return a | b; }); }
    Bits operator-(const Bits& o) const { return zip(o, [](std::uint64_t a, std::uint64_t b) { return a & ~b; }); }
    Bits operator~() const {
        Bits r(*this);
        for (std::uint64_t& b : r.blocks_) b = ~b;
        r.trim();
        return r;
    }

    bool operator==(const Bits& o) const { return size_ == o.size_ && blocks_ == o.blocks_; }
    bool operator!=(const Bits& o) const { return !(*this == o); }

    bool is_subset_of(const Bits& o) const { return (*this - o).none(); }
    bool intersects(const Bits& o) const { return (*this & o).any(); }

    template <class Fn>
    void for_each(Fn fn) const {
        for (std::size_t i = 0; i < size_; ++i)
            if (test(i)) fn(i);
    }

  private:
    template <class Op>
    Bits zip(const Bits& o, Op op) const {
        Bits r(size_);
        for (std::size_t i = 0; i < blocks_.size(); ++i) r.blocks_[i] = op(blocks_[i], o.blocks_[i]);
        return r;
    }
    void trim() {
        if (size_ & 63) blocks_.back() &= (std::uint64_t{1} << (size_ & 63)) - 1;
        if (size_ == 0) blocks_.clear();
    }

    std::size_t size_ = 0;
    std::vector<std::uint64_t> blocks_;
};

}  // namespace l0
