#ifndef PLANISO_UTIL_HPP_
#define PLANISO_UTIL_HPP_

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace planiso {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

enum class ErrorKind {
    parse,        // malformed input text
    unsupported,  // recognized but unsupported feature
    validation,   // well-formed but semantically invalid model
    grounding,    // errors raised while instantiating schemas
    cap_exceeded, // a configured resource cap was hit
    io,           // file system problems
    internal      // invariant violations that indicate a bug
};

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

  private:
    ErrorKind kind_;
};

inline Error parse_error(int line, int col, const std::string& message) {
    return Error(ErrorKind::parse, "parse error at " + std::to_string(line) + ":" + std::to_string(col) + ": " + message);
}

// ---------------------------------------------------------------------------
// 128-bit content digest (prefilter only; equality is always byte-verified)
// ---------------------------------------------------------------------------

struct Digest128 {
    uint64_t hi = 0;
    uint64_t lo = 0;

    bool operator==(const Digest128& other) const { return hi == other.hi && lo == other.lo; }
    bool operator!=(const Digest128& other) const { return !(*this == other); }
    bool operator<(const Digest128& other) const { return hi != other.hi ? hi < other.hi : lo < other.lo; }

    std::string hex() const {
        static const char* digits = "0123456789abcdef";
        std::string out(32, '0');
        for (int i = 0; i < 16; ++i) {
            uint64_t word = i < 8 ? hi : lo;
            int shift = 8 * (7 - (i % 8));
            uint8_t byte = static_cast<uint8_t>((word >> shift) & 0xff);
            out[2 * i] = digits[byte >> 4];
            out[2 * i + 1] = digits[byte & 0xf];
        }
        return out;
    }
};

namespace detail {
inline uint64_t mix64(uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
}
} // namespace detail

inline Digest128 digest_bytes(const uint8_t* data, size_t size) {
    uint64_t h1 = 0x9e3779b97f4a7c15ull;
    uint64_t h2 = 0xc2b2ae3d27d4eb4full;
    size_t i = 0;
    while (i + 8 <= size) {
        uint64_t word;
        std::memcpy(&word, data + i, 8);
        h1 = detail::mix64(h1 ^ word);
        h2 = detail::mix64(h2 + word * 0x9e3779b97f4a7c15ull);
        i += 8;
    }
    uint64_t tail = 0;
    for (size_t j = 0; i + j < size; ++j)
        tail |= static_cast<uint64_t>(data[i + j]) << (8 * j);
    h1 = detail::mix64(h1 ^ tail ^ size);
    h2 = detail::mix64(h2 + tail + size);
    return Digest128{detail::mix64(h1 + h2), detail::mix64(h2 ^ h1)};
}

inline Digest128 digest_bytes(const std::vector<uint8_t>& bytes) {
    return digest_bytes(bytes.data(), bytes.size());
}

inline Digest128 digest_string(const std::string& text) {
    return digest_bytes(reinterpret_cast<const uint8_t*>(text.data()), text.size());
}

// ---------------------------------------------------------------------------
// Dynamic bit set used for states (sets of atom ids)
// ---------------------------------------------------------------------------

class Bitset {
  public:
    Bitset() = default;
    explicit Bitset(size_t nbits) : nbits_(nbits), words_((nbits + 63) / 64, 0) {}

    size_t size() const { return nbits_; }

    void set(size_t i) { words_[i >> 6] |= uint64_t(1) << (i & 63); }
    void reset(size_t i) { words_[i >> 6] &= ~(uint64_t(1) << (i & 63)); }
    bool test(size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }

    bool contains_all(const Bitset& other) const {
        for (size_t w = 0; w < words_.size(); ++w)
            if ((other.words_[w] & ~words_[w]) != 0)
                return false;
        return true;
    }

    bool intersects(const Bitset& other) const {
        for (size_t w = 0; w < words_.size(); ++w)
            if ((words_[w] & other.words_[w]) != 0)
                return true;
        return false;
    }

    // this := (this \ del) | add
    void apply(const Bitset& del, const Bitset& add) {
        for (size_t w = 0; w < words_.size(); ++w)
            words_[w] = (words_[w] & ~del.words_[w]) | add.words_[w];
    }

    size_t count() const {
        size_t n = 0;
        for (uint64_t w : words_)
            n += static_cast<size_t>(__builtin_popcountll(w));
        return n;
    }

    template <typename F>
    void for_each_set(F&& f) const {
        for (size_t wi = 0; wi < words_.size(); ++wi) {
            uint64_t w = words_[wi];
            while (w != 0) {
                int bit = __builtin_ctzll(w);
                f(wi * 64 + static_cast<size_t>(bit));
                w &= w - 1;
            }
        }
    }

    std::vector<uint32_t> to_indices() const {
        std::vector<uint32_t> out;
        out.reserve(count());
        for_each_set([&](size_t i) { out.push_back(static_cast<uint32_t>(i)); });
        return out;
    }

    uint64_t hash() const {
        uint64_t h = 0x51ab3f291c2dull;
        for (uint64_t w : words_)
            h = detail::mix64(h ^ w);
        return h;
    }

    bool operator==(const Bitset& other) const { return nbits_ == other.nbits_ && words_ == other.words_; }
    bool operator!=(const Bitset& other) const { return !(*this == other); }

  private:
    size_t nbits_ = 0;
    std::vector<uint64_t> words_;
};

struct BitsetHash {
    size_t operator()(const Bitset& b) const { return static_cast<size_t>(b.hash()); }
};

// ---------------------------------------------------------------------------
// Little-endian byte serialization helpers
// ---------------------------------------------------------------------------

inline void append_u32(std::vector<uint8_t>& out, uint32_t value) {
    out.push_back(static_cast<uint8_t>(value));
    out.push_back(static_cast<uint8_t>(value >> 8));
    out.push_back(static_cast<uint8_t>(value >> 16));
    out.push_back(static_cast<uint8_t>(value >> 24));
}

// Deterministic static-chunk parallel map; results land in index order, so
// output is identical to the sequential run regardless of the worker count.
template <typename F>
void parallel_for(size_t n, unsigned jobs, F&& body) {
    if (jobs <= 1 || n < 2) {
        for (size_t i = 0; i < n; ++i)
            body(i);
        return;
    }
    unsigned workers = std::min<unsigned>(jobs, static_cast<unsigned>(n));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) {
        pool.emplace_back([&, t] {
            for (size_t i = t; i < n; i += workers)
                body(i);
        });
    }
    for (auto& th : pool)
        th.join();
}

constexpr uint32_t kInfiniteCost = 0xffffffffu;

inline std::string cost_to_string(uint32_t v) {
    return v == kInfiniteCost ? std::string("inf") : std::to_string(v);
}

} // namespace planiso

#endif // PLANISO_UTIL_HPP_
