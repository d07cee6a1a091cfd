#include "gvcsr/huffman.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace gvcsr {

namespace {

struct Node {
    std::uint64_t count;
    int left = -1, right = -1;   // children in the node pool, -1 for leaves
    std::int64_t symbol = 0;
};

}  // namespace

Huffman Huffman::from_counts(const std::map<std::int64_t, std::uint64_t>& counts) {
    if (counts.empty()) throw std::invalid_argument("Huffman: empty alphabet");

    Huffman h;
    // Leaves sorted by (count, symbol); std::map supplies symbol order,
    // stable_sort keeps it within equal counts.
    std::vector<Node> pool;
    pool.reserve(counts.size() * 2);
    std::vector<int> leaves;
    for (const auto& [sym, cnt] : counts) {
        pool.push_back({cnt, -1, -1, sym});
        leaves.push_back(static_cast<int>(pool.size()) - 1);
    }
    std::stable_sort(leaves.begin(), leaves.end(),
                     [&](int a, int b) { return pool[a].count < pool[b].count; });

    if (leaves.size() == 1) {
        h.lengths_ = {{pool[leaves[0]].symbol, 1u}};
    } else {
        // Two-queue merge: both queues stay sorted, so the global minimum is
        // always at one of the fronts. Leaves win ties for determinism.
        std::deque<int> lq(leaves.begin(), leaves.end()), mq;
        auto pop_min = [&]() {
            int id;
            if (!lq.empty() && (mq.empty() || pool[lq.front()].count <= pool[mq.front()].count)) {
                id = lq.front();
                lq.pop_front();
            } else {
                id = mq.front();
                mq.pop_front();
            }
            return id;
        };
        while (lq.size() + mq.size() > 1) {
            int a = pop_min(), b = pop_min();
            pool.push_back({pool[a].count + pool[b].count, a, b, 0});
            mq.push_back(static_cast<int>(pool.size()) - 1);
        }
        // Depth-first traversal assigns lengths.
        std::vector<std::pair<int, unsigned>> stack{{mq.front(), 0u}};
        while (!stack.empty()) {
            auto [id, depth] = stack.back();
            stack.pop_back();
            const Node& nd = pool[static_cast<std::size_t>(id)];
            if (nd.left < 0) {
                h.lengths_.emplace_back(nd.symbol, depth == 0 ? 1u : depth);
            } else {
                stack.emplace_back(nd.left, depth + 1);
                stack.emplace_back(nd.right, depth + 1);
            }
        }
    }

    std::sort(h.lengths_.begin(), h.lengths_.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second < b.second : a.first < b.first;
    });

    h.max_len_ = h.lengths_.back().second;
    h.first_code_.assign(h.max_len_ + 1, 0);
    h.first_index_.assign(h.max_len_ + 1, 0);
    std::vector<std::size_t> count_per_len(h.max_len_ + 1, 0);
    for (const auto& [sym, len] : h.lengths_) count_per_len[len]++;
    std::uint64_t code = 0;
    std::size_t index = 0;
    for (unsigned len = 1; len <= h.max_len_; ++len) {
        h.first_code_[len] = code;
        h.first_index_[len] = index;
        code = (code + count_per_len[len]) << 1;
        index += count_per_len[len];
    }
    // Canonical code for the i-th symbol of length L is
    // first_code_[L] + (i - first_index_[L]).
    for (std::size_t i = 0; i < h.lengths_.size(); ++i) {
        auto [sym, len] = h.lengths_[i];
        h.codes_[sym] = {h.first_code_[len] + (i - h.first_index_[len]), len};
    }
    return h;
}

unsigned Huffman::length(std::int64_t symbol) const {
    auto it = codes_.find(symbol);
    if (it == codes_.end()) throw std::invalid_argument("Huffman: symbol not in alphabet");
    return it->second.second;
}

void Huffman::encode(BitWriter& bw, std::int64_t symbol) const {
    auto it = codes_.find(symbol);
    if (it == codes_.end()) throw std::invalid_argument("Huffman: symbol not in alphabet");
    bw.put_bits(it->second.first, it->second.second);
}

std::int64_t Huffman::decode(BitReader& br) const {
    std::uint64_t code = 0;
    for (unsigned len = 1; len <= max_len_; ++len) {
        code = (code << 1) | (br.get_bit() ? 1 : 0);
        std::size_t count_at_len =
            (len == max_len_ ? lengths_.size() : first_index_[len + 1]) - first_index_[len];
        if (count_at_len > 0 && code >= first_code_[len] && code < first_code_[len] + count_at_len)
            return lengths_[first_index_[len] + (code - first_code_[len])].first;
    }
    throw integrity_error("Huffman: invalid codeword");
}

}  // namespace gvcsr
