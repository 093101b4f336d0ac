#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace drivenbath {

/// Run fn(begin, end) over [0, total) split into fixed-size blocks.
///
/// Block boundaries depend only on `total` and `block_size`, never on the
/// thread count, and each block must write only to its own output slots;
/// combined with sequential post-reduction this makes results byte-identical
/// for any number of workers.
template <class Fn>
void parallel_blocks(std::size_t total, std::size_t block_size, unsigned threads,
                     Fn&& fn) {
    if (total == 0) return;
    if (block_size == 0) block_size = 1;
    const std::size_t n_blocks = (total + block_size - 1) / block_size;

    if (threads <= 1 || n_blocks == 1) {
        for (std::size_t b = 0; b < n_blocks; ++b)
            fn(b * block_size, std::min(total, (b + 1) * block_size));
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        for (;;) {
            const std::size_t b = next.fetch_add(1);
            if (b >= n_blocks || failed.load()) return;
            try {
                fn(b * block_size, std::min(total, (b + 1) * block_size));
            } catch (...) {
                if (!failed.exchange(true)) error = std::current_exception();
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    const unsigned n_workers = std::min<unsigned>(threads, static_cast<unsigned>(n_blocks));
    pool.reserve(n_workers);
    for (unsigned i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

} // namespace drivenbath
