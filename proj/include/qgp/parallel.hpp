#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace qgp {

// Runs f(i) for i in [0, n) on up to `threads` workers. Each index writes its own
// slot, so callers reduce in index order and results do not depend on scheduling.
template <class F>
void parallel_for(int n, int threads, F&& f) {
    if (threads <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    const int w = std::min(threads, n);
    std::vector<std::exception_ptr> errs(static_cast<size_t>(w));
    std::vector<std::thread> pool;
    for (int t = 0; t < w; ++t)
        pool.emplace_back([&, t] {
            try {
                for (int i = t; i < n; i += w) f(i);
            } catch (...) {
                errs[static_cast<size_t>(t)] = std::current_exception();
            }
        });
    for (auto& th : pool) th.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

}  // namespace qgp
