#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <optional>
#include <thread>
#include <type_traits>
#include <vector>

namespace typocorpus {

/// Applies fn to every element on up to `workers` threads. Results keep the
/// input order. If calls throw, the exception of the lowest failing index is
/// rethrown after all threads finish.
template <typename In, typename Fn>
auto parallel_map(const std::vector<In>& items, Fn fn, unsigned workers)
    -> std::vector<std::invoke_result_t<Fn&, const In&>> {
    using Out = std::invoke_result_t<Fn&, const In&>;
    const std::size_t n = items.size();
    std::vector<std::optional<Out>> slots(n);
    std::vector<std::exception_ptr> errors(n);
    const unsigned threads = static_cast<unsigned>(std::min<std::size_t>(std::max(workers, 1u), n));

    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            try {
                slots[i].emplace(fn(items[i]));
            } catch (...) {
                errors[i] = std::current_exception();
                break;
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        auto body = [&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    slots[i].emplace(fn(items[i]));
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(body);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    std::vector<Out> out;
    out.reserve(n);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

}  // namespace typocorpus
