#include "vsheet/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace vsheet {

namespace {

unsigned initial_thread_count() {
    if (const char* env = std::getenv("VSHEET_THREADS")) {
        try {
            return static_cast<unsigned>(std::stoul(env));
        } catch (...) {
        }
    }
    return 0;
}

std::atomic<unsigned>& configured() {
    static std::atomic<unsigned> value{initial_thread_count()};
    return value;
}

}  // namespace

void set_thread_count(unsigned count) { configured().store(count); }

unsigned thread_count() {
    const unsigned c = configured().load();
    if (c != 0) return c;
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min<std::size_t>(thread_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    // Small blocks handed out dynamically; each index is still evaluated by
    // exactly one worker with identical arithmetic.
    const std::size_t block = std::max<std::size_t>(1, n / (workers * 16));
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&] {
        try {
            for (;;) {
                const std::size_t start = next.fetch_add(block);
                if (start >= n) break;
                const std::size_t stop = std::min(n, start + block);
                for (std::size_t i = start; i < stop; ++i) body(i);
            }
        } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            next.store(n);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace vsheet
