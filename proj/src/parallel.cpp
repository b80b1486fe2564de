#include "fairsemi/parallel.hpp"

#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace fairsemi {

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn)
{
    if (n == 0)
        return;
    const std::size_t nthreads =
        std::min<std::size_t>(n, workers > 1 ? static_cast<std::size_t>(workers) : 1);

    if (nthreads == 1) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }

    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto body = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n)
                return;
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (std::size_t t = 0; t < nthreads; ++t)
        pool.emplace_back(body);
    for (auto& t : pool)
        t.join();

    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

}  // namespace fairsemi
