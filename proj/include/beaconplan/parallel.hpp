#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace beaconplan::detail
{

// Runs body(i) for i in [0, n) across hardware threads. Each index is
// visited exactly once; results must be written to disjoint slots so the
// output does not depend on scheduling. Small ranges run inline.
template <class Body>
void parallel_for(std::size_t n, Body &&body, std::size_t min_parallel = 4096)
{
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  if (n < min_parallel || hw == 1)
  {
    for (std::size_t i = 0; i < n; ++i)
      body(i);
    return;
  }

  const std::size_t workers = std::min(hw, n);
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
    {
      pool.emplace_back([&, w] {
        try
        {
          for (std::size_t i = w; i < n; i += workers)
            body(i);
        }
        catch (...)
        {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto &e : errors)
  {
    if (e)
      std::rethrow_exception(e);
  }
}

} // namespace beaconplan::detail
