#include "ppm/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace ppm {

unsigned worker_count()
{
  if (char const *env = std::getenv("PPM_LAB_THREADS"))
  {
    try
    {
      int const value = std::stoi(env);
      if (value > 0)
      {
        return static_cast<unsigned>(value);
      }
    }
    catch (std::exception const &)
    {
    }
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, std::function<void(unsigned, std::size_t)> const &body,
                  unsigned workers)
{
  if (workers == 0)
  {
    workers = worker_count();
  }
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
  if (workers <= 1)
  {
    for (std::size_t i = 0; i < count; ++i)
    {
      body(0, i);
    }
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  std::size_t const block = (count + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w)
  {
    threads.emplace_back([&, w] {
      std::size_t const begin = w * block;
      std::size_t const end   = std::min(count, begin + block);
      try
      {
        for (std::size_t i = begin; i < end; ++i)
        {
          body(w, i);
        }
      }
      catch (...)
      {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure)
        {
          failure = std::current_exception();
        }
      }
    });
  }
  for (auto &t : threads)
  {
    t.join();
  }
  if (failure)
  {
    std::rethrow_exception(failure);
  }
}

}  // namespace ppm
