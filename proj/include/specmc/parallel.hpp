#ifndef SPECMC_PARALLEL_HPP
#define SPECMC_PARALLEL_HPP

#include <condition_variable>
#include <cstdint>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace specmc {

// Fixed-size pool dispatching contiguous index blocks. Work items write only
// to their own slots; callers reduce after the join, in slot order, so results
// are identical for any worker count.
class ThreadPool {
 public:
  explicit ThreadPool(int workers) : workers_(workers < 1 ? 1 : workers) {
    for (int w = 1; w < workers_; ++w)
      threads_.emplace_back([this] { worker_loop(); });
  }

  ~ThreadPool() {
    {
      std::lock_guard<std::mutex> lk(mu_);
      stop_ = true;
    }
    cv_.notify_all();
    for (auto& t : threads_) t.join();
  }

  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  int workers() const { return workers_; }

  static int hardware_workers() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
  }

  // Partitions [0, n) into at most workers() contiguous blocks and runs
  // fn(begin, end) on each; blocks until every block is done.
  void for_blocks(std::int64_t n, const std::function<void(std::int64_t, std::int64_t)>& fn) {
    if (n <= 0) return;
    const int nblocks = static_cast<int>(n < workers_ ? n : workers_);
    if (nblocks == 1) {
      fn(0, n);
      return;
    }
    {
      std::lock_guard<std::mutex> lk(mu_);
      job_ = &fn;
      job_n_ = n;
      job_blocks_ = nblocks;
      next_block_ = 1;  // block 0 runs on the calling thread
      pending_ = nblocks - 1;
      ++epoch_;
    }
    cv_.notify_all();
    fn(0, block_end(0));
    std::unique_lock<std::mutex> lk(mu_);
    done_cv_.wait(lk, [this] { return pending_ == 0; });
    job_ = nullptr;
  }

 private:
  std::int64_t block_begin(int b) const { return job_n_ * b / job_blocks_; }
  std::int64_t block_end(int b) const { return job_n_ * (b + 1) / job_blocks_; }

  void worker_loop() {
    std::uint64_t seen = 0;
    for (;;) {
      int b = -1;
      {
        std::unique_lock<std::mutex> lk(mu_);
        cv_.wait(lk, [&] { return stop_ || (job_ && epoch_ != seen && next_block_ < job_blocks_); });
        if (stop_) return;
        b = next_block_++;
        if (next_block_ >= job_blocks_) seen = epoch_;
      }
      (*job_)(block_begin(b), block_end(b));
      {
        std::lock_guard<std::mutex> lk(mu_);
        if (--pending_ == 0) done_cv_.notify_all();
      }
    }
  }

  int workers_;
  std::vector<std::thread> threads_;
  std::mutex mu_;
  std::condition_variable cv_, done_cv_;
  const std::function<void(std::int64_t, std::int64_t)>* job_ = nullptr;
  std::int64_t job_n_ = 0;
  int job_blocks_ = 0;
  int next_block_ = 0;
  int pending_ = 0;
  std::uint64_t epoch_ = 0;
  bool stop_ = false;
};

}  // namespace specmc

#endif
