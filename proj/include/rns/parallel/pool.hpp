#pragma once

// Master/worker execution. The master submits jobs, workers process them
// and report completions; workers never talk to each other.
//
// Both backends schedule on the same virtual clock: a job dispatched at time
// t to a free worker completes at t + delay, with delays drawn from a seeded
// stream in dispatch order, and completions are delivered to the master in
// (time, dispatch sequence) order. The simulated backend runs the job inline;
// the thread backend runs it on an OS worker thread and the master waits for
// the specific result the clock says is next. Both therefore deliver the same
// completion sequence for the same seed.

#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "rns/core/random.hpp"

namespace rns {

/// Per-job processing time for the virtual clock.
struct DelayModel {
    enum class Kind { constant, exponential };
    Kind kind = Kind::constant;
    double value = 1.0;  // the constant delay, or the exponential rate

    static DelayModel constant(double x) { return {Kind::constant, x}; }
    static DelayModel exponential(double rate) { return {Kind::exponential, rate}; }

    /// Parses "constant:<x>" or "exponential:<rate>".
    static DelayModel parse(std::string_view text)
    {
        const auto colon = text.find(':');
        if (colon == std::string_view::npos) throw std::invalid_argument("delay: expected <kind>:<value>");
        const std::string kind(text.substr(0, colon));
        double v = 0.0;
        try {
            std::size_t used = 0;
            const std::string number(text.substr(colon + 1));
            v = std::stod(number, &used);
            if (used != number.size()) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            throw std::invalid_argument("delay: bad numeric value");
        }
        if (kind == "constant") {
            if (!(v >= 0.0)) throw std::invalid_argument("delay: constant must be >= 0");
            return constant(v);
        }
        if (kind == "exponential") {
            if (!(v > 0.0)) throw std::invalid_argument("delay: rate must be > 0");
            return exponential(v);
        }
        throw std::invalid_argument("delay: unknown kind '" + kind + "'");
    }

    std::string to_string() const
    {
        return (kind == Kind::constant ? "constant:" : "exponential:") + std::to_string(value);
    }

    double draw(RandomnessStream& stream) const
    {
        if (kind == Kind::constant) return value;
        return -std::log(stream.next_uniform()) / value;
    }

    bool operator==(const DelayModel&) const = default;
};

/// One entry of the master's message log.
struct PoolMessage {
    enum class Kind { dispatch, completion, marker };
    Kind kind;
    double time;
    std::uint64_t job_id;
    std::size_t worker;  // kNoWorker for markers

    bool operator==(const PoolMessage&) const = default;
};

inline constexpr std::size_t kNoWorker = std::numeric_limits<std::size_t>::max();

template <class Job, class Result>
struct Completion {
    std::uint64_t job_id = 0;
    Job job{};
    std::optional<Result> result;  // empty for markers
    std::size_t worker = kNoWorker;
    double time = 0.0;

    bool is_marker() const noexcept { return worker == kNoWorker; }
};

/// Blocking multi-producer / multi-consumer queue with close().
template <class T>
class Channel {
public:
    void push(T value)
    {
        {
            std::lock_guard lock(mutex_);
            if (closed_) throw std::logic_error("Channel: push after close");
            items_.push_back(std::move(value));
        }
        cv_.notify_one();
    }

    /// Blocks until an item is available; empty once closed and drained.
    std::optional<T> pop()
    {
        std::unique_lock lock(mutex_);
        cv_.wait(lock, [&] { return closed_ || !items_.empty(); });
        if (items_.empty()) return std::nullopt;
        T value = std::move(items_.front());
        items_.pop_front();
        return value;
    }

    void close()
    {
        {
            std::lock_guard lock(mutex_);
            closed_ = true;
        }
        cv_.notify_all();
    }

private:
    std::mutex mutex_;
    std::condition_variable cv_;
    std::deque<T> items_;
    bool closed_ = false;
};

template <class Job>
struct WorkItem {
    std::uint64_t job_id;
    Job job;
    double delay;
};

template <class Result>
struct WorkDone {
    std::uint64_t job_id;
    Result result;
};

/// Worker body: take a job, process it, submit the result, repeat until the
/// job channel is closed and drained. `time_unit` scales the modeled delay
/// into a real sleep (zero disables sleeping).
template <class Job, class Result, class Handler>
void worker_loop(Channel<WorkItem<Job>>& jobs, Channel<WorkDone<Result>>& done, Handler& handler,
                 std::chrono::nanoseconds time_unit = std::chrono::nanoseconds{0})
{
    while (auto item = jobs.pop()) {
        if (time_unit.count() > 0)
            std::this_thread::sleep_for(std::chrono::duration_cast<std::chrono::nanoseconds>(item->delay * time_unit));
        done.push({item->job_id, handler(item->job)});
    }
}

namespace detail {

/// Virtual-clock bookkeeping shared by both backends.
class VirtualSchedule {
public:
    VirtualSchedule(std::size_t workers, DelayModel delay, RandomnessStream delay_stream)
        : delay_(delay), stream_(delay_stream)
    {
        if (workers < 1) throw std::invalid_argument("pool: need at least one worker");
        for (std::size_t w = workers; w-- > 0;) free_.push_back(w);
    }

    struct Event {
        double time;
        std::uint64_t seq;
        std::uint64_t job_id;
        std::size_t worker;
        bool operator>(const Event& o) const { return time != o.time ? time > o.time : seq > o.seq; }
    };

    std::uint64_t new_id() { return next_id_++; }

    bool has_free_worker() const { return !free_.empty(); }

    /// Starts `job_id` now on the lowest free worker; returns (worker, delay).
    std::pair<std::size_t, double> start(std::uint64_t job_id)
    {
        const std::size_t w = free_.back();
        free_.pop_back();
        const double d = delay_.draw(stream_);
        events_.push({now_ + d, seq_++, job_id, w});
        log_.push_back({PoolMessage::Kind::dispatch, now_, job_id, w});
        return {w, d};
    }

    void marker(std::uint64_t job_id)
    {
        events_.push({now_, seq_++, job_id, kNoWorker});
    }

    bool empty() const { return events_.empty(); }

    Event pop()
    {
        Event e = events_.top();
        events_.pop();
        now_ = e.time;
        log_.push_back({e.worker == kNoWorker ? PoolMessage::Kind::marker : PoolMessage::Kind::completion, now_,
                        e.job_id, e.worker});
        if (e.worker != kNoWorker) {
            // Keep the free list sorted descending so back() is the lowest id.
            auto it = free_.begin();
            while (it != free_.end() && *it > e.worker) ++it;
            free_.insert(it, e.worker);
        }
        return e;
    }

    double now() const { return now_; }
    const std::vector<PoolMessage>& log() const { return log_; }
    std::size_t in_flight() const { return events_.size(); }

private:
    DelayModel delay_;
    RandomnessStream stream_;
    std::vector<std::size_t> free_;
    std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
    std::vector<PoolMessage> log_;
    double now_ = 0.0;
    std::uint64_t seq_ = 0;
    std::uint64_t next_id_ = 0;
};

} // namespace detail

/// Discrete-event backend: jobs run inline at dispatch time.
template <class Job, class Result>
class SimulatedPool {
public:
    using Handler = std::function<Result(const Job&)>;
    using CompletionType = Completion<Job, Result>;

    SimulatedPool(std::size_t workers, Handler handler, DelayModel delay, RandomnessStream delay_stream)
        : workers_(workers), handler_(std::move(handler)), schedule_(workers, delay, delay_stream)
    {
    }

    /// Queues a job; it starts when a worker is free.
    std::uint64_t submit(Job job)
    {
        const std::uint64_t id = schedule_.new_id();
        pending_.push_back({id, std::move(job)});
        pump();
        return id;
    }

    /// A marker needs no worker and completes at the current time.
    std::uint64_t submit_marker(Job job)
    {
        const std::uint64_t id = schedule_.new_id();
        jobs_.emplace(id, std::move(job));
        schedule_.marker(id);
        return id;
    }

    CompletionType next()
    {
        if (schedule_.empty()) throw std::logic_error("SimulatedPool: nothing in flight");
        const auto e = schedule_.pop();
        CompletionType c;
        c.job_id = e.job_id;
        c.worker = e.worker;
        c.time = e.time;
        auto node = jobs_.extract(e.job_id);
        c.job = std::move(node.mapped());
        if (auto r = results_.extract(e.job_id)) c.result = std::move(r.mapped());
        pump();
        return c;
    }

    std::size_t workers() const noexcept { return workers_; }
    std::size_t in_flight() const { return schedule_.in_flight() + pending_.size(); }
    const std::vector<PoolMessage>& message_log() const { return schedule_.log(); }
    double now() const { return schedule_.now(); }

private:
    void pump()
    {
        while (!pending_.empty() && schedule_.has_free_worker()) {
            auto [id, job] = std::move(pending_.front());
            pending_.pop_front();
            schedule_.start(id);
            results_.emplace(id, handler_(job));
            jobs_.emplace(id, std::move(job));
        }
    }

    std::size_t workers_;
    Handler handler_;
    detail::VirtualSchedule schedule_;
    std::deque<std::pair<std::uint64_t, Job>> pending_;
    std::map<std::uint64_t, Job> jobs_;
    std::map<std::uint64_t, Result> results_;
};

/// OS-thread backend: one thread per worker, fed through a job channel.
template <class Job, class Result>
class ThreadPool {
public:
    using Handler = std::function<Result(const Job&)>;
    using CompletionType = Completion<Job, Result>;

    ThreadPool(std::size_t workers, Handler handler, DelayModel delay, RandomnessStream delay_stream,
               std::chrono::nanoseconds time_unit = std::chrono::nanoseconds{0})
        : workers_(workers), handler_(std::move(handler)), schedule_(workers, delay, delay_stream)
    {
        threads_.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
            threads_.emplace_back([this, time_unit] { worker_loop<Job, Result>(job_channel_, done_channel_, handler_, time_unit); });
    }

    ThreadPool(const ThreadPool&) = delete;
    ThreadPool& operator=(const ThreadPool&) = delete;

    ~ThreadPool()
    {
        job_channel_.close();
        for (auto& t : threads_) t.join();
    }

    std::uint64_t submit(Job job)
    {
        const std::uint64_t id = schedule_.new_id();
        pending_.push_back({id, std::move(job)});
        pump();
        return id;
    }

    std::uint64_t submit_marker(Job job)
    {
        const std::uint64_t id = schedule_.new_id();
        jobs_.emplace(id, std::move(job));
        schedule_.marker(id);
        return id;
    }

    CompletionType next()
    {
        if (schedule_.empty()) throw std::logic_error("ThreadPool: nothing in flight");
        const auto e = schedule_.pop();
        CompletionType c;
        c.job_id = e.job_id;
        c.worker = e.worker;
        c.time = e.time;
        c.job = std::move(jobs_.extract(e.job_id).mapped());
        if (e.worker != kNoWorker) {
            // Wait for this particular job; buffer anything that finishes first.
            auto it = arrived_.find(e.job_id);
            while (it == arrived_.end()) {
                auto done = done_channel_.pop();
                if (!done) throw std::runtime_error("ThreadPool: completion channel closed");
                it = arrived_.emplace(done->job_id, std::move(done->result)).first;
                if (done->job_id != e.job_id) it = arrived_.find(e.job_id);
            }
            c.result = std::move(it->second);
            arrived_.erase(it);
        }
        pump();
        return c;
    }

    std::size_t workers() const noexcept { return workers_; }
    std::size_t in_flight() const { return schedule_.in_flight() + pending_.size(); }
    const std::vector<PoolMessage>& message_log() const { return schedule_.log(); }
    double now() const { return schedule_.now(); }

private:
    void pump()
    {
        while (!pending_.empty() && schedule_.has_free_worker()) {
            auto [id, job] = std::move(pending_.front());
            pending_.pop_front();
            const auto [w, d] = schedule_.start(id);
            (void)w;
            job_channel_.push({id, job, d});
            jobs_.emplace(id, std::move(job));
        }
    }

    std::size_t workers_;
    Handler handler_;
    detail::VirtualSchedule schedule_;
    Channel<WorkItem<Job>> job_channel_;
    Channel<WorkDone<Result>> done_channel_;
    std::deque<std::pair<std::uint64_t, Job>> pending_;
    std::map<std::uint64_t, Job> jobs_;
    std::map<std::uint64_t, Result> arrived_;
    std::vector<std::thread> threads_;
};

enum class PoolBackend { threads, simulated };

constexpr std::string_view to_string(PoolBackend b) noexcept { return b == PoolBackend::threads ? "threads" : "simulated"; }

/// Pool parameters as they appear in the [pool] config section.
struct PoolConfig {
    PoolBackend backend = PoolBackend::simulated;
    std::size_t workers = 1;
    DelayModel delay = DelayModel::constant(1.0);

    bool operator==(const PoolConfig&) const = default;
};

/// Delay stream reserved for the pool within a macro-replication.
inline RandomnessStream pool_delay_stream(std::uint64_t seed, std::uint64_t replication)
{
    return RandomnessStream(seed, substream_id(replication, 0xffffffffULL));
}

/// Runs `body(pool)` with a pool of the configured backend.
template <class Job, class Result, class Body>
auto with_pool(const PoolConfig& config, std::function<Result(const Job&)> handler, RandomnessStream delay_stream,
               Body&& body)
{
    if (config.backend == PoolBackend::threads) {
        ThreadPool<Job, Result> pool(config.workers, std::move(handler), config.delay, delay_stream);
        return body(pool);
    }
    SimulatedPool<Job, Result> pool(config.workers, std::move(handler), config.delay, delay_stream);
    return body(pool);
}

} // namespace rns
