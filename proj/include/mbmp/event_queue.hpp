#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <vector>

namespace mbmp
{
    /// Deterministic discrete-event queue. Events at equal times run in insertion order.
    class EventQueue
    {
    public:
        using Action = std::function<void()>;

        double now() const noexcept { return now_; }
        bool empty() const noexcept { return heap_.empty(); }
        std::size_t pending() const noexcept { return heap_.size(); }
        std::uint64_t processed() const noexcept { return processed_; }

        void schedule_at(double t, Action a)
        {
            if (t < now_)
                throw std::logic_error("EventQueue: scheduling into the past");
            heap_.push(Entry{t, next_seq_++, std::move(a)});
        }

        void schedule_in(double dt, Action a) { schedule_at(now_ + dt, std::move(a)); }

        /// Pops and runs the earliest event. Returns false when empty.
        bool step()
        {
            if (heap_.empty())
                return false;
            Entry e = heap_.top();
            heap_.pop();
            now_ = e.time;
            ++processed_;
            e.action();
            return true;
        }

        /// Runs every event with time <= `until`; the clock ends at `until`.
        void run_until(double until)
        {
            while (!heap_.empty() && heap_.top().time <= until)
                step();
            if (until > now_)
                now_ = until;
        }

    private:
        struct Entry
        {
            double time;
            std::uint64_t seq;
            Action action;
        };
        struct Later
        {
            bool operator()(const Entry &a, const Entry &b) const noexcept
            {
                return a.time != b.time ? a.time > b.time : a.seq > b.seq;
            }
        };

        double now_ = 0.0;
        std::uint64_t next_seq_ = 0;
        std::uint64_t processed_ = 0;
        std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
    };

} // namespace mbmp
