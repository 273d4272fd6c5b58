#pragma once

#include <chrono>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <optional>

namespace robochess {

// Multi-producer queue whose producers never block. When full, the oldest
// droppable item is discarded; items pushed as non-droppable are always kept.
template <typename T>
class BoundedQueue {
public:
    explicit BoundedQueue(std::size_t capacity) : capacity_(capacity) {}

    void push(T item, bool droppable) {
        {
            std::lock_guard lock(mutex_);
            if (closed_) return;
            if (items_.size() >= capacity_) {
                for (auto it = items_.begin(); it != items_.end(); ++it) {
                    if (it->droppable) {
                        items_.erase(it);
                        ++dropped_;
                        break;
                    }
                }
            }
            items_.push_back(Entry{std::move(item), droppable});
        }
        cv_.notify_one();
    }

    // Empty once closed and drained, or on timeout.
    std::optional<T> pop(std::chrono::milliseconds timeout) {
        std::unique_lock lock(mutex_);
        cv_.wait_for(lock, timeout, [&] { return !items_.empty() || closed_; });
        if (items_.empty()) return std::nullopt;
        T item = std::move(items_.front().item);
        items_.pop_front();
        return item;
    }

    void close() {
        {
            std::lock_guard lock(mutex_);
            closed_ = true;
        }
        cv_.notify_all();
    }

    bool closed_and_empty() const {
        std::lock_guard lock(mutex_);
        return closed_ && items_.empty();
    }

    std::size_t size() const {
        std::lock_guard lock(mutex_);
        return items_.size();
    }

    std::size_t dropped() const {
        std::lock_guard lock(mutex_);
        return dropped_;
    }

private:
    struct Entry {
        T item;
        bool droppable;
    };

    mutable std::mutex mutex_;
    std::condition_variable cv_;
    std::deque<Entry> items_;
    std::size_t capacity_;
    std::size_t dropped_ = 0;
    bool closed_ = false;
};

}  // namespace robochess
