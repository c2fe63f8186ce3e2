#pragma once

namespace fraudward {

// Current OpenMP worker cap (1 when built without OpenMP).
int max_threads();

void set_threads(int n);

// Scoped worker cap; restores the previous cap on destruction. Used by
// tests that compare serial and parallel runs of the same kernel.
class ThreadLimit {
public:
    explicit ThreadLimit(int n);
    ~ThreadLimit();
    ThreadLimit(const ThreadLimit&) = delete;
    ThreadLimit& operator=(const ThreadLimit&) = delete;

private:
    int previous_;
};

}  // namespace fraudward
