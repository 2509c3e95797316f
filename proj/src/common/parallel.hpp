// SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace sonotrace {

// Number of worker threads to use when the caller passes 0.
unsigned default_worker_count();

// Runs task(i) for every i in [0, count). Tasks are claimed dynamically, so
// callers must write results to disjoint, index-addressed slots. The first
// exception thrown by any task is rethrown on the calling thread.
void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& task);

}  // namespace sonotrace
