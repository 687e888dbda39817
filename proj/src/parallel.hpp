// SPDX-License-Identifier: Apache-2.0
//
// beamrate - downlink multiuser beamforming evaluation for Massive MIMO-OFDM
// Copyright (C) 2026 beamrate developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef BEAMRATE_PARALLEL_HPP
#define BEAMRATE_PARALLEL_HPP

#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace beamrate
{

// Runs fn(i) for i in [0, count). Each index is evaluated exactly once and
// workers share no state, so results are identical to a sequential loop for
// any thread count. The first exception thrown by any worker is rethrown.
template <typename Fn> void parallel_for(std::size_t count, int threads, Fn&& fn)
{
    if (threads <= 1 || count <= 1)
    {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }

    std::size_t n_workers = std::min<std::size_t>(std::size_t(threads), count);
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    std::exception_ptr first_error;
    std::mutex error_mutex;

    for (std::size_t w = 0; w < n_workers; ++w)
    {
        pool.emplace_back(
            [&, w]()
            {
                try
                {
                    for (std::size_t i = w; i < count; i += n_workers)
                        fn(i);
                }
                catch (...)
                {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error)
                        first_error = std::current_exception();
                }
            });
    }
    for (auto& t : pool)
        t.join();
    if (first_error)
        std::rethrow_exception(first_error);
}

} // namespace beamrate

#endif
