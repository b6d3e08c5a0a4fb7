/*
 * Copyright 2026 The zigar Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace zigar
{

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Counter-based seed derivation: the seed of a job depends only on the
/// master seed and the job's keys, never on scheduling order.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> keys)
{
    std::uint64_t h = splitmix64(master);
    for (auto k : keys)
    {
        h = splitmix64(h ^ splitmix64(k + 0x632be59bd9b4e019ULL));
    }
    return h;
}

// Stream tags for derive_seed.
namespace stream
{
inline constexpr std::uint64_t latent = 1;
inline constexpr std::uint64_t structural = 2;
inline constexpr std::uint64_t noise = 3;
inline constexpr std::uint64_t validation = 4;
inline constexpr std::uint64_t pilot = 5;
inline constexpr std::uint64_t coefficients = 6;
inline constexpr std::uint64_t folds = 7;
inline constexpr std::uint64_t train = 8;
}  // namespace stream

}  // namespace zigar
