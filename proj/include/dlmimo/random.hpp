// SPDX-License-Identifier: Apache-2.0
//
// dlmimo - downlink MIMO cellular network simulator comparing co-located,
// distributed and small-cell base-station antenna layouts
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

#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace dlmimo {

using RngStream = std::mt19937_64;

/// splitmix64 finalizer; full-avalanche 64-bit mix.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
    return mix64(h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
}

/// Independent substream for (seed, ids...). Streams with distinct id tuples
/// may be consumed concurrently; each individual stream is single-consumer.
template <class... Ids>
RngStream substream(std::uint64_t seed, Ids... ids) {
    std::uint64_t h = mix64(seed);
    ((h = hash_combine(h, static_cast<std::uint64_t>(ids))), ...);
    return RngStream(h);
}

/// FNV-1a over a string, for deriving substream tags from series names.
inline std::uint64_t tag64(const char* s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (; *s; ++s) h = (h ^ static_cast<unsigned char>(*s)) * 1099511628211ULL;
    return h;
}

inline double uniform01(RngStream& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

/// One CN(0,1) draw: independent real/imaginary parts N(0, 1/2).
inline std::complex<double> complex_gaussian(RngStream& rng) {
    std::normal_distribution<double> n(0.0, 0.7071067811865475244); // sqrt(1/2)
    const double re = n(rng);
    const double im = n(rng);
    return {re, im};
}

} // namespace dlmimo
