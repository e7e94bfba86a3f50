// SPDX-License-Identifier: Apache-2.0
//
// ma-isac: movable-antenna ISAC beampattern optimization
#pragma once

#include "ma_isac/pdd.hpp"
#include "ma_isac/scenario.hpp"

#include <cstdint>
#include <string>

namespace ma_isac {

enum class Scheme { PddJapb, FixedUla, RandomMa, UpperBound };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& name); // pdd | fa | random | bound

struct BaselineOptions {
    bool fa_center = false; // center the compact ULA in the aperture
    PddOptions pdd;
};

// Run one scheme on one channel realization (drawn deterministically from the
// config seed and the realization index) and report a PddResult-shaped record.
PddResult run_baseline(Scheme scheme, const ScenarioConfig& cfg, std::uint64_t realization,
                       const BaselineOptions& options = {});

} // namespace ma_isac
