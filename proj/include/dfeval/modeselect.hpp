// SPDX-License-Identifier: Apache-2.0
//
// dfeval - statistical evaluation toolkit for direction-finding antennas
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <string>
#include <vector>

#include "dfeval/evaluation.hpp"
#include "dfeval/patterns.hpp"

namespace dfeval {

/// Characteristic-mode metadata plus its far-field. Degenerate modes share a
/// degeneracy_group and (to 1e-6 relative) an eigenvalue; the symmetry_class
/// label decides port assignability.
struct ModeRecord {
    std::string mode_id;
    double eigenvalue = 0.0;
    std::string degeneracy_group; // empty: non-degenerate
    std::string symmetry_class;
    FarFieldPattern pattern = FarFieldPattern::monopole();
};

struct StructureRecord {
    std::string name;
    double diameter_m = 0.0; // smallest circumscribing sphere
    double height_to_width = 0.0;
    double frequency_mhz = 0.0;
    std::vector<ModeRecord> modes;

    void validate() const;
};

struct ModeSet {
    std::vector<std::string> member_ids; // sorted
    double rmse_gc_deg = 0.0;            // filled by rank_sets
    double rmse_az_deg = 0.0;
    double rmse_el_deg = 0.0;
};

/// All subsets fulfilling the four admissibility criteria: at least three
/// modes, pairwise-distinct symmetry classes among non-degenerate members,
/// complete degeneracy groups, all |eigenvalue| below the threshold.
std::vector<ModeSet> enumerate_admissible_sets(const StructureRecord& s,
                                               double max_eigenvalue_magnitude = 3.0);

struct RankConfig {
    double snr_db = -10.0;
    std::size_t trials_per_doa = 1000;
    std::uint64_t master_seed = 1;
    std::size_t workers = 1;
};

/// Treats each set's mode patterns as port far-fields, runs the Monte-Carlo
/// evaluation, and sorts ascending by combined RMSE (ties: fewer modes, then
/// lexicographic member ids). Seeds are derived from set content, so
/// identical sets always score identically.
std::vector<ModeSet> rank_sets(const StructureRecord& s, std::vector<ModeSet> sets,
                               const DoaGrid& true_grid, const DoaGrid& candidate_grid,
                               const RankConfig& config);

StructureRecord load_structure_json(const std::string& path);

void save_ranking_csv(const StructureRecord& s, const std::vector<ModeSet>& ranked,
                      const std::string& path,
                      const std::vector<std::string>& header_comments = {});

} // namespace dfeval
