// SPDX-License-Identifier: Apache-2.0
//
// dfeval - statistical evaluation toolkit for direction-finding antennas
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "dfeval/modeselect.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "dfeval/rng.hpp"

namespace dfeval {

void StructureRecord::validate() const {
    if (diameter_m <= 0.0)
        throw std::invalid_argument("structure " + name + ": diameter must be positive");
    if (height_to_width <= 0.0)
        throw std::invalid_argument("structure " + name + ": height_to_width must be positive");
    std::set<std::string> ids;
    for (const auto& m : modes)
        if (!ids.insert(m.mode_id).second)
            throw std::invalid_argument("structure " + name + ": duplicate mode id " + m.mode_id);
    std::map<std::string, double> group_eigenvalue;
    for (const auto& m : modes) {
        if (m.degeneracy_group.empty())
            continue;
        auto [it, inserted] = group_eigenvalue.emplace(m.degeneracy_group, m.eigenvalue);
        if (!inserted) {
            const double ref = it->second;
            const double scale = std::max(std::abs(ref), 1e-30);
            if (std::abs(m.eigenvalue - ref) > 1e-6 * scale)
                throw std::invalid_argument("structure " + name + ": degeneracy group " +
                                            m.degeneracy_group + " has unequal eigenvalues");
        }
    }
}

std::vector<ModeSet> enumerate_admissible_sets(const StructureRecord& s,
                                               double max_eigenvalue_magnitude) {
    if (s.modes.empty())
        throw std::invalid_argument("enumerate_admissible_sets: structure has no modes");
    s.validate();

    // Units: complete degeneracy groups, or single non-degenerate modes.
    // Enumerating over units makes the complete-set criterion structural.
    std::map<std::string, std::vector<std::size_t>> groups;
    std::vector<std::vector<std::size_t>> units;
    for (std::size_t i = 0; i < s.modes.size(); ++i) {
        const auto& g = s.modes[i].degeneracy_group;
        if (g.empty())
            units.push_back({i});
        else
            groups[g].push_back(i);
    }
    for (auto& [g, members] : groups)
        units.push_back(members);

    if (units.size() > 24)
        throw std::invalid_argument("enumerate_admissible_sets: too many mode units");

    std::vector<ModeSet> out;
    for (std::uint64_t mask = 1; mask < (1ULL << units.size()); ++mask) {
        std::vector<std::size_t> members;
        for (std::size_t u = 0; u < units.size(); ++u)
            if (mask & (1ULL << u))
                members.insert(members.end(), units[u].begin(), units[u].end());
        if (members.size() < 3)
            continue;

        bool ok = true;
        std::set<std::string> nondeg_classes;
        for (std::size_t i : members) {
            const auto& m = s.modes[i];
            if (std::abs(m.eigenvalue) >= max_eigenvalue_magnitude) {
                ok = false;
                break;
            }
            if (m.degeneracy_group.empty() && !nondeg_classes.insert(m.symmetry_class).second) {
                ok = false; // two non-degenerate modes on the same port family
                break;
            }
        }
        if (!ok)
            continue;

        ModeSet set;
        for (std::size_t i : members)
            set.member_ids.push_back(s.modes[i].mode_id);
        std::sort(set.member_ids.begin(), set.member_ids.end());
        out.push_back(std::move(set));
    }
    std::sort(out.begin(), out.end(), [](const ModeSet& a, const ModeSet& b) {
        if (a.member_ids.size() != b.member_ids.size())
            return a.member_ids.size() < b.member_ids.size();
        return a.member_ids < b.member_ids;
    });
    return out;
}

namespace {

std::uint64_t set_content_seed(std::uint64_t master, const ModeSet& set) {
    std::uint64_t h = 0xcbf29ce484222325ULL; // FNV-1a over sorted member ids
    for (const auto& id : set.member_ids) {
        for (char c : id) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ULL;
        }
        h ^= 0x1f;
        h *= 0x100000001b3ULL;
    }
    return Rng::derive_seed(master, h, set.member_ids.size());
}

} // namespace

std::vector<ModeSet> rank_sets(const StructureRecord& s, std::vector<ModeSet> sets,
                               const DoaGrid& true_grid, const DoaGrid& candidate_grid,
                               const RankConfig& config) {
    std::map<std::string, const ModeRecord*> by_id;
    for (const auto& m : s.modes)
        by_id[m.mode_id] = &m;

    for (auto& set : sets) {
        PortSet ports;
        for (const auto& id : set.member_ids) {
            auto it = by_id.find(id);
            if (it == by_id.end())
                throw std::invalid_argument("rank_sets: unknown mode id " + id);
            ports.patterns.push_back(it->second->pattern);
            ports.labels.push_back(id);
        }
        MonteCarloConfig mc;
        mc.snr_db = config.snr_db;
        mc.trials_per_doa = config.trials_per_doa;
        mc.master_seed = set_content_seed(config.master_seed, set);
        mc.workers = config.workers;
        mc.ports_label = s.name + ":" + "set";
        const EvalReport report = run_monte_carlo(ports, true_grid, candidate_grid, mc);
        set.rmse_gc_deg = report.rmse_gc;
        set.rmse_az_deg = report.rmse_az;
        set.rmse_el_deg = report.rmse_el;
    }

    std::sort(sets.begin(), sets.end(), [](const ModeSet& a, const ModeSet& b) {
        if (a.rmse_gc_deg != b.rmse_gc_deg)
            return a.rmse_gc_deg < b.rmse_gc_deg;
        if (a.member_ids.size() != b.member_ids.size())
            return a.member_ids.size() < b.member_ids.size();
        return a.member_ids < b.member_ids;
    });
    return sets;
}

StructureRecord load_structure_json(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("structure file: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("structure file: invalid JSON: " + std::string(e.what()));
    }

    const auto dir_end = path.find_last_of('/');
    const std::string base_dir = dir_end == std::string::npos ? "" : path.substr(0, dir_end + 1);

    StructureRecord s;
    try {
        s.name = j.at("name").get<std::string>();
        s.diameter_m = j.at("diameter_m").get<double>();
        s.height_to_width = j.at("height_to_width").get<double>();
        s.frequency_mhz = j.at("frequency_mhz").get<double>();
        std::map<std::string, PortSet> loaded;
        for (const auto& jm : j.at("modes")) {
            ModeRecord m;
            m.mode_id = jm.at("id").get<std::string>();
            m.eigenvalue = jm.at("eigenvalue").get<double>();
            m.degeneracy_group = jm.value("degeneracy_group", std::string{});
            m.symmetry_class = jm.at("symmetry_class").get<std::string>();
            std::string pattern_file = jm.at("pattern_file").get<std::string>();
            if (!pattern_file.empty() && pattern_file[0] != '/')
                pattern_file = base_dir + pattern_file;
            const int port = jm.at("pattern_port").get<int>();
            auto it = loaded.find(pattern_file);
            if (it == loaded.end())
                it = loaded.emplace(pattern_file, load_pattern_file(pattern_file)).first;
            const PortSet& ps = it->second;
            const std::string wanted = "port" + std::to_string(port);
            auto label_it = std::find(ps.labels.begin(), ps.labels.end(), wanted);
            if (label_it == ps.labels.end())
                throw std::runtime_error("structure file: pattern_port " + std::to_string(port) +
                                         " not present in " + pattern_file);
            m.pattern = ps.patterns[static_cast<std::size_t>(label_it - ps.labels.begin())];
            s.modes.push_back(std::move(m));
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("structure file: schema violation: " + std::string(e.what()));
    }
    s.validate();
    return s;
}

void save_ranking_csv(const StructureRecord& s, const std::vector<ModeSet>& ranked,
                      const std::string& path,
                      const std::vector<std::string>& header_comments) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("save_ranking_csv: cannot write " + path);
    for (const auto& c : header_comments)
        out << "# " << c << "\n";
    out << "structure,set_members,rmse_gc_deg,rmse_az_deg,rmse_el_deg\n";
    char buf[128];
    for (const auto& set : ranked) {
        std::string members;
        for (const auto& id : set.member_ids) {
            if (!members.empty())
                members += '+';
            members += id;
        }
        std::snprintf(buf, sizeof(buf), ",%.9g,%.9g,%.9g\n", set.rmse_gc_deg, set.rmse_az_deg,
                      set.rmse_el_deg);
        out << s.name << "," << members << buf;
    }
}

} // namespace dfeval
